#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "ltm/backtest.hpp"
#include "ltm/decision.hpp"
#include "ltm/errors.hpp"
#include "ltm/market_data.hpp"
#include "test_support.hpp"

using namespace ltm;
using namespace test_support;

namespace {

const Timestamp kDate = Timestamp::civil(2020, 9, 10);

// Six-bar close series ending at `base * (1 + m)` so momentum is exactly m.
DecisionContext context_with_momentum(double m, RiskProfile risk,
                                      Phase phase = Phase::Train) {
    DecisionContext ctx;
    ctx.character = TraderCharacter{"agent", risk, {"tech"}, 10000.0};
    ctx.ticker = "AAA";
    ctx.date = kDate;
    ctx.phase = phase;
    const double base = 100.0;
    for (int i = 0; i < 5; ++i) {
        ctx.recent_closes.emplace_back(kDate.add_days(i - 5).at(16, 0), base);
    }
    ctx.recent_closes.emplace_back(kDate.at(16, 0), base * (1.0 + m));
    return ctx;
}

HoldingRecord fund(double shares) {
    return HoldingRecord{"arkx", "AAA", kDate.at(16, 0),
                         static_cast<std::int64_t>(shares),
                         shares > 0 ? TradeDirection::Buy : TradeDirection::Sell};
}

int strength_toward(double momentum, TradeAction a) {
    // action strength ordered toward the momentum sign
    const int dir = momentum >= 0 ? 1 : -1;
    return dir * (static_cast<int>(a) - static_cast<int>(TradeAction::Hold));
}

} // namespace

TEST_SUITE("decision") {

TEST_CASE("zero momentum holds for every character") {
    RuleBasedCore core{DecisionParams{}};
    for (RiskProfile risk : {RiskProfile::Seeking, RiskProfile::Neutral, RiskProfile::Averse}) {
        CHECK(core.decide(context_with_momentum(0.0, risk)).action == TradeAction::Hold);
    }
}

TEST_CASE("threshold table maps momentum to the five actions") {
    RuleBasedCore core{DecisionParams{}};
    CHECK(core.decide(context_with_momentum(0.02, RiskProfile::Neutral)).action ==
          TradeAction::SlightIncrease);
    CHECK(core.decide(context_with_momentum(0.02, RiskProfile::Seeking)).action ==
          TradeAction::SigIncrease); // thresholds halve to 0.5%/1.5%
    CHECK(core.decide(context_with_momentum(0.02, RiskProfile::Averse)).action ==
          TradeAction::SlightIncrease); // thresholds stretch to 1.5%/4.5%
    CHECK(core.decide(context_with_momentum(0.012, RiskProfile::Averse)).action ==
          TradeAction::Hold);

    // boundaries sit inside the stronger bucket
    CHECK(core.decide(context_with_momentum(0.01, RiskProfile::Neutral)).action ==
          TradeAction::SlightIncrease);
    CHECK(core.decide(context_with_momentum(0.03, RiskProfile::Neutral)).action ==
          TradeAction::SigIncrease);
    CHECK(core.decide(context_with_momentum(0.0099, RiskProfile::Neutral)).action ==
          TradeAction::Hold);
    CHECK(core.decide(context_with_momentum(-0.01, RiskProfile::Neutral)).action ==
          TradeAction::SlightDecrease);
    CHECK(core.decide(context_with_momentum(-0.03, RiskProfile::Neutral)).action ==
          TradeAction::SigDecrease);
}

TEST_CASE("conflicting fund flow steps the action one notch in training") {
    RuleBasedCore core{DecisionParams{}};
    DecisionContext ctx = context_with_momentum(0.02, RiskProfile::Neutral);
    ctx.fund_records.push_back(fund(-500));
    CHECK(core.decide(ctx).action == TradeAction::Hold); // SlightIncrease stepped down

    DecisionContext down = context_with_momentum(-0.05, RiskProfile::Neutral);
    down.fund_records.push_back(fund(+500));
    CHECK(core.decide(down).action == TradeAction::SlightDecrease); // SigDecrease stepped up

    // aligned flow leaves the action alone
    DecisionContext aligned = context_with_momentum(0.02, RiskProfile::Neutral);
    aligned.fund_records.push_back(fund(+500));
    CHECK(core.decide(aligned).action == TradeAction::SlightIncrease);

    // mixed records net out by shares
    DecisionContext netted = context_with_momentum(0.02, RiskProfile::Neutral);
    netted.fund_records.push_back(fund(+300));
    netted.fund_records.push_back(fund(-800));
    CHECK(core.decide(netted).action == TradeAction::Hold);

    // fund records are ignored outside training
    DecisionContext test_ctx = context_with_momentum(0.02, RiskProfile::Neutral, Phase::Test);
    CHECK(core.decide(test_ctx).action == TradeAction::SlightIncrease);
}

TEST_CASE("insufficient history raises") {
    RuleBasedCore core{DecisionParams{}};
    DecisionContext ctx = context_with_momentum(0.0, RiskProfile::Neutral);
    ctx.recent_closes.erase(ctx.recent_closes.begin(), ctx.recent_closes.begin() + 2);
    CHECK_THROWS_AS(core.decide(ctx), Error);
    try {
        core.decide(ctx);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientHistory);
    }
}

TEST_CASE("risk scaling never weakens seeking nor strengthens averse") {
    RuleBasedCore core{DecisionParams{}};
    Rng rng(41);
    for (int i = 0; i < 2000; ++i) {
        const double m = rng.uniform(-0.08, 0.08);
        DecisionContext neutral = context_with_momentum(m, RiskProfile::Neutral);
        DecisionContext seeking = context_with_momentum(m, RiskProfile::Seeking);
        DecisionContext averse = context_with_momentum(m, RiskProfile::Averse);
        if (rng.uniform() < 0.3) {
            const auto flow = fund(rng.uniform() < 0.5 ? 400.0 : -400.0);
            neutral.fund_records.push_back(flow);
            seeking.fund_records.push_back(flow);
            averse.fund_records.push_back(flow);
        }
        const int sn = strength_toward(m, core.decide(neutral).action);
        const int ss = strength_toward(m, core.decide(seeking).action);
        const int sa = strength_toward(m, core.decide(averse).action);
        REQUIRE(ss >= sn);
        REQUIRE(sa <= sn);
    }
}

TEST_CASE("the core is a pure function of the context") {
    RuleBasedCore core{DecisionParams{}};
    const DecisionContext ctx = context_with_momentum(0.017, RiskProfile::Seeking);
    const Recommendation a = core.decide(ctx);
    const Recommendation b = core.decide(ctx);
    CHECK(a.action == b.action);
    CHECK(a.rationale == b.rationale);
}

TEST_CASE("golden decisions over fixture contexts stay frozen") {
    TempDir dir("golden");
    FixtureSpec spec;
    spec.days = 20;
    spec.tickers = {"AAA", "BBB", "CCC"};
    spec.seed = 7;
    spec.out_dir = dir.path();
    generate_fixtures(spec);
    const RunConfig config = RunConfig::load(dir.path() / "config.json");
    auto embedder = make_embedder(config.embedding);
    Store store;
    ingest_prices(store, dir.path() / "prices.csv", PriceFrequency::Daily);
    ingest_holdings(store, dir.path() / "holdings.csv");
    ingest_news(store, dir.path() / "news.jsonl", config, *embedder);
    MemoryEngine engine(store, config.layers, *embedder);
    RuleBasedCore core(config.decision);

    struct Golden {
        const char* date;
        const char* agent;
        const char* ticker;
        TradeAction action;
    };
    const Golden expected[] = {
        {"2020-08-20", "alpha", "AAA", TradeAction::SlightDecrease},
        {"2020-08-20", "alpha", "BBB", TradeAction::SigDecrease},
        {"2020-08-20", "bravo", "AAA", TradeAction::SlightDecrease},
        {"2020-08-20", "bravo", "CCC", TradeAction::SlightIncrease},
        {"2020-08-20", "charlie", "AAA", TradeAction::Hold},
        {"2020-08-20", "charlie", "BBB", TradeAction::SigDecrease},
        {"2020-08-20", "charlie", "CCC", TradeAction::SlightIncrease},
        {"2020-08-21", "alpha", "AAA", TradeAction::SlightIncrease},
        {"2020-08-21", "alpha", "BBB", TradeAction::SigDecrease},
        {"2020-08-21", "bravo", "AAA", TradeAction::Hold},
        {"2020-08-21", "bravo", "CCC", TradeAction::SigIncrease},
        {"2020-08-21", "charlie", "AAA", TradeAction::Hold},
        {"2020-08-21", "charlie", "BBB", TradeAction::SlightDecrease},
        {"2020-08-21", "charlie", "CCC", TradeAction::SlightIncrease},
        {"2020-08-22", "alpha", "AAA", TradeAction::SigIncrease},
        {"2020-08-22", "alpha", "BBB", TradeAction::SigDecrease},
        {"2020-08-22", "bravo", "AAA", TradeAction::SlightIncrease},
        {"2020-08-22", "bravo", "CCC", TradeAction::SigIncrease},
        {"2020-08-22", "charlie", "AAA", TradeAction::SlightIncrease},
        {"2020-08-22", "charlie", "BBB", TradeAction::SlightDecrease},
        {"2020-08-22", "charlie", "CCC", TradeAction::SigIncrease},
    };
    for (const Golden& g : expected) {
        const TraderCharacter* character = config.find_agent(g.agent);
        REQUIRE(character != nullptr);
        TradingAgent agent(*character, config, store, engine);
        const DecisionContext ctx =
            agent.build_context(g.ticker, Timestamp::parse(g.date), Phase::Train);
        INFO(g.date, " ", g.agent, " ", g.ticker);
        CHECK(core.decide(ctx).action == g.action);
    }
}

TEST_CASE("majority notch revises only under two-to-one opposition") {
    using A = TradeAction;
    // unanimous agreement: unchanged
    CHECK(RuleBasedCore::majority_notch(A::SlightIncrease,
                                        {A::SigIncrease, A::SlightIncrease}) ==
          A::SlightIncrease);
    // outnumbered two-to-zero: step toward the majority
    CHECK(RuleBasedCore::majority_notch(A::SlightIncrease,
                                        {A::SlightDecrease, A::SigDecrease}) == A::Hold);
    CHECK(RuleBasedCore::majority_notch(A::SigDecrease,
                                        {A::SlightIncrease, A::SigIncrease}) ==
          A::SlightDecrease);
    // a hold agent joins a dominant majority one notch at a time
    CHECK(RuleBasedCore::majority_notch(A::Hold, {A::SigIncrease, A::SlightIncrease}) ==
          A::SlightIncrease);
    // split peers leave the stance alone
    CHECK(RuleBasedCore::majority_notch(A::SlightIncrease,
                                        {A::SlightDecrease, A::SigIncrease}) ==
          A::SlightIncrease);
    // a single opposing peer is not a two-to-one majority
    CHECK(RuleBasedCore::majority_notch(A::SlightIncrease, {A::SlightDecrease}) ==
          A::SlightIncrease);
}

TEST_CASE("prompt rendering is deterministic and phase-aware") {
    DecisionContext ctx = context_with_momentum(0.02, RiskProfile::Neutral);
    ctx.fund_records.push_back(fund(+700));
    const std::string train_prompt = render_prompt(ctx, PromptPhase::Train);
    CHECK(train_prompt == render_prompt(ctx, PromptPhase::Train));
    CHECK(train_prompt.find("fund arkx buy 700 AAA") != std::string::npos);

    const std::string test_prompt = render_prompt(ctx, PromptPhase::Test);
    CHECK(test_prompt.find("fund arkx") == std::string::npos);
    CHECK(test_prompt.find("closing price only") != std::string::npos);

    for (TradeAction a :
         {TradeAction::SigDecrease, TradeAction::SlightDecrease, TradeAction::Hold,
          TradeAction::SlightIncrease, TradeAction::SigIncrease}) {
        CHECK(train_prompt.find(action_phrase(a)) != std::string::npos);
    }
    CHECK(std::string(kPromptTemplateVersion).find("prompts-") == 0);
}

TEST_CASE("prompt length stays bounded by K and the windows") {
    HashingEmbedder embedder;
    DecisionContext ctx = context_with_momentum(0.0, RiskProfile::Neutral, Phase::Test);
    constexpr std::size_t kMaxMemoryText = 40;
    for (LayerKind layer : kAllLayers) {
        for (int i = 0; i < 3; ++i) {
            ScoredEvent scored;
            scored.event = make_event("agent", layer, "memory text " + std::to_string(i),
                                      kDate.add_days(-1), embedder);
            ctx.memories[static_cast<int>(layer)].push_back(scored);
        }
    }
    const std::string prompt = render_prompt(ctx, PromptPhase::Test);
    // length accounting: fixed sections plus a bounded slice per item
    const std::size_t per_memory = kMaxMemoryText + 64;
    const std::size_t bound = 1200 + 9 * per_memory + ctx.recent_closes.size() * 48;
    CHECK(prompt.size() <= bound);
}

TEST_CASE("chat core parses the five-phrase contract") {
    const Recommendation ok =
        ChatCompletionCore::parse_completion("slightly increase position\nmomentum supports");
    CHECK(ok.action == TradeAction::SlightIncrease);
    CHECK(ok.rationale == "momentum supports");

    const Recommendation bare = ChatCompletionCore::parse_completion("hold");
    CHECK(bare.action == TradeAction::Hold);

    const Recommendation bad = ChatCompletionCore::parse_completion("BUY BUY BUY");
    CHECK(bad.action == TradeAction::Hold);
    CHECK(bad.rationale == "parse-failure");
}

TEST_CASE("chat core round-trips against a local endpoint") {
    httplib::Server server;
    server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        CHECK(body.at("model") == "test-model");
        CHECK(req.get_header_value("Authorization") == "Bearer sk-unit-test");
        const std::string prompt =
            body.at("messages").at(0).at("content").get<std::string>();
        CHECK(prompt.find("Ticker: AAA") != std::string::npos);
        nlohmann::json reply{
            {"choices",
             {{{"message",
                {{"content", "significantly increase position\nstrong tape"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("LTM_TEST_API_KEY", "sk-unit-test", 1);
    CoreConfig cfg;
    cfg.kind = "chat";
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    cfg.model = "test-model";
    cfg.api_key_env = "LTM_TEST_API_KEY";
    ChatCompletionCore core(cfg);
    const Recommendation rec = core.decide(context_with_momentum(0.0, RiskProfile::Neutral));
    CHECK(rec.action == TradeAction::SigIncrease);
    CHECK(rec.rationale == "strong tape");
    unsetenv("LTM_TEST_API_KEY");

    server.stop();
    listener.join();
}

TEST_CASE("chat core endpoint failure honors strict and lenient modes") {
    CoreConfig cfg;
    cfg.kind = "chat";
    cfg.endpoint = "http://127.0.0.1:9/unreachable";
    cfg.timeout_ms = 200;
    cfg.strict = true;
    ChatCompletionCore strict(cfg);
    CHECK_THROWS_AS(strict.decide(context_with_momentum(0.0, RiskProfile::Neutral)), Error);

    cfg.strict = false;
    ChatCompletionCore lenient(cfg);
    const Recommendation rec =
        lenient.decide(context_with_momentum(0.0, RiskProfile::Neutral));
    CHECK(rec.action == TradeAction::Hold);
    CHECK(rec.rationale == "core-unavailable");
}

TEST_CASE("context auditor flags lookahead and test-phase holdings") {
    HashingEmbedder embedder;
    DecisionContext ctx = context_with_momentum(0.0, RiskProfile::Neutral, Phase::Test);
    CHECK(audit_context(ctx).empty());

    ScoredEvent future;
    future.event =
        make_event("agent", LayerKind::Short, "from tomorrow", kDate.add_days(2), embedder);
    ctx.memories[0].push_back(future);
    CHECK(audit_context(ctx).size() == 1);

    ctx.memories[0].clear();
    ctx.fund_records.push_back(fund(100));
    CHECK(audit_context(ctx).size() == 1); // holdings in a test context
    ctx.phase = Phase::Train;
    CHECK(audit_context(ctx).empty());
}

} // TEST_SUITE
