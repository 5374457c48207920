#include "doctest.h"
#include "ltm/debate.hpp"
#include "ltm/errors.hpp"
#include "test_support.hpp"

using namespace ltm;
using namespace test_support;

namespace {

const Timestamp kDay = Timestamp::civil(2020, 9, 15);

struct Rig {
    RunConfig config;
    Store store;
    HashingEmbedder embedder;
    std::unique_ptr<MemoryEngine> engine;
    std::unique_ptr<RuleBasedCore> core;
    std::unique_ptr<DebateCoordinator> coordinator;
    std::vector<std::unique_ptr<TradingAgent>> agents;
    std::map<std::string, TradingAgent*> by_id;
    std::vector<TradingAgent*> ptrs;

    explicit Rig(int n_agents) {
        config.sectors = {{"AAA", "tech"}};
        for (int i = 0; i < n_agents; ++i) {
            config.agents.push_back(TraderCharacter{
                "agent" + std::to_string(i), RiskProfile::Neutral, {"tech"}, 10000.0});
        }
        config.train_from = Timestamp::civil(2020, 9, 8);
        config.train_to = Timestamp::civil(2020, 9, 20);
        config.test_from = Timestamp::civil(2020, 9, 21);
        config.test_to = Timestamp::civil(2020, 9, 30);
        engine = std::make_unique<MemoryEngine>(store, config.layers, embedder);
        core = std::make_unique<RuleBasedCore>(config.decision);
        coordinator = std::make_unique<DebateCoordinator>(config, store, *core);
        for (const auto& character : config.agents) {
            agents.push_back(
                std::make_unique<TradingAgent>(character, config, store, *engine));
            by_id[character.agent_id] = agents.back().get();
            ptrs.push_back(agents.back().get());
        }
        for (int i = 0; i < 8; ++i) {
            const double close = 100.0 + i;
            const Timestamp ts = kDay.add_days(i - 7).at(16, 0);
            store.append(
                PriceBar{"AAA", ts, close, close * 1.01, close * 0.99, close, 1000});
        }
    }

    DecisionContext context_for(const std::string& agent_id) {
        return by_id.at(agent_id)->build_context("AAA", kDay, Phase::Train);
    }
};

} // namespace

TEST_SUITE("debate") {

TEST_CASE("a session needs at least two eligible agents") {
    Rig rig(3);
    std::map<std::string, Recommendation> decisions;
    for (const auto& [id, _] : rig.by_id) {
        decisions[id] = Recommendation{TradeAction::Hold, "x"};
    }
    // nobody holds or traded: no session
    CHECK(!rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions));

    // one holder is still not enough
    rig.by_id["agent0"]->execute(Recommendation{TradeAction::SigIncrease, "x"}, "AAA",
                                 100.0, kDay.at(16, 5));
    CHECK(!rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions));

    // a second agent trading today forms a session; participants sort by id
    rig.by_id["agent2"]->execute(Recommendation{TradeAction::SigIncrease, "x"}, "AAA",
                                 100.0, kDay.at(16, 5));
    const auto session = rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions);
    REQUIRE(session);
    CHECK(session->participants == std::vector<std::string>{"agent0", "agent2"});

    // eligibility equals the portfolio-plus-ledger oracle
    std::vector<std::string> oracle;
    for (TradingAgent* agent : rig.ptrs) {
        bool traded_today = false;
        for (const auto& exec : agent->portfolio().ledger) {
            traded_today |= exec.ticker == "AAA" &&
                            exec.timestamp.start_of_day() == kDay.start_of_day();
        }
        if (agent->portfolio().shares("AAA") > 0 || traded_today) {
            oracle.push_back(agent->id());
        }
    }
    std::sort(oracle.begin(), oracle.end());
    CHECK(session->participants == oracle);
}

TEST_CASE("each round is a complete receiver-tagged exchange feeding short memory") {
    Rig rig(3);
    std::map<std::string, Recommendation> decisions;
    std::map<std::string, DecisionContext> contexts;
    std::map<std::string, PackageFigures> figures;
    for (const auto& [id, agent] : rig.by_id) {
        agent->execute(Recommendation{TradeAction::SigIncrease, "x"}, "AAA", 100.0,
                       kDay.at(16, 5));
        contexts[id] = rig.context_for(id);
        decisions[id] = Recommendation{TradeAction::SlightIncrease, "ride"};
        figures[id] = PackageFigures{25, 0.01};
    }
    auto session = rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions);
    REQUIRE(session);
    const int n = static_cast<int>(session->participants.size());
    REQUIRE(n == 3);

    std::map<std::string, std::size_t> short_before;
    for (const auto& id : session->participants) {
        short_before[id] = rig.store.layer_size(id, LayerKind::Short);
    }

    for (int round = 1; round <= rig.coordinator->max_rounds(); ++round) {
        const auto messages = rig.coordinator->exchange_round(
            *session, rig.by_id, contexts, figures, kDay.at(16, 29 + round));
        CHECK(static_cast<int>(messages.size()) == n * (n - 1));
        for (const auto& m : messages) {
            CHECK(m.sender_id != m.receiver_id);
            CHECK(m.round == round);
            CHECK(m.payload.stance == TradeAction::SlightIncrease);
            CHECK(m.payload.volume == 25);
            CHECK(m.payload.feedback.find("agree") != std::string::npos);
        }
        // every receiver's short layer grows by exactly n-1 per round
        for (const auto& id : session->participants) {
            CHECK(rig.store.layer_size(id, LayerKind::Short) ==
                  short_before[id] + static_cast<std::size_t>(round * (n - 1)));
        }
    }
    // total stored messages: rounds * n * (n-1), all session-tagged
    std::size_t stored = 0;
    for (const auto& m : rig.store.debate_messages()) {
        if (m.session_id == session->session_id) ++stored;
    }
    CHECK(stored == static_cast<std::size_t>(rig.coordinator->max_rounds() * n * (n - 1)));

    // feedback memories carry the session id (no cross-session leakage)
    for (const MemoryEvent* event : rig.store.cohort("agent0", LayerKind::Short,
                                                     kDay.at(23, 0))) {
        if (event->origin == MemoryOrigin::DebateFeedback) {
            CHECK(event->text.find(session->session_id) != std::string::npos);
        }
    }

    // a third round beyond max_rounds is refused
    CHECK_THROWS_AS(rig.coordinator->exchange_round(*session, rig.by_id, contexts, figures,
                                                    kDay.at(16, 40)),
                    Error);
}

TEST_CASE("finalize applies the majority-notch revision") {
    Rig rig(3);
    std::map<std::string, Recommendation> decisions;
    std::map<std::string, DecisionContext> contexts;
    std::map<std::string, PackageFigures> figures;
    for (const auto& [id, agent] : rig.by_id) {
        agent->execute(Recommendation{TradeAction::SlightIncrease, "x"}, "AAA", 100.0,
                       kDay.at(16, 5));
        contexts[id] = rig.context_for(id);
        figures[id] = PackageFigures{};
    }
    // agent0 stands against two sellers
    decisions["agent0"] = Recommendation{TradeAction::SlightIncrease, "momentum"};
    decisions["agent1"] = Recommendation{TradeAction::SlightDecrease, "fade"};
    decisions["agent2"] = Recommendation{TradeAction::SigDecrease, "fade hard"};

    auto session = rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions);
    REQUIRE(session);
    CHECK_THROWS_AS(rig.coordinator->finalize(*session, contexts), Error); // rounds pending
    for (int round = 1; round <= rig.coordinator->max_rounds(); ++round) {
        rig.coordinator->exchange_round(*session, rig.by_id, contexts, figures,
                                        kDay.at(16, 29 + round));
    }
    const auto revised = rig.coordinator->finalize(*session, contexts);
    CHECK(revised.at("agent0").action == TradeAction::Hold); // one notch down
    CHECK(revised.at("agent1").action == TradeAction::SlightDecrease); // with majority
    CHECK(revised.at("agent2").action == TradeAction::SigDecrease);
}

TEST_CASE("a participant whose core fails abstains for the round") {
    Rig rig(3);
    CoreConfig dead;
    dead.kind = "chat";
    dead.endpoint = "http://127.0.0.1:9/unreachable";
    dead.timeout_ms = 100;
    dead.strict = true;
    ChatCompletionCore dead_core(dead);
    DebateCoordinator coordinator(rig.config, rig.store, dead_core);

    std::map<std::string, Recommendation> decisions;
    std::map<std::string, DecisionContext> contexts;
    std::map<std::string, PackageFigures> figures;
    for (const auto& [id, agent] : rig.by_id) {
        agent->execute(Recommendation{TradeAction::SigIncrease, "x"}, "AAA", 100.0,
                       kDay.at(16, 5));
        contexts[id] = rig.context_for(id);
        decisions[id] = Recommendation{TradeAction::Hold, "x"};
        figures[id] = PackageFigures{};
    }
    auto session = coordinator.convene(kDay, "AAA", rig.ptrs, decisions);
    REQUIRE(session);
    const auto messages = coordinator.exchange_round(*session, rig.by_id, contexts, figures,
                                                     kDay.at(16, 30));
    CHECK(messages.empty()); // everyone abstained, nobody crashed
    CHECK(session->rounds_completed == 1);
}

TEST_CASE("unanimous sessions revise nothing and transcripts are deterministic") {
    auto transcript = [&] {
        Rig rig(3);
        std::map<std::string, Recommendation> decisions;
        std::map<std::string, DecisionContext> contexts;
        std::map<std::string, PackageFigures> figures;
        for (const auto& [id, agent] : rig.by_id) {
            agent->execute(Recommendation{TradeAction::SigIncrease, "x"}, "AAA", 100.0,
                           kDay.at(16, 5));
            contexts[id] = rig.context_for(id);
            decisions[id] = Recommendation{TradeAction::SigIncrease, "strong"};
            figures[id] = PackageFigures{};
        }
        auto session = rig.coordinator->convene(kDay, "AAA", rig.ptrs, decisions);
        for (int round = 1; round <= rig.coordinator->max_rounds(); ++round) {
            rig.coordinator->exchange_round(*session, rig.by_id, contexts, figures,
                                            kDay.at(16, 29 + round));
        }
        const auto revised = rig.coordinator->finalize(*session, contexts);
        for (const auto& [id, rec] : revised) {
            CHECK(rec.action == TradeAction::SigIncrease);
        }
        std::string dump;
        for (const auto& m : rig.store.debate_messages()) {
            dump += m.session_id + "|" + std::to_string(m.round) + "|" + m.sender_id + ">" +
                    m.receiver_id + "|" + m.payload.feedback + "\n";
        }
        return dump;
    };
    const std::string a = transcript();
    CHECK(!a.empty());
    CHECK(a == transcript());
}

} // TEST_SUITE
