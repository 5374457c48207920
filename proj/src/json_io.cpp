#include "ltm/json_io.hpp"

#include "ltm/errors.hpp"

namespace ltm {

// ---- enum string forms ----

const char* to_string(LayerKind layer) {
    switch (layer) {
        case LayerKind::Short: return "short";
        case LayerKind::Middle: return "middle";
        case LayerKind::Long: return "long";
    }
    return "short";
}

LayerKind layer_from_string(const std::string& s) {
    if (s == "short") return LayerKind::Short;
    if (s == "middle") return LayerKind::Middle;
    if (s == "long") return LayerKind::Long;
    fail(ErrorCode::SchemaViolation, "unknown layer '" + s + "'");
}

const char* to_string(MemoryOrigin origin) {
    switch (origin) {
        case MemoryOrigin::MarketNews: return "market_news";
        case MemoryOrigin::MacroIndicator: return "macro_indicator";
        case MemoryOrigin::StrategyDoc: return "strategy_doc";
        case MemoryOrigin::ImmediateReflection: return "immediate_reflection";
        case MemoryOrigin::ExtendedReflection: return "extended_reflection";
        case MemoryOrigin::DebateFeedback: return "debate_feedback";
        case MemoryOrigin::TradeOutcome: return "trade_outcome";
    }
    return "market_news";
}

MemoryOrigin origin_from_string(const std::string& s) {
    if (s == "market_news") return MemoryOrigin::MarketNews;
    if (s == "macro_indicator") return MemoryOrigin::MacroIndicator;
    if (s == "strategy_doc") return MemoryOrigin::StrategyDoc;
    if (s == "immediate_reflection") return MemoryOrigin::ImmediateReflection;
    if (s == "extended_reflection") return MemoryOrigin::ExtendedReflection;
    if (s == "debate_feedback") return MemoryOrigin::DebateFeedback;
    if (s == "trade_outcome") return MemoryOrigin::TradeOutcome;
    fail(ErrorCode::SchemaViolation, "unknown origin '" + s + "'");
}

const char* to_string(TradeDirection d) {
    return d == TradeDirection::Buy ? "buy" : "sell";
}

TradeDirection direction_from_string(const std::string& s) {
    if (s == "buy" || s == "Buy" || s == "BUY") return TradeDirection::Buy;
    if (s == "sell" || s == "Sell" || s == "SELL") return TradeDirection::Sell;
    fail(ErrorCode::SchemaViolation, "unknown direction '" + s + "'");
}

const char* to_string(RiskProfile r) {
    switch (r) {
        case RiskProfile::Seeking: return "seeking";
        case RiskProfile::Neutral: return "neutral";
        case RiskProfile::Averse: return "averse";
    }
    return "neutral";
}

RiskProfile risk_from_string(const std::string& s) {
    if (s == "seeking") return RiskProfile::Seeking;
    if (s == "neutral") return RiskProfile::Neutral;
    if (s == "averse") return RiskProfile::Averse;
    fail(ErrorCode::ConfigError, "unknown risk profile '" + s + "'");
}

const char* to_string(TradeAction a) {
    switch (a) {
        case TradeAction::SigDecrease: return "significant_decrease";
        case TradeAction::SlightDecrease: return "slight_decrease";
        case TradeAction::Hold: return "hold";
        case TradeAction::SlightIncrease: return "slight_increase";
        case TradeAction::SigIncrease: return "significant_increase";
    }
    return "hold";
}

TradeAction action_from_string(const std::string& s) {
    if (s == "significant_decrease") return TradeAction::SigDecrease;
    if (s == "slight_decrease") return TradeAction::SlightDecrease;
    if (s == "hold") return TradeAction::Hold;
    if (s == "slight_increase") return TradeAction::SlightIncrease;
    if (s == "significant_increase") return TradeAction::SigIncrease;
    fail(ErrorCode::SchemaViolation, "unknown action '" + s + "'");
}

const char* action_phrase(TradeAction a) {
    switch (a) {
        case TradeAction::SigDecrease: return "significantly decrease position";
        case TradeAction::SlightDecrease: return "slightly decrease position";
        case TradeAction::Hold: return "hold";
        case TradeAction::SlightIncrease: return "slightly increase position";
        case TradeAction::SigIncrease: return "significantly increase position";
    }
    return "hold";
}

std::optional<TradeAction> action_from_phrase(const std::string& first_line) {
    for (TradeAction a : {TradeAction::SigDecrease, TradeAction::SlightDecrease,
                          TradeAction::Hold, TradeAction::SlightIncrease,
                          TradeAction::SigIncrease}) {
        if (first_line == action_phrase(a)) return a;
    }
    return std::nullopt;
}

TradeAction step_action(TradeAction a, int direction) {
    int v = static_cast<int>(a);
    if (direction > 0) v = std::min(v + 1, static_cast<int>(TradeAction::SigIncrease));
    if (direction < 0) v = std::max(v - 1, static_cast<int>(TradeAction::SigDecrease));
    return static_cast<TradeAction>(v);
}

const char* to_string(TradeSide s) { return s == TradeSide::Buy ? "buy" : "sell"; }

TradeSide side_from_string(const std::string& s) {
    if (s == "buy") return TradeSide::Buy;
    if (s == "sell") return TradeSide::Sell;
    fail(ErrorCode::SchemaViolation, "unknown side '" + s + "'");
}

// ---- raw records ----

json to_json(const PriceBar& bar, std::uint64_t id) {
    return json{{"id", id},
                {"kind", "price_bar"},
                {"ticker", bar.ticker},
                {"timestamp", bar.timestamp.to_string()},
                {"payload",
                 {{"open", bar.open},
                  {"high", bar.high},
                  {"low", bar.low},
                  {"close", bar.close},
                  {"volume", bar.volume}}}};
}

json to_json(const NewsItem& item, std::uint64_t id) {
    return json{{"id", id},
                {"kind", "news_item"},
                {"ticker", item.ticker},
                {"timestamp", item.timestamp.to_string()},
                {"payload", {{"headline", item.headline}, {"body", item.body}}}};
}

json to_json(const HoldingRecord& record, std::uint64_t id) {
    return json{{"id", id},
                {"kind", "holding_record"},
                {"ticker", record.ticker},
                {"timestamp", record.timestamp.to_string()},
                {"payload",
                 {{"fund", record.fund},
                  {"shares", record.shares},
                  {"direction", to_string(record.direction)}}}};
}

PriceBar price_bar_from_json(const json& j) {
    const auto& p = j.at("payload");
    return PriceBar{j.at("ticker").get<std::string>(),
                    Timestamp::parse(j.at("timestamp").get<std::string>()),
                    p.at("open").get<double>(),
                    p.at("high").get<double>(),
                    p.at("low").get<double>(),
                    p.at("close").get<double>(),
                    p.at("volume").get<std::int64_t>()};
}

NewsItem news_item_from_json(const json& j) {
    const auto& p = j.at("payload");
    return NewsItem{j.at("ticker").get<std::string>(),
                    Timestamp::parse(j.at("timestamp").get<std::string>()),
                    p.at("headline").get<std::string>(), p.at("body").get<std::string>()};
}

HoldingRecord holding_from_json(const json& j) {
    const auto& p = j.at("payload");
    return HoldingRecord{p.at("fund").get<std::string>(), j.at("ticker").get<std::string>(),
                         Timestamp::parse(j.at("timestamp").get<std::string>()),
                         p.at("shares").get<std::int64_t>(),
                         direction_from_string(p.at("direction").get<std::string>())};
}

// ---- cognition records ----

json memory_event_to_json(const MemoryEvent& event) {
    return json{{"id", event.id},
                {"agent_id", event.agent_id},
                {"layer", to_string(event.layer)},
                {"text", event.text},
                {"timestamp", event.timestamp.to_string()},
                {"access_count", event.access_count},
                {"last_relevancy", event.last_relevancy},
                {"origin", to_string(event.origin)},
                {"pinned", event.pinned}};
}

MemoryEvent memory_event_from_json(const json& j) {
    MemoryEvent event;
    event.id = j.at("id").get<std::string>();
    event.agent_id = j.at("agent_id").get<std::string>();
    event.layer = layer_from_string(j.at("layer").get<std::string>());
    event.text = j.at("text").get<std::string>();
    event.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
    event.access_count = j.at("access_count").get<int>();
    event.last_relevancy = j.at("last_relevancy").get<double>();
    event.origin = origin_from_string(j.at("origin").get<std::string>());
    event.pinned = j.at("pinned").get<bool>();
    return event;
}

json reflection_to_json(const Reflection& r) {
    json j{{"flag", r.flag == ReflectionFlag::Immediate ? "immediate" : "extended"},
           {"agent_id", r.agent_id}};
    if (r.flag == ReflectionFlag::Immediate) {
        j["ticker"] = r.ticker;
        j["recommendation"] =
            json{{"action", to_string(r.recommendation.action)},
                 {"rationale", r.recommendation.rationale}};
    } else {
        j["period"] = json{{"from", r.period_from.date_string()},
                           {"to", r.period_to.date_string()}};
    }
    j["rationale"] = r.rationale;
    j["trade_volume"] = r.trade_volume;
    j["realized_return"] = r.realized_return;
    j["timestamp"] = r.timestamp.to_string();
    return j;
}

Reflection reflection_from_json(const json& j) {
    Reflection r;
    r.flag = j.at("flag").get<std::string>() == "immediate" ? ReflectionFlag::Immediate
                                                            : ReflectionFlag::Extended;
    r.agent_id = j.at("agent_id").get<std::string>();
    if (r.flag == ReflectionFlag::Immediate) {
        r.ticker = j.at("ticker").get<std::string>();
        r.recommendation.action =
            action_from_string(j.at("recommendation").at("action").get<std::string>());
        r.recommendation.rationale = j.at("recommendation").at("rationale").get<std::string>();
    } else {
        r.period_from = Timestamp::parse(j.at("period").at("from").get<std::string>());
        r.period_to = Timestamp::parse(j.at("period").at("to").get<std::string>());
    }
    r.rationale = j.at("rationale").get<std::string>();
    r.trade_volume = j.at("trade_volume").get<std::int64_t>();
    r.realized_return = j.at("realized_return").get<double>();
    r.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
    return r;
}

json debate_message_to_json(const DebateMessage& m) {
    json memories = json::array();
    for (const auto& ref : m.payload.memories) {
        memories.push_back(json{{"id", ref.id}, {"gamma", ref.gamma}, {"text", ref.text}});
    }
    json payload{{"memories", memories},
                 {"stance", to_string(m.payload.stance)},
                 {"trade_value", m.payload.trade_value},
                 {"volume", m.payload.volume},
                 {"realized_return", m.payload.realized_return},
                 {"feedback", m.payload.feedback}};
    payload["revised_action"] =
        m.payload.revised_action ? json(to_string(*m.payload.revised_action)) : json(nullptr);
    return json{{"session_id", m.session_id},
                {"round", m.round},
                {"sender_id", m.sender_id},
                {"receiver_id", m.receiver_id},
                {"ticker", m.ticker},
                {"timestamp", m.timestamp.to_string()},
                {"payload", payload}};
}

DebateMessage debate_message_from_json(const json& j) {
    DebateMessage m;
    m.session_id = j.at("session_id").get<std::string>();
    m.round = j.at("round").get<int>();
    m.sender_id = j.at("sender_id").get<std::string>();
    m.receiver_id = j.at("receiver_id").get<std::string>();
    m.ticker = j.at("ticker").get<std::string>();
    m.timestamp = Timestamp::parse(j.at("timestamp").get<std::string>());
    const auto& p = j.at("payload");
    for (const auto& ref : p.at("memories")) {
        m.payload.memories.push_back(SharedMemoryRef{ref.at("id").get<std::string>(),
                                                     ref.at("gamma").get<double>(),
                                                     ref.at("text").get<std::string>()});
    }
    m.payload.stance = action_from_string(p.at("stance").get<std::string>());
    m.payload.trade_value = p.at("trade_value").get<double>();
    m.payload.volume = p.at("volume").get<std::int64_t>();
    m.payload.realized_return = p.at("realized_return").get<double>();
    m.payload.feedback = p.at("feedback").get<std::string>();
    if (!p.at("revised_action").is_null()) {
        m.payload.revised_action = action_from_string(p.at("revised_action").get<std::string>());
    }
    return m;
}

std::string format_double(double v) { return json(v).dump(); }

} // namespace ltm
