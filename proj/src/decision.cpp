#include "ltm/decision.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "httplib.h"
#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

namespace {

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+.4f%%", fraction * 100.0);
    return buf;
}

} // namespace

std::vector<std::string> DecisionContext::cited_ids() const {
    std::vector<std::string> ids;
    for (const auto& layer : memories) {
        for (const auto& scored : layer) ids.push_back(scored.event.id);
    }
    return ids;
}

nlohmann::ordered_json DecisionContext::to_json() const {
    nlohmann::ordered_json layers = nlohmann::ordered_json::object();
    for (LayerKind layer : kAllLayers) {
        nlohmann::ordered_json events = nlohmann::ordered_json::array();
        for (const auto& scored : memories[static_cast<int>(layer)]) {
            events.push_back(nlohmann::ordered_json{
                {"id", scored.event.id},
                {"timestamp", scored.event.timestamp.to_string()},
                {"gamma", scored.score.gamma},
                {"recency", scored.score.recency},
                {"relevancy", scored.score.relevancy},
                {"importance", scored.score.importance},
                {"text", scored.event.text}});
        }
        layers[to_string(layer)] = std::move(events);
    }
    nlohmann::ordered_json closes = nlohmann::ordered_json::array();
    for (const auto& [ts, close] : recent_closes) {
        closes.push_back(nlohmann::ordered_json{{"timestamp", ts.to_string()}, {"close", close}});
    }
    nlohmann::ordered_json holdings = nlohmann::ordered_json::array();
    for (const auto& h : fund_records) {
        holdings.push_back(nlohmann::ordered_json{{"fund", h.fund},
                                                  {"ticker", h.ticker},
                                                  {"timestamp", h.timestamp.to_string()},
                                                  {"shares", h.shares},
                                                  {"direction", to_string(h.direction)}});
    }
    nlohmann::ordered_json reflections = nlohmann::ordered_json::array();
    for (const auto& r : recent_reflections) reflections.push_back(reflection_to_json(r));
    nlohmann::ordered_json feedback = nlohmann::ordered_json::array();
    for (const auto& m : recent_feedback) feedback.push_back(debate_message_to_json(m));
    return nlohmann::ordered_json{
        {"agent_id", character.agent_id},
        {"risk", to_string(character.risk)},
        {"ticker", ticker},
        {"date", date.date_string()},
        {"phase", to_string(phase)},
        {"top_k", top_k},
        {"memories", std::move(layers)},
        {"recent_closes", std::move(closes)},
        {"fund_records", std::move(holdings)},
        {"recent_reflections", std::move(reflections)},
        {"recent_feedback", std::move(feedback)}};
}

std::vector<ContextViolation> audit_context(const DecisionContext& ctx) {
    std::vector<ContextViolation> violations;
    const Timestamp cutoff = ctx.date.at(23, 59);
    auto check = [&](Timestamp ts, const std::string& what) {
        if (ts > cutoff) {
            violations.push_back(
                ContextViolation{what + " dated " + ts.to_string() + " after decision date " +
                                 ctx.date.date_string()});
        }
    };
    for (const auto& layer : ctx.memories) {
        for (const auto& scored : layer) check(scored.event.timestamp, "memory " + scored.event.id);
    }
    for (const auto& [ts, _] : ctx.recent_closes) check(ts, "price bar");
    for (const auto& h : ctx.fund_records) check(h.timestamp, "fund record");
    for (const auto& r : ctx.recent_reflections) check(r.timestamp, "reflection");
    for (const auto& m : ctx.recent_feedback) check(m.timestamp, "debate feedback");
    if (ctx.phase == Phase::Test && !ctx.fund_records.empty()) {
        violations.push_back(ContextViolation{"test-phase context carries fund records"});
    }
    return violations;
}

// ---- rule-based core ----

double RuleBasedCore::momentum(const DecisionContext& ctx) const {
    const std::size_t needed = static_cast<std::size_t>(params_.momentum_window) + 1;
    if (ctx.recent_closes.size() < needed) {
        fail(ErrorCode::InsufficientHistory,
             ctx.ticker + " has " + std::to_string(ctx.recent_closes.size()) + " bars, needs " +
                 std::to_string(needed));
    }
    const double now = ctx.recent_closes.back().second;
    const double then = ctx.recent_closes[ctx.recent_closes.size() - needed].second;
    return (now - then) / then;
}

TradeAction RuleBasedCore::momentum_action(double m, RiskProfile risk) const {
    double scale = 1.0;
    if (risk == RiskProfile::Seeking) scale = params_.seeking_multiplier;
    if (risk == RiskProfile::Averse) scale = params_.averse_multiplier;
    const double slight = params_.slight_threshold * scale;
    const double significant = params_.significant_threshold * scale;
    if (m >= significant) return TradeAction::SigIncrease;
    if (m >= slight) return TradeAction::SlightIncrease;
    if (m > -slight) return TradeAction::Hold;
    if (m > -significant) return TradeAction::SlightDecrease;
    return TradeAction::SigDecrease;
}

Recommendation RuleBasedCore::decide(const DecisionContext& ctx) {
    const double m = momentum(ctx);
    TradeAction action = momentum_action(m, ctx.character.risk);
    std::string rationale =
        std::to_string(params_.momentum_window) + "-session momentum " + percent(m);

    if (ctx.phase == Phase::Train && !ctx.fund_records.empty()) {
        std::int64_t net = 0;
        for (const auto& h : ctx.fund_records) net += h.shares;
        const int fund_dir = net > 0 ? 1 : (net < 0 ? -1 : 0);
        const int own_dir = action_direction(action);
        if (fund_dir != 0 && own_dir != 0 && fund_dir != own_dir) {
            action = step_action(action, fund_dir);
            rationale += std::string("; fund flow ") + (fund_dir > 0 ? "buy" : "sell") +
                         " conflicts, stepped one notch";
        }
    }
    return Recommendation{action, rationale};
}

std::string RuleBasedCore::feedback(const DecisionContext& own_ctx, const Recommendation& own,
                                    const std::string& peer_id, TradeAction peer_stance) {
    const double m = momentum(own_ctx);
    const bool agree = action_direction(peer_stance) == action_direction(own.action);
    return std::string(agree ? "agree" : "disagree") + " with " + peer_id + "'s " +
           to_string(peer_stance) + "; own stance " + to_string(own.action) +
           " on momentum " + percent(m);
}

TradeAction RuleBasedCore::majority_notch(TradeAction own,
                                          const std::vector<TradeAction>& peer_stances) {
    int plus = 0;
    int minus = 0;
    for (TradeAction stance : peer_stances) {
        const int d = action_direction(stance);
        if (d > 0) ++plus;
        if (d < 0) ++minus;
    }
    // Dominance needs at least two peers on one side and a two-to-one margin.
    int dominant = 0;
    if (plus >= 2 && plus >= 2 * minus) {
        dominant = 1;
    } else if (minus >= 2 && minus >= 2 * plus) {
        dominant = -1;
    }
    if (dominant == 0 || action_direction(own) == dominant) return own;
    return step_action(own, dominant);
}

Recommendation RuleBasedCore::revise(const DecisionContext& ctx, const Recommendation& original,
                                     const std::vector<TradeAction>& peer_stances) {
    const TradeAction revised = majority_notch(original.action, peer_stances);
    if (revised == original.action) {
        return Recommendation{original.action, original.rationale + "; peers confirm"};
    }
    (void)ctx;
    return Recommendation{revised, original.rationale + "; outnumbered by peers, stepped toward majority"};
}

// ---- chat-completion core ----

ChatCompletionCore::ChatCompletionCore(CoreConfig config) : config_(std::move(config)) {}

Recommendation ChatCompletionCore::parse_completion(const std::string& content) {
    const auto newline = content.find('\n');
    const std::string first =
        newline == std::string::npos ? content : content.substr(0, newline);
    const auto action = action_from_phrase(first);
    if (!action) {
        return Recommendation{TradeAction::Hold, "parse-failure"};
    }
    std::string rationale =
        newline == std::string::npos ? std::string() : content.substr(newline + 1);
    while (!rationale.empty() && (rationale.back() == '\n' || rationale.back() == ' ')) {
        rationale.pop_back();
    }
    return Recommendation{*action, rationale};
}

std::string ChatCompletionCore::complete(const std::string& prompt) {
    std::lock_guard<std::mutex> serialize(call_mutex_);
    std::string host;
    std::string path;
    {
        auto scheme = config_.endpoint.find("://");
        const std::size_t begin = scheme == std::string::npos ? 0 : scheme + 3;
        auto slash = config_.endpoint.find('/', begin);
        if (slash == std::string::npos) {
            host = config_.endpoint;
            path = "/";
        } else {
            host = config_.endpoint.substr(0, slash);
            path = config_.endpoint.substr(slash);
        }
    }
    nlohmann::ordered_json body{
        {"model", config_.model},
        {"messages", nlohmann::ordered_json::array(
                         {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}})}};
    httplib::Client client(host);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res || res->status != 200) {
        fail(ErrorCode::CoreUnavailable, "chat endpoint unreachable: " + host + path);
    }
    try {
        const auto reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
        fail(ErrorCode::CoreUnavailable, std::string("chat reply unparseable: ") + e.what());
    }
}

Recommendation ChatCompletionCore::decide(const DecisionContext& ctx) {
    const std::string prompt = render_prompt(
        ctx, ctx.phase == Phase::Train ? PromptPhase::Train : PromptPhase::Test);
    try {
        return parse_completion(complete(prompt));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CoreUnavailable && !config_.strict) {
            return Recommendation{TradeAction::Hold, "core-unavailable"};
        }
        throw;
    }
}

std::string ChatCompletionCore::feedback(const DecisionContext& own_ctx,
                                         const Recommendation& own, const std::string& peer_id,
                                         TradeAction peer_stance) {
    std::string prompt = render_prompt(own_ctx, PromptPhase::Debate);
    prompt += "\nPeer " + peer_id + " proposes: " + action_phrase(peer_stance) +
              "\nYour current stance: " + action_phrase(own.action) +
              "\nGive concise feedback on the peer's proposal.\n";
    try {
        return complete(prompt);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CoreUnavailable && !config_.strict) {
            return "core-unavailable";
        }
        throw;
    }
}

Recommendation ChatCompletionCore::revise(const DecisionContext& ctx,
                                          const Recommendation& original,
                                          const std::vector<TradeAction>& peer_stances) {
    std::string prompt = render_prompt(ctx, PromptPhase::Debate);
    prompt += "\nYour current stance: " + std::string(action_phrase(original.action)) + "\n";
    prompt += "Peer stances:\n";
    for (TradeAction stance : peer_stances) {
        prompt += std::string("- ") + action_phrase(stance) + "\n";
    }
    prompt += "Reply with your final action phrase on the first line.\n";
    try {
        return parse_completion(complete(prompt));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CoreUnavailable && !config_.strict) {
            return original;
        }
        throw;
    }
}

std::unique_ptr<DecisionCore> make_core(const CoreConfig& config, const DecisionParams& params) {
    if (config.kind == "rule_based") {
        return std::make_unique<RuleBasedCore>(params);
    }
    if (config.kind == "chat") {
        return std::make_unique<ChatCompletionCore>(config);
    }
    fail(ErrorCode::ConfigError, "unknown core kind '" + config.kind + "'");
}

} // namespace ltm
