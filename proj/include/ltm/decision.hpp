#pragma once
#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltm/config.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/records.hpp"

namespace ltm {

// Everything a core may look at for one (agent, ticker, day) decision. All
// facts are dated at or before `date`; audit_context enforces that.
struct DecisionContext {
    TraderCharacter character;
    std::string ticker;
    Timestamp date;      // decision day at 00:00
    Phase phase = Phase::Train;
    int top_k = 3;

    std::array<std::vector<ScoredEvent>, 3> memories; // per layer, gamma order

    std::vector<std::pair<Timestamp, double>> recent_closes; // oldest..today
    std::vector<HoldingRecord> fund_records;                 // train only, same day

    // Test phase carries the prior week of reflections and debate feedback.
    std::vector<Reflection> recent_reflections;
    std::vector<DebateMessage> recent_feedback;

    double close() const { return recent_closes.back().second; }
    std::vector<std::string> cited_ids() const;
    nlohmann::ordered_json to_json() const;
};

struct ContextViolation {
    std::string what;
};

// No-lookahead audit: flags any datum dated after the decision date and any
// holdings present in a test-phase context.
std::vector<ContextViolation> audit_context(const DecisionContext& ctx);

class DecisionCore {
public:
    virtual ~DecisionCore() = default;
    virtual Recommendation decide(const DecisionContext& ctx) = 0;

    // Debate hooks. `feedback` reacts to a peer's stance; `revise` folds the
    // session's feedback into a final recommendation.
    virtual std::string feedback(const DecisionContext& own_ctx, const Recommendation& own,
                                 const std::string& peer_id, TradeAction peer_stance) = 0;
    virtual Recommendation revise(const DecisionContext& ctx, const Recommendation& original,
                                  const std::vector<TradeAction>& peer_stances) = 0;
    virtual std::string name() const = 0;
};

// Deterministic momentum core. momentum = (close_t - close_{t-w}) / close_{t-w}
// over w sessions; +-slight/significant thresholds map onto the five actions,
// risk scaling multiplies the thresholds (seeking 0.5, averse 1.5). During
// training a same-day fund record whose direction contradicts the action
// steps it one notch toward the fund's side. Pure function of the context.
class RuleBasedCore final : public DecisionCore {
public:
    explicit RuleBasedCore(DecisionParams params) : params_(params) {}

    Recommendation decide(const DecisionContext& ctx) override;
    std::string feedback(const DecisionContext& own_ctx, const Recommendation& own,
                         const std::string& peer_id, TradeAction peer_stance) override;
    Recommendation revise(const DecisionContext& ctx, const Recommendation& original,
                          const std::vector<TradeAction>& peer_stances) override;
    std::string name() const override { return "rule_based"; }

    // Momentum over the context's close series. InsufficientHistory when
    // fewer than momentum_window + 1 bars are present.
    double momentum(const DecisionContext& ctx) const;

    // One notch toward the dominant peer direction when outnumbered at least
    // two-to-one by at least two peers; otherwise unchanged.
    static TradeAction majority_notch(TradeAction own,
                                      const std::vector<TradeAction>& peer_stances);

private:
    TradeAction momentum_action(double m, RiskProfile risk) const;
    DecisionParams params_;
};

// Chat-completion adapter:
//   POST <endpoint> {"model": ..., "messages":[{"role","content"}]}
//     -> {"choices":[{"message":{"content": ...}}]}
// The reply's first line must be one of the five action phrases verbatim;
// the rest is the rationale. Unparseable content maps to hold with rationale
// "parse-failure". Endpoint failure raises CoreUnavailable in strict mode
// and holds in lenient mode. Calls are serialized per client.
class ChatCompletionCore final : public DecisionCore {
public:
    explicit ChatCompletionCore(CoreConfig config);

    Recommendation decide(const DecisionContext& ctx) override;
    std::string feedback(const DecisionContext& own_ctx, const Recommendation& own,
                         const std::string& peer_id, TradeAction peer_stance) override;
    Recommendation revise(const DecisionContext& ctx, const Recommendation& original,
                          const std::vector<TradeAction>& peer_stances) override;
    std::string name() const override { return "chat"; }

    // Pure response handling, unit-testable without a server.
    static Recommendation parse_completion(const std::string& content);

private:
    std::string complete(const std::string& prompt); // throws CoreUnavailable
    CoreConfig config_;
    std::mutex call_mutex_; // one in-flight call per endpoint
};

std::unique_ptr<DecisionCore> make_core(const CoreConfig& config,
                                        const DecisionParams& params);

// ---- prompt templates (versioned text assets in prompt_templates.cpp) ----

extern const char* const kPromptTemplateVersion;

enum class PromptPhase { Train, Test, Debate };

// Deterministic template expansion: identical context, identical string.
std::string render_prompt(const DecisionContext& ctx, PromptPhase phase);

} // namespace ltm
