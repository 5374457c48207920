#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltm/agent.hpp"
#include "ltm/config.hpp"
#include "ltm/decision.hpp"
#include "ltm/records.hpp"
#include "ltm/store.hpp"

namespace ltm {

struct DebateSession {
    std::string session_id; // "<date>/<ticker>"
    Timestamp date;
    std::string ticker;
    std::vector<std::string> participants; // agent id order
    int rounds_completed = 0;
    std::map<std::string, Recommendation> stances; // pre-debate decisions
    std::map<std::string, Recommendation> revised; // set by finalize
};

// Per-agent figures the shared package quotes for one ticker-day.
struct PackageFigures {
    std::int64_t volume = 0;
    double realized_return = 0.0;
};

// Round-synchronous debate over a ticker multiple agents hold or traded.
// Each round every participant messages every other participant: its shared
// package (top-K memories with scores, stance, trade value, volume, return)
// plus feedback on the receiver's stance. Messages land in the cognition
// store receiver-tagged, and each one becomes a short-term memory of its
// receiver.
class DebateCoordinator {
public:
    DebateCoordinator(const RunConfig& config, Store& store, DecisionCore& core)
        : config_(config), store_(store), core_(core) {}

    // A session forms iff at least two agents hold the ticker or traded it
    // that day (portfolio scan plus same-day ledger scan).
    std::optional<DebateSession> convene(
        Timestamp date, const std::string& ticker,
        const std::vector<TradingAgent*>& agents,
        const std::map<std::string, Recommendation>& decisions) const;

    // Runs one round; message timestamps advance one minute per round.
    std::vector<DebateMessage> exchange_round(
        DebateSession& session, std::map<std::string, TradingAgent*>& agents,
        const std::map<std::string, DecisionContext>& contexts,
        const std::map<std::string, PackageFigures>& figures, Timestamp round_time);

    // Every participant revises its stance against the peers' pre-debate
    // stances (rule-based cores step one notch toward a dominant majority).
    std::map<std::string, Recommendation> finalize(
        DebateSession& session, const std::map<std::string, DecisionContext>& contexts);

    int max_rounds() const { return config_.debate.max_rounds; }

private:
    const RunConfig& config_;
    Store& store_;
    DecisionCore& core_;
};

} // namespace ltm
