#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltm/config.hpp"
#include "ltm/decision.hpp"
#include "ltm/memory_engine.hpp"
#include "ltm/records.hpp"
#include "ltm/store.hpp"

namespace ltm {

// Layer assignment by event origin: macro indicators persist long-term,
// strategy documents and weekly reflections mid-term, daily messages
// (news, immediate reflections, debate feedback, trade outcomes) short-term.
LayerKind assign_layer(MemoryOrigin origin);

struct Position {
    std::int64_t shares = 0;
    double cost_basis = 0.0; // average cost per share
};

struct PortfolioState {
    double cash = 0.0;
    std::map<std::string, Position> positions;
    std::vector<TradeExecution> ledger;

    std::int64_t shares(const std::string& ticker) const {
        auto it = positions.find(ticker);
        return it == positions.end() ? 0 : it->second.shares;
    }

    // Applies one execution to cash/positions/ledger; buys average into the
    // cost basis, a position emptied by sells drops its basis. Replaying a
    // ledger through this yields the live state bit for bit.
    void apply(const TradeExecution& exec);
};

struct ExecutionResult {
    std::optional<TradeExecution> execution; // empty = NoTrade
    std::string reason;                      // set when NoTrade
};

// Sizing per action: significant trades move `sizing.significant` of cash
// (buys) or held shares (sells), slight trades `sizing.slight`; buys floor to
// whole shares, sells floor with a one-share minimum while a position exists.
// Cash and share counts never go negative.
ExecutionResult execute_recommendation(TradeAction action, PortfolioState& portfolio,
                                       const std::string& agent_id, const std::string& ticker,
                                       double price, Timestamp when,
                                       const TradeSizing& sizing);

// Cash value an action would move at the given price and portfolio; the
// debate package quotes it as the stance's trade value.
double action_trade_value(TradeAction action, const PortfolioState& portfolio,
                          const std::string& ticker, double price, const TradeSizing& sizing);

class TradingAgent {
public:
    TradingAgent(TraderCharacter character, const RunConfig& config, Store& store,
                 MemoryEngine& engine);

    const TraderCharacter& character() const { return character_; }
    const std::string& id() const { return character_.agent_id; }
    PortfolioState& portfolio() { return portfolio_; }
    const PortfolioState& portfolio() const { return portfolio_; }

    // Inserts a memory event routed by origin; returns its id.
    std::string remember(MemoryOrigin origin, const std::string& text, Timestamp when);

    // Assembles the decision context for one (ticker, date): top-K per layer
    // via committed retrieval, the close series, same-day fund records
    // during training, and the prior-week reflection/feedback window during
    // testing. MissingMarketData when the day has no bar for the ticker.
    DecisionContext build_context(const std::string& ticker, Timestamp date, Phase phase);

    ExecutionResult execute(const Recommendation& rec, const std::string& ticker, double price,
                            Timestamp when);

    // Records the day's per-ticker self-assessment, inserts it as a
    // short-term memory, and boosts the cited events when the daily position
    // return clears the counter trigger. DuplicateReflection on a second
    // call for the same (ticker, day).
    Reflection immediate_reflection(const DecisionContext& ctx, const Recommendation& decision,
                                    const ExecutionResult& result, double position_return,
                                    Timestamp when);

    // Aggregates the window's trades and portfolio move into an extended
    // reflection stored mid-term. NoActivity when no prices fall in range.
    Reflection extended_reflection(Timestamp period_from, Timestamp period_to, Timestamp when);

    // Daily position return for a ticker: close-over-previous-close when the
    // agent holds it, else 0.
    double position_return(const std::string& ticker, Timestamp date) const;

private:
    TraderCharacter character_;
    const RunConfig& config_;
    Store& store_;
    MemoryEngine& engine_;
    PortfolioState portfolio_;
};

} // namespace ltm
