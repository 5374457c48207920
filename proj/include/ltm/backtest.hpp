#pragma once
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ltm/agent.hpp"
#include "ltm/config.hpp"
#include "ltm/debate.hpp"
#include "ltm/decision.hpp"
#include "ltm/memory_engine.hpp"
#include "ltm/metrics.hpp"
#include "ltm/store.hpp"

namespace ltm {

struct SessionSummary {
    std::string session_id;
    std::string ticker;
    std::vector<std::string> participants;
    int rounds = 0;
    std::map<std::string, std::string> revised; // agent -> action token
};

struct DayReport {
    Timestamp date;
    Phase phase = Phase::Train;
    int decisions = 0;
    int trades = 0;
    int no_trades = 0;
    int reflections = 0;
    int promoted = 0;
    int purged = 0;
    int debate_messages = 0;
    std::vector<SessionSummary> sessions;
    std::vector<std::string> gaps; // "agent/ticker: reason"
    int lookahead_violations = 0;
    int test_holdings_in_context = 0;
};

struct Checkpoint {
    Timestamp date;
    std::string digest;
};

struct RunSummary {
    Phase phase = Phase::Train;
    int days = 0;
    int decisions = 0;
    int trades = 0;
    int sessions = 0;
    int lookahead_violations = 0;
    int test_holdings_in_context = 0;
    std::vector<DayReport> day_reports;
    std::vector<Checkpoint> checkpoints; // one per trading day when enabled
};

// Drives the day loop: per-agent decisions over in-scope tickers, trade
// execution, immediate reflections, shared-ticker debates, maintenance
// sweeps, weekly extended reflections. Training executes pre-debate
// decisions and logs the revisions (they reach the next day through feedback
// memories); testing executes the post-debate revisions. Days run strictly
// sequentially so the logs replay byte-identically.
class Backtester {
public:
    // When `run_dir` is set, the backtester appends audit.jsonl and
    // ledger.jsonl there, restores portfolios from any prior ledger, and
    // emits report.{csv,json} at the end of each phase.
    Backtester(RunConfig config, Store& store, std::filesystem::path run_dir = {});

    RunSummary run(Phase phase);
    DayReport run_day(Timestamp date, Phase phase);

    void set_capture_checkpoints(bool enabled) { capture_checkpoints_ = enabled; }

    const std::vector<TradeExecution>& ledger() const { return ledger_; }
    TradingAgent* agent(const std::string& agent_id);
    MemoryEngine& engine() { return *engine_; }
    const RunConfig& config() const { return config_; }
    MetricsReport metrics(Phase phase) const;

    // True when audit.jsonl already carries a completed phase marker.
    static bool phase_completed(const std::filesystem::path& run_dir, Phase phase);

private:
    struct TickerDecision {
        DecisionContext ctx;
        Recommendation rec;
        ExecutionResult result;
        double position_return = 0.0;
        bool executed = false;
    };

    void execute_and_record(TradingAgent& agent, TickerDecision& decision,
                            const std::string& ticker, Timestamp when, DayReport& report);
    void reflect(TradingAgent& agent, TickerDecision& decision, Timestamp when,
                 DayReport& report);
    void write_audit(const nlohmann::ordered_json& record);
    void append_ledger_line(const TradeExecution& exec);
    void load_prior_ledger();

    RunConfig config_;
    Store& store_;
    std::filesystem::path run_dir_;
    std::unique_ptr<EmbeddingProvider> embedder_;
    std::unique_ptr<MemoryEngine> engine_;
    std::unique_ptr<DecisionCore> core_;
    std::unique_ptr<DebateCoordinator> debate_;
    std::vector<std::unique_ptr<TradingAgent>> agents_;
    std::map<std::string, TradingAgent*> agents_by_id_;
    std::vector<TradeExecution> ledger_;
    std::ofstream audit_log_;
    std::ofstream ledger_log_;
    bool capture_checkpoints_ = false;
    int day_index_ = 0;
};

// The provider the config names (hashing or http).
std::unique_ptr<EmbeddingProvider> make_embedder(const EmbeddingConfig& config);

} // namespace ltm
