#pragma once
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ltm/config.hpp"
#include "ltm/records.hpp"
#include "ltm/store.hpp"

namespace ltm {

struct AgentMetrics {
    std::string agent_id;
    double cumulative_return = 0.0;
    double volatility = 0.0;           // annualized (sqrt 252), sample std
    std::optional<double> sharpe;      // null when the return std is zero
    int trade_count = 0;
    double final_value = 0.0;
};

struct MetricsReport {
    std::string config_hash;
    Phase phase = Phase::Train;
    Timestamp span_from, span_to;
    std::vector<AgentMetrics> agents;
    AgentMetrics aggregate;
};

// Trading days inside [from, to]: calendar days with at least one price bar.
std::vector<Timestamp> trading_days(const Store& store, Timestamp from, Timestamp to);

// End-of-day portfolio values over the span's trading days, recomputed from
// the ledger and closing prices alone: v_t = cash_t + sum(shares * close_t).
std::vector<double> portfolio_value_series(const std::vector<TradeExecution>& ledger,
                                           double initial_cash, const Store& store,
                                           const std::vector<Timestamp>& days);

// Daily returns v_t/v_{t-1} - 1; cumulative v_end/v_start - 1; volatility
// std(r)*sqrt(252) with the n-1 sample std; sharpe mean(r)/std(r)*sqrt(252)
// at zero risk-free rate, null when std is zero.
AgentMetrics compute_metrics(const std::string& agent_id,
                             const std::vector<TradeExecution>& ledger, double initial_cash,
                             const Store& store, Timestamp span_from, Timestamp span_to);

MetricsReport build_metrics_report(const RunConfig& config, Phase phase,
                                   const std::vector<std::pair<std::string, double>>& roster,
                                   const std::vector<TradeExecution>& full_ledger,
                                   const Store& store);

enum class ReportFormat { Csv, Json };

// Deterministic bytes for identical reports; returns the written path.
std::filesystem::path emit_report(const MetricsReport& report, ReportFormat format,
                                  const std::filesystem::path& path);

} // namespace ltm
