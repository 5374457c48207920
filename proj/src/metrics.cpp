#include "ltm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

std::vector<Timestamp> trading_days(const Store& store, Timestamp from, Timestamp to) {
    std::vector<Timestamp> days;
    const auto tickers = store.tickers();
    for (Timestamp d = from.start_of_day(); d <= to.start_of_day(); d = d.add_days(1)) {
        for (const auto& ticker : tickers) {
            if (store.has_price(ticker, d)) {
                days.push_back(d);
                break;
            }
        }
    }
    return days;
}

std::vector<double> portfolio_value_series(const std::vector<TradeExecution>& ledger,
                                           double initial_cash, const Store& store,
                                           const std::vector<Timestamp>& days) {
    std::vector<double> values;
    values.reserve(days.size());
    double cash = initial_cash;
    std::map<std::string, std::int64_t> shares;
    std::size_t next = 0;
    for (const Timestamp day : days) {
        const Timestamp end_of_day = day.at(23, 59);
        while (next < ledger.size() && ledger[next].timestamp <= end_of_day) {
            const auto& exec = ledger[next];
            const double value = static_cast<double>(exec.shares) * exec.price;
            if (exec.side == TradeSide::Buy) {
                cash -= value;
                shares[exec.ticker] += exec.shares;
            } else {
                cash += value;
                shares[exec.ticker] -= exec.shares;
            }
            ++next;
        }
        double total = cash;
        for (const auto& [ticker, count] : shares) {
            if (count == 0) continue;
            const auto closes = store.closes_up_to(ticker, day, 1);
            if (closes.empty()) {
                fail(ErrorCode::MissingMarketData,
                     "no close for held ticker " + ticker + " on " + day.date_string());
            }
            total += static_cast<double>(count) * closes.back().second;
        }
        values.push_back(total);
    }
    return values;
}

AgentMetrics compute_metrics(const std::string& agent_id,
                             const std::vector<TradeExecution>& ledger, double initial_cash,
                             const Store& store, Timestamp span_from, Timestamp span_to) {
    const auto days = trading_days(store, span_from, span_to);
    if (days.empty()) {
        fail(ErrorCode::MissingMarketData,
             "no trading days in " + span_from.date_string() + " .. " + span_to.date_string());
    }
    const auto values = portfolio_value_series(ledger, initial_cash, store, days);

    AgentMetrics m;
    m.agent_id = agent_id;
    m.final_value = values.back();
    m.cumulative_return = values.front() != 0.0 ? values.back() / values.front() - 1.0 : 0.0;
    for (const auto& exec : ledger) {
        if (exec.timestamp >= span_from.start_of_day() &&
            exec.timestamp <= span_to.at(23, 59)) {
            ++m.trade_count;
        }
    }

    std::vector<double> returns;
    returns.reserve(values.size());
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i - 1] == 0.0) {
            fail(ErrorCode::MissingMarketData, "zero portfolio value mid-span");
        }
        returns.push_back(values[i] / values[i - 1] - 1.0);
    }
    if (returns.size() >= 2) {
        double mean = 0.0;
        for (double r : returns) mean += r;
        mean /= static_cast<double>(returns.size());
        double ss = 0.0;
        for (double r : returns) ss += (r - mean) * (r - mean);
        const double std_dev = std::sqrt(ss / static_cast<double>(returns.size() - 1));
        const double annualize = std::sqrt(252.0);
        m.volatility = std_dev * annualize;
        if (std_dev > 0.0) {
            m.sharpe = mean / std_dev * annualize;
        }
    }
    return m;
}

MetricsReport build_metrics_report(const RunConfig& config, Phase phase,
                                   const std::vector<std::pair<std::string, double>>& roster,
                                   const std::vector<TradeExecution>& full_ledger,
                                   const Store& store) {
    MetricsReport report;
    report.config_hash = config.config_hash();
    report.phase = phase;
    report.span_from = config.span_from(phase);
    report.span_to = config.span_to(phase);

    std::vector<TradeExecution> combined;
    double combined_cash = 0.0;
    for (const auto& [agent_id, initial_cash] : roster) {
        std::vector<TradeExecution> ledger;
        for (const auto& exec : full_ledger) {
            if (exec.agent_id == agent_id) ledger.push_back(exec);
        }
        report.agents.push_back(compute_metrics(agent_id, ledger, initial_cash, store,
                                                report.span_from, report.span_to));
        combined.insert(combined.end(), ledger.begin(), ledger.end());
        combined_cash += initial_cash;
    }
    std::stable_sort(combined.begin(), combined.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    report.aggregate = compute_metrics("aggregate", combined, combined_cash, store,
                                       report.span_from, report.span_to);
    return report;
}

namespace {

nlohmann::ordered_json metrics_to_json(const AgentMetrics& m) {
    nlohmann::ordered_json j{{"agent_id", m.agent_id},
                             {"cumulative_return", m.cumulative_return},
                             {"volatility", m.volatility},
                             {"sharpe", m.sharpe ? nlohmann::ordered_json(*m.sharpe)
                                                 : nlohmann::ordered_json(nullptr)},
                             {"trade_count", m.trade_count},
                             {"final_value", m.final_value}};
    return j;
}

std::string csv_row(const AgentMetrics& m) {
    return m.agent_id + "," + format_double(m.cumulative_return) + "," +
           format_double(m.volatility) + "," + (m.sharpe ? format_double(*m.sharpe) : "") +
           "," + std::to_string(m.trade_count) + "," + format_double(m.final_value);
}

} // namespace

std::filesystem::path emit_report(const MetricsReport& report, ReportFormat format,
                                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write report " + path.string());
    }
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json agents = nlohmann::ordered_json::array();
        for (const auto& m : report.agents) agents.push_back(metrics_to_json(m));
        nlohmann::ordered_json j{
            {"config_hash", report.config_hash},
            {"phase", to_string(report.phase)},
            {"span",
             {{"from", report.span_from.date_string()}, {"to", report.span_to.date_string()}}},
            {"agents", std::move(agents)},
            {"aggregate", metrics_to_json(report.aggregate)}};
        out << j.dump(2) << '\n';
    } else {
        out << "# config_hash=" << report.config_hash << " phase=" << to_string(report.phase)
            << " span=" << report.span_from.date_string() << ".."
            << report.span_to.date_string() << '\n';
        out << "agent_id,cumulative_return,volatility,sharpe,trade_count,final_value\n";
        for (const auto& m : report.agents) out << csv_row(m) << '\n';
        out << csv_row(report.aggregate) << '\n';
    }
    return path;
}

} // namespace ltm
