#include "doctest.h"
#include "ltm/errors.hpp"
#include "ltm/metrics.hpp"
#include "test_support.hpp"

using namespace ltm;
using namespace test_support;

namespace {

const Timestamp kStart = Timestamp::civil(2020, 9, 1);

void add_close(Store& store, const std::string& ticker, Timestamp day, double close) {
    store.append(PriceBar{ticker, day.at(16, 0), close, close * 1.001, close * 0.999, close,
                          1000});
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("flat prices with no trades: zero return, zero vol, undefined sharpe") {
    Store store;
    for (int i = 0; i < 10; ++i) add_close(store, "AAA", kStart.add_days(i), 100.0);
    const AgentMetrics m =
        compute_metrics("a", {}, 1000.0, store, kStart, kStart.add_days(9));
    CHECK(m.cumulative_return == 0.0);
    CHECK(m.volatility == 0.0);
    CHECK(!m.sharpe.has_value());
    CHECK(m.trade_count == 0);
    CHECK(m.final_value == 1000.0);
}

TEST_CASE("buy-and-hold one share from 100 to 110 returns ten percent") {
    Store store;
    for (int i = 0; i < 11; ++i) {
        add_close(store, "AAA", kStart.add_days(i), 100.0 + i); // 100 .. 110
    }
    // one share bought at the first close, no cash left
    std::vector<TradeExecution> ledger{
        TradeExecution{"a", kStart.at(16, 0), "AAA", TradeSide::Buy, 1, 100.0}};
    const AgentMetrics m =
        compute_metrics("a", ledger, 100.0, store, kStart, kStart.add_days(10));
    CHECK(std::abs(m.cumulative_return - 0.10) <= 1e-9);
    CHECK(m.final_value == doctest::Approx(110.0));
    CHECK(m.trade_count == 1);
}

TEST_CASE("alternating one-percent days match the spreadsheet oracle") {
    Store store;
    std::vector<double> values;
    double price = 100.0;
    for (int i = 0; i < 11; ++i) {
        add_close(store, "AAA", kStart.add_days(i), price);
        values.push_back(price);
        price *= (i % 2 == 0) ? 1.01 : 0.99;
    }
    std::vector<TradeExecution> ledger{
        TradeExecution{"a", kStart.at(16, 0), "AAA", TradeSide::Buy, 1, 100.0}};
    const AgentMetrics m =
        compute_metrics("a", ledger, 100.0, store, kStart, kStart.add_days(10));
    const OracleMetrics oracle = oracle_metrics(values);
    CHECK(std::abs(m.cumulative_return - oracle.cumulative) <= 1e-12);
    CHECK(std::abs(m.volatility - oracle.volatility) <= 1e-12);
    REQUIRE(m.sharpe.has_value() == oracle.sharpe_defined);
    if (m.sharpe) CHECK(std::abs(*m.sharpe - oracle.sharpe) <= 1e-12);
    CHECK(m.cumulative_return < 0.0); // the alternation grinds value down
    CHECK(m.volatility > 0.0);
}

TEST_CASE("ten-day random fixture matches an independent recomputation") {
    Store store;
    Rng rng(61);
    double price = 80.0;
    std::vector<double> closes;
    for (int i = 0; i < 10; ++i) {
        price *= 1.0 + rng.uniform(-0.03, 0.03);
        add_close(store, "AAA", kStart.add_days(i), price);
        closes.push_back(price);
    }
    // a few trades along the way
    std::vector<TradeExecution> ledger{
        TradeExecution{"a", kStart.at(16, 0), "AAA", TradeSide::Buy, 5, closes[0]},
        TradeExecution{"a", kStart.add_days(3).at(16, 0), "AAA", TradeSide::Buy, 3,
                       closes[3]},
        TradeExecution{"a", kStart.add_days(7).at(16, 0), "AAA", TradeSide::Sell, 4,
                       closes[7]}};
    const double initial_cash = 1000.0;
    const AgentMetrics m =
        compute_metrics("a", ledger, initial_cash, store, kStart, kStart.add_days(9));

    // independent day-by-day recomputation
    std::vector<double> values;
    double cash = initial_cash;
    std::int64_t shares = 0;
    for (int i = 0; i < 10; ++i) {
        const Timestamp day = kStart.add_days(i);
        for (const auto& exec : ledger) {
            if (exec.timestamp.start_of_day() == day.start_of_day()) {
                if (exec.side == TradeSide::Buy) {
                    cash -= static_cast<double>(exec.shares) * exec.price;
                    shares += exec.shares;
                } else {
                    cash += static_cast<double>(exec.shares) * exec.price;
                    shares -= exec.shares;
                }
            }
        }
        values.push_back(cash + static_cast<double>(shares) * closes[i]);
    }
    const OracleMetrics oracle = oracle_metrics(values);
    CHECK(std::abs(m.cumulative_return - oracle.cumulative) <= 1e-9);
    CHECK(std::abs(m.volatility - oracle.volatility) <= 1e-9);
    REQUIRE(m.sharpe.has_value() == oracle.sharpe_defined);
    if (m.sharpe) CHECK(std::abs(*m.sharpe - oracle.sharpe) <= 1e-9);
    CHECK(m.final_value == doctest::Approx(values.back()).epsilon(1e-12));
}

TEST_CASE("reports emit deterministically in both formats") {
    Store store;
    for (int i = 0; i < 6; ++i) add_close(store, "AAA", kStart.add_days(i), 100.0 + i);

    RunConfig config;
    config.sectors = {{"AAA", "tech"}};
    config.agents = {TraderCharacter{"alpha", RiskProfile::Neutral, {"tech"}, 500.0},
                     TraderCharacter{"bravo", RiskProfile::Averse, {"tech"}, 500.0}};
    config.train_from = kStart;
    config.train_to = kStart.add_days(5);
    config.test_from = kStart.add_days(6);
    config.test_to = kStart.add_days(7);

    std::vector<TradeExecution> ledger{
        TradeExecution{"alpha", kStart.at(16, 5), "AAA", TradeSide::Buy, 2, 100.0},
        TradeExecution{"bravo", kStart.add_days(1).at(16, 5), "AAA", TradeSide::Buy, 1,
                       101.0}};
    const MetricsReport report = build_metrics_report(
        config, Phase::Train, {{"alpha", 500.0}, {"bravo", 500.0}}, ledger, store);
    CHECK(report.agents.size() == 2);
    CHECK(report.aggregate.trade_count == 2);
    CHECK(report.config_hash == config.config_hash());

    TempDir dir("report");
    emit_report(report, ReportFormat::Csv, dir.path() / "a.csv");
    emit_report(report, ReportFormat::Csv, dir.path() / "b.csv");
    CHECK(read_file(dir.path() / "a.csv") == read_file(dir.path() / "b.csv"));

    // CSV rows: header comment + column header + agents + aggregate
    const std::string csv = read_file(dir.path() / "a.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 2 + 1);

    emit_report(report, ReportFormat::Json, dir.path() / "a.json");
    const auto parsed = nlohmann::json::parse(read_file(dir.path() / "a.json"));
    CHECK(parsed.at("agents").size() == 2);
    CHECK(parsed.at("aggregate").at("trade_count") == 2);
    CHECK(parsed.at("config_hash") == config.config_hash());
    // parse-back equality on the numeric fields
    CHECK(parsed.at("agents").at(0).at("cumulative_return").get<double>() ==
          report.agents[0].cumulative_return);

    // undefined sharpe serializes as null, not zero
    Store flat;
    for (int i = 0; i < 4; ++i) add_close(flat, "AAA", kStart.add_days(i), 100.0);
    const AgentMetrics undefined_sharpe =
        compute_metrics("alpha", {}, 500.0, flat, kStart, kStart.add_days(3));
    MetricsReport flat_report = report;
    flat_report.agents = {undefined_sharpe};
    flat_report.aggregate = undefined_sharpe;
    emit_report(flat_report, ReportFormat::Json, dir.path() / "flat.json");
    const auto flat_json = nlohmann::json::parse(read_file(dir.path() / "flat.json"));
    CHECK(flat_json.at("agents").at(0).at("sharpe").is_null());

    // unwritable destinations surface as IoError
    CHECK_THROWS_AS(
        emit_report(report, ReportFormat::Csv, dir.path() / "no-such-dir" / "x.csv"), Error);
}

} // TEST_SUITE
