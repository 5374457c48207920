#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltm/backtest.hpp"
#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"
#include "ltm/market_data.hpp"

namespace fs = std::filesystem;
using namespace ltm;

namespace {

// One mutating CLI invocation owns the run directory.
class RunLock {
public:
    explicit RunLock(const fs::path& run_dir) : path_(run_dir / ".lock") {
        std::error_code ec;
        fs::create_directories(run_dir, ec);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            fail(ErrorCode::IoError,
                 "run directory is locked (" + path_.string() + " exists)");
        }
    }
    ~RunLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

RunConfig load_run_config(const fs::path& run_dir, const std::string& config_flag) {
    if (!config_flag.empty()) return RunConfig::load(config_flag);
    const fs::path fallback = run_dir / "config.json";
    if (!fs::exists(fallback)) {
        fail(ErrorCode::ConfigError,
             "no --config given and " + fallback.string() + " does not exist");
    }
    return RunConfig::load(fallback);
}

// Copies the config into the run dir on first use; later invocations must
// match its hash so one run never mixes configurations.
void pin_config(const RunConfig& config, const fs::path& run_dir) {
    const fs::path pinned = run_dir / "config.json";
    if (!fs::exists(pinned)) {
        config.save(pinned);
        return;
    }
    const RunConfig existing = RunConfig::load(pinned);
    if (existing.config_hash() != config.config_hash()) {
        fail(ErrorCode::ConfigError,
             "config hash " + config.config_hash() + " does not match the run's pinned " +
                 existing.config_hash());
    }
}

int run_phase(Phase phase, const std::string& config_flag, const fs::path& run_dir) {
    RunLock lock(run_dir);
    RunConfig config = load_run_config(run_dir, config_flag);
    pin_config(config, run_dir);
    auto embedder = make_embedder(config.embedding);
    Store store;
    store.attach_run_dir(run_dir, *embedder);
    Backtester backtester(config, store, run_dir);
    const RunSummary summary = backtester.run(phase);
    std::cout << to_string(phase) << " complete: " << summary.days << " days, "
              << summary.decisions << " decisions, " << summary.trades << " trades, "
              << summary.sessions << " debate sessions\n";
    std::cout << "reports: " << (run_dir / "report.csv").string() << ", "
              << (run_dir / "report.json").string() << "\n";
    if (summary.lookahead_violations > 0) {
        std::cout << "WARNING: " << summary.lookahead_violations
                  << " lookahead violations flagged by the context auditor\n";
    }
    return 0;
}

int cmd_ingest(const fs::path& run_dir, const std::string& config_flag,
               const std::string& prices, const std::string& frequency,
               const std::string& holdings, const std::string& news) {
    RunLock lock(run_dir);
    RunConfig config = load_run_config(run_dir, config_flag);
    pin_config(config, run_dir);
    auto embedder = make_embedder(config.embedding);
    Store store;
    store.attach_run_dir(run_dir, *embedder);

    auto print_report = [](const char* what, const IngestReport& report) {
        std::cout << what << ": accepted " << report.accepted << ", rejected "
                  << report.rejected << ", duplicates " << report.duplicates;
        if (report.memory_events > 0) {
            std::cout << ", memory events " << report.memory_events;
        }
        std::cout << "\n";
        for (const auto& err : report.errors) std::cout << "  " << err << "\n";
    };

    if (!prices.empty()) {
        const PriceFrequency freq =
            frequency == "minute" ? PriceFrequency::Minute : PriceFrequency::Daily;
        print_report("prices", ingest_prices(store, prices, freq));
    }
    if (!holdings.empty()) {
        print_report("holdings", ingest_holdings(store, holdings));
    }
    if (!news.empty()) {
        print_report("news", ingest_news(store, news, config, *embedder));
    }
    return 0;
}

int cmd_query(const fs::path& run_dir, const std::string& agent, const std::string& layer_name,
              std::size_t k, const std::string& prompt, const std::string& date_flag) {
    RunConfig config;
    if (fs::exists(run_dir / "config.json")) {
        config = RunConfig::load(run_dir / "config.json");
    } else {
        config.agents.push_back(TraderCharacter{"none", RiskProfile::Neutral, {"none"}, 0.0});
        config.train_from = config.train_to = Timestamp::civil(2020, 1, 1);
        config.test_from = config.test_to = Timestamp::civil(2020, 1, 2);
    }
    auto embedder = make_embedder(config.embedding);
    auto store = Store::replay(run_dir, *embedder);

    Timestamp now;
    if (!date_flag.empty()) {
        now = Timestamp::parse(date_flag).at(23, 59);
    } else {
        // default clock: one minute past the newest visible memory
        std::int64_t max_minutes = 0;
        for (LayerKind layer : kAllLayers) {
            for (const auto* event :
                 store->cohort(agent, layer, Timestamp::from_minutes(1LL << 40))) {
                max_minutes = std::max(max_minutes, event->timestamp.minutes());
            }
        }
        now = Timestamp::from_minutes(max_minutes + 1);
    }

    MemoryEngine engine(*store, config.layers, *embedder);
    const LayerKind layer = layer_from_string(layer_name);
    std::printf("%-14s %-20s %8s %8s %8s %8s  %s\n", "id", "timestamp", "gamma", "recency",
                "relev", "import", "text");
    if (store->layer_size(agent, layer) == 0) {
        return 0; // empty layer: empty table
    }
    const auto ranked = engine.rank_top_k(agent, layer, embedder->embed(prompt), k, now);
    for (const auto& scored : ranked) {
        std::string text = scored.event.text;
        if (text.size() > 60) text = text.substr(0, 57) + "...";
        std::printf("%-14s %-20s %8.3f %8.3f %8.3f %8.3f  %s\n", scored.event.id.c_str(),
                    scored.event.timestamp.to_string().c_str(), scored.score.gamma,
                    scored.score.recency, scored.score.relevancy, scored.score.importance,
                    text.c_str());
    }
    return 0;
}

int cmd_report(const fs::path& run_dir, const std::string& format, std::string phase_flag) {
    const RunConfig config = RunConfig::load(run_dir / "config.json");
    if (phase_flag.empty()) {
        phase_flag = Backtester::phase_completed(run_dir, Phase::Test) ? "test" : "train";
    }
    const Phase phase = phase_flag == "test" ? Phase::Test : Phase::Train;
    auto embedder = make_embedder(config.embedding);
    Store store;
    store.attach_run_dir(run_dir, *embedder);
    Backtester backtester(config, store, run_dir);
    const MetricsReport report = backtester.metrics(phase);
    const ReportFormat fmt = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
    const fs::path path =
        emit_report(report, fmt, run_dir / (format == "json" ? "report.json" : "report.csv"));
    std::ifstream in(path);
    std::cout << in.rdbuf();
    return 0;
}

int cmd_export_debates(const fs::path& run_dir, const std::string& out_flag) {
    const fs::path cog_path = run_dir / "cognition.jsonl";
    const fs::path out_path = out_flag.empty() ? run_dir / "transcripts.jsonl" : fs::path(out_flag);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + out_path.string());
    std::size_t count = 0;
    if (fs::exists(cog_path)) {
        std::ifstream in(cog_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            if (j.value("kind", "") == "debate") {
                out << j.at("message").dump() << '\n';
                ++count;
            }
        }
    }
    std::cout << "exported " << count << " debate messages to " << out_path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered-memory trading agents"};
    app.require_subcommand(1);

    std::string run_dir = "runs/default";
    std::string config_flag;
    std::string run_id_flag;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load market data files into a run directory");
    std::string prices, holdings, news, frequency = "daily";
    ingest->add_option("--run-dir", run_dir, "run directory");
    ingest->add_option("--config", config_flag, "run config (pinned into the run dir)");
    ingest->add_option("--prices", prices, "price CSV (date,ticker,open,high,low,close,volume)");
    ingest->add_option("--frequency", frequency, "daily|minute")
        ->check(CLI::IsMember({"daily", "minute"}));
    ingest->add_option("--holdings", holdings, "holdings CSV (date,fund,ticker,shares,direction)");
    ingest->add_option("--news", news, "news JSONL ({timestamp,ticker,headline,body})");

    // fixtures
    auto* fixtures = app.add_subcommand("fixtures", "generate a synthetic data corpus");
    int days = 60;
    std::string tickers_flag = "AAA,BBB,CCC,DDD,EEE";
    std::uint64_t seed = 42;
    std::string out_dir = "fixtures";
    std::string start_date = "2020-08-15";
    fixtures->add_option("--days", days, "calendar days to generate");
    fixtures->add_option("--tickers", tickers_flag, "comma-separated tickers");
    fixtures->add_option("--seed", seed, "rng seed");
    fixtures->add_option("--out", out_dir, "output directory");
    fixtures->add_option("--start-date", start_date, "first day (YYYY-MM-DD)");

    // train / test
    auto* train = app.add_subcommand("train", "run the fund-guided training phase");
    train->add_option("--config", config_flag, "run config json");
    train->add_option("--run-dir", run_dir, "run directory");
    auto* test = app.add_subcommand("test", "run the price-only testing phase");
    test->add_option("--config", config_flag, "run config json");
    test->add_option("--run-dir", run_dir, "run directory");

    // query
    auto* query = app.add_subcommand("query", "rank an agent's layer against a prompt");
    std::string agent, layer_name = "short", prompt, date_flag;
    std::size_t k = 5;
    query->add_option("--run-dir", run_dir, "run directory");
    query->add_option("--agent", agent, "agent id")->required();
    query->add_option("--layer", layer_name, "short|middle|long")
        ->check(CLI::IsMember({"short", "middle", "long"}));
    query->add_option("--k", k, "results to return");
    query->add_option("--prompt", prompt, "prompt text")->required();
    query->add_option("--date", date_flag, "clock date (YYYY-MM-DD), default: newest memory");

    // report
    auto* report = app.add_subcommand("report", "rebuild and print the metrics report");
    std::string format = "csv", phase_flag;
    report->add_option("--run-dir", run_dir, "run directory");
    report->add_option("--run", run_id_flag, "run id under runs/");
    report->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    report->add_option("--phase", phase_flag, "train|test (default: last completed)")
        ->check(CLI::IsMember({"train", "test", ""}));

    // export-debates
    auto* export_debates =
        app.add_subcommand("export-debates", "export debate transcripts as JSON-lines");
    std::string out_flag;
    export_debates->add_option("--run-dir", run_dir, "run directory");
    export_debates->add_option("--out", out_flag, "output path (default <run-dir>/transcripts.jsonl)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!run_id_flag.empty()) run_dir = (fs::path("runs") / run_id_flag).string();
        if (ingest->parsed()) {
            return cmd_ingest(run_dir, config_flag, prices, frequency, holdings, news);
        }
        if (fixtures->parsed()) {
            FixtureSpec spec;
            spec.days = days;
            spec.seed = seed;
            spec.out_dir = out_dir;
            spec.start_date = Timestamp::parse(start_date);
            std::string token;
            std::stringstream ss(tickers_flag);
            while (std::getline(ss, token, ',')) {
                if (!token.empty()) spec.tickers.push_back(token);
            }
            generate_fixtures(spec);
            std::cout << "fixtures written to " << out_dir << "\n";
            return 0;
        }
        if (train->parsed()) return run_phase(Phase::Train, config_flag, run_dir);
        if (test->parsed()) return run_phase(Phase::Test, config_flag, run_dir);
        if (query->parsed()) {
            return cmd_query(run_dir, agent, layer_name, k, prompt, date_flag);
        }
        if (report->parsed()) return cmd_report(run_dir, format, phase_flag);
        if (export_debates->parsed()) return cmd_export_debates(run_dir, out_flag);
    } catch (const Error& e) {
        nlohmann::ordered_json err{{"code", to_string(e.code())}, {"message", e.what()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err{{"code", "Unhandled"}, {"message", e.what()}};
        std::cerr << "error: " << err.dump() << "\n";
        return 1;
    }
    return 2;
}
