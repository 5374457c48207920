#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace test_support;

namespace {

// Runs the built CLI with stdout/stderr captured to a file; returns the exit
// code and the combined output.
struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    static const std::string binary = LTM_CLI_PATH;
    TempDir capture("cliout");
    const std::string out_file = (capture.path() / "out.txt").string();
    const std::string command = binary + " " + args + " >" + out_file + " 2>&1";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = read_file(out_file);
    return result;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("query on an empty store prints an empty table and exits zero") {
    TempDir run("cliq");
    const CliResult r = run_cli("query --run-dir " + run.path().string() +
                                " --agent alpha --layer short --k 5 --prompt \"rates\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("gamma") != std::string::npos); // header only
}

TEST_CASE("train with a missing config exits one with a machine-readable error") {
    TempDir run("clit");
    const CliResult r = run_cli("train --config /nonexistent/config.json --run-dir " +
                                run.path().string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("\"code\":\"ConfigError\"") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors with exit two") {
    const CliResult r = run_cli("train --no-such-flag");
    CHECK(r.exit_code == 2);
    const CliResult unknown_cmd = run_cli("frobnicate");
    CHECK(unknown_cmd.exit_code == 2);
}

TEST_CASE("fixtures with a fixed seed are byte-identical") {
    TempDir a("clifa");
    TempDir b("clifb");
    const std::string flags = " --days 16 --tickers AAA,BBB --seed 9 --out ";
    CHECK(run_cli("fixtures" + flags + a.path().string()).exit_code == 0);
    CHECK(run_cli("fixtures" + flags + b.path().string()).exit_code == 0);
    for (const char* name : {"prices.csv", "news.jsonl", "holdings.csv", "config.json"}) {
        CHECK(read_file(a.path() / name) == read_file(b.path() / name));
    }
}

TEST_CASE("the full pipeline runs through the CLI") {
    TempDir fx("clifx");
    TempDir run("clirun");
    REQUIRE(run_cli("fixtures --days 18 --tickers AAA,BBB --seed 4 --out " +
                    fx.path().string())
                .exit_code == 0);
    REQUIRE(run_cli("ingest --run-dir " + run.path().string() + " --config " +
                    (fx.path() / "config.json").string() + " --prices " +
                    (fx.path() / "prices.csv").string() + " --holdings " +
                    (fx.path() / "holdings.csv").string() + " --news " +
                    (fx.path() / "news.jsonl").string())
                .exit_code == 0);
    REQUIRE(run_cli("train --run-dir " + run.path().string()).exit_code == 0);

    // test before... already trained; run test phase
    REQUIRE(run_cli("test --run-dir " + run.path().string()).exit_code == 0);

    const CliResult report =
        run_cli("report --run-dir " + run.path().string() + " --format csv");
    CHECK(report.exit_code == 0);
    CHECK(report.output.find("agent_id,cumulative_return") != std::string::npos);
    CHECK(report.output.find("aggregate") != std::string::npos);

    const CliResult debates = run_cli("export-debates --run-dir " + run.path().string());
    CHECK(debates.exit_code == 0);
    CHECK(std::filesystem::exists(run.path() / "transcripts.jsonl"));

    const CliResult query = run_cli("query --run-dir " + run.path().string() +
                                    " --agent alpha --layer short --k 3 --prompt \"news\"");
    CHECK(query.exit_code == 0);
    CHECK(query.output.find("mem-") != std::string::npos);
}

TEST_CASE("a second invocation against a locked run directory fails cleanly") {
    TempDir run("clilock");
    std::ofstream(run.path() / ".lock") << "held\n";
    const CliResult r = run_cli("ingest --run-dir " + run.path().string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("\"code\":\"IoError\"") != std::string::npos);
}

TEST_CASE("config mismatches against a pinned run are refused") {
    TempDir fx("clifx2");
    TempDir run("clipin");
    REQUIRE(run_cli("fixtures --days 16 --tickers AAA --seed 5 --out " + fx.path().string())
                .exit_code == 0);
    REQUIRE(run_cli("ingest --run-dir " + run.path().string() + " --config " +
                    (fx.path() / "config.json").string())
                .exit_code == 0);
    // mutate the config and try to train with it
    auto config = read_file(fx.path() / "config.json");
    const auto pos = config.find("\"top_k\": 3");
    REQUIRE(pos != std::string::npos);
    config.replace(pos, 10, "\"top_k\": 4");
    std::ofstream(fx.path() / "config2.json") << config;
    const CliResult r = run_cli("train --run-dir " + run.path().string() + " --config " +
                                (fx.path() / "config2.json").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("does not match") != std::string::npos);
}

} // TEST_SUITE
