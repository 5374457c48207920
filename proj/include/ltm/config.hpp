#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/records.hpp"
#include "ltm/time.hpp"

namespace ltm {

enum class Phase { Train, Test };

const char* to_string(Phase p);

struct DecisionParams {
    int momentum_window = 5;            // sessions; decide needs window+1 bars
    double slight_threshold = 0.01;
    double significant_threshold = 0.03;
    double seeking_multiplier = 0.5;    // scales both thresholds
    double averse_multiplier = 1.5;
};

struct TradeSizing {
    double significant = 0.25; // fraction of cash (buys) / position (sells)
    double slight = 0.10;
};

struct CounterParams {
    double pnl_trigger = 0.02; // |daily position return| that boosts cited events
};

struct DebateParams {
    int max_rounds = 2;
};

struct EmbeddingConfig {
    std::string provider = "hashing"; // "hashing" | "http"
    std::size_t dimension = 256;
    std::string endpoint;
    int timeout_ms = 5000;
};

struct CoreConfig {
    std::string kind = "rule_based"; // "rule_based" | "chat"
    std::string endpoint;
    std::string model;
    int timeout_ms = 10000;
    bool strict = true;              // endpoint failure aborts; lenient holds
    std::string api_key_env = "LTM_LLM_API_KEY";
};

struct RunConfig {
    std::string run_id = "run";
    std::uint64_t seed = 42;
    int top_k = 3;
    std::vector<TraderCharacter> agents;
    std::map<std::string, std::string> sectors; // ticker -> sector tag
    Timestamp train_from, train_to;             // inclusive dates
    Timestamp test_from, test_to;
    LayerConfig layers = LayerConfig::defaults();
    TradeSizing sizing;
    DecisionParams decision;
    CounterParams counter;
    DebateParams debate;
    EmbeddingConfig embedding;
    CoreConfig core;

    static RunConfig from_json(const nlohmann::ordered_json& j);
    nlohmann::ordered_json to_json() const;
    static RunConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    void validate() const; // ConfigError on violations
    std::string config_hash() const;

    // Tickers whose sector falls inside the character's scope, sorted.
    std::vector<std::string> scope_tickers(const TraderCharacter& character) const;
    const TraderCharacter* find_agent(const std::string& agent_id) const;

    Timestamp span_from(Phase p) const { return p == Phase::Train ? train_from : test_from; }
    Timestamp span_to(Phase p) const { return p == Phase::Train ? train_to : test_to; }
};

} // namespace ltm
