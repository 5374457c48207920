#include "ltm/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

const char* to_string(Phase p) { return p == Phase::Train ? "train" : "test"; }

namespace {

nlohmann::ordered_json layer_to_json(const LayerParams& p) {
    return nlohmann::ordered_json{{"stability_days", p.stability_days},
                                  {"importance", p.importance_const},
                                  {"weights",
                                   {{"recency", p.weight_recency},
                                    {"relevancy", p.weight_relevancy},
                                    {"importance", p.weight_importance}}},
                                  {"promotion_threshold", p.promotion_threshold},
                                  {"purge_threshold", p.purge_threshold}};
}

LayerParams layer_from_json(const nlohmann::ordered_json& j, const LayerParams& defaults) {
    LayerParams p = defaults;
    if (j.contains("stability_days")) p.stability_days = j["stability_days"].get<double>();
    if (j.contains("importance")) p.importance_const = j["importance"].get<double>();
    if (j.contains("weights")) {
        p.weight_recency = j["weights"].at("recency").get<double>();
        p.weight_relevancy = j["weights"].at("relevancy").get<double>();
        p.weight_importance = j["weights"].at("importance").get<double>();
    }
    if (j.contains("promotion_threshold"))
        p.promotion_threshold = j["promotion_threshold"].get<double>();
    if (j.contains("purge_threshold")) p.purge_threshold = j["purge_threshold"].get<double>();
    return p;
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::ordered_json& j) {
    RunConfig c;
    c.run_id = j.value("run_id", c.run_id);
    c.seed = j.value("seed", c.seed);
    c.top_k = j.value("top_k", c.top_k);
    if (j.contains("agents")) {
        for (const auto& a : j["agents"]) {
            TraderCharacter character;
            character.agent_id = a.at("id").get<std::string>();
            character.risk = risk_from_string(a.at("risk").get<std::string>());
            for (const auto& s : a.at("sectors")) {
                character.sectors.insert(s.get<std::string>());
            }
            character.initial_cash = a.at("cash").get<double>();
            c.agents.push_back(std::move(character));
        }
    }
    if (j.contains("sectors")) {
        for (const auto& [ticker, sector] : j["sectors"].items()) {
            c.sectors[ticker] = sector.get<std::string>();
        }
    }
    if (j.contains("train_span")) {
        c.train_from = Timestamp::parse(j["train_span"].at("from").get<std::string>());
        c.train_to = Timestamp::parse(j["train_span"].at("to").get<std::string>());
    }
    if (j.contains("test_span")) {
        c.test_from = Timestamp::parse(j["test_span"].at("from").get<std::string>());
        c.test_to = Timestamp::parse(j["test_span"].at("to").get<std::string>());
    }
    if (j.contains("layers")) {
        const auto defaults = LayerConfig::defaults();
        c.layers.short_term = layer_from_json(j["layers"].value("short", nlohmann::ordered_json::object()), defaults.short_term);
        c.layers.middle_term = layer_from_json(j["layers"].value("middle", nlohmann::ordered_json::object()), defaults.middle_term);
        c.layers.long_term = layer_from_json(j["layers"].value("long", nlohmann::ordered_json::object()), defaults.long_term);
    }
    if (j.contains("trade_sizing")) {
        c.sizing.significant = j["trade_sizing"].value("significant", c.sizing.significant);
        c.sizing.slight = j["trade_sizing"].value("slight", c.sizing.slight);
    }
    if (j.contains("decision")) {
        const auto& d = j["decision"];
        c.decision.momentum_window = d.value("momentum_window", c.decision.momentum_window);
        c.decision.slight_threshold = d.value("slight_threshold", c.decision.slight_threshold);
        c.decision.significant_threshold =
            d.value("significant_threshold", c.decision.significant_threshold);
        c.decision.seeking_multiplier = d.value("seeking_multiplier", c.decision.seeking_multiplier);
        c.decision.averse_multiplier = d.value("averse_multiplier", c.decision.averse_multiplier);
    }
    if (j.contains("counter")) {
        c.counter.pnl_trigger = j["counter"].value("pnl_trigger", c.counter.pnl_trigger);
    }
    if (j.contains("debate")) {
        c.debate.max_rounds = j["debate"].value("max_rounds", c.debate.max_rounds);
    }
    if (j.contains("embedding")) {
        const auto& e = j["embedding"];
        c.embedding.provider = e.value("provider", c.embedding.provider);
        c.embedding.dimension = e.value("dimension", c.embedding.dimension);
        c.embedding.endpoint = e.value("endpoint", c.embedding.endpoint);
        c.embedding.timeout_ms = e.value("timeout_ms", c.embedding.timeout_ms);
    }
    if (j.contains("core")) {
        const auto& k = j["core"];
        c.core.kind = k.value("kind", c.core.kind);
        c.core.endpoint = k.value("endpoint", c.core.endpoint);
        c.core.model = k.value("model", c.core.model);
        c.core.timeout_ms = k.value("timeout_ms", c.core.timeout_ms);
        c.core.strict = k.value("strict", c.core.strict);
        c.core.api_key_env = k.value("api_key_env", c.core.api_key_env);
    }
    return c;
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json agent_list = nlohmann::ordered_json::array();
    for (const auto& a : agents) {
        agent_list.push_back(nlohmann::ordered_json{
            {"id", a.agent_id},
            {"risk", to_string(a.risk)},
            {"sectors", std::vector<std::string>(a.sectors.begin(), a.sectors.end())},
            {"cash", a.initial_cash}});
    }
    nlohmann::ordered_json sector_map = nlohmann::ordered_json::object();
    for (const auto& [ticker, sector] : sectors) sector_map[ticker] = sector;
    return nlohmann::ordered_json{
        {"run_id", run_id},
        {"seed", seed},
        {"top_k", top_k},
        {"agents", std::move(agent_list)},
        {"sectors", std::move(sector_map)},
        {"train_span", {{"from", train_from.date_string()}, {"to", train_to.date_string()}}},
        {"test_span", {{"from", test_from.date_string()}, {"to", test_to.date_string()}}},
        {"layers",
         {{"short", layer_to_json(layers.short_term)},
          {"middle", layer_to_json(layers.middle_term)},
          {"long", layer_to_json(layers.long_term)}}},
        {"trade_sizing", {{"significant", sizing.significant}, {"slight", sizing.slight}}},
        {"decision",
         {{"momentum_window", decision.momentum_window},
          {"slight_threshold", decision.slight_threshold},
          {"significant_threshold", decision.significant_threshold},
          {"seeking_multiplier", decision.seeking_multiplier},
          {"averse_multiplier", decision.averse_multiplier}}},
        {"counter", {{"pnl_trigger", counter.pnl_trigger}}},
        {"debate", {{"max_rounds", debate.max_rounds}}},
        {"embedding",
         {{"provider", embedding.provider},
          {"dimension", embedding.dimension},
          {"endpoint", embedding.endpoint},
          {"timeout_ms", embedding.timeout_ms}}},
        {"core",
         {{"kind", core.kind},
          {"endpoint", core.endpoint},
          {"model", core.model},
          {"timeout_ms", core.timeout_ms},
          {"strict", core.strict},
          {"api_key_env", core.api_key_env}}}};
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::ConfigError, "cannot open config " + path.string());
    }
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorCode::ConfigError, "config parse failure: " + std::string(e.what()));
    }
    RunConfig c = from_json(j);
    c.validate();
    return c;
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write config " + path.string());
    }
    out << to_json().dump(2) << '\n';
}

void RunConfig::validate() const {
    if (agents.empty()) {
        fail(ErrorCode::ConfigError, "agent roster is empty");
    }
    for (const auto& a : agents) {
        if (a.agent_id.empty()) fail(ErrorCode::ConfigError, "agent with empty id");
        if (a.sectors.empty()) {
            fail(ErrorCode::ConfigError, "agent " + a.agent_id + " has no sector scope");
        }
        if (a.initial_cash < 0) {
            fail(ErrorCode::ConfigError, "agent " + a.agent_id + " has negative cash");
        }
    }
    if (top_k < 1) fail(ErrorCode::ConfigError, "top_k must be >= 1");
    if (train_from > train_to) fail(ErrorCode::ConfigError, "train span inverted");
    if (test_from > test_to) fail(ErrorCode::ConfigError, "test span inverted");
    if (!(train_to < test_from)) {
        fail(ErrorCode::ConfigError, "train span must precede test span");
    }
    if (debate.max_rounds < 1) fail(ErrorCode::ConfigError, "debate.max_rounds must be >= 1");
    if (decision.momentum_window < 1) {
        fail(ErrorCode::ConfigError, "momentum_window must be >= 1");
    }
    if (sizing.significant <= 0 || sizing.slight <= 0 || sizing.significant > 1 ||
        sizing.slight > 1) {
        fail(ErrorCode::ConfigError, "trade sizing fractions must sit in (0,1]");
    }
    layers.validate();
}

std::string RunConfig::config_hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> RunConfig::scope_tickers(const TraderCharacter& character) const {
    std::vector<std::string> out;
    for (const auto& [ticker, sector] : sectors) {
        if (character.sectors.count(sector)) out.push_back(ticker);
    }
    std::sort(out.begin(), out.end());
    return out;
}

const TraderCharacter* RunConfig::find_agent(const std::string& agent_id) const {
    for (const auto& a : agents) {
        if (a.agent_id == agent_id) return &a;
    }
    return nullptr;
}

} // namespace ltm
