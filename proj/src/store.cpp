#include "ltm/store.hpp"

#include <algorithm>
#include <cstdio>

#include "ltm/errors.hpp"
#include "ltm/json_io.hpp"

namespace ltm {

namespace {

std::string memory_id(std::uint64_t seq) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "mem-%09llu", static_cast<unsigned long long>(seq));
    return buf;
}

std::uint64_t parse_memory_id(const std::string& id) {
    return std::strtoull(id.c_str() + 4, nullptr, 10);
}

int layer_index(LayerKind layer) { return static_cast<int>(layer); }

std::string immediate_key(const Reflection& r) {
    return r.agent_id + "|" + r.ticker + "|" + r.timestamp.date_string();
}

std::uint64_t fnv_bytes(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

// ---- raw input ----

std::uint64_t Store::append(const PriceBar& bar) {
    if (bar.open <= 0 || bar.high <= 0 || bar.low <= 0 || bar.close <= 0) {
        fail(ErrorCode::SchemaViolation, "non-positive price in bar for " + bar.ticker);
    }
    if (bar.low > std::min(bar.open, bar.close) || std::max(bar.open, bar.close) > bar.high) {
        fail(ErrorCode::SchemaViolation, "OHLC ordering violated for " + bar.ticker + " " +
                                             bar.timestamp.to_string());
    }
    if (bar.volume < 0) {
        fail(ErrorCode::SchemaViolation, "negative volume for " + bar.ticker);
    }
    auto& per_ticker = price_index_[bar.ticker];
    if (per_ticker.count(bar.timestamp.minutes())) {
        fail(ErrorCode::SchemaViolation,
             "duplicate bar " + bar.ticker + " " + bar.timestamp.to_string());
    }
    const std::uint64_t id = next_raw_id();
    per_ticker[bar.timestamp.minutes()] = prices_.size();
    prices_.push_back(bar);
    write_raw_line(to_json(bar, id).dump());
    return id;
}

std::uint64_t Store::append(const NewsItem& item) {
    if (item.ticker.empty() || item.headline.empty()) {
        fail(ErrorCode::SchemaViolation, "news item missing ticker or headline");
    }
    const std::uint64_t id = next_raw_id();
    news_.push_back(item);
    write_raw_line(to_json(item, id).dump());
    return id;
}

std::uint64_t Store::append(const HoldingRecord& record) {
    if (record.shares == 0) {
        fail(ErrorCode::SchemaViolation, "holding record with zero shares delta");
    }
    const bool buy = record.shares > 0;
    if (buy != (record.direction == TradeDirection::Buy)) {
        fail(ErrorCode::SchemaViolation, "holding direction disagrees with shares sign for " +
                                             record.ticker);
    }
    const std::uint64_t id = next_raw_id();
    holdings_.push_back(record);
    write_raw_line(to_json(record, id).dump());
    return id;
}

bool Store::has_price(const std::string& ticker, Timestamp date) const {
    auto it = price_index_.find(ticker);
    if (it == price_index_.end()) return false;
    const std::int64_t lo = date.start_of_day().minutes();
    auto bar = it->second.lower_bound(lo);
    return bar != it->second.end() && bar->first < lo + 1440;
}

std::optional<PriceBar> Store::price_bar(const std::string& ticker, Timestamp date) const {
    auto it = price_index_.find(ticker);
    if (it == price_index_.end()) return std::nullopt;
    const std::int64_t lo = date.start_of_day().minutes();
    // last bar of the day carries the daily close for minute feeds
    auto upper = it->second.lower_bound(lo + 1440);
    if (upper == it->second.begin()) return std::nullopt;
    --upper;
    if (upper->first < lo) return std::nullopt;
    return prices_[upper->second];
}

std::vector<std::pair<Timestamp, double>> Store::closes_up_to(const std::string& ticker,
                                                              Timestamp date,
                                                              std::size_t n) const {
    std::vector<std::pair<Timestamp, double>> out;
    auto it = price_index_.find(ticker);
    if (it == price_index_.end()) return out;
    const std::int64_t end = date.start_of_day().minutes() + 1440;
    std::int64_t current_day = -1;
    for (auto bar = it->second.begin(); bar != it->second.end() && bar->first < end; ++bar) {
        const std::int64_t day = bar->first >= 0 ? bar->first / 1440 : (bar->first - 1439) / 1440;
        const auto& px = prices_[bar->second];
        if (day == current_day) {
            out.back() = {px.timestamp, px.close};
        } else {
            out.emplace_back(px.timestamp, px.close);
            current_day = day;
        }
    }
    if (out.size() > n) out.erase(out.begin(), out.end() - static_cast<std::ptrdiff_t>(n));
    return out;
}

std::vector<HoldingRecord> Store::holdings_on(Timestamp date, const std::string& ticker) const {
    std::vector<HoldingRecord> out;
    const std::int64_t lo = date.start_of_day().minutes();
    for (const auto& h : holdings_) {
        if (h.timestamp.minutes() >= lo && h.timestamp.minutes() < lo + 1440 &&
            (ticker.empty() || h.ticker == ticker)) {
            out.push_back(h);
        }
    }
    return out;
}

std::vector<NewsItem> Store::news_on(Timestamp date) const {
    std::vector<NewsItem> out;
    const std::int64_t lo = date.start_of_day().minutes();
    for (const auto& item : news_) {
        if (item.timestamp.minutes() >= lo && item.timestamp.minutes() < lo + 1440) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<std::string> Store::tickers() const {
    std::vector<std::string> out;
    for (const auto& [ticker, _] : price_index_) out.push_back(ticker);
    return out;
}

namespace {
void check_range(Timestamp from, Timestamp to) {
    if (from > to) {
        fail(ErrorCode::InvalidRange,
             "window " + from.to_string() + " .. " + to.to_string() + " is inverted");
    }
}
} // namespace

std::vector<PriceBar> Store::price_window(const std::string& ticker, Timestamp from,
                                          Timestamp to) const {
    check_range(from, to);
    std::vector<PriceBar> out;
    for (const auto& bar : prices_) {
        if (bar.ticker == ticker && bar.timestamp >= from && bar.timestamp < to) {
            out.push_back(bar);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

std::vector<NewsItem> Store::news_window(const std::string& ticker, Timestamp from,
                                         Timestamp to) const {
    check_range(from, to);
    std::vector<NewsItem> out;
    for (const auto& item : news_) {
        if (item.ticker == ticker && item.timestamp >= from && item.timestamp < to) {
            out.push_back(item);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

std::vector<HoldingRecord> Store::holding_window(const std::string& ticker, Timestamp from,
                                                 Timestamp to) const {
    check_range(from, to);
    std::vector<HoldingRecord> out;
    for (const auto& h : holdings_) {
        if (h.ticker == ticker && h.timestamp >= from && h.timestamp < to) {
            out.push_back(h);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

// ---- memory events ----

void Store::materialize_memory(MemoryEvent event) {
    if (purged_.count(event.id)) {
        fail(ErrorCode::SchemaViolation, "purged id resurrected: " + event.id);
    }
    if (memory_locator_.count(event.id)) {
        fail(ErrorCode::SchemaViolation, "duplicate memory id: " + event.id);
    }
    memory_locator_[event.id] = {event.agent_id, layer_index(event.layer)};
    agents_[event.agent_id].layers[layer_index(event.layer)].push_back(std::move(event));
}

std::string Store::add_memory(MemoryEvent event) {
    if (event.agent_id.empty()) {
        fail(ErrorCode::SchemaViolation, "memory event without agent");
    }
    if (event.embedding.dimension() == 0) {
        fail(ErrorCode::DegenerateEmbedding, "memory event without embedding");
    }
    event.id = memory_id(++memory_seq_);
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "memory_add"},
                               {"event", memory_event_to_json(event)}};
    write_cog_line(rec.dump());
    std::string id = event.id;
    materialize_memory(std::move(event));
    return id;
}

std::vector<const MemoryEvent*> Store::cohort(const std::string& agent_id, LayerKind layer,
                                              Timestamp now) const {
    std::vector<const MemoryEvent*> out;
    auto it = agents_.find(agent_id);
    if (it == agents_.end()) return out;
    for (const auto& event : it->second.layers[layer_index(layer)]) {
        if (event.timestamp <= now) out.push_back(&event);
    }
    return out;
}

std::size_t Store::layer_size(const std::string& agent_id, LayerKind layer) const {
    auto it = agents_.find(agent_id);
    return it == agents_.end() ? 0 : it->second.layers[layer_index(layer)].size();
}

const MemoryEvent* Store::find_memory(const std::string& id) const {
    auto loc = memory_locator_.find(id);
    if (loc == memory_locator_.end()) return nullptr;
    const auto& events = agents_.at(loc->second.first).layers[loc->second.second];
    for (const auto& event : events) {
        if (event.id == id) return &event;
    }
    return nullptr;
}

MemoryEvent* Store::find_mutable(const std::string& agent_id, const std::string& id) {
    auto loc = memory_locator_.find(id);
    if (loc == memory_locator_.end() || loc->second.first != agent_id) return nullptr;
    auto& events = agents_[agent_id].layers[loc->second.second];
    for (auto& event : events) {
        if (event.id == id) return &event;
    }
    return nullptr;
}

void Store::apply_retrieval(const std::string& agent_id, LayerKind layer, Timestamp now,
                            const std::vector<std::string>& returned_ids,
                            const std::vector<std::pair<std::string, double>>& relevancies) {
    nlohmann::ordered_json rel = nlohmann::ordered_json::object();
    for (const auto& [id, r] : relevancies) rel[id] = r;
    nlohmann::ordered_json rec{{"id", ++cog_seq_},      {"kind", "retrieval"},
                               {"agent_id", agent_id},  {"layer", to_string(layer)},
                               {"timestamp", now.to_string()}, {"returned", returned_ids},
                               {"relevancy", rel}};
    write_cog_line(rec.dump());
    for (const auto& [id, r] : relevancies) {
        if (MemoryEvent* event = find_mutable(agent_id, id)) event->last_relevancy = r;
    }
    for (const auto& id : returned_ids) {
        if (MemoryEvent* event = find_mutable(agent_id, id)) event->access_count += 1;
    }
}

void Store::apply_access_boost(const std::string& agent_id, const std::vector<std::string>& ids,
                               const std::string& reason) {
    if (ids.empty()) return;
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "access_boost"},
                               {"agent_id", agent_id},
                               {"ids", ids},
                               {"reason", reason}};
    write_cog_line(rec.dump());
    for (const auto& id : ids) {
        if (MemoryEvent* event = find_mutable(agent_id, id)) event->access_count += 1;
    }
}

void Store::apply_sweep(const SweepOutcome& outcome) {
    nlohmann::ordered_json promoted = nlohmann::ordered_json::array();
    for (const auto& t : outcome.promoted) {
        promoted.push_back(nlohmann::ordered_json{
            {"id", t.id}, {"from", to_string(t.from)}, {"to", to_string(t.to)}});
    }
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "sweep"},
                               {"date", outcome.date.date_string()},
                               {"agent_id", outcome.agent_id},
                               {"promoted", promoted},
                               {"purged", outcome.purged},
                               {"pinned", outcome.pinned}};
    write_cog_line(rec.dump());
    mutate_sweep(outcome);
}

void Store::mutate_sweep(const SweepOutcome& outcome) {
    for (const auto& t : outcome.promoted) {
        auto loc = memory_locator_.find(t.id);
        if (loc == memory_locator_.end()) continue;
        auto& from_events = agents_[outcome.agent_id].layers[layer_index(t.from)];
        auto it = std::find_if(from_events.begin(), from_events.end(),
                               [&](const MemoryEvent& e) { return e.id == t.id; });
        if (it == from_events.end()) continue;
        MemoryEvent moved = std::move(*it);
        from_events.erase(it);
        moved.layer = t.to;
        moved.access_count = 0; // promotion resets the add-counter
        memory_locator_[t.id] = {outcome.agent_id, layer_index(t.to)};
        agents_[outcome.agent_id].layers[layer_index(t.to)].push_back(std::move(moved));
    }
    for (const auto& id : outcome.pinned) {
        if (MemoryEvent* event = find_mutable(outcome.agent_id, id)) event->pinned = true;
    }
    for (const auto& id : outcome.purged) {
        auto loc = memory_locator_.find(id);
        if (loc == memory_locator_.end()) continue;
        auto& events = agents_[outcome.agent_id].layers[loc->second.second];
        events.erase(std::remove_if(events.begin(), events.end(),
                                    [&](const MemoryEvent& e) { return e.id == id; }),
                     events.end());
        memory_locator_.erase(loc);
        purged_.insert(id);
    }
}

// ---- reflections & debate ----

void Store::add_reflection(const Reflection& r) {
    if (r.flag == ReflectionFlag::Immediate) {
        const std::string key = immediate_key(r);
        if (immediate_keys_.count(key)) {
            fail(ErrorCode::DuplicateReflection,
                 "immediate reflection already recorded for " + key);
        }
        immediate_keys_.insert(key);
    }
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "reflection"},
                               {"reflection", reflection_to_json(r)}};
    write_cog_line(rec.dump());
    reflections_.push_back(r);
}

std::vector<Reflection> Store::reflections_in(const std::string& agent_id, Timestamp from,
                                              Timestamp to) const {
    check_range(from, to);
    std::vector<Reflection> out;
    for (const auto& r : reflections_) {
        if (r.agent_id == agent_id && r.timestamp >= from && r.timestamp < to) {
            out.push_back(r);
        }
    }
    return out;
}

std::size_t Store::reflection_count(const std::string& agent_id) const {
    std::size_t n = 0;
    for (const auto& r : reflections_) {
        if (r.agent_id == agent_id) ++n;
    }
    return n;
}

void Store::add_debate(const DebateMessage& m) {
    if (m.sender_id == m.receiver_id) {
        fail(ErrorCode::SchemaViolation, "debate message to self: " + m.sender_id);
    }
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "debate"},
                               {"message", debate_message_to_json(m)}};
    write_cog_line(rec.dump());
    debates_.push_back(m);
}

std::vector<DebateMessage> Store::feedback_in(const std::string& receiver_id, Timestamp from,
                                              Timestamp to) const {
    check_range(from, to);
    std::vector<DebateMessage> out;
    for (const auto& m : debates_) {
        if (m.receiver_id == receiver_id && m.timestamp >= from && m.timestamp < to) {
            out.push_back(m);
        }
    }
    return out;
}

void Store::day_close(Timestamp date) {
    nlohmann::ordered_json rec{{"id", ++cog_seq_},
                               {"kind", "day_close"},
                               {"date", date.date_string()}};
    write_cog_line(rec.dump());
}

// ---- similarity search ----

std::vector<std::pair<MemoryEvent, double>> Store::similarity_search(
    const std::string& agent_id, LayerKind layer, const EmbeddingVector& query,
    std::size_t n) const {
    if (n == 0) fail(ErrorCode::SchemaViolation, "similarity_search needs n >= 1");
    std::vector<std::pair<MemoryEvent, double>> out;
    auto it = agents_.find(agent_id);
    if (it == agents_.end()) return out;
    const auto& events = it->second.layers[layer_index(layer)];
    if (events.empty()) return out;

    std::vector<const double*> vecs(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].embedding.dimension() != query.dimension()) {
            fail(ErrorCode::DimensionMismatch,
                 "query dimension " + std::to_string(query.dimension()) + " vs stored " +
                     std::to_string(events[i].embedding.dimension()));
        }
        vecs[i] = events[i].embedding.data();
    }
    std::vector<double> cosines(events.size());
    kernels::cosine_batch(vecs.data(), events.size(), query.dimension(), query.data(),
                          cosines.data(), exec_policy_);

    std::vector<std::size_t> order(events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cosines[a] != cosines[b]) return cosines[a] > cosines[b];
        if (events[a].timestamp != events[b].timestamp)
            return events[a].timestamp > events[b].timestamp;
        return events[a].id < events[b].id;
    });
    const std::size_t take = std::min(n, events.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.emplace_back(events[order[i]], cosines[order[i]]);
    }
    return out;
}

// ---- persistence ----

void Store::write_raw_line(const std::string& line) {
    if (raw_log_.is_open()) {
        raw_log_ << line << '\n';
        raw_log_.flush();
    }
}

void Store::write_cog_line(const std::string& line) {
    if (cog_log_.is_open()) {
        cog_log_ << line << '\n';
        cog_log_.flush();
    }
}

void Store::attach_run_dir(const std::filesystem::path& dir, const EmbeddingProvider& embedder) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create run dir " + dir.string());

    const fs::path raw_path = dir / "raw_input.jsonl";
    const fs::path cog_path = dir / "cognition.jsonl";

    // Replay any existing logs before opening for append.
    if (fs::exists(raw_path) || fs::exists(cog_path)) {
        auto loaded = Store::replay(dir, embedder);
        prices_ = std::move(loaded->prices_);
        news_ = std::move(loaded->news_);
        holdings_ = std::move(loaded->holdings_);
        price_index_ = std::move(loaded->price_index_);
        raw_seq_ = loaded->raw_seq_;
        agents_ = std::move(loaded->agents_);
        memory_locator_ = std::move(loaded->memory_locator_);
        purged_ = std::move(loaded->purged_);
        reflections_ = std::move(loaded->reflections_);
        immediate_keys_ = std::move(loaded->immediate_keys_);
        debates_ = std::move(loaded->debates_);
        cog_seq_ = loaded->cog_seq_;
        memory_seq_ = loaded->memory_seq_;
    }

    raw_log_.open(raw_path, std::ios::app);
    cog_log_.open(cog_path, std::ios::app);
    if (!raw_log_ || !cog_log_) {
        fail(ErrorCode::IoError, "cannot open logs under " + dir.string());
    }
}

std::unique_ptr<Store> Store::replay(const std::filesystem::path& dir,
                                     const EmbeddingProvider& embedder,
                                     std::optional<Timestamp> up_to_date) {
    namespace fs = std::filesystem;
    auto store = std::make_unique<Store>();

    const fs::path raw_path = dir / "raw_input.jsonl";
    if (fs::exists(raw_path)) {
        std::ifstream in(raw_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const std::exception& e) {
                fail(ErrorCode::IoError, "raw_input.jsonl:" + std::to_string(line_no) + ": " +
                                             e.what());
            }
            const std::string kind = j.at("kind").get<std::string>();
            const auto id = j.at("id").get<std::uint64_t>();
            if (kind == "price_bar") {
                const PriceBar bar = price_bar_from_json(j);
                store->price_index_[bar.ticker][bar.timestamp.minutes()] = store->prices_.size();
                store->prices_.push_back(bar);
            } else if (kind == "news_item") {
                store->news_.push_back(news_item_from_json(j));
            } else if (kind == "holding_record") {
                store->holdings_.push_back(holding_from_json(j));
            } else {
                fail(ErrorCode::IoError, "unknown raw record kind '" + kind + "'");
            }
            store->raw_seq_ = std::max(store->raw_seq_, id);
        }
    }

    const fs::path cog_path = dir / "cognition.jsonl";
    if (fs::exists(cog_path)) {
        std::ifstream in(cog_path);
        std::string line;
        std::size_t line_no = 0;
        bool stop = false;
        while (!stop && std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const std::exception& e) {
                fail(ErrorCode::IoError, "cognition.jsonl:" + std::to_string(line_no) + ": " +
                                             e.what());
            }
            const std::string kind = j.at("kind").get<std::string>();
            store->cog_seq_ = std::max(store->cog_seq_, j.at("id").get<std::uint64_t>());
            if (kind == "memory_add") {
                MemoryEvent event = memory_event_from_json(j.at("event"));
                event.embedding = embedder.embed(event.text);
                store->memory_seq_ = std::max(store->memory_seq_, parse_memory_id(event.id));
                store->materialize_memory(std::move(event));
            } else if (kind == "retrieval") {
                const std::string agent = j.at("agent_id").get<std::string>();
                for (const auto& [id, rel] : j.at("relevancy").items()) {
                    if (MemoryEvent* event = store->find_mutable(agent, id)) {
                        event->last_relevancy = rel.get<double>();
                    }
                }
                for (const auto& id : j.at("returned")) {
                    if (MemoryEvent* event =
                            store->find_mutable(agent, id.get<std::string>())) {
                        event->access_count += 1;
                    }
                }
            } else if (kind == "access_boost") {
                const std::string agent = j.at("agent_id").get<std::string>();
                for (const auto& id : j.at("ids")) {
                    if (MemoryEvent* event =
                            store->find_mutable(agent, id.get<std::string>())) {
                        event->access_count += 1;
                    }
                }
            } else if (kind == "sweep") {
                SweepOutcome outcome;
                outcome.date = Timestamp::parse(j.at("date").get<std::string>());
                outcome.agent_id = j.at("agent_id").get<std::string>();
                for (const auto& t : j.at("promoted")) {
                    outcome.promoted.push_back(
                        SweepTransition{t.at("id").get<std::string>(),
                                        layer_from_string(t.at("from").get<std::string>()),
                                        layer_from_string(t.at("to").get<std::string>())});
                }
                outcome.purged = j.at("purged").get<std::vector<std::string>>();
                outcome.pinned = j.at("pinned").get<std::vector<std::string>>();
                store->mutate_sweep(outcome);
            } else if (kind == "reflection") {
                const Reflection r = reflection_from_json(j.at("reflection"));
                if (r.flag == ReflectionFlag::Immediate) {
                    store->immediate_keys_.insert(immediate_key(r));
                }
                store->reflections_.push_back(r);
            } else if (kind == "debate") {
                store->debates_.push_back(debate_message_from_json(j.at("message")));
            } else if (kind == "day_close") {
                if (up_to_date &&
                    Timestamp::parse(j.at("date").get<std::string>()).start_of_day() ==
                        up_to_date->start_of_day()) {
                    stop = true;
                }
            } else {
                fail(ErrorCode::IoError, "unknown cognition record kind '" + kind + "'");
            }
        }
    }
    return store;
}

std::string Store::cognition_digest() const {
    nlohmann::ordered_json agents = nlohmann::ordered_json::object();
    for (const auto& [agent_id, memory] : agents_) {
        nlohmann::ordered_json layers = nlohmann::ordered_json::object();
        for (LayerKind layer : kAllLayers) {
            nlohmann::ordered_json events = nlohmann::ordered_json::array();
            for (const auto& event : memory.layers[layer_index(layer)]) {
                nlohmann::ordered_json e = memory_event_to_json(event);
                const auto& values = event.embedding.values();
                e["embedding_fnv"] =
                    fnv_bytes(values.data(), values.size() * sizeof(double));
                events.push_back(std::move(e));
            }
            layers[to_string(layer)] = std::move(events);
        }
        agents[agent_id] = std::move(layers);
    }
    nlohmann::ordered_json reflections = nlohmann::ordered_json::array();
    for (const auto& r : reflections_) reflections.push_back(reflection_to_json(r));
    nlohmann::ordered_json debates = nlohmann::ordered_json::array();
    for (const auto& m : debates_) debates.push_back(debate_message_to_json(m));
    nlohmann::ordered_json digest{{"agents", std::move(agents)},
                                  {"reflections", std::move(reflections)},
                                  {"debates", std::move(debates)},
                                  {"purged", std::vector<std::string>(purged_.begin(),
                                                                      purged_.end())}};
    return digest.dump();
}

} // namespace ltm
