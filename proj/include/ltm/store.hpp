#pragma once
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltm/embedding.hpp"
#include "ltm/kernels.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/records.hpp"

namespace ltm {

// Applied sweep outcome for one agent: id lists feed the audit log, counts
// feed the SweepReport the caller returns.
struct SweepTransition {
    std::string id;
    LayerKind from = LayerKind::Short;
    LayerKind to = LayerKind::Middle;
};

struct SweepOutcome {
    Timestamp date;
    std::string agent_id;
    std::vector<SweepTransition> promoted;
    std::vector<std::string> purged;
    std::vector<std::string> pinned;
    int retained = 0;
};

// Event-sourced warehouse with two append-only JSON-lines logs:
//
//   raw_input.jsonl  - price bars, news items, fund holding records
//   cognition.jsonl  - memory adds, retrieval effects, counter boosts,
//                      sweeps, reflections, debate messages, day closes
//
// All mutation goes through the append/apply_* calls below, which write the
// log line and update the in-memory state in one step; replaying a log
// rebuilds identical state. Purges never rewrite the log: the sweep record is
// the tombstone and materialized state drops the event. Single writer;
// readers see state between appends.
class Store {
public:
    Store() = default;
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    // Opens (creates) the run directory logs and replays any existing
    // content. `embedder` rebuilds memory-event vectors from text on replay;
    // it must be the provider the run is configured with.
    void attach_run_dir(const std::filesystem::path& dir, const EmbeddingProvider& embedder);

    // Replays logs from `dir` into a fresh in-memory store, stopping after
    // the day_close record for `up_to_date` when given.
    static std::unique_ptr<Store> replay(const std::filesystem::path& dir,
                                         const EmbeddingProvider& embedder,
                                         std::optional<Timestamp> up_to_date = std::nullopt);

    // ---- raw input ----
    std::uint64_t append(const PriceBar& bar);         // SchemaViolation on bad OHLC
    std::uint64_t append(const NewsItem& item);
    std::uint64_t append(const HoldingRecord& record); // SchemaViolation on sign mismatch

    bool has_price(const std::string& ticker, Timestamp date) const;
    std::optional<PriceBar> price_bar(const std::string& ticker, Timestamp date) const;
    // Closing prices at or before `date`, oldest first, at most `n`.
    std::vector<std::pair<Timestamp, double>> closes_up_to(const std::string& ticker,
                                                           Timestamp date, std::size_t n) const;
    std::vector<HoldingRecord> holdings_on(Timestamp date,
                                           const std::string& ticker = "") const;
    std::vector<NewsItem> news_on(Timestamp date) const;
    std::vector<std::string> tickers() const;

    // Records with from <= timestamp < to, chronological. InvalidRange when
    // from > to.
    std::vector<PriceBar> price_window(const std::string& ticker, Timestamp from,
                                       Timestamp to) const;
    std::vector<NewsItem> news_window(const std::string& ticker, Timestamp from,
                                      Timestamp to) const;
    std::vector<HoldingRecord> holding_window(const std::string& ticker, Timestamp from,
                                              Timestamp to) const;

    // ---- memory events ----
    // Assigns the id, logs, and materializes. Returns the id.
    std::string add_memory(MemoryEvent event);

    // Layer cohort visible at `now` (timestamp <= now), in insertion order.
    std::vector<const MemoryEvent*> cohort(const std::string& agent_id, LayerKind layer,
                                           Timestamp now) const;
    std::size_t layer_size(const std::string& agent_id, LayerKind layer) const;
    const MemoryEvent* find_memory(const std::string& id) const;

    // Retrieval side effects: access_count+1 on returned ids, last_relevancy
    // refresh for every scored cohort member.
    void apply_retrieval(const std::string& agent_id, LayerKind layer, Timestamp now,
                         const std::vector<std::string>& returned_ids,
                         const std::vector<std::pair<std::string, double>>& relevancies);

    // Add-counter boost (significant-P&L trigger): access_count+1 on each id.
    void apply_access_boost(const std::string& agent_id, const std::vector<std::string>& ids,
                            const std::string& reason);

    void apply_sweep(const SweepOutcome& outcome);

    // ---- reflections & debate ----
    // DuplicateReflection when an immediate reflection for the same
    // (agent, ticker, day) already exists.
    void add_reflection(const Reflection& r);
    std::vector<Reflection> reflections_in(const std::string& agent_id, Timestamp from,
                                           Timestamp to) const;
    std::size_t reflection_count(const std::string& agent_id) const;

    void add_debate(const DebateMessage& m);
    std::vector<DebateMessage> feedback_in(const std::string& receiver_id, Timestamp from,
                                           Timestamp to) const;
    const std::vector<DebateMessage>& debate_messages() const { return debates_; }

    void day_close(Timestamp date);

    // Exact cosine top-n over one layer, descending; ties by timestamp desc
    // then id asc. DimensionMismatch when the query dimension differs.
    std::vector<std::pair<MemoryEvent, double>> similarity_search(
        const std::string& agent_id, LayerKind layer, const EmbeddingVector& query,
        std::size_t n) const;

    // Canonical JSON digest of all cognition state; equal digests mean equal
    // state (embeddings folded in as checksums).
    std::string cognition_digest() const;

    std::uint64_t raw_count() const { return raw_seq_; }
    std::uint64_t cognition_count() const { return cog_seq_; }
    std::uint64_t memory_count() const { return memory_seq_; }
    const std::set<std::string>& purged_ids() const { return purged_; }

    void set_exec_policy(kernels::ExecPolicy policy) { exec_policy_ = policy; }

private:
    struct AgentMemory {
        std::vector<MemoryEvent> layers[3];
    };

    MemoryEvent* find_mutable(const std::string& agent_id, const std::string& id);
    void write_raw_line(const std::string& line);
    void write_cog_line(const std::string& line);
    std::uint64_t next_raw_id() { return ++raw_seq_; }
    void materialize_memory(MemoryEvent event);
    void mutate_sweep(const SweepOutcome& outcome);

    // raw state
    std::vector<PriceBar> prices_;
    std::vector<NewsItem> news_;
    std::vector<HoldingRecord> holdings_;
    std::map<std::string, std::map<std::int64_t, std::size_t>> price_index_; // ticker -> day minutes -> idx
    std::uint64_t raw_seq_ = 0;

    // cognition state
    std::map<std::string, AgentMemory> agents_;
    std::map<std::string, std::pair<std::string, int>> memory_locator_; // id -> (agent, layer)
    std::set<std::string> purged_;
    std::vector<Reflection> reflections_;
    std::set<std::string> immediate_keys_; // agent|ticker|date
    std::vector<DebateMessage> debates_;
    std::uint64_t cog_seq_ = 0;
    std::uint64_t memory_seq_ = 0;

    // persistence
    std::ofstream raw_log_;
    std::ofstream cog_log_;
    kernels::ExecPolicy exec_policy_ = kernels::ExecPolicy::Auto;
};

} // namespace ltm
