#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ltm/config.hpp"
#include "ltm/embedding.hpp"
#include "ltm/store.hpp"

namespace ltm {

enum class PriceFrequency { Daily, Minute };

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;   // malformed or invariant-violating rows
    std::size_t duplicates = 0; // already-present rows skipped (idempotence)
    std::size_t memory_events = 0;
    std::vector<std::string> errors; // "line N: what"
};

// CSV with header date,ticker,open,high,low,close,volume. Daily rows carry a
// date (bar stamped at the 16:00 close); minute rows a full timestamp.
// Malformed rows are rejected with a line-numbered error, duplicates of an
// already-stored (ticker, timestamp) are skipped, valid rows land in the
// store.
IngestReport ingest_prices(Store& store, const std::filesystem::path& path,
                           PriceFrequency frequency);

// CSV with header date,fund,ticker,shares,direction. Direction must agree
// with the sign of shares.
IngestReport ingest_holdings(Store& store, const std::filesystem::path& path);

// JSON-lines {timestamp, ticker, headline, body}. Each accepted item is also
// inserted as a short-term memory event for every agent whose sector scope
// covers the ticker.
IngestReport ingest_news(Store& store, const std::filesystem::path& path,
                         const RunConfig& config, const EmbeddingProvider& embedder);

// Synthetic corpus: geometric-Brownian daily bars per ticker, templated news
// tied to the day's move, fund flow records, and a ready-to-run config.json
// (3-agent roster, sector map, warmup-aware spans). Identical seeds produce
// identical bytes.
struct FixtureSpec {
    int days = 60;
    std::vector<std::string> tickers;
    std::uint64_t seed = 42;
    std::filesystem::path out_dir;
    Timestamp start_date = Timestamp::civil(2020, 8, 15);
};

void generate_fixtures(const FixtureSpec& spec);

} // namespace ltm
