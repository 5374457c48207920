#include "ltm/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ltm/agent.hpp"
#include "ltm/errors.hpp"
#include "ltm/rng.hpp"

namespace ltm {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

void note_error(IngestReport& report, std::size_t line_no, const std::string& what) {
    ++report.rejected;
    report.errors.push_back("line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_or_fail(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open " + path.string());
    }
    return in;
}

} // namespace

IngestReport ingest_prices(Store& store, const std::filesystem::path& path,
                           PriceFrequency frequency) {
    std::ifstream in = open_or_fail(path);
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (line != "date,ticker,open,high,low,close,volume") {
                fail(ErrorCode::IngestError,
                     path.string() + ": unexpected header '" + line + "'");
            }
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 7) {
            note_error(report, line_no, "expected 7 fields, got " +
                                            std::to_string(fields.size()));
            continue;
        }
        try {
            PriceBar bar;
            Timestamp ts = Timestamp::parse(fields[0]);
            bar.timestamp = frequency == PriceFrequency::Daily ? ts.at(16, 0) : ts;
            bar.ticker = fields[1];
            bar.open = std::stod(fields[2]);
            bar.high = std::stod(fields[3]);
            bar.low = std::stod(fields[4]);
            bar.close = std::stod(fields[5]);
            bar.volume = std::stoll(fields[6]);
            if (store.has_price(bar.ticker, bar.timestamp) &&
                frequency == PriceFrequency::Daily) {
                ++report.duplicates;
                continue;
            }
            store.append(bar);
            ++report.accepted;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SchemaViolation &&
                std::string(e.what()).find("duplicate bar") != std::string::npos) {
                ++report.duplicates;
            } else {
                note_error(report, line_no, e.what());
            }
        } catch (const std::exception& e) {
            note_error(report, line_no, e.what());
        }
    }
    return report;
}

IngestReport ingest_holdings(Store& store, const std::filesystem::path& path) {
    std::ifstream in = open_or_fail(path);
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_checked) {
            header_checked = true;
            if (line != "date,fund,ticker,shares,direction") {
                fail(ErrorCode::IngestError,
                     path.string() + ": unexpected header '" + line + "'");
            }
            continue;
        }
        const auto fields = split_csv(line);
        if (fields.size() != 5) {
            note_error(report, line_no, "expected 5 fields, got " +
                                            std::to_string(fields.size()));
            continue;
        }
        try {
            HoldingRecord record;
            record.timestamp = Timestamp::parse(fields[0]).at(16, 0);
            record.fund = fields[1];
            record.ticker = fields[2];
            record.shares = std::stoll(fields[3]);
            record.direction = direction_from_string(fields[4]);
            store.append(record);
            ++report.accepted;
        } catch (const std::exception& e) {
            note_error(report, line_no, e.what());
        }
    }
    return report;
}

IngestReport ingest_news(Store& store, const std::filesystem::path& path,
                         const RunConfig& config, const EmbeddingProvider& embedder) {
    std::ifstream in = open_or_fail(path);
    IngestReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        NewsItem item;
        try {
            const auto j = nlohmann::json::parse(line);
            for (const char* field : {"timestamp", "ticker", "headline", "body"}) {
                if (!j.contains(field)) {
                    fail(ErrorCode::IngestError, std::string("missing field '") + field + "'");
                }
            }
            item.timestamp = Timestamp::parse(j["timestamp"].get<std::string>());
            item.ticker = j["ticker"].get<std::string>();
            item.headline = j["headline"].get<std::string>();
            item.body = j["body"].get<std::string>();
            store.append(item);
            ++report.accepted;
        } catch (const std::exception& e) {
            note_error(report, line_no, e.what());
            continue;
        }
        // Route into short-term memory of every agent whose scope covers the
        // ticker's sector.
        const auto sector = config.sectors.find(item.ticker);
        if (sector == config.sectors.end()) continue;
        const std::string text = item.headline + ". " + item.body;
        for (const auto& agent : config.agents) {
            if (!agent.sectors.count(sector->second)) continue;
            MemoryEvent event;
            event.agent_id = agent.agent_id;
            event.layer = assign_layer(MemoryOrigin::MarketNews);
            event.text = text;
            event.embedding = embedder.embed(text);
            event.timestamp = item.timestamp;
            event.origin = MemoryOrigin::MarketNews;
            store.add_memory(std::move(event));
            ++report.memory_events;
        }
    }
    return report;
}

// ---- fixtures ----

namespace {

constexpr const char* kSectors[3] = {"tech", "health", "energy"};

const char* kHeadlineUp[4] = {
    "beats quarterly expectations on strong demand",
    "wins major contract, shares rally",
    "raises full-year guidance",
    "announces buyback as margins expand",
};

const char* kHeadlineDown[4] = {
    "misses revenue estimates, outlook trimmed",
    "faces regulatory probe, shares slide",
    "cuts guidance on weak orders",
    "warns of margin pressure into next quarter",
};

const char* kBodyTemplates[3] = {
    "Analysts point to sector rotation and shifting rate expectations.",
    "Management cited supply conditions and evolving customer demand.",
    "Desk commentary flags positioning ahead of the next macro print.",
};

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

void generate_fixtures(const FixtureSpec& spec) {
    namespace fs = std::filesystem;
    if (spec.days < 14) {
        fail(ErrorCode::ConfigError, "fixtures need at least 14 days");
    }
    if (spec.tickers.empty()) {
        fail(ErrorCode::ConfigError, "fixtures need at least one ticker");
    }
    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + spec.out_dir.string());

    std::ofstream prices(spec.out_dir / "prices.csv");
    std::ofstream news(spec.out_dir / "news.jsonl");
    std::ofstream holdings(spec.out_dir / "holdings.csv");
    if (!prices || !news || !holdings) {
        fail(ErrorCode::IoError, "cannot write fixtures under " + spec.out_dir.string());
    }
    prices << "date,ticker,open,high,low,close,volume\n";
    holdings << "date,fund,ticker,shares,direction\n";

    const double mu = 0.08 / 252.0;
    const double sigma = 0.25 / std::sqrt(252.0);

    for (std::size_t t = 0; t < spec.tickers.size(); ++t) {
        const std::string& ticker = spec.tickers[t];
        Rng rng(spec.seed * 1000003ULL + t);
        double close = rng.uniform(50.0, 150.0);
        double prev_close = close;
        for (int day = 0; day < spec.days; ++day) {
            const Timestamp date = spec.start_date.add_days(day);
            const double z = rng.normal();
            const double open = prev_close;
            close = open * std::exp(mu - 0.5 * sigma * sigma + sigma * z);
            const double wiggle_hi = 1.0 + 0.003 * std::abs(rng.normal());
            const double wiggle_lo = 1.0 - 0.003 * std::abs(rng.normal());
            const double high = std::max(open, close) * wiggle_hi;
            const double low = std::min(open, close) * wiggle_lo;
            const auto volume =
                static_cast<std::int64_t>(50000.0 + rng.uniform() * 100000.0);
            prices << date.date_string() << ',' << ticker << ',' << fixed(open, 4) << ','
                   << fixed(high, 4) << ',' << fixed(low, 4) << ',' << fixed(close, 4) << ','
                   << volume << '\n';

            const double day_return = close / open - 1.0;
            const double news_draw = rng.uniform();
            const int items = news_draw < 0.2 ? 0 : (news_draw < 0.8 ? 1 : 2);
            for (int i = 0; i < items; ++i) {
                const bool up = day_return >= 0.0;
                const auto& pool = up ? kHeadlineUp : kHeadlineDown;
                const std::string headline =
                    ticker + " " + pool[rng.uniform_int(0, 3)];
                const std::string body = kBodyTemplates[rng.uniform_int(0, 2)];
                nlohmann::ordered_json j{
                    {"timestamp", date.at(9, static_cast<unsigned>(15 + 7 * i)).to_string()},
                    {"ticker", ticker},
                    {"headline", headline},
                    {"body", body}};
                news << j.dump() << '\n';
            }

            if (rng.uniform() < 0.35) {
                // Fund flow leans with the move but occasionally fades it.
                const bool buy = rng.uniform() < 0.75 ? day_return >= 0.0 : day_return < 0.0;
                const auto shares =
                    static_cast<std::int64_t>(100 + rng.uniform_int(0, 49) * 100);
                holdings << date.date_string() << ",arkx," << ticker << ','
                         << (buy ? shares : -shares) << ',' << (buy ? "buy" : "sell") << '\n';
            }
            prev_close = close;
        }
    }

    // Ready-to-run config: spans skip the momentum warmup, then split the
    // remainder 60/40 between training and testing.
    RunConfig config;
    config.run_id = "fixture";
    config.seed = spec.seed;
    std::map<std::string, std::string> sectors;
    for (std::size_t t = 0; t < spec.tickers.size(); ++t) {
        sectors[spec.tickers[t]] = kSectors[t % 3];
    }
    config.sectors = sectors;
    config.agents = {
        TraderCharacter{"alpha", RiskProfile::Seeking, {kSectors[0], kSectors[1]}, 100000.0},
        TraderCharacter{"bravo", RiskProfile::Neutral, {kSectors[0], kSectors[2]}, 100000.0},
        TraderCharacter{"charlie", RiskProfile::Averse,
                        {kSectors[0], kSectors[1], kSectors[2]}, 100000.0},
    };
    const int warmup = config.decision.momentum_window; // bars 0..w exist from day w
    const int usable = spec.days - warmup;
    const int train_days = std::max(1, usable * 3 / 5);
    config.train_from = spec.start_date.add_days(warmup);
    config.train_to = spec.start_date.add_days(warmup + train_days - 1);
    config.test_from = spec.start_date.add_days(warmup + train_days);
    config.test_to = spec.start_date.add_days(spec.days - 1);
    config.validate();
    config.save(spec.out_dir / "config.json");
}

} // namespace ltm
