#pragma once
// Shared helpers for the unit and acceptance suites. The oracle_* functions
// are independent reimplementations of the scoring/accounting paths; they
// stay loop-for-loop separate from the library so the tests mean something.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ltm/agent.hpp"
#include "ltm/embedding.hpp"
#include "ltm/memory_engine.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/records.hpp"
#include "ltm/rng.hpp"
#include "ltm/store.hpp"
#include "ltm/time.hpp"

namespace test_support {

using namespace ltm;

// Unique scratch directory under the system temp root; removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("ltm-" + tag + "-" + std::to_string(stamp) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---- independent scoring oracles ----

inline double oracle_recency(double delta_days, double stability_days) {
    return std::exp(-delta_days / stability_days);
}

inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    double na = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) na += a[i] * a[i];
    double nb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) nb += b[i] * b[i];
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::vector<double> oracle_min_max(const std::vector<double>& values) {
    double lo = values[0];
    double hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(hi == lo ? 1.0 : (v - lo) / (hi - lo));
    return out;
}

struct OracleRanked {
    std::string id;
    double gamma = 0.0;
};

// Full-sort brute-force ranking over a cohort, recomputed from first
// principles (raw scores, clamping, min-max, weights, bonus, total-order
// sort). Must agree with MemoryEngine bit for bit.
inline std::vector<OracleRanked> oracle_rank(const std::vector<const MemoryEvent*>& cohort,
                                             const EmbeddingVector& prompt,
                                             const LayerParams& params, Timestamp now) {
    const std::size_t n = cohort.size();
    std::vector<double> recency(n), relevancy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double delta =
            static_cast<double>(now.minutes() - cohort[i]->timestamp.minutes()) / 1440.0;
        recency[i] = oracle_recency(delta, params.stability_days);
        const double cosine = oracle_cosine(cohort[i]->embedding.values(), prompt.values());
        relevancy[i] = (cosine + 1.0) / 2.0;
    }
    const std::vector<double> recency_n = oracle_min_max(recency);
    const std::vector<double> relevancy_n = oracle_min_max(relevancy);
    std::vector<std::size_t> order(n);
    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double bonus =
            5.0 * static_cast<double>(std::min(cohort[i]->access_count, 4));
        gamma[i] = 100.0 * (params.weight_recency * recency_n[i] +
                            params.weight_relevancy * relevancy_n[i] +
                            params.weight_importance * params.importance_const) +
                   bonus;
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (gamma[a] != gamma[b]) return gamma[a] > gamma[b];
        if (cohort[a]->timestamp != cohort[b]->timestamp) {
            return cohort[a]->timestamp > cohort[b]->timestamp;
        }
        return cohort[a]->id < cohort[b]->id;
    });
    std::vector<OracleRanked> out;
    out.reserve(n);
    for (std::size_t i : order) out.push_back(OracleRanked{cohort[i]->id, gamma[i]});
    return out;
}

inline double oracle_maintenance_gamma(const MemoryEvent& event, const LayerParams& params,
                                       Timestamp now) {
    const double delta =
        static_cast<double>(now.minutes() - event.timestamp.minutes()) / 1440.0;
    const double recency = oracle_recency(delta, params.stability_days);
    const double bonus = 5.0 * static_cast<double>(std::min(event.access_count, 4));
    return 50.0 * (params.weight_recency * recency +
                   params.weight_relevancy * event.last_relevancy +
                   params.weight_importance * params.importance_const) +
           bonus;
}

// Spreadsheet-style metrics recomputation over a value series.
struct OracleMetrics {
    double cumulative = 0.0;
    double volatility = 0.0;
    bool sharpe_defined = false;
    double sharpe = 0.0;
};

inline OracleMetrics oracle_metrics(const std::vector<double>& values) {
    OracleMetrics m;
    m.cumulative = values.back() / values.front() - 1.0;
    std::vector<double> returns;
    for (std::size_t i = 1; i < values.size(); ++i) {
        returns.push_back(values[i] / values[i - 1] - 1.0);
    }
    if (returns.size() < 2) return m;
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= static_cast<double>(returns.size());
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
    m.volatility = sd * std::sqrt(252.0);
    if (sd > 0.0) {
        m.sharpe_defined = true;
        m.sharpe = mean / sd * std::sqrt(252.0);
    }
    return m;
}

// ---- builders ----

inline MemoryEvent make_event(const std::string& agent_id, LayerKind layer,
                              const std::string& text, Timestamp when,
                              const EmbeddingProvider& embedder, int access_count = 0,
                              MemoryOrigin origin = MemoryOrigin::MarketNews) {
    MemoryEvent event;
    event.agent_id = agent_id;
    event.layer = layer;
    event.text = text;
    event.embedding = embedder.embed(text);
    event.timestamp = when;
    event.access_count = access_count;
    event.origin = origin;
    return event;
}

// Populates one layer with `n` random-text events spread over `span_days`
// before `now`; returns the ids.
inline std::vector<std::string> fill_layer(Store& store, const std::string& agent_id,
                                           LayerKind layer, std::size_t n, Timestamp now,
                                           Rng& rng, const EmbeddingProvider& embedder,
                                           int span_days = 30) {
    static const char* words[] = {"rates",  "supply", "earnings", "margin", "demand",
                                  "sector", "growth", "fund",     "signal", "macro"};
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const int len = static_cast<int>(rng.uniform_int(3, 8));
        for (int w = 0; w < len; ++w) {
            if (!text.empty()) text += ' ';
            text += words[rng.uniform_int(0, 9)];
        }
        text += " " + std::to_string(i);
        const auto minutes_back = rng.uniform_int(0, span_days * 1440LL);
        MemoryEvent event = make_event(agent_id, layer, text,
                                       now.add_minutes(-minutes_back), embedder,
                                       static_cast<int>(rng.uniform_int(0, 6)));
        ids.push_back(store.add_memory(std::move(event)));
    }
    return ids;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace test_support
