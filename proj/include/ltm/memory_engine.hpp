#pragma once
#include <span>
#include <string>
#include <vector>

#include "ltm/embedding.hpp"
#include "ltm/kernels.hpp"
#include "ltm/memory_types.hpp"
#include "ltm/store.hpp"
#include "ltm/time.hpp"

namespace ltm {

// ---- scoring primitives ----

// e^(-delta_days / stability_days). InvalidTimestamp when delta_days < 0.
double recency_score(double delta_days, double stability_days);

// Cosine similarity in [-1, 1]. DegenerateEmbedding on zero-norm input,
// DimensionMismatch when dimensions differ.
double relevancy_score(const EmbeddingVector& event_embedding,
                       const EmbeddingVector& prompt_embedding);

// The layer's importance constant c.
double importance_score(LayerKind layer, const LayerConfig& config);

// (v - min) / (max - min) elementwise; every output 1.0 when max == min.
// EmptyCandidateSet on an empty input.
std::vector<double> min_max_normalize(std::span<const double> values);

// Cosine mapped onto [0, 1]: (x + 1) / 2.
inline double clamp_relevancy(double cosine) { return (cosine + 1.0) / 2.0; }

// Add-counter bonus: +5 per access, capped at +20.
inline double counter_bonus(int access_count) {
    return 5.0 * static_cast<double>(access_count < 4 ? access_count : 4);
}

struct SweepReport {
    int promoted = 0;
    int purged = 0;
    int retained = 0;
    SweepOutcome outcome; // id-level detail for the audit log
};

// Layered retrieval and lifecycle over a Store.
//
// Retrieval scores a layer cohort in batch: raw recency and relevancy are
// min-max normalized within the cohort, combined with the layer weights,
// scaled to 0-100, and topped with the counter bonus. Maintenance has no
// prompt: it scores absolute (non-normalized) recency, the event's
// last_relevancy, and importance. Absolute combinations of unit-range terms
// average about half their cohort-normalized counterparts, so they map onto
// the shared 0-100 threshold scale at half it: a fresh default short-term
// event lands mid-band (35.5, retained) and a fully boosted one at 55.5
// (promoted).
class MemoryEngine {
public:
    MemoryEngine(Store& store, LayerConfig config, const EmbeddingProvider& embedder,
                 kernels::ExecPolicy policy = kernels::ExecPolicy::Auto);

    // Scores the visible cohort and returns the top k without mutating
    // anything; ties break by gamma desc, timestamp desc, id asc.
    std::vector<ScoredEvent> rank_top_k(const std::string& agent_id, LayerKind layer,
                                        const EmbeddingVector& prompt, std::size_t k,
                                        Timestamp now) const;

    // rank_top_k plus the retrieval side effects: access_count+1 on returned
    // events, last_relevancy refresh across the cohort, one log record.
    // Returned breakdowns reflect pre-increment access counts.
    std::vector<ScoredEvent> retrieve_top_k(const std::string& agent_id, LayerKind layer,
                                            const std::string& prompt_text, std::size_t k,
                                            Timestamp now);
    std::vector<ScoredEvent> retrieve_top_k(const std::string& agent_id, LayerKind layer,
                                            const EmbeddingVector& prompt, std::size_t k,
                                            Timestamp now);

    // End-of-day lifecycle pass: promotes events at or above their layer's
    // promotion threshold (Short -> Middle -> Long, one step per sweep, with
    // the counter reset), pins Long events at or above the pin threshold,
    // purges events below the purge floor unless pinned.
    SweepReport maintenance_sweep(const std::string& agent_id, Timestamp now);

    // Maintenance gamma for one event (absolute scores, no cohort).
    ScoreBreakdown maintenance_score(const MemoryEvent& event, Timestamp now) const;

    const LayerConfig& config() const { return config_; }
    const EmbeddingProvider& embedder() const { return embedder_; }

    // Largest |gamma| bound observed across all scoring calls; lifecycle
    // tests assert it stays within [0, 120].
    double max_gamma_seen() const { return max_gamma_seen_; }
    double min_gamma_seen() const { return min_gamma_seen_; }

private:
    struct CohortScores {
        std::vector<const MemoryEvent*> events;
        std::vector<double> raw_relevancy; // clamped to [0,1]
        std::vector<ScoreBreakdown> breakdowns;
    };

    CohortScores score_cohort(const std::string& agent_id, LayerKind layer,
                              const EmbeddingVector& prompt, Timestamp now) const;
    void note_gamma(double gamma) const;

    Store& store_;
    LayerConfig config_;
    const EmbeddingProvider& embedder_;
    kernels::ExecPolicy policy_;
    mutable double max_gamma_seen_ = 0.0;
    mutable double min_gamma_seen_ = 0.0;
};

// Scale applied to absolute maintenance combinations before thresholding.
inline constexpr double kMaintenanceScale = 50.0;

} // namespace ltm
