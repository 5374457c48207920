#include "ltm/memory_engine.hpp"

#include <algorithm>
#include <cmath>

#include "ltm/errors.hpp"

namespace ltm {

double recency_score(double delta_days, double stability_days) {
    if (delta_days < 0.0) {
        fail(ErrorCode::InvalidTimestamp,
             "event postdates the prompt by " + std::to_string(-delta_days) + " days");
    }
    if (stability_days <= 0.0) {
        fail(ErrorCode::InvalidTimestamp, "stability must be positive");
    }
    return std::exp(-delta_days / stability_days);
}

double relevancy_score(const EmbeddingVector& event_embedding,
                       const EmbeddingVector& prompt_embedding) {
    if (event_embedding.dimension() == 0 || prompt_embedding.dimension() == 0) {
        fail(ErrorCode::DegenerateEmbedding, "zero-norm embedding");
    }
    if (event_embedding.dimension() != prompt_embedding.dimension()) {
        fail(ErrorCode::DimensionMismatch,
             std::to_string(event_embedding.dimension()) + " vs " +
                 std::to_string(prompt_embedding.dimension()));
    }
    const std::size_t dim = event_embedding.dimension();
    const double d = kernels::dot(event_embedding.data(), prompt_embedding.data(), dim);
    const double ne = kernels::l2_norm(event_embedding.data(), dim);
    const double np = kernels::l2_norm(prompt_embedding.data(), dim);
    if (ne == 0.0 || np == 0.0) {
        fail(ErrorCode::DegenerateEmbedding, "zero-norm embedding");
    }
    return d / (ne * np);
}

double importance_score(LayerKind layer, const LayerConfig& config) {
    return config.params(layer).importance_const;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
    if (values.empty()) {
        fail(ErrorCode::EmptyCandidateSet, "min-max over empty set");
    }
    const auto [lo, hi] = kernels::min_max(values.data(), values.size());
    std::vector<double> out(values.size());
    kernels::normalize_batch(values.data(), values.size(), lo, hi, out.data());
    return out;
}

void LayerConfig::validate() const {
    if (!(short_term.stability_days > 0 && middle_term.stability_days > 0 &&
          long_term.stability_days > 0)) {
        fail(ErrorCode::ConfigError, "stability_days must be positive");
    }
    if (!(short_term.stability_days < middle_term.stability_days &&
          middle_term.stability_days < long_term.stability_days)) {
        fail(ErrorCode::ConfigError, "stability ordering Q_short < Q_middle < Q_long violated");
    }
    if (!(short_term.importance_const < middle_term.importance_const &&
          middle_term.importance_const < long_term.importance_const)) {
        fail(ErrorCode::ConfigError, "importance ordering c_short < c_middle < c_long violated");
    }
    for (LayerKind layer : kAllLayers) {
        const LayerParams& p = params(layer);
        if (p.importance_const < 0.0 || p.importance_const > 1.0) {
            fail(ErrorCode::ConfigError, "importance constants must sit in [0,1]");
        }
        const double sum = p.weight_recency + p.weight_relevancy + p.weight_importance;
        if (std::abs(sum - 1.0) > 1e-9) {
            fail(ErrorCode::ConfigError,
                 std::string("weights for layer ") + to_string(layer) + " sum to " +
                     std::to_string(sum) + ", expected 1");
        }
        if (!(p.purge_threshold < p.promotion_threshold)) {
            fail(ErrorCode::ConfigError, "purge threshold must sit below promotion threshold");
        }
    }
}

LayerConfig LayerConfig::defaults() {
    LayerConfig config;
    config.short_term = LayerParams{3.0, 0.3, 0.5, 0.3, 0.2, 40.0, 20.0};
    config.middle_term = LayerParams{90.0, 0.6, 0.3, 0.4, 0.3, 60.0, 20.0};
    config.long_term = LayerParams{365.0, 0.9, 0.2, 0.4, 0.4, 80.0, 20.0};
    return config;
}

MemoryEngine::MemoryEngine(Store& store, LayerConfig config, const EmbeddingProvider& embedder,
                           kernels::ExecPolicy policy)
    : store_(store), config_(std::move(config)), embedder_(embedder), policy_(policy) {
    config_.validate();
}

void MemoryEngine::note_gamma(double gamma) const {
    max_gamma_seen_ = std::max(max_gamma_seen_, gamma);
    min_gamma_seen_ = std::min(min_gamma_seen_, gamma);
}

MemoryEngine::CohortScores MemoryEngine::score_cohort(const std::string& agent_id,
                                                      LayerKind layer,
                                                      const EmbeddingVector& prompt,
                                                      Timestamp now) const {
    CohortScores scores;
    scores.events = store_.cohort(agent_id, layer, now);
    const std::size_t n = scores.events.size();
    if (n == 0) return scores;

    const LayerParams& params = config_.params(layer);

    std::vector<double> deltas(n);
    std::vector<const double*> vecs(n);
    for (std::size_t i = 0; i < n; ++i) {
        deltas[i] = delta_days(now, scores.events[i]->timestamp);
        if (deltas[i] < 0.0) {
            fail(ErrorCode::InvalidTimestamp,
                 "event " + scores.events[i]->id + " postdates the prompt");
        }
        if (scores.events[i]->embedding.dimension() != prompt.dimension()) {
            fail(ErrorCode::DimensionMismatch, "event " + scores.events[i]->id);
        }
        vecs[i] = scores.events[i]->embedding.data();
    }

    std::vector<double> recency(n);
    kernels::recency_batch(deltas.data(), n, params.stability_days, recency.data(), policy_);

    std::vector<double> cosine(n);
    kernels::cosine_batch(vecs.data(), n, prompt.dimension(), prompt.data(), cosine.data(),
                          policy_);
    scores.raw_relevancy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores.raw_relevancy[i] = clamp_relevancy(cosine[i]);
    }

    const auto [rec_lo, rec_hi] = kernels::min_max(recency.data(), n, policy_);
    std::vector<double> recency_n(n);
    kernels::normalize_batch(recency.data(), n, rec_lo, rec_hi, recency_n.data(), policy_);

    const auto [rel_lo, rel_hi] = kernels::min_max(scores.raw_relevancy.data(), n, policy_);
    std::vector<double> relevancy_n(n);
    kernels::normalize_batch(scores.raw_relevancy.data(), n, rel_lo, rel_hi, relevancy_n.data(),
                             policy_);

    std::vector<double> bonus(n);
    for (std::size_t i = 0; i < n; ++i) {
        bonus[i] = counter_bonus(scores.events[i]->access_count);
    }

    const double importance = params.importance_const;
    std::vector<double> gamma(n);
    kernels::gamma_batch(recency_n.data(), relevancy_n.data(), bonus.data(), n,
                         params.weight_recency, params.weight_relevancy,
                         params.weight_importance, importance, gamma.data(), policy_);

    scores.breakdowns.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores.breakdowns[i] = ScoreBreakdown{recency_n[i], relevancy_n[i], importance, gamma[i]};
        note_gamma(gamma[i]);
    }
    return scores;
}

std::vector<ScoredEvent> MemoryEngine::rank_top_k(const std::string& agent_id, LayerKind layer,
                                                  const EmbeddingVector& prompt, std::size_t k,
                                                  Timestamp now) const {
    if (k == 0) {
        fail(ErrorCode::EmptyCandidateSet, "k must be >= 1");
    }
    CohortScores scores = score_cohort(agent_id, layer, prompt, now);
    const std::size_t n = scores.events.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ga = scores.breakdowns[a].gamma;
        const double gb = scores.breakdowns[b].gamma;
        if (ga != gb) return ga > gb;
        if (scores.events[a]->timestamp != scores.events[b]->timestamp) {
            return scores.events[a]->timestamp > scores.events[b]->timestamp;
        }
        return scores.events[a]->id < scores.events[b]->id;
    });
    std::vector<ScoredEvent> out;
    const std::size_t take = std::min(k, n);
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back(ScoredEvent{*scores.events[order[i]], scores.breakdowns[order[i]]});
    }
    return out;
}

std::vector<ScoredEvent> MemoryEngine::retrieve_top_k(const std::string& agent_id,
                                                      LayerKind layer,
                                                      const std::string& prompt_text,
                                                      std::size_t k, Timestamp now) {
    return retrieve_top_k(agent_id, layer, embedder_.embed(prompt_text), k, now);
}

std::vector<ScoredEvent> MemoryEngine::retrieve_top_k(const std::string& agent_id,
                                                      LayerKind layer,
                                                      const EmbeddingVector& prompt,
                                                      std::size_t k, Timestamp now) {
    if (k == 0) {
        fail(ErrorCode::EmptyCandidateSet, "k must be >= 1");
    }
    CohortScores scores = score_cohort(agent_id, layer, prompt, now);
    const std::size_t n = scores.events.size();
    if (n == 0) return {};

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ga = scores.breakdowns[a].gamma;
        const double gb = scores.breakdowns[b].gamma;
        if (ga != gb) return ga > gb;
        if (scores.events[a]->timestamp != scores.events[b]->timestamp) {
            return scores.events[a]->timestamp > scores.events[b]->timestamp;
        }
        return scores.events[a]->id < scores.events[b]->id;
    });

    const std::size_t take = std::min(k, n);
    std::vector<ScoredEvent> out;
    out.reserve(take);
    std::vector<std::string> returned_ids;
    returned_ids.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back(ScoredEvent{*scores.events[order[i]], scores.breakdowns[order[i]]});
        returned_ids.push_back(scores.events[order[i]]->id);
    }
    std::vector<std::pair<std::string, double>> relevancies;
    relevancies.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        relevancies.emplace_back(scores.events[i]->id, scores.raw_relevancy[i]);
    }
    store_.apply_retrieval(agent_id, layer, now, returned_ids, relevancies);
    return out;
}

ScoreBreakdown MemoryEngine::maintenance_score(const MemoryEvent& event, Timestamp now) const {
    const LayerParams& params = config_.params(event.layer);
    const double delta = delta_days(now, event.timestamp);
    const double recency = recency_score(delta, params.stability_days);
    const double relevancy = event.last_relevancy;
    const double importance = params.importance_const;
    const double gamma = kMaintenanceScale * (params.weight_recency * recency +
                                              params.weight_relevancy * relevancy +
                                              params.weight_importance * importance) +
                         counter_bonus(event.access_count);
    note_gamma(gamma);
    return ScoreBreakdown{recency, relevancy, importance, gamma};
}

SweepReport MemoryEngine::maintenance_sweep(const std::string& agent_id, Timestamp now) {
    SweepReport report;
    report.outcome.date = now;
    report.outcome.agent_id = agent_id;

    // Score everything first; transitions apply afterwards so one sweep can
    // never move an event more than one layer.
    for (LayerKind layer : kAllLayers) {
        const LayerParams& params = config_.params(layer);
        for (const MemoryEvent* event : store_.cohort(agent_id, layer, now)) {
            const ScoreBreakdown score = maintenance_score(*event, now);
            if (layer == LayerKind::Long) {
                if (score.gamma >= params.promotion_threshold && !event->pinned) {
                    report.outcome.pinned.push_back(event->id);
                    ++report.retained;
                    continue;
                }
            } else if (score.gamma >= params.promotion_threshold) {
                const LayerKind next =
                    layer == LayerKind::Short ? LayerKind::Middle : LayerKind::Long;
                report.outcome.promoted.push_back(SweepTransition{event->id, layer, next});
                continue;
            }
            if (score.gamma < params.purge_threshold && !event->pinned) {
                report.outcome.purged.push_back(event->id);
                continue;
            }
            ++report.retained;
        }
    }
    report.promoted = static_cast<int>(report.outcome.promoted.size());
    report.purged = static_cast<int>(report.outcome.purged.size());
    store_.apply_sweep(report.outcome);
    return report;
}

} // namespace ltm
