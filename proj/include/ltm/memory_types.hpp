#pragma once
#include <array>
#include <string>

#include "ltm/embedding.hpp"
#include "ltm/time.hpp"

namespace ltm {

enum class LayerKind { Short, Middle, Long };

inline constexpr std::array<LayerKind, 3> kAllLayers = {LayerKind::Short, LayerKind::Middle,
                                                        LayerKind::Long};

const char* to_string(LayerKind layer);
LayerKind layer_from_string(const std::string& s);

enum class MemoryOrigin {
    MarketNews,
    MacroIndicator,
    StrategyDoc,
    ImmediateReflection,
    ExtendedReflection,
    DebateFeedback,
    TradeOutcome,
};

const char* to_string(MemoryOrigin origin);
MemoryOrigin origin_from_string(const std::string& s);

struct LayerParams {
    double stability_days = 0.0;       // decay stability Q, in days
    double importance_const = 0.0;     // importance c, constant per layer
    double weight_recency = 0.0;
    double weight_relevancy = 0.0;
    double weight_importance = 0.0;
    double promotion_threshold = 0.0;  // 0-100 gamma scale
    double purge_threshold = 0.0;      // 0-100 gamma scale
};

struct LayerConfig {
    LayerParams short_term;
    LayerParams middle_term;
    LayerParams long_term;

    const LayerParams& params(LayerKind layer) const {
        switch (layer) {
            case LayerKind::Short: return short_term;
            case LayerKind::Middle: return middle_term;
            case LayerKind::Long: return long_term;
        }
        return short_term;
    }

    // Throws ConfigError unless: Q_short < Q_middle < Q_long,
    // c_short < c_middle < c_long, each layer's weights sum to 1 (1e-9),
    // and purge_threshold < promotion_threshold everywhere.
    void validate() const;

    static LayerConfig defaults();
};

struct MemoryEvent {
    std::string id;       // "mem-" + zero-padded sequence; lexicographic == arrival order
    std::string agent_id;
    LayerKind layer = LayerKind::Short;
    std::string text;
    EmbeddingVector embedding;
    Timestamp timestamp;
    int access_count = 0;
    double last_relevancy = 0.5; // clamped cosine from the most recent scoring
    MemoryOrigin origin = MemoryOrigin::MarketNews;
    bool pinned = false;
};

struct ScoreBreakdown {
    double recency = 0.0;   // normalized (retrieval) or raw (maintenance)
    double relevancy = 0.0;
    double importance = 0.0;
    double gamma = 0.0;     // 0-100 combination plus counter bonus, <= 120
};

struct ScoredEvent {
    MemoryEvent event;
    ScoreBreakdown score;
};

} // namespace ltm
