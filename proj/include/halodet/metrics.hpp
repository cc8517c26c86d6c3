#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "halodet/types.hpp"

namespace halodet {

// Character-level intersection-over-union of the two hard-label character
// sets. Both sets empty is a perfect outcome and scores 1.0. Throws
// ValidationError for spans outside [0, answer_len].
double iou(std::span<const SpanAnnotation> pred, std::span<const SpanAnnotation> gold,
           std::size_t answer_len);

// Per-character probability vector of length answer_len: mean of the probs
// of covering spans, 0 where uncovered. Same semantics merge_soft uses, so
// the metric and the tagger agree on what a soft label means.
std::vector<double> soft_char_probs(std::span<const SpanAnnotation> spans,
                                    std::size_t answer_len);

// Average ranks (1-based); ties get the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation of the two per-character probability vectors.
// Both vectors constant -> 1.0; exactly one constant -> 0.0 (the standard
// formula is undefined there; these conventions keep runs comparable).
double spearman(std::span<const SpanAnnotation> pred_soft,
                std::span<const SpanAnnotation> gold_soft, std::size_t answer_len);

struct InstanceScore {
    std::string lang;
    double iou = 0.0;
    double spearman = 0.0;
};

struct LangRow {
    std::string lang;
    double iou = 0.0;
    double spearman = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    std::vector<LangRow> per_language;  // sorted by language code
    LangRow overall;                    // mean over all instances
};

EvalReport aggregate(std::span<const InstanceScore> per_instance);

}  // namespace halodet
