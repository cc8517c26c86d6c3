#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/dataio.hpp"
#include "halodet/templates.hpp"
#include "halodet/types.hpp"

namespace halodet {

struct PipelineConfig {
    std::vector<ModelProfile> ensemble;
    ModelProfile router;
    HyperParams hp;
    std::string routing_template{kRoutingTemplateV1};
    std::string span_template{kSpanTemplateV1};
    std::size_t max_concurrency = 4;
    std::string joiner = "\n";  // placed between question and answer when scoring
};

// Everything about one instance that does not depend on (beta, sigma, tau):
// the normalized perplexity matrix over answer words and the router's
// per-model logits. Computed once, reused across hyperparameter trials.
struct InstanceArtifacts {
    std::vector<WordSpan> answer_words;  // answer-relative offsets
    PerplexityMatrix matrix;             // rows follow answer_words
    std::vector<double> router_logits;   // one per ensemble model
};

InstanceArtifacts compute_artifacts(Backend& backend, const PipelineConfig& config,
                                    const QAInstance& inst);

struct DetectionResult {
    Prediction prediction;
    WordScores scores;
    ModelWeights weights;
};

// Applies (beta, sigma, tau) to precomputed artifacts: weights, scores,
// word selection, span proposal, merging. The backend is only consulted for
// span proposals.
DetectionResult detect_from_artifacts(Backend& backend, const PipelineConfig& config,
                                      const QAInstance& inst,
                                      const InstanceArtifacts& artifacts,
                                      const HyperParams& hp);

DetectionResult detect_instance(Backend& backend, const PipelineConfig& config,
                                const QAInstance& inst);

}  // namespace halodet
