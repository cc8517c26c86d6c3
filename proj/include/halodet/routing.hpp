#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/types.hpp"

namespace halodet {

// Stabilized softmax of logits / tau. tau is clamped into [kTauMin, kTauMax];
// the max logit is subtracted before exponentiation, so constant logits give
// an exactly uniform simplex.
std::vector<double> softmax_with_temperature(std::span<const double> logits, double tau);

ModelWeights weights_from_logits(std::span<const double> per_model_logits, double tau);

// Per-model logit = max over that model's candidate name tokens (tokenizers
// spell the same name several ways; max avoids double counting them).
std::vector<double> ensemble_logits(const std::map<std::string, double>& candidate_logits,
                                    std::span<const ModelProfile> ensemble);

// All distinct name tokens across the ensemble, in first-appearance order.
std::vector<std::string> routing_candidates(std::span<const ModelProfile> ensemble);

std::string build_routing_prompt(std::string_view tmpl, const std::string& question,
                                 const std::string& answer,
                                 std::span<const ModelProfile> ensemble);

// Queries the router model once and converts its next-token logits into the
// weight simplex. Throws DimensionError for ensembles smaller than two.
ModelWeights assign_weights(Backend& backend, const std::string& question,
                            const std::string& answer,
                            std::span<const ModelProfile> ensemble,
                            const ModelProfile& router, double tau,
                            std::string_view routing_template);

}  // namespace halodet
