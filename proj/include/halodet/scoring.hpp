#pragma once

#include <span>
#include <vector>

#include "halodet/types.hpp"

namespace halodet {

struct LocalForeign {
    std::vector<double> local;    // alpha-weighted mixture per word
    std::vector<double> foreign;  // complementary mixture, coefficients (1-alpha_j)/(|M|-1)
};

// Both coefficient vectors sum to 1. Summation is word-major then
// model-index so results are bit-reproducible. Throws DimensionError on
// shape mismatch or |models| < 2.
LocalForeign local_foreign(const PerplexityMatrix& matrix, const ModelWeights& weights);

// Forms distributions over the answer's words via softmax of the local and
// foreign vectors and attributes to word i its pointwise KL term
// p_i * ln(p_i / q_i). Individual terms may be negative; their sum is
// KL(p || q) >= 0.
std::vector<double> divergence_terms(std::span<const double> local,
                                     std::span<const double> foreign);

// h[i] = beta * divergence_term[i] + (1 - beta) * avg_term[i], where
// avg_term is the per-word mean over models so both terms stay on a
// comparable scale regardless of ensemble size.
WordScores hallucination_scores(const PerplexityMatrix& matrix, const ModelWeights& weights,
                                double beta);

}  // namespace halodet
