#include "halodet/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "halodet/errors.hpp"

namespace halodet {

namespace {

void check_shapes(const PerplexityMatrix& matrix, const ModelWeights& weights) {
    const std::size_t n_models = matrix.models.size();
    if (n_models < 2) {
        throw DimensionError("ensemble of " + std::to_string(n_models) +
                             " models; need at least 2");
    }
    if (weights.alphas.size() != n_models) {
        throw DimensionError("weight vector of " + std::to_string(weights.alphas.size()) +
                             " does not match " + std::to_string(n_models) + " models");
    }
    for (const auto& row : matrix.values) {
        if (row.size() != n_models) {
            throw DimensionError("matrix row of " + std::to_string(row.size()) +
                                 " does not match " + std::to_string(n_models) + " models");
        }
    }
    if (matrix.values.size() != matrix.words.size()) {
        throw DimensionError("matrix has " + std::to_string(matrix.values.size()) +
                             " rows for " + std::to_string(matrix.words.size()) + " words");
    }
}

// log-softmax with max subtraction
std::vector<double> log_softmax(std::span<const double> values) {
    const double max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - max);
    const double log_sum = std::log(sum);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(v - max - log_sum);
    return out;
}

}  // namespace

LocalForeign local_foreign(const PerplexityMatrix& matrix, const ModelWeights& weights) {
    check_shapes(matrix, weights);
    const std::size_t n_words = matrix.values.size();
    const std::size_t n_models = matrix.models.size();
    const double foreign_scale = 1.0 / static_cast<double>(n_models - 1);

    LocalForeign out;
    out.local.resize(n_words);
    out.foreign.resize(n_words);
    for (std::size_t i = 0; i < n_words; ++i) {
        double local = 0.0, foreign = 0.0;
        for (std::size_t j = 0; j < n_models; ++j) {
            const double v = matrix.values[i][j];
            local += weights.alphas[j] * v;
            foreign += (1.0 - weights.alphas[j]) * foreign_scale * v;
        }
        out.local[i] = local;
        out.foreign[i] = foreign;
    }
    return out;
}

std::vector<double> divergence_terms(std::span<const double> local,
                                     std::span<const double> foreign) {
    if (local.size() != foreign.size()) {
        throw DimensionError("local and foreign sequences differ in length");
    }
    if (local.empty()) return {};

    const std::vector<double> lp = log_softmax(local);
    const std::vector<double> lq = log_softmax(foreign);
    std::vector<double> terms(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) {
        terms[i] = std::exp(lp[i]) * (lp[i] - lq[i]);
    }
    return terms;
}

WordScores hallucination_scores(const PerplexityMatrix& matrix, const ModelWeights& weights,
                                double beta) {
    if (matrix.values.empty()) throw DimensionError("empty perplexity matrix");
    const auto [local, foreign] = local_foreign(matrix, weights);

    WordScores scores;
    scores.beta = beta;
    scores.divergence_term = divergence_terms(local, foreign);
    scores.avg_term.resize(matrix.values.size());
    const double inv_models = 1.0 / static_cast<double>(matrix.models.size());
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
        double sum = 0.0;
        for (double v : matrix.values[i]) sum += v;
        scores.avg_term[i] = sum * inv_models;
    }
    scores.h.resize(matrix.values.size());
    for (std::size_t i = 0; i < scores.h.size(); ++i) {
        scores.h[i] = beta * scores.divergence_term[i] + (1.0 - beta) * scores.avg_term[i];
    }
    return scores;
}

}  // namespace halodet
