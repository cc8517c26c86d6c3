#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace halodet {

struct NormParams {
    double mean = 0.0;
    double std = 1.0;        // population std, clamped to >= 1e-6
    std::size_t n_used = 0;  // question tokens that entered the statistics
};

inline constexpr double kStdClamp = 1e-6;

// Statistics over the question-token perplexities, excluding the first
// min(5, t_q - 2) tokens (the sequence head tends to run hot and would skew
// the scale). The caller removes missing-logprob tokens beforehand; t_q is
// the length of the input. Throws TooFewTokensError when fewer than two
// tokens remain after the exclusion.
NormParams question_norm_params(std::span<const double> question_token_ppls);

double normalize_value(double value, const NormParams& params);

std::vector<double> normalize(std::span<const double> values, const NormParams& params);

// No-evidence entries map to 0.0, the question mean by construction.
std::vector<double> normalize(std::span<const std::optional<double>> values,
                              const NormParams& params);

}  // namespace halodet
