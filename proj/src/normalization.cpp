#include "halodet/normalization.hpp"

#include <algorithm>
#include <cmath>

#include "halodet/errors.hpp"

namespace halodet {

NormParams question_norm_params(std::span<const double> question_token_ppls) {
    const std::size_t t_q = question_token_ppls.size();
    const std::size_t excluded = std::min<std::size_t>(5, t_q > 2 ? t_q - 2 : 0);
    const std::size_t remaining = t_q - excluded;
    if (remaining < 2) {
        throw TooFewTokensError("only " + std::to_string(remaining) +
                                " question tokens remain after excluding the first " +
                                std::to_string(excluded) + "; need at least 2");
    }

    const auto included = question_token_ppls.subspan(excluded);
    double mean = 0.0;
    for (double v : included) mean += v;
    mean /= static_cast<double>(included.size());

    // population std: the included tokens are the whole reference population
    double var = 0.0;
    for (double v : included) var += (v - mean) * (v - mean);
    var /= static_cast<double>(included.size());
    const double std_dev = std::max(std::sqrt(var), kStdClamp);

    return NormParams{mean, std_dev, included.size()};
}

double normalize_value(double value, const NormParams& params) {
    return (value - params.mean) / params.std;
}

std::vector<double> normalize(std::span<const double> values, const NormParams& params) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(normalize_value(v, params));
    return out;
}

std::vector<double> normalize(std::span<const std::optional<double>> values,
                              const NormParams& params) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) {
        out.push_back(v ? normalize_value(*v, params) : 0.0);
    }
    return out;
}

}  // namespace halodet
