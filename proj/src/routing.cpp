#include "halodet/routing.hpp"

#include <algorithm>
#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/templates.hpp"

namespace halodet {

std::vector<double> softmax_with_temperature(std::span<const double> logits, double tau) {
    if (logits.empty()) throw DimensionError("softmax over empty logits");
    tau = std::clamp(tau, kTauMin, kTauMax);

    std::vector<double> scaled;
    scaled.reserve(logits.size());
    for (double l : logits) scaled.push_back(l / tau);

    const double max = *std::max_element(scaled.begin(), scaled.end());
    std::vector<double> out(scaled.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        out[i] = std::exp(scaled[i] - max);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

ModelWeights weights_from_logits(std::span<const double> per_model_logits, double tau) {
    if (per_model_logits.size() < 2) {
        throw DimensionError("ensemble of " + std::to_string(per_model_logits.size()) +
                             " models; need at least 2");
    }
    ModelWeights weights;
    weights.tau = std::clamp(tau, kTauMin, kTauMax);
    weights.alphas = softmax_with_temperature(per_model_logits, tau);
    return weights;
}

std::vector<std::string> routing_candidates(std::span<const ModelProfile> ensemble) {
    std::vector<std::string> candidates;
    for (const auto& profile : ensemble) {
        if (profile.name_tokens.empty()) {
            throw ConfigError("model " + profile.model_id + " has no name tokens");
        }
        for (const auto& token : profile.name_tokens) {
            if (std::find(candidates.begin(), candidates.end(), token) == candidates.end()) {
                candidates.push_back(token);
            }
        }
    }
    return candidates;
}

std::vector<double> ensemble_logits(const std::map<std::string, double>& candidate_logits,
                                    std::span<const ModelProfile> ensemble) {
    std::vector<double> logits;
    logits.reserve(ensemble.size());
    for (const auto& profile : ensemble) {
        bool found = false;
        double best = 0.0;
        for (const auto& token : profile.name_tokens) {
            auto it = candidate_logits.find(token);
            if (it == candidate_logits.end()) continue;
            if (!found || it->second > best) best = it->second;
            found = true;
        }
        if (!found) {
            throw ProtocolError("no logit returned for any name token of model " +
                                profile.model_id);
        }
        logits.push_back(best);
    }
    return logits;
}

std::string build_routing_prompt(std::string_view tmpl, const std::string& question,
                                 const std::string& answer,
                                 std::span<const ModelProfile> ensemble) {
    std::string names;
    for (const auto& profile : ensemble) {
        if (!names.empty()) names += ", ";
        names += profile.display_name;
    }
    return render_template(tmpl, {{"question", question},
                                  {"answer", answer},
                                  {"model_names", names}});
}

ModelWeights assign_weights(Backend& backend, const std::string& question,
                            const std::string& answer,
                            std::span<const ModelProfile> ensemble,
                            const ModelProfile& router, double tau,
                            std::string_view routing_template) {
    if (ensemble.size() < 2) {
        throw DimensionError("ensemble of " + std::to_string(ensemble.size()) +
                             " models; need at least 2");
    }
    const std::string prompt = build_routing_prompt(routing_template, question, answer, ensemble);
    const auto candidate_logits =
        backend.next_token_logits(router, prompt, routing_candidates(ensemble));
    return weights_from_logits(ensemble_logits(candidate_logits, ensemble), tau);
}

}  // namespace halodet
