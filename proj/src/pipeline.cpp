#include "halodet/pipeline.hpp"

#include <algorithm>

#include "halodet/alignment.hpp"
#include "halodet/errors.hpp"
#include "halodet/normalization.hpp"
#include "halodet/parallel.hpp"
#include "halodet/routing.hpp"
#include "halodet/scoring.hpp"
#include "halodet/tagging.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace {

// One model's column of the perplexity matrix: tokens scored over
// question + joiner + answer, z-normalized against the question tokens,
// then max-aggregated onto the answer words.
std::vector<double> model_column(Backend& backend, const ModelProfile& profile,
                                 const std::string& full_text, std::size_t question_len,
                                 std::span<const WordSpan> shifted_words) {
    const std::vector<ScoredToken> tokens = backend.token_logprobs(profile, full_text);

    std::vector<std::optional<double>> token_ppls(tokens.size());
    std::vector<double> question_ppls;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!tokens[i].logprob) continue;
        token_ppls[i] = token_perplexity(*tokens[i].logprob);
        if (tokens[i].end <= question_len) question_ppls.push_back(*token_ppls[i]);
    }

    const NormParams params = question_norm_params(question_ppls);
    std::vector<std::optional<double>> token_z(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (token_ppls[i]) token_z[i] = normalize_value(*token_ppls[i], params);
    }

    const WordAssignment assignment = assign_tokens(shifted_words, tokens);
    const auto word_z = aggregate_max(assignment, token_z);
    return normalize(std::span<const std::optional<double>>(word_z),
                     NormParams{0.0, 1.0, params.n_used});  // resolves no-evidence to 0
}

}  // namespace

InstanceArtifacts compute_artifacts(Backend& backend, const PipelineConfig& config,
                                    const QAInstance& inst) {
    validate_instance(inst);
    if (config.ensemble.size() < 2) {
        throw DimensionError("ensemble of " + std::to_string(config.ensemble.size()) +
                             " models; need at least 2");
    }

    const std::string full_text = inst.question + config.joiner + inst.answer;
    const std::size_t question_len = cp_length(inst.question);
    const std::size_t answer_start = question_len + cp_length(config.joiner);

    InstanceArtifacts artifacts;
    artifacts.answer_words = segment_words(inst.answer);
    if (artifacts.answer_words.empty()) {
        throw ValidationError("instance " + inst.id + ": answer has no words");
    }

    std::vector<WordSpan> shifted = artifacts.answer_words;
    for (auto& w : shifted) {
        w.start += answer_start;
        w.end += answer_start;
    }

    const std::size_t n_models = config.ensemble.size();
    std::vector<std::vector<double>> columns(n_models);
    detail::parallel_for(n_models, config.max_concurrency, [&](std::size_t j) {
        columns[j] = model_column(backend, config.ensemble[j], full_text, question_len,
                                  shifted);
    });

    artifacts.matrix.words = artifacts.answer_words;
    artifacts.matrix.models.reserve(n_models);
    for (const auto& profile : config.ensemble) {
        artifacts.matrix.models.push_back(profile.model_id);
    }
    artifacts.matrix.values.assign(artifacts.answer_words.size(),
                                   std::vector<double>(n_models, 0.0));
    for (std::size_t i = 0; i < artifacts.answer_words.size(); ++i) {
        for (std::size_t j = 0; j < n_models; ++j) {
            artifacts.matrix.values[i][j] = columns[j][i];
        }
    }

    const std::string prompt = build_routing_prompt(config.routing_template, inst.question,
                                                    inst.answer, config.ensemble);
    const auto candidate_logits =
        backend.next_token_logits(config.router, prompt, routing_candidates(config.ensemble));
    artifacts.router_logits = ensemble_logits(candidate_logits, config.ensemble);
    return artifacts;
}

DetectionResult detect_from_artifacts(Backend& backend, const PipelineConfig& config,
                                      const QAInstance& inst,
                                      const InstanceArtifacts& artifacts,
                                      const HyperParams& hp_in) {
    const HyperParams hp = clamp_hyperparams(hp_in);

    DetectionResult result;
    result.weights = weights_from_logits(artifacts.router_logits, hp.tau);
    result.scores = hallucination_scores(artifacts.matrix, result.weights, hp.beta);

    const auto selected = select_words(result.scores, hp.sigma);
    const auto raw = tag_spans(backend, config.router, inst.answer, artifacts.answer_words,
                               selected, result.scores, config.span_template,
                               config.max_concurrency);

    result.prediction.id = inst.id;
    result.prediction.lang = inst.lang;
    result.prediction.hard = merge_hard(raw);
    result.prediction.soft = merge_soft(raw, cp_length(inst.answer));
    return result;
}

DetectionResult detect_instance(Backend& backend, const PipelineConfig& config,
                                const QAInstance& inst) {
    const InstanceArtifacts artifacts = compute_artifacts(backend, config, inst);
    return detect_from_artifacts(backend, config, inst, artifacts, config.hp);
}

}  // namespace halodet
