#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace halodet {

// A character span over the answer. Indices are Unicode code-point offsets,
// never bytes: the annotation format uses code-point indexing and byte
// offsets would silently corrupt non-ASCII text.
struct SpanAnnotation {
    std::size_t start = 0;  // inclusive
    std::size_t end = 0;    // exclusive
    std::optional<double> prob;

    friend bool operator==(const SpanAnnotation&, const SpanAnnotation&) = default;
};

// One question-answer pair with language tag and optional gold annotations.
// `extra` carries input fields this library does not interpret; they are
// preserved verbatim on round-trip.
struct QAInstance {
    std::string id;
    std::string lang;
    std::string question;
    std::string answer;
    std::optional<std::vector<SpanAnnotation>> gold_hard;
    std::optional<std::vector<SpanAnnotation>> gold_soft;
    nlohmann::json extra = nlohmann::json::object();

    friend bool operator==(const QAInstance&, const QAInstance&) = default;
};

// Token with code-point offsets into the text it was scored on.
// `logprob` is a natural-log probability (<= 0 for valid backends).
// The first token of a sequence has no logprob; that is an explicit
// missing state rather than a numeric sentinel so it can never be averaged
// into anything by accident.
struct ScoredToken {
    std::string text;
    std::size_t start = 0;
    std::size_t end = 0;
    std::optional<double> logprob;

    friend bool operator==(const ScoredToken&, const ScoredToken&) = default;
};

struct WordSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    bool is_question = false;

    friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

// Normalized per-word perplexities, |words| x |models|. Row-major by word.
struct PerplexityMatrix {
    std::vector<WordSpan> words;
    std::vector<std::string> models;
    std::vector<std::vector<double>> values;  // values[word][model]
};

// Weight simplex over the ensemble for one instance.
struct ModelWeights {
    std::vector<double> alphas;  // sums to 1, each >= 0
    double tau = 1.0;
};

// Per-word hallucination scores with their breakdown:
// h[i] = beta * divergence_term[i] + (1 - beta) * avg_term[i].
struct WordScores {
    std::vector<double> h;
    std::vector<double> divergence_term;
    std::vector<double> avg_term;
    double beta = 0.0;
};

struct HyperParams {
    double beta = 0.4962175701;
    double sigma = 0.016472;
    double tau = 3.392846885335018;
};

inline constexpr double kTauMin = 1e-3;
inline constexpr double kTauMax = 10.0;

// Clamps tau into [kTauMin, kTauMax] and checks beta / sigma ranges.
HyperParams clamp_hyperparams(HyperParams hp);

// Checks every type invariant; returns the instance unchanged.
// Throws ValidationError naming the offending span or field.
const QAInstance& validate_instance(const QAInstance& inst);

}  // namespace halodet
