#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "halodet/types.hpp"

namespace halodet {

// One model the pipeline can talk to. `endpoint` is an OpenAI-compatible
// base URL, or the literal "synthetic" for the offline backend. `auth_env`
// names the environment variable holding a bearer token, if any.
struct ModelProfile {
    std::string model_id;
    std::string display_name;                // e.g. "Spanish"
    std::vector<std::string> name_tokens;    // candidate first tokens, e.g. " Spanish"
    std::string endpoint = "synthetic";
    std::string auth_env;
};

// A range of the answer whose logprobs are depressed for one model,
// simulating a span that surprises the specialized model.
struct SyntheticPlant {
    std::string model_id;
    std::size_t start = 0;  // code-point range in the answer
    std::size_t end = 0;
    double boost = 3.0;     // subtracted from the logprob of overlapping tokens
};

enum class ProposerMode {
    kFocusWord,      // echo the focus word
    kNeighborWindow, // echo the focus word plus its direct neighbors
    kPlantedRange,   // echo the planted range overlapping the focus, else the focus word
};

// Deterministic script for the synthetic backend. When `answer` is non-empty
// the plan only applies to texts carrying that answer (as a suffix for token
// scoring, as a substring for routing prompts); plant offsets are then
// answer-relative. An empty `answer` makes the plan global, with plant
// offsets interpreted directly in the scored text.
struct SyntheticPlan {
    std::uint64_t seed = 0;
    double base_logprob_spread = 2.0;
    std::string answer;
    std::vector<SyntheticPlant> plants;
    std::map<std::string, double> route_boosts;  // candidate token -> added logit
    ProposerMode proposer_mode = ProposerMode::kNeighborWindow;
};

// Model access used by the pipeline. Implementations must be safe for
// concurrent calls; the engine queries all ensemble models of one instance
// in parallel.
class Backend {
  public:
    virtual ~Backend() = default;

    // Per-token logprobs for `text`. Returned tokens tile the text exactly
    // (code-point offsets); every token except possibly the first carries a
    // finite logprob <= 0. Throws TransportError / ProtocolError /
    // CoverageError; empty text is a ValidationError.
    virtual std::vector<ScoredToken> token_logprobs(const ModelProfile& profile,
                                                    const std::string& text) = 0;

    // Next-token logit for every candidate. Candidates absent from the
    // endpoint's top list get floor = min(returned) - 10, so no candidate is
    // ever NaN or -inf.
    virtual std::map<std::string, double> next_token_logits(
        const ModelProfile& profile, const std::string& prompt,
        const std::vector<std::string>& candidates) = 0;

    // Free-text span proposal around the focus word. `prompt` is the fully
    // rendered instruction (HTTP backends send it verbatim; the synthetic
    // backend works from the structured fields). Returns a non-empty surface
    // string; the caller locates it in the answer. Throws EmptyResponseError
    // when the endpoint returns nothing usable.
    virtual std::string propose_span(const ModelProfile& profile, const std::string& answer,
                                     const WordSpan& focus,
                                     const std::optional<std::string>& left,
                                     const std::optional<std::string>& right,
                                     const std::string& prompt) = 0;
};

// Offline backend: logprobs come from a keyed hash of
// (seed, model_id, token text, token index) mapped into a negative range, so
// identical inputs are bit-identical across processes.
class SyntheticBackend final : public Backend {
  public:
    explicit SyntheticBackend(SyntheticPlan plan);
    explicit SyntheticBackend(std::vector<SyntheticPlan> plans);

    std::vector<ScoredToken> token_logprobs(const ModelProfile& profile,
                                            const std::string& text) override;
    std::map<std::string, double> next_token_logits(
        const ModelProfile& profile, const std::string& prompt,
        const std::vector<std::string>& candidates) override;
    std::string propose_span(const ModelProfile& profile, const std::string& answer,
                             const WordSpan& focus, const std::optional<std::string>& left,
                             const std::optional<std::string>& right,
                             const std::string& prompt) override;

  private:
    const SyntheticPlan* plan_for_text(const std::string& text) const;
    const SyntheticPlan* plan_for_prompt(const std::string& prompt) const;
    const SyntheticPlan* plan_for_answer(const std::string& answer) const;

    std::vector<SyntheticPlan> plans_;
};

struct HttpOptions {
    int max_attempts = 3;                              // transport errors only
    std::chrono::milliseconds initial_backoff{200};    // doubles per attempt
    std::chrono::milliseconds timeout{30000};
    int top_logprobs = 20;
    int echo_logprobs = 1;                             // logprobs=k on completions
};

// OpenAI-compatible HTTP client. token_logprobs uses /completions with
// echo=true, max_tokens=0; the other calls use /chat/completions. Byte
// offsets from the wire are validated and converted to code-point offsets.
class HttpBackend final : public Backend {
  public:
    explicit HttpBackend(HttpOptions options = {});

    std::vector<ScoredToken> token_logprobs(const ModelProfile& profile,
                                            const std::string& text) override;
    std::map<std::string, double> next_token_logits(
        const ModelProfile& profile, const std::string& prompt,
        const std::vector<std::string>& candidates) override;
    std::string propose_span(const ModelProfile& profile, const std::string& answer,
                             const WordSpan& focus, const std::optional<std::string>& left,
                             const std::optional<std::string>& right,
                             const std::string& prompt) override;

  private:
    std::string post_json(const ModelProfile& profile, const std::string& path,
                          const std::string& body);

    HttpOptions options_;
};

namespace detail {
// splitmix64-style mixing used by the synthetic backend and the tuner's
// sampler; fixed here so outputs are reproducible across platforms.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t seed, std::string_view s);
double unit_from_hash(std::uint64_t h);  // [0, 1)
}  // namespace detail

}  // namespace halodet
