#include <algorithm>
#include <cmath>
#include <string_view>

#include "halodet/backend.hpp"
#include "halodet/errors.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace detail {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::string_view s) {
    std::uint64_t h = seed ^ 0xCBF29CE484222325ULL;  // FNV offset basis
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ULL;  // FNV prime
    }
    return mix64(h);
}

double unit_from_hash(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

namespace {

std::uint64_t key(std::uint64_t seed, std::string_view a, std::string_view b,
                  std::uint64_t n = 0) {
    std::uint64_t h = detail::hash_combine(seed, a);
    h = detail::hash_combine(h, b);
    return detail::mix64(h ^ n);
}

bool ends_with(const std::string& text, const std::string& suffix) {
    return text.size() >= suffix.size() &&
           text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

SyntheticBackend::SyntheticBackend(SyntheticPlan plan)
    : plans_{std::move(plan)} {}

SyntheticBackend::SyntheticBackend(std::vector<SyntheticPlan> plans)
    : plans_(std::move(plans)) {}

// Specific plans (non-empty answer) win over a global plan (empty answer).
const SyntheticPlan* SyntheticBackend::plan_for_text(const std::string& text) const {
    const SyntheticPlan* global = nullptr;
    for (const auto& plan : plans_) {
        if (plan.answer.empty()) {
            if (!global) global = &plan;
        } else if (ends_with(text, plan.answer)) {
            return &plan;
        }
    }
    return global;
}

const SyntheticPlan* SyntheticBackend::plan_for_prompt(const std::string& prompt) const {
    const SyntheticPlan* global = nullptr;
    for (const auto& plan : plans_) {
        if (plan.answer.empty()) {
            if (!global) global = &plan;
        } else if (prompt.find(plan.answer) != std::string::npos) {
            return &plan;
        }
    }
    return global;
}

const SyntheticPlan* SyntheticBackend::plan_for_answer(const std::string& answer) const {
    const SyntheticPlan* global = nullptr;
    for (const auto& plan : plans_) {
        if (plan.answer.empty()) {
            if (!global) global = &plan;
        } else if (plan.answer == answer) {
            return &plan;
        }
    }
    return global;
}

std::vector<ScoredToken> SyntheticBackend::token_logprobs(const ModelProfile& profile,
                                                          const std::string& text) {
    if (text.empty()) throw ValidationError("token_logprobs: empty text");
    const SyntheticPlan* plan = plan_for_text(text);
    const std::uint64_t seed = plan ? plan->seed : 0;
    const double spread = plan ? plan->base_logprob_spread : 2.0;

    const std::u32string cps = decode_utf8(text);
    const std::size_t n = cps.size();

    // whitespace runs become single tokens; non-whitespace runs are chopped
    // into 1..3 code-point pieces, with lengths keyed on (seed, model, pos)
    // so different models tokenize the same text differently
    std::vector<ScoredToken> tokens;
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end;
        if (is_whitespace(cps[pos])) {
            end = pos + 1;
            while (end < n && is_whitespace(cps[end])) ++end;
        } else {
            std::size_t run_end = pos + 1;
            while (run_end < n && !is_whitespace(cps[run_end])) ++run_end;
            const std::uint64_t h = key(seed, profile.model_id, "chunk", pos);
            end = std::min(pos + 1 + (h % 3), run_end);
        }
        ScoredToken token;
        token.start = pos;
        token.end = end;
        token.text = encode_utf8(std::u32string_view(cps).substr(pos, end - pos));
        tokens.push_back(std::move(token));
        pos = end;
    }

    // answer-relative plant offsets are anchored via the answer suffix
    std::size_t answer_start = 0;
    bool anchored = false;
    if (plan && !plan->answer.empty()) {
        answer_start = n - cp_length(plan->answer);
        anchored = true;
    }

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i == 0) continue;  // first token of a sequence carries no logprob
        auto& token = tokens[i];
        const std::uint64_t h = key(seed, profile.model_id, token.text, i);
        double logprob = -0.05 - detail::unit_from_hash(h) * spread;
        if (plan) {
            for (const auto& plant : plan->plants) {
                if (plant.model_id != profile.model_id) continue;
                const std::size_t lo = (anchored ? answer_start : 0) + plant.start;
                const std::size_t hi = (anchored ? answer_start : 0) + plant.end;
                if (token.start < hi && token.end > lo) {
                    logprob -= plant.boost;
                    break;
                }
            }
        }
        token.logprob = logprob;
    }
    return tokens;
}

std::map<std::string, double> SyntheticBackend::next_token_logits(
    const ModelProfile& profile, const std::string& prompt,
    const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw ValidationError("next_token_logits: no candidates");
    const SyntheticPlan* plan = plan_for_prompt(prompt);
    const std::uint64_t seed = plan ? plan->seed : 0;

    std::map<std::string, double> out;
    for (const auto& candidate : candidates) {
        double logit = detail::unit_from_hash(key(seed, profile.model_id, candidate, 0x10F1));
        if (plan) {
            auto it = plan->route_boosts.find(candidate);
            if (it != plan->route_boosts.end()) logit += it->second;
        }
        out[candidate] = logit;
    }
    return out;
}

std::string SyntheticBackend::propose_span(const ModelProfile& profile,
                                           const std::string& answer, const WordSpan& focus,
                                           const std::optional<std::string>& left,
                                           const std::optional<std::string>& right,
                                           const std::string& prompt) {
    (void)profile;
    (void)left;
    (void)right;
    (void)prompt;
    const std::size_t answer_len = cp_length(answer);
    if (focus.start >= focus.end || focus.end > answer_len) {
        throw ValidationError("propose_span: focus outside answer bounds");
    }
    const SyntheticPlan* plan = plan_for_answer(answer);
    const ProposerMode mode = plan ? plan->proposer_mode : ProposerMode::kNeighborWindow;

    if (mode == ProposerMode::kPlantedRange && plan) {
        for (const auto& plant : plan->plants) {
            if (focus.start < plant.end && focus.end > plant.start) {
                return cp_substr(answer, plant.start, std::min(plant.end, answer_len));
            }
        }
        return cp_substr(answer, focus.start, focus.end);
    }
    if (mode == ProposerMode::kNeighborWindow) {
        const std::u32string cps = decode_utf8(answer);
        std::size_t lo = focus.start;
        while (lo > 0 && is_whitespace(cps[lo - 1])) --lo;
        while (lo > 0 && !is_whitespace(cps[lo - 1])) --lo;
        std::size_t hi = focus.end;
        while (hi < cps.size() && is_whitespace(cps[hi])) ++hi;
        while (hi < cps.size() && !is_whitespace(cps[hi])) ++hi;
        return cp_substr(answer, lo, hi);
    }
    return cp_substr(answer, focus.start, focus.end);
}

}  // namespace halodet
