#include "halodet/types.hpp"

#include <algorithm>
#include <cmath>

#include "halodet/errors.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace {

void check_spans(const std::vector<SpanAnnotation>& spans, std::size_t answer_len,
                 const std::string& id, bool want_prob) {
    for (const auto& s : spans) {
        if (s.start >= s.end || s.end > answer_len) {
            throw ValidationError("instance " + id + ": span (" + std::to_string(s.start) +
                                  ", " + std::to_string(s.end) + ") out of bounds for answer of " +
                                  std::to_string(answer_len) + " code points");
        }
        if (s.prob && (!(*s.prob >= 0.0) || !(*s.prob <= 1.0))) {
            throw ValidationError("instance " + id + ": span probability " +
                                  std::to_string(*s.prob) + " outside [0, 1]");
        }
        if (want_prob && !s.prob) {
            throw ValidationError("instance " + id + ": soft label missing its probability");
        }
    }
}

}  // namespace

HyperParams clamp_hyperparams(HyperParams hp) {
    if (!(hp.beta >= 0.0 && hp.beta <= 1.0)) {
        throw ValidationError("beta " + std::to_string(hp.beta) + " outside [0, 1]");
    }
    if (!(hp.sigma >= 0.0 && hp.sigma <= 2.0)) {
        throw ValidationError("sigma " + std::to_string(hp.sigma) + " outside [0, 2]");
    }
    if (!std::isfinite(hp.tau)) throw ValidationError("tau is not finite");
    hp.tau = std::clamp(hp.tau, kTauMin, kTauMax);
    return hp;
}

const QAInstance& validate_instance(const QAInstance& inst) {
    if (inst.answer.empty()) {
        throw ValidationError("instance " + inst.id + ": empty answer");
    }
    const std::size_t answer_len = cp_length(inst.answer);
    if (inst.gold_hard) check_spans(*inst.gold_hard, answer_len, inst.id, /*want_prob=*/false);
    if (inst.gold_soft) check_spans(*inst.gold_soft, answer_len, inst.id, /*want_prob=*/true);
    return inst;
}

}  // namespace halodet
