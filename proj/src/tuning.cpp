#include "halodet/tuning.hpp"

#include <cstdio>

#include "halodet/errors.hpp"
#include "halodet/metrics.hpp"
#include "halodet/parallel.hpp"
#include "halodet/text.hpp"

namespace halodet {

namespace {

// splitmix64 stream; avoids std::uniform_real_distribution, whose output is
// implementation-defined and would break byte-identical trial logs across
// platforms.
class SampleStream {
  public:
    explicit SampleStream(std::uint64_t seed) : state_(seed) {}

    double uniform(double lo, double hi) {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return lo + (static_cast<double>(x >> 11) * 0x1.0p-53) * (hi - lo);
    }

  private:
    std::uint64_t state_;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Trial evaluate_params(Backend& backend, const PipelineConfig& config,
                      std::span<const QAInstance> dataset,
                      std::span<const InstanceArtifacts> artifacts, const HyperParams& hp) {
    if (dataset.size() != artifacts.size()) {
        throw DimensionError("artifact cache does not match the dataset");
    }
    Trial trial;
    trial.hp = hp;
    double iou_sum = 0.0, spearman_sum = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const QAInstance& inst = dataset[i];
        const DetectionResult result =
            detect_from_artifacts(backend, config, inst, artifacts[i], hp);
        const std::size_t answer_len = cp_length(inst.answer);
        static const std::vector<SpanAnnotation> kNone;
        const auto& gold_hard = inst.gold_hard ? *inst.gold_hard : kNone;
        const auto& gold_soft = inst.gold_soft ? *inst.gold_soft : kNone;
        iou_sum += iou(result.prediction.hard, gold_hard, answer_len);
        spearman_sum += spearman(result.prediction.soft, gold_soft, answer_len);
    }
    trial.mean_iou = iou_sum / static_cast<double>(dataset.size());
    trial.mean_spearman = spearman_sum / static_cast<double>(dataset.size());
    return trial;
}

TuneResult tune(Backend& backend, const PipelineConfig& config,
                std::span<const QAInstance> dataset, const ParamRanges& ranges,
                std::size_t trials, std::uint64_t seed, Objective objective) {
    if (trials == 0) throw ValidationError("tune: need at least one trial");

    std::vector<QAInstance> labeled;
    for (const auto& inst : dataset) {
        if (inst.gold_hard) labeled.push_back(inst);
    }
    if (labeled.empty()) {
        throw ValidationError("tune: no instances with gold hard labels");
    }

    std::vector<InstanceArtifacts> artifacts(labeled.size());
    detail::parallel_for(labeled.size(), config.max_concurrency, [&](std::size_t i) {
        artifacts[i] = compute_artifacts(backend, config, labeled[i]);
    });

    // sample parameters up front, in trial order, so the log only depends on
    // the seed
    const double tau_lo = std::max(ranges.tau_lo, kTauMin);
    std::vector<HyperParams> points(trials);
    SampleStream stream(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        points[t].beta = stream.uniform(ranges.beta_lo, ranges.beta_hi);
        points[t].sigma = stream.uniform(ranges.sigma_lo, ranges.sigma_hi);
        points[t].tau = stream.uniform(tau_lo, ranges.tau_hi);
    }

    TuneResult result;
    result.trials.resize(trials);
    detail::parallel_for(trials, config.max_concurrency, [&](std::size_t t) {
        result.trials[t] = evaluate_params(backend, config, labeled, artifacts, points[t]);
        result.trials[t].index = t;
    });

    bool have_best = false;
    double best_value = 0.0;
    for (const auto& trial : result.trials) {
        const double value =
            objective == Objective::kMeanIoU ? trial.mean_iou : trial.mean_spearman;
        if (!have_best || value > best_value) {  // ties keep the earliest trial
            have_best = true;
            best_value = value;
            result.best = trial.hp;
            result.best_objective = value;
            result.best_trial = trial.index;
        }
    }
    return result;
}

std::string trial_log_csv(const TuneResult& result) {
    std::string out = "trial,beta,sigma,tau,mean_iou,mean_spearman\n";
    for (const auto& trial : result.trials) {
        out += std::to_string(trial.index) + ',' + format_double(trial.hp.beta) + ',' +
               format_double(trial.hp.sigma) + ',' + format_double(trial.hp.tau) + ',' +
               format_double(trial.mean_iou) + ',' + format_double(trial.mean_spearman) + '\n';
    }
    return out;
}

}  // namespace halodet
