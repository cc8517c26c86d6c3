#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "halodet/pipeline.hpp"
#include "halodet/types.hpp"

namespace halodet {

struct ParamRanges {
    double beta_lo = 0.0, beta_hi = 1.0;
    double sigma_lo = 0.0, sigma_hi = 2.0;
    double tau_lo = kTauMin, tau_hi = kTauMax;  // tau = 0 would divide by zero
};

enum class Objective { kMeanIoU, kMeanSpearman };

struct Trial {
    std::size_t index = 0;
    HyperParams hp;
    double mean_iou = 0.0;
    double mean_spearman = 0.0;
};

struct TuneResult {
    HyperParams best;
    double best_objective = 0.0;
    std::size_t best_trial = 0;
    std::vector<Trial> trials;
};

// Seeded uniform random search over the ranges. Perplexity matrices and
// router logits are computed once per instance and shared across trials;
// each trial only re-applies (beta, sigma, tau). Instances without gold hard
// labels are skipped; if none remain, throws ValidationError. Ties keep the
// earliest trial, so the best objective is non-decreasing in trial count.
TuneResult tune(Backend& backend, const PipelineConfig& config,
                std::span<const QAInstance> dataset, const ParamRanges& ranges,
                std::size_t trials, std::uint64_t seed,
                Objective objective = Objective::kMeanIoU);

// Mean IoU / Spearman of one parameter point over precomputed artifacts.
Trial evaluate_params(Backend& backend, const PipelineConfig& config,
                      std::span<const QAInstance> dataset,
                      std::span<const InstanceArtifacts> artifacts, const HyperParams& hp);

// trial,beta,sigma,tau,mean_iou,mean_spearman -- byte-stable for a fixed seed.
std::string trial_log_csv(const TuneResult& result);

}  // namespace halodet
