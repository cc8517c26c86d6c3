// Generator for the planted synthetic corpus used by the end-to-end and
// tuner suites: each instance hides one span whose logprobs are depressed
// for a designated "local" model, with routing boosted toward that model.
#pragma once

#include <cstdint>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/pipeline.hpp"
#include "halodet/types.hpp"

namespace halodet::test {

struct SyntheticCorpus {
    std::vector<QAInstance> instances;  // gold labels = the planted spans
    std::vector<SyntheticPlan> plans;   // one per instance, answer-anchored
    PipelineConfig config;              // five-model ensemble + router, default hyperparams
};

SyntheticCorpus make_corpus(std::size_t n_instances, std::uint64_t seed,
                            double min_boost = 3.0);

}  // namespace halodet::test
