#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace halodet::cli {

// Exit codes, stable across releases:
//   0 success, 1 configuration error, 2 partial data failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

struct DetectOptions {
    std::string config_path;
    std::string dataset_path;
    std::string out_path;
    bool synthetic = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_concurrency;
    std::optional<std::string> lang;  // comma-separated codes, or "all"
};

struct EvaluateOptions {
    std::string pred_path;
    std::string gold_path;
    std::string report_path;
    std::optional<std::string> lang;
};

struct TuneOptions {
    std::string config_path;
    std::string dataset_path;
    std::string out_path;  // best-params config fragment; trial log at out + ".trials.csv"
    std::size_t trials = 50;
    std::uint64_t seed = 0;
    bool synthetic = false;
    std::optional<std::size_t> max_concurrency;
    std::optional<std::string> lang;
};

int cmd_detect(const DetectOptions& options);
int cmd_evaluate(const EvaluateOptions& options);
int cmd_tune(const TuneOptions& options);

}  // namespace halodet::cli
