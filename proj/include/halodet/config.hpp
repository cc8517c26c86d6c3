#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "halodet/backend.hpp"
#include "halodet/pipeline.hpp"

namespace halodet {

// One structured JSON file holds everything a run needs; environment
// variables are used only for secrets (bearer tokens named per profile).
struct AppConfig {
    std::vector<ModelProfile> ensemble;
    ModelProfile router;
    HyperParams hp;
    std::optional<std::filesystem::path> routing_template_path;
    std::optional<std::filesystem::path> span_template_path;
    std::size_t max_concurrency = 4;
    std::vector<SyntheticPlan> synthetic_plans;  // used when the backend is synthetic
    std::uint64_t synthetic_seed = 0;
};

// Throws ConfigError naming the missing or malformed field.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& text, const std::string& origin);

PipelineConfig make_pipeline_config(const AppConfig& config);

// force_synthetic swaps every profile onto the synthetic backend regardless
// of configured endpoints; seed_override rewrites the plan seeds.
std::unique_ptr<Backend> make_backend(const AppConfig& config, bool force_synthetic,
                                      std::optional<std::uint64_t> seed_override);

bool uses_synthetic(const AppConfig& config, bool force_synthetic);

}  // namespace halodet
