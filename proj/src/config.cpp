#include "halodet/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "halodet/errors.hpp"
#include "halodet/templates.hpp"

namespace halodet {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* field, const std::string& where) {
    if (!obj.contains(field)) {
        throw ConfigError(where + ": missing required field '" + field + "'");
    }
    return obj[field];
}

ModelProfile parse_profile(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": profile must be an object");
    ModelProfile profile;
    profile.model_id = require_field(obj, "model_id", where).get<std::string>();
    profile.display_name = require_field(obj, "display_name", where).get<std::string>();
    profile.name_tokens =
        require_field(obj, "name_tokens", where).get<std::vector<std::string>>();
    if (profile.display_name.empty()) throw ConfigError(where + ": empty display_name");
    if (profile.name_tokens.empty()) throw ConfigError(where + ": name_tokens is empty");
    if (obj.contains("endpoint")) profile.endpoint = obj["endpoint"].get<std::string>();
    if (obj.contains("auth_env")) profile.auth_env = obj["auth_env"].get<std::string>();
    return profile;
}

ProposerMode parse_proposer_mode(const std::string& mode, const std::string& where) {
    if (mode == "focus") return ProposerMode::kFocusWord;
    if (mode == "window") return ProposerMode::kNeighborWindow;
    if (mode == "planted") return ProposerMode::kPlantedRange;
    throw ConfigError(where + ": unknown proposer_mode '" + mode + "'");
}

SyntheticPlan parse_plan(const json& obj, const std::string& where) {
    SyntheticPlan plan;
    if (obj.contains("seed")) plan.seed = obj["seed"].get<std::uint64_t>();
    if (obj.contains("base_logprob_spread")) {
        plan.base_logprob_spread = obj["base_logprob_spread"].get<double>();
        if (!(plan.base_logprob_spread > 0)) {
            throw ConfigError(where + ": base_logprob_spread must be positive");
        }
    }
    if (obj.contains("answer")) plan.answer = obj["answer"].get<std::string>();
    if (obj.contains("plants")) {
        for (const auto& p : obj["plants"]) {
            SyntheticPlant plant;
            plant.model_id = require_field(p, "model_id", where).get<std::string>();
            plant.start = require_field(p, "start", where).get<std::size_t>();
            plant.end = require_field(p, "end", where).get<std::size_t>();
            plant.boost = require_field(p, "boost", where).get<double>();
            if (plant.start >= plant.end || !(plant.boost > 0)) {
                throw ConfigError(where + ": plant needs start < end and boost > 0");
            }
            plan.plants.push_back(std::move(plant));
        }
    }
    if (obj.contains("route_boosts")) {
        for (const auto& [token, boost] : obj["route_boosts"].items()) {
            plan.route_boosts[token] = boost.get<double>();
        }
    }
    if (obj.contains("proposer_mode")) {
        plan.proposer_mode =
            parse_proposer_mode(obj["proposer_mode"].get<std::string>(), where);
    }
    return plan;
}

}  // namespace

AppConfig parse_config(const std::string& text, const std::string& origin) {
    json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ConfigError(origin + ": not a JSON object");
    }

    AppConfig config;
    const json& ensemble = require_field(parsed, "ensemble", origin);
    if (!ensemble.is_array() || ensemble.size() < 2) {
        throw ConfigError(origin + ": 'ensemble' must list at least 2 model profiles");
    }
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        config.ensemble.push_back(
            parse_profile(ensemble[i], origin + ": ensemble[" + std::to_string(i) + "]"));
    }
    config.router = parse_profile(require_field(parsed, "router", origin), origin + ": router");

    const json& hp = require_field(parsed, "hyperparams", origin);
    if (hp.contains("beta")) config.hp.beta = hp["beta"].get<double>();
    if (hp.contains("sigma")) config.hp.sigma = hp["sigma"].get<double>();
    if (hp.contains("tau")) config.hp.tau = hp["tau"].get<double>();
    try {
        config.hp = clamp_hyperparams(config.hp);
    } catch (const ValidationError& e) {
        throw ConfigError(origin + ": hyperparams: " + e.what());
    }

    if (parsed.contains("routing_template")) {
        config.routing_template_path = parsed["routing_template"].get<std::string>();
    }
    if (parsed.contains("span_template")) {
        config.span_template_path = parsed["span_template"].get<std::string>();
    }
    if (parsed.contains("max_concurrency")) {
        config.max_concurrency = parsed["max_concurrency"].get<std::size_t>();
        if (config.max_concurrency == 0) {
            throw ConfigError(origin + ": max_concurrency must be >= 1");
        }
    }
    if (parsed.contains("synthetic")) {
        const json& synthetic = parsed["synthetic"];
        if (synthetic.contains("seed")) {
            config.synthetic_seed = synthetic["seed"].get<std::uint64_t>();
        }
        if (synthetic.contains("plans")) {
            for (const auto& plan : synthetic["plans"]) {
                config.synthetic_plans.push_back(parse_plan(plan, origin + ": synthetic"));
            }
        } else {
            config.synthetic_plans.push_back(parse_plan(synthetic, origin + ": synthetic"));
        }
    }
    return config;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

PipelineConfig make_pipeline_config(const AppConfig& config) {
    PipelineConfig pipeline;
    pipeline.ensemble = config.ensemble;
    pipeline.router = config.router;
    pipeline.hp = config.hp;
    pipeline.max_concurrency = config.max_concurrency;
    if (config.routing_template_path) {
        pipeline.routing_template = load_template(*config.routing_template_path);
    }
    if (config.span_template_path) {
        pipeline.span_template = load_template(*config.span_template_path);
    }
    return pipeline;
}

bool uses_synthetic(const AppConfig& config, bool force_synthetic) {
    if (force_synthetic) return true;
    auto is_synthetic = [](const ModelProfile& p) { return p.endpoint == "synthetic"; };
    return is_synthetic(config.router) ||
           std::any_of(config.ensemble.begin(), config.ensemble.end(), is_synthetic);
}

std::unique_ptr<Backend> make_backend(const AppConfig& config, bool force_synthetic,
                                      std::optional<std::uint64_t> seed_override) {
    if (uses_synthetic(config, force_synthetic)) {
        std::vector<SyntheticPlan> plans = config.synthetic_plans;
        if (plans.empty()) plans.push_back(SyntheticPlan{});
        for (auto& plan : plans) {
            if (seed_override) {
                plan.seed = *seed_override;
            } else if (plan.seed == 0) {
                plan.seed = config.synthetic_seed;
            }
        }
        return std::make_unique<SyntheticBackend>(std::move(plans));
    }
    return std::make_unique<HttpBackend>();
}

}  // namespace halodet
