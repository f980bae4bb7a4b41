#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "qrouter/clips.hpp"
#include "qrouter/extractor.hpp"
#include "qrouter/routing.hpp"
#include "qrouter/selection.hpp"

namespace qrouter {

// Invalid or unreadable run configuration (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ExpertSettings {
    std::string endpoint;
    std::optional<double> mock_score;  // mock mode only
};

struct RunConfig {
    int tier = 1;
    bool mock = false;
    std::uint64_t seed = 0;
    std::chrono::milliseconds timeout{30000};
    std::string bearer_token;
    routing::VideoType default_video_type = routing::VideoType::UGC;

    std::map<std::string, ExpertSettings> experts;
    routing::ExpertPool pool = routing::default_pool();
    routing::BaselinePriors priors = routing::default_priors();

    std::string vlm_endpoint;       // frame filter
    std::string classify_endpoint;  // video type classification
    std::string metric_endpoint;    // remote perceptual metric; empty = built-in proxy
    std::string mock_vlm_response = "2";
    std::map<std::size_t, std::string> mock_vlm_responses;

    extractor::ScoringWeights weights = extractor::default_weights();
    clips::HysteresisParams hysteresis{};
    double theta_shot = selection::kDefaultShotThreshold;
    selection::SelectionBudget budget{};
    double alpha = 0.5;

    std::string out_dir;
    std::string predictor = "pipeline";  // eval only: "pipeline" or "identity"
};

void validate(const RunConfig& config);

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// QROUTER_EXPERT_<NAME>_ENDPOINT, QROUTER_VLM_ENDPOINT, QROUTER_CLASSIFY_ENDPOINT, QROUTER_METRIC_ENDPOINT.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
void apply_env_overrides(RunConfig& config, const EnvLookup& env);
void apply_process_env(RunConfig& config);

std::string expert_env_var(const std::string& expert_name);

}  // namespace qrouter
