#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrouter/clients.hpp"
#include "qrouter/clips.hpp"
#include "qrouter/config.hpp"
#include "qrouter/eval.hpp"
#include "qrouter/extractor.hpp"
#include "qrouter/features.hpp"
#include "qrouter/fusion.hpp"
#include "qrouter/localization.hpp"
#include "qrouter/selection.hpp"

namespace qrouter::pipeline {

struct ExtractorParams {
    extractor::ScoringWeights weights = extractor::default_weights();
    clips::HysteresisParams hysteresis{};
    selection::SelectionBudget budget{};
    double theta_shot = selection::kDefaultShotThreshold;
    features::ExtractionOptions features{};
};

ExtractorParams extractor_params(const RunConfig& config);

// Features, probabilities, clips and diversified frame selection for one video.
struct ExtractorOutput {
    features::FeatureMatrix features;
    std::vector<HsvHistogram> histograms;
    extractor::FrameProbabilities probs;
    clips::ClipSet clips;
    selection::FrameIndexSet selected;
};

ExtractorOutput run_extractor(const FrameSequence& seq, const ExtractorParams& params);

struct LocalizationRun {
    ExtractorOutput extracted;
    localization::LabelMap labels;
    clips::ClipSet retained;
    localization::LocalizationOutput output;
    nlohmann::json summary;
};

// Writes heatmaps, overlays and summary.json into out_dir.
LocalizationRun run_localization(const FrameSequence& seq, const ExtractorParams& params,
                                 const clients::FrameClassifier& classifier,
                                 const localization::FlowEstimator& flow,
                                 const localization::PerceptualMetric& metric, double alpha,
                                 const std::filesystem::path& out_dir);

// Paths are written relative to `base`.
nlohmann::json localization_summary(const LocalizationRun& run, std::size_t frame_count,
                                    const std::filesystem::path& base);

// Optional <video_dir>/meta.json: {video_type, description, text_prompt}.
routing::VideoMeta read_video_meta(const std::filesystem::path& video_dir);

// Fails fast when the directory cannot be created or written.
void ensure_writable_dir(const std::filesystem::path& dir);

class Pipeline {
public:
    explicit Pipeline(RunConfig config);

    const RunConfig& config() const { return config_; }

    // Scores the video at the configured tier and writes <out_dir>/report.json.
    fusion::QualityReport score(const std::filesystem::path& video_dir, const std::filesystem::path& out_dir) const;

    // Same as score() without touching the filesystem beyond tier-2 artifacts.
    fusion::QualityReport assess(const std::filesystem::path& video_dir, const std::filesystem::path& out_dir) const;

    LocalizationRun localize(const std::filesystem::path& video_dir, const std::filesystem::path& out_dir) const;

    // Writes eval.json and eval.txt into out_dir.
    eval::EvalResult evaluate(const std::filesystem::path& manifest, const std::filesystem::path& out_dir) const;

    std::unique_ptr<clients::ExpertClient> expert_client(const std::string& name) const;
    std::unique_ptr<clients::FrameClassifier> frame_classifier() const;
    std::unique_ptr<routing::VideoClassifier> video_classifier() const;
    std::unique_ptr<localization::PerceptualMetric> perceptual_metric() const;

private:
    clients::Endpoint endpoint(const std::string& url) const;

    RunConfig config_;
};

std::string dump_report(const fusion::QualityReport& report);

}  // namespace qrouter::pipeline
