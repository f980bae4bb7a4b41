#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrouter/clients.hpp"
#include "qrouter/clips.hpp"
#include "qrouter/media.hpp"
#include "qrouter/selection.hpp"

namespace qrouter::localization {

struct FlowVector {
    double dx = 0;
    double dy = 0;
};

using FlowField = Plane<FlowVector>;
using RawMap = Plane<double>;

// Values in [0, 1], same grid as the reference frame.
struct Heatmap {
    Plane<double> values;
};

// Flow maps a pixel p of the reference frame to p + flow(p) in the second frame.
class FlowEstimator {
public:
    virtual ~FlowEstimator() = default;
    virtual FlowField estimate(const Frame& reference, const Frame& moving) const = 0;
};

struct BlockMatchingParams {
    std::size_t block = 8;
    int radius = 7;
};

// Integer SAD block matching on luma. Ties prefer the smallest displacement.
class BlockMatchingFlow final : public FlowEstimator {
public:
    explicit BlockMatchingFlow(BlockMatchingParams params = {}) : params_(params) {}
    FlowField estimate(const Frame& reference, const Frame& moving) const override;

private:
    BlockMatchingParams params_;
};

class PerceptualMetric {
public:
    virtual ~PerceptualMetric() = default;
    virtual RawMap map(const Frame& reference, const Frame& warped) const = 0;
};

// 0.5 * blur3(|dY|) + 0.5 * blur3(|dG|), Y = luma, G = Sobel magnitude.
class ProxyPerceptualMetric final : public PerceptualMetric {
public:
    RawMap map(const Frame& reference, const Frame& warped) const override;
};

// Learned metric served over HTTP: posts both frames as base64 PPM and expects
// {"width", "height", "values"} with one non-negative value per pixel, row-major.
class RemotePerceptualMetric final : public PerceptualMetric {
public:
    explicit RemotePerceptualMetric(clients::Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
    RawMap map(const Frame& reference, const Frame& warped) const override;

private:
    clients::Endpoint endpoint_;
};

FlowField estimate_flow(const Frame& f1, const Frame& f2, const FlowEstimator& backend);

// Backward bilinear warp: out(p) = moving(p + flow(p)), samples clamped to the border.
Frame warp(const Frame& moving, const FlowField& flow);

RawMap perceptual_map(const Frame& f1, const Frame& w2, const PerceptualMetric& metric);

Heatmap normalize_map(const RawMap& h);

double severity(const Heatmap& hm);

Rgb colormap(double v);

Frame render_overlay(const Frame& f1, const Heatmap& hm, double alpha);

GrayFrame heatmap_to_gray(const Heatmap& hm);

using LabelMap = std::map<std::size_t, clients::ArtifactLabel>;

LabelMap vlm_filter(const selection::FrameIndexSet& selected, const FrameSequence& seq,
                    const clients::FrameClassifier& classifier);

clips::ClipSet restrict_clips(const clips::ClipSet& clips, const LabelMap& labels);

struct PairSeverity {
    std::size_t t = 0;  // pair is (t, t + 1)
    double severity = 0;
    Heatmap heatmap;
};

// Severity of the motion-compensated pair (t, t + 1).
PairSeverity evaluate_pair(const FrameSequence& seq, std::size_t t, const FlowEstimator& flow,
                           const PerceptualMetric& metric);

struct ClipResult {
    clips::Clip clip;
    double severity = 0;
    std::size_t pair_first = 0;
    std::size_t pair_second = 0;
    clients::ArtifactLabel label = clients::ArtifactLabel::None;
    std::filesystem::path heatmap_path;
    std::filesystem::path overlay_path;
};

struct LocalizationOutput {
    std::vector<ClipResult> results;
    std::vector<std::string> warnings;
};

struct LocalizeOptions {
    double alpha = 0.5;
};

LocalizationOutput localize(const FrameSequence& seq, const clips::ClipSet& clips, const LabelMap& labels,
                            const FlowEstimator& flow, const PerceptualMetric& metric,
                            const LocalizeOptions& options, const std::filesystem::path& out_dir);

}  // namespace qrouter::localization
