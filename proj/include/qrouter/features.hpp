#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qrouter/media.hpp"

namespace qrouter::features {

inline constexpr std::size_t kFeatureCount = 7;

enum FeatureIndex : std::size_t {
    kDiffMean = 0,
    kLapVar = 1,
    kGradKurtosis = 2,
    kEdgeDensity = 3,
    kHistDistPrev = 4,
    kFace = 5,
    kText = 6,
};

struct FeatureVector {
    double diff_mean = 0;
    double lap_var = 0;
    double grad_kurtosis = 0;
    double edge_density = 0;
    double hist_dist_prev = 0;
    double face = 0;
    double text = 0;

    std::array<double, kFeatureCount> as_array() const {
        return {diff_mean, lap_var, grad_kurtosis, edge_density, hist_dist_prev, face, text};
    }
    static FeatureVector from_array(const std::array<double, kFeatureCount>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
    }
};

// One row per frame; rows[0] is frame 1.
struct FeatureMatrix {
    std::vector<std::array<double, kFeatureCount>> rows;

    std::size_t size() const { return rows.size(); }
    FeatureVector row(std::size_t t) const { return FeatureVector::from_array(rows.at(t - 1)); }
    std::vector<double> column(std::size_t i) const;
};

struct CannyParams {
    double sigma = 1.4;
    double low = 50.0;
    double high = 150.0;
};

// Mean absolute luma difference over all pixels.
double motion_residual(const GrayFrame& prev, const GrayFrame& cur);
double motion_residual(const Frame& prev, const Frame& cur);

// Population variance of the 4-neighbour Laplacian over interior pixels.
double laplacian_variance(const GrayFrame& gray);

// Sobel gradient magnitude over interior pixels, row-major.
std::vector<double> sobel_magnitudes(const GrayFrame& gray);

// Non-excess kurtosis; 0 when the sample has zero variance.
double kurtosis(std::span<const double> values);

double gradient_kurtosis(const GrayFrame& gray);

// Binary edge map (1 = edge) from a fixed-parameter Canny detector.
Plane<std::uint8_t> canny(const GrayFrame& gray, const CannyParams& params = {});

double edge_density(const GrayFrame& gray, const CannyParams& params = {});

inline constexpr double kMinBhattacharyyaCoefficient = 1e-12;

double bhattacharyya(const HsvHistogram& h1, const HsvHistogram& h2);

struct ContentPriors {
    double face = 0;
    double text = 0;
};

// Pluggable face/text detector. Outputs are clamped to [0, 1] by content_priors.
using ContentPriorDetector = std::function<ContentPriors(const Frame&)>;

ContentPriors content_priors(const Frame& frame, const ContentPriorDetector& detector = {});

struct ExtractionOptions {
    HsvBins hsv_bins{};
    CannyParams canny{};
    ContentPriorDetector priors{};
};

// Per-frame features plus the HSV histograms they were built from.
struct ExtractedFeatures {
    FeatureMatrix matrix;
    std::vector<HsvHistogram> histograms;
};

ExtractedFeatures extract_features_with_histograms(const FrameSequence& seq, const ExtractionOptions& options = {});

FeatureMatrix extract_features(const FrameSequence& seq, const ExtractionOptions& options = {});

}  // namespace qrouter::features
