#pragma once

#include <array>
#include <span>
#include <vector>

#include "qrouter/features.hpp"

namespace qrouter::extractor {

inline constexpr double kIqrEpsilon = 1e-6;

struct ScoringWeights {
    std::array<double, features::kFeatureCount> w{};
    double b = 0.0;
};

// Per-frame artifact probabilities; values[0] belongs to frame 1.
struct FrameProbabilities {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double at(std::size_t t) const { return values.at(t - 1); }
};

// Linear-interpolation quantile between order statistics (q in [0, 1]).
double quantile(std::span<const double> values, double q);

double median(std::span<const double> values);

// Per-column (x - median) / max(IQR, eps).
features::FeatureMatrix robust_normalize(const features::FeatureMatrix& matrix);

// Logistic function clamped so the result stays strictly inside (0, 1).
double logistic(double z);

FrameProbabilities logistic_score(const features::FeatureMatrix& normalized, const ScoringWeights& weights);

ScoringWeights default_weights();

}  // namespace qrouter::extractor
