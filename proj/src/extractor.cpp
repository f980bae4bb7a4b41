#include "qrouter/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrouter::extractor {

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw Error("quantile of empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

features::FeatureMatrix robust_normalize(const features::FeatureMatrix& matrix) {
    if (matrix.size() == 0) throw Error("robust_normalize: empty matrix");
    features::FeatureMatrix out = matrix;
    for (std::size_t i = 0; i < features::kFeatureCount; ++i) {
        const auto col = matrix.column(i);
        const double m = median(col);
        const double iqr = quantile(col, 0.75) - quantile(col, 0.25);
        const double scale = std::max(iqr, kIqrEpsilon);
        for (auto& row : out.rows) row[i] = (row[i] - m) / scale;
    }
    return out;
}

double logistic(double z) {
    double p;
    if (z >= 0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    constexpr double lo = std::numeric_limits<double>::denorm_min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(p, lo, hi);
}

FrameProbabilities logistic_score(const features::FeatureMatrix& normalized, const ScoringWeights& weights) {
    FrameProbabilities probs;
    probs.values.reserve(normalized.size());
    for (const auto& row : normalized.rows) {
        double z = weights.b;
        for (std::size_t i = 0; i < features::kFeatureCount; ++i) z += weights.w[i] * row[i];
        probs.values.push_back(logistic(z));
    }
    return probs;
}

ScoringWeights default_weights() {
    ScoringWeights sw;
    sw.w[features::kDiffMean] = 0.8;
    sw.w[features::kGradKurtosis] = 0.6;
    sw.w[features::kHistDistPrev] = 1.0;
    sw.b = 0.0;
    return sw;
}

}  // namespace qrouter::extractor
