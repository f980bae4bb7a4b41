#pragma once

#include <cstddef>
#include <vector>

#include "qrouter/extractor.hpp"
#include "qrouter/features.hpp"

namespace qrouter::selection {

struct SelectionBudget {
    std::size_t k_top = 8;
    std::size_t k_fps = 8;
};

inline constexpr double kDefaultShotThreshold = 0.5;

// Sorted, deduplicated 1-based frame indices.
using FrameIndexSet = std::vector<std::size_t>;

// k highest-probability frames, ties toward the lower index. Sorted ascending.
FrameIndexSet top_k(const extractor::FrameProbabilities& probs, std::size_t k);

// Greedy farthest-point sampling under Bhattacharyya distance.
// Returned in pick order: seed first (highest-probability candidate).
std::vector<std::size_t> fps_hsv(const std::vector<std::size_t>& candidates,
                                 const std::vector<HsvHistogram>& histograms,
                                 const extractor::FrameProbabilities& probs, std::size_t k);

FrameIndexSet shot_boundaries(const features::FeatureMatrix& matrix, double theta_shot = kDefaultShotThreshold);

FrameIndexSet diversified_selection(const extractor::FrameProbabilities& probs,
                                    const std::vector<HsvHistogram>& histograms,
                                    const features::FeatureMatrix& matrix, const SelectionBudget& budget,
                                    double theta_shot = kDefaultShotThreshold);

}  // namespace qrouter::selection
