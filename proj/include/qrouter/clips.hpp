#pragma once

#include <cstddef>
#include <vector>

#include "qrouter/extractor.hpp"

namespace qrouter::clips {

// Inclusive, 1-based frame interval.
struct Clip {
    std::size_t start = 1;
    std::size_t end = 1;

    std::size_t length() const { return end - start + 1; }
    bool contains(std::size_t t) const { return t >= start && t <= end; }
    friend bool operator==(const Clip&, const Clip&) = default;
};

using ClipSet = std::vector<Clip>;

struct HysteresisParams {
    double tau_high = 0.65;
    double tau_low = 0.5;
    std::size_t l_min = 8;
    std::size_t padding = 4;
};

void validate(const HysteresisParams& params);

// Unpadded clips that survive the length filter, in order.
ClipSet raw_clips(const extractor::FrameProbabilities& probs, const HysteresisParams& params);

// Pads by P, clamps to [1, T] and merges overlapping or touching clips.
ClipSet pad_and_merge(const ClipSet& raw, std::size_t padding, std::size_t frame_count);

ClipSet hysteresis_clips(const extractor::FrameProbabilities& probs, const HysteresisParams& params = {});

}  // namespace qrouter::clips
