#include "qrouter/clips.hpp"

#include <algorithm>
#include <string>

namespace qrouter::clips {

void validate(const HysteresisParams& p) {
    if (!(p.tau_low > 0.0 && p.tau_low <= p.tau_high && p.tau_high < 1.0)) {
        throw Error("hysteresis thresholds must satisfy 0 < tau_low <= tau_high < 1");
    }
    if (p.l_min < 1) throw Error("l_min must be >= 1");
}

ClipSet raw_clips(const extractor::FrameProbabilities& probs, const HysteresisParams& params) {
    validate(params);
    ClipSet out;
    const std::size_t T = probs.size();
    bool active = false;
    std::size_t start = 0;
    auto close = [&](std::size_t end) {
        if (end - start + 1 >= params.l_min) out.push_back({start, end});
        active = false;
    };
    for (std::size_t t = 1; t <= T; ++t) {
        const double p = probs.at(t);
        if (!active && p >= params.tau_high) {
            start = t;
            active = true;
        } else if (active && p < params.tau_low) {
            close(t - 1);
        }
    }
    if (active) close(T);
    return out;
}

ClipSet pad_and_merge(const ClipSet& raw, std::size_t padding, std::size_t frame_count) {
    ClipSet padded;
    padded.reserve(raw.size());
    for (const Clip& c : raw) {
        const std::size_t s = c.start > padding ? c.start - padding : 1;
        const std::size_t e = std::min(frame_count, c.end + padding);
        padded.push_back({std::max<std::size_t>(s, 1), e});
    }
    std::sort(padded.begin(), padded.end(), [](const Clip& a, const Clip& b) { return a.start < b.start; });

    ClipSet merged;
    for (const Clip& c : padded) {
        if (!merged.empty() && c.start <= merged.back().end + 1) {
            merged.back().end = std::max(merged.back().end, c.end);
        } else {
            merged.push_back(c);
        }
    }
    return merged;
}

ClipSet hysteresis_clips(const extractor::FrameProbabilities& probs, const HysteresisParams& params) {
    return pad_and_merge(raw_clips(probs, params), params.padding, probs.size());
}

}  // namespace qrouter::clips
