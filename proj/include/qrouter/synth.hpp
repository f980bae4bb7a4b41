#pragma once

#include <cstdint>

#include "qrouter/media.hpp"

namespace qrouter::synth {

// Deterministic frame-sequence fixtures for tests and demos.
struct SynthParams {
    std::size_t width = 64;
    std::size_t height = 48;
    std::size_t frames = 64;
    std::size_t shift_per_frame = 1;  // horizontal pan in pixels
    double sensor_noise = 1.5;        // per-pixel uniform amplitude on every frame
    std::size_t burst_start = 0;      // 1-based; 0 disables the burst
    std::size_t burst_length = 0;
    double burst_amplitude = 60.0;
    std::uint64_t seed = 1;
};

// Smooth periodic colour texture panning across the frame.
FrameSequence panning_texture(const SynthParams& params);

// Every frame identical.
FrameSequence constant_video(std::size_t width, std::size_t height, std::size_t frames, Rgb colour);

}  // namespace qrouter::synth
