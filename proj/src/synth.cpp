#include "qrouter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qrouter::synth {

namespace {

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

FrameSequence panning_texture(const SynthParams& p) {
    if (p.width == 0 || p.height == 0 || p.frames == 0) throw Error("synthetic video needs non-empty dimensions");
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> sensor(-p.sensor_noise, p.sensor_noise);
    std::uniform_real_distribution<double> burst(-p.burst_amplitude, p.burst_amplitude);
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<Frame> frames;
    frames.reserve(p.frames);
    for (std::size_t t = 1; t <= p.frames; ++t) {
        const bool in_burst = p.burst_start > 0 && t >= p.burst_start && t < p.burst_start + p.burst_length;
        const double offset = static_cast<double>((t - 1) * p.shift_per_frame);
        Frame f(p.width, p.height);
        for (std::size_t y = 0; y < p.height; ++y) {
            for (std::size_t x = 0; x < p.width; ++x) {
                const double u = (static_cast<double>(x) + offset) / 32.0;
                const double v = static_cast<double>(y) / 24.0;
                double r = 128.0 + 70.0 * std::sin(two_pi * u) * std::cos(two_pi * v);
                double g = 128.0 + 60.0 * std::cos(two_pi * (u + v));
                double b = 110.0 + 50.0 * std::sin(two_pi * (2.0 * u - v));
                const double n = sensor(rng);
                r += n;
                g += n;
                b += n;
                if (in_burst) {
                    r += burst(rng);
                    g += burst(rng);
                    b += burst(rng);
                }
                f.set(x, y, {clamp_byte(r), clamp_byte(g), clamp_byte(b)});
            }
        }
        frames.push_back(std::move(f));
    }
    return FrameSequence(std::move(frames));
}

FrameSequence constant_video(std::size_t width, std::size_t height, std::size_t frames, Rgb colour) {
    std::vector<Frame> out(frames, Frame(width, height, colour));
    return FrameSequence(std::move(out));
}

}  // namespace qrouter::synth
