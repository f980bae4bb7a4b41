// qrouter_synth: writes a synthetic NNNN.ppm frame directory.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qrouter/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Synthetic frame-directory generator"};
    qrouter::synth::SynthParams p;
    std::string out;
    bool constant = false;
    app.add_option("--out", out, "Output directory")->required();
    app.add_option("--width", p.width)->check(CLI::PositiveNumber);
    app.add_option("--height", p.height)->check(CLI::PositiveNumber);
    app.add_option("--frames", p.frames)->check(CLI::PositiveNumber);
    app.add_option("--shift", p.shift_per_frame, "Horizontal pan per frame");
    app.add_option("--sensor-noise", p.sensor_noise);
    app.add_option("--burst-start", p.burst_start, "First corrupted frame (1-based), 0 = none");
    app.add_option("--burst-length", p.burst_length);
    app.add_option("--burst-amplitude", p.burst_amplitude);
    app.add_option("--seed", p.seed);
    app.add_flag("--constant", constant, "Identical grey frames");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const auto seq = constant ? qrouter::synth::constant_video(p.width, p.height, p.frames, {128, 128, 128})
                                  : qrouter::synth::panning_texture(p);
        qrouter::save_frame_dir(out, seq);
    } catch (const std::exception& e) {
        std::cerr << "qrouter_synth: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
