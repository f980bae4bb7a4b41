// qrouter: score, localize and evaluate frame-directory videos.
//
// Exit codes: 0 success, 1 usage or config error, 2 pipeline error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qrouter/config.hpp"
#include "qrouter/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPipeline = 2;

struct CommonArgs {
    std::string config;
    std::string out;
};

qrouter::RunConfig load(const CommonArgs& args) {
    qrouter::RunConfig config = qrouter::load_config(args.config);
    qrouter::apply_process_env(config);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Routed multi-expert video quality assessment"};
    app.require_subcommand(1);

    CommonArgs score_args;
    std::string score_video;
    std::optional<int> tier;
    bool mock = false;
    std::optional<std::uint64_t> seed;
    auto* score = app.add_subcommand("score", "Score a video and write <out>/report.json");
    score->add_option("--video", score_video, "Directory of NNNN.ppm frames")->required();
    score->add_option("--config", score_args.config, "JSON run configuration")->required();
    score->add_option("--tier", tier, "Routing tier")->check(CLI::Range(0, 2));
    score->add_flag("--mock", mock, "Use deterministic mock experts");
    score->add_option("--seed", seed, "Mock seed");
    score->add_option("--out", score_args.out, "Output directory")->required();

    CommonArgs loc_args;
    std::string loc_video;
    auto* localize = app.add_subcommand("localize", "Write artifact heatmaps, overlays and summary.json");
    localize->add_option("--video", loc_video, "Directory of NNNN.ppm frames")->required();
    localize->add_option("--config", loc_args.config, "JSON run configuration")->required();
    localize->add_option("--out", loc_args.out, "Output directory")->required();

    CommonArgs eval_args;
    std::string manifest;
    auto* eval = app.add_subcommand("eval", "Correlate predicted scores with MOS over a manifest");
    eval->add_option("--manifest", manifest, "CSV with header video_dir,mos")->required();
    eval->add_option("--config", eval_args.config, "JSON run configuration")->required();
    eval->add_option("--out", eval_args.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    qrouter::RunConfig config;
    try {
        if (score->parsed()) {
            config = load(score_args);
            if (tier) config.tier = *tier;
            if (mock) config.mock = true;
            if (seed) config.seed = *seed;
        } else if (localize->parsed()) {
            config = load(loc_args);
        } else {
            config = load(eval_args);
        }
        qrouter::validate(config);
    } catch (const qrouter::ConfigError& e) {
        std::cerr << "qrouter: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "qrouter: config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const qrouter::pipeline::Pipeline pipeline(config);
        if (score->parsed()) {
            const auto report = pipeline.score(score_video, score_args.out);
            std::cout << report.summary_en << "\n";
        } else if (localize->parsed()) {
            const auto run = pipeline.localize(loc_video, loc_args.out);
            std::cout << run.output.results.size() << " clip(s) localized\n";
            for (const auto& w : run.output.warnings) std::cerr << "qrouter: warning: " << w << "\n";
        } else {
            const auto result = pipeline.evaluate(manifest, eval_args.out);
            for (const auto& w : result.warnings) std::cerr << "qrouter: warning: " << w << "\n";
            std::cout << qrouter::eval::format_table(result);
        }
    } catch (const qrouter::ConfigError& e) {
        std::cerr << "qrouter: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "qrouter: error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitOk;
}
