#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qrouter/media.hpp"

namespace qrouter::eval {

struct ScorePair {
    double predicted = 0;
    double mos = 0;
};

struct EvalResult {
    double plcc = 0;
    double srcc = 0;
    std::size_t n = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

double plcc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double srcc(std::span<const double> x, std::span<const double> y);

struct ManifestRow {
    std::filesystem::path video_dir;
    double mos = 0;
};

// CSV with header `video_dir,mos`. Relative paths resolve against the manifest's directory.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

// Predicts a score for one manifest row; throwing skips the row with a warning.
using Predictor = std::function<double(const ManifestRow&)>;

EvalResult evaluate_manifest(const std::vector<ManifestRow>& manifest, const Predictor& predictor);

std::string format_table(const EvalResult& result);

}  // namespace qrouter::eval
