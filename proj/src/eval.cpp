#include "qrouter/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace qrouter::eval {

double plcc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("plcc: length mismatch");
    if (x.size() < 2) throw Error("plcc: need at least two samples");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw Error("correlation undefined: zero variance input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("srcc: length mismatch");
    if (x.size() < 2) throw Error("srcc: need at least two samples");
    const auto rx = average_ranks(x), ry = average_ranks(y);
    return plcc(rx, ry);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "video_dir,mos") {
        throw Error("manifest header must be 'video_dir,mos'");
    }
    const auto base = path.parent_path();
    std::vector<ManifestRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) throw Error("manifest line " + std::to_string(lineno) + ": expected 2 columns");
        ManifestRow row;
        std::filesystem::path dir = trim(line.substr(0, comma));
        row.video_dir = dir.is_absolute() ? dir : base / dir;
        try {
            std::size_t used = 0;
            const std::string mos = trim(line.substr(comma + 1));
            row.mos = std::stod(mos, &used);
            if (used != mos.size() || !std::isfinite(row.mos)) throw std::invalid_argument("mos");
        } catch (const std::exception&) {
            throw Error("manifest line " + std::to_string(lineno) + ": invalid mos");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

EvalResult evaluate_manifest(const std::vector<ManifestRow>& manifest, const Predictor& predictor) {
    EvalResult result;
    std::vector<double> predicted, mos;
    for (const auto& row : manifest) {
        try {
            const double p = predictor(row);
            if (!std::isfinite(p)) throw Error("non-finite prediction");
            predicted.push_back(p);
            mos.push_back(row.mos);
        } catch (const std::exception& e) {
            ++result.skipped;
            result.warnings.push_back(row.video_dir.string() + ": " + e.what());
        }
    }
    result.n = predicted.size();
    result.plcc = plcc(predicted, mos);
    result.srcc = srcc(predicted, mos);
    return result;
}

std::string format_table(const EvalResult& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "metric  value\n";
    os << "PLCC    " << r.plcc << "\n";
    os << "SRCC    " << r.srcc << "\n";
    os << "n       " << r.n << "\n";
    os << "skipped " << r.skipped << "\n";
    return os.str();
}

}  // namespace qrouter::eval
