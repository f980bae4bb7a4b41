#include "qrouter/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace qrouter::features {

std::vector<double> FeatureMatrix::column(std::size_t i) const {
    std::vector<double> col;
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r.at(i));
    return col;
}

double motion_residual(const GrayFrame& prev, const GrayFrame& cur) {
    if (!prev.same_shape(cur)) throw Error("motion_residual: dimension mismatch");
    if (cur.size() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
        sum += std::abs(static_cast<double>(cur.data[i]) - static_cast<double>(prev.data[i]));
    }
    return sum / static_cast<double>(cur.size());
}

double motion_residual(const Frame& prev, const Frame& cur) {
    if (!prev.same_shape(cur)) throw Error("motion_residual: dimension mismatch");
    return motion_residual(to_gray(prev), to_gray(cur));
}

double laplacian_variance(const GrayFrame& g) {
    if (g.width < 3 || g.height < 3) return 0.0;
    std::vector<double> resp;
    resp.reserve((g.width - 2) * (g.height - 2));
    for (std::size_t y = 1; y + 1 < g.height; ++y) {
        for (std::size_t x = 1; x + 1 < g.width; ++x) {
            const double v = static_cast<double>(g.at(x - 1, y)) + g.at(x + 1, y) + g.at(x, y - 1) + g.at(x, y + 1) -
                             4.0 * g.at(x, y);
            resp.push_back(v);
        }
    }
    double mean = 0.0;
    for (double v : resp) mean += v;
    mean /= static_cast<double>(resp.size());
    double var = 0.0;
    for (double v : resp) var += (v - mean) * (v - mean);
    return var / static_cast<double>(resp.size());
}

namespace {

template <typename Img>
void sobel_at(const Img& img, std::size_t x, std::size_t y, double& gx, double& gy) {
    auto p = [&](std::size_t xx, std::size_t yy) { return static_cast<double>(img.at(xx, yy)); };
    gx = (p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1)) - (p(x - 1, y - 1) + 2.0 * p(x - 1, y) + p(x - 1, y + 1));
    gy = (p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1)) - (p(x - 1, y - 1) + 2.0 * p(x, y - 1) + p(x + 1, y - 1));
}

Plane<double> gaussian_blur(const GrayFrame& g, double sigma) {
    constexpr int r = 2;
    double kernel[2 * r + 1][2 * r + 1];
    double total = 0.0;
    for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
            kernel[j + r][i + r] = std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
            total += kernel[j + r][i + r];
        }
    }
    const auto w = static_cast<long>(g.width), h = static_cast<long>(g.height);
    Plane<double> out(g.width, g.height);
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                const long yy = std::clamp(y + j, 0L, h - 1);
                for (int i = -r; i <= r; ++i) {
                    const long xx = std::clamp(x + i, 0L, w - 1);
                    acc += kernel[j + r][i + r] * g.at(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy));
                }
            }
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc / total;
        }
    }
    return out;
}

}  // namespace

std::vector<double> sobel_magnitudes(const GrayFrame& g) {
    std::vector<double> mags;
    if (g.width < 3 || g.height < 3) return mags;
    mags.reserve((g.width - 2) * (g.height - 2));
    for (std::size_t y = 1; y + 1 < g.height; ++y) {
        for (std::size_t x = 1; x + 1 < g.width; ++x) {
            double gx, gy;
            sobel_at(g, x, y, gx, gy);
            mags.push_back(std::sqrt(gx * gx + gy * gy));
        }
    }
    return mags;
}

double kurtosis(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (m2 <= 0.0) return 0.0;
    return m4 / (m2 * m2);
}

double gradient_kurtosis(const GrayFrame& gray) {
    const auto mags = sobel_magnitudes(gray);
    return kurtosis(mags);
}

Plane<std::uint8_t> canny(const GrayFrame& gray, const CannyParams& params) {
    const std::size_t w = gray.width, h = gray.height;
    Plane<std::uint8_t> edges(w, h, 0);
    if (w < 3 || h < 3) return edges;

    const Plane<double> blurred = gaussian_blur(gray, params.sigma);

    Plane<double> mag(w, h, 0.0);
    Plane<std::uint8_t> sector(w, h, 0);
    for (std::size_t y = 1; y + 1 < h; ++y) {
        for (std::size_t x = 1; x + 1 < w; ++x) {
            double gx, gy;
            sobel_at(blurred, x, y, gx, gy);
            mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0) angle += 180.0;
            std::uint8_t s;
            if (angle < 22.5 || angle >= 157.5) {
                s = 0;
            } else if (angle < 67.5) {
                s = 1;
            } else if (angle < 112.5) {
                s = 2;
            } else {
                s = 3;
            }
            sector.at(x, y) = s;
        }
    }

    // Non-maximum suppression: strictly above the "before" neighbour, at least the "after" one.
    enum : std::uint8_t { kNone = 0, kWeak = 1, kStrong = 2 };
    Plane<std::uint8_t> cls(w, h, kNone);
    for (std::size_t y = 1; y + 1 < h; ++y) {
        for (std::size_t x = 1; x + 1 < w; ++x) {
            const double m = mag.at(x, y);
            if (m < params.low) continue;
            double before, after;
            switch (sector.at(x, y)) {
                case 0:
                    before = mag.at(x - 1, y);
                    after = mag.at(x + 1, y);
                    break;
                case 1:
                    before = mag.at(x - 1, y - 1);
                    after = mag.at(x + 1, y + 1);
                    break;
                case 2:
                    before = mag.at(x, y - 1);
                    after = mag.at(x, y + 1);
                    break;
                default:
                    before = mag.at(x + 1, y - 1);
                    after = mag.at(x - 1, y + 1);
                    break;
            }
            if (m > before && m >= after) cls.at(x, y) = m >= params.high ? kStrong : kWeak;
        }
    }

    std::deque<std::pair<std::size_t, std::size_t>> queue;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (cls.at(x, y) == kStrong) {
                edges.at(x, y) = 1;
                queue.emplace_back(x, y);
            }
        }
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const long nx = static_cast<long>(x) + dx, ny = static_cast<long>(y) + dy;
                if (nx < 0 || ny < 0 || nx >= static_cast<long>(w) || ny >= static_cast<long>(h)) continue;
                const auto ux = static_cast<std::size_t>(nx), uy = static_cast<std::size_t>(ny);
                if (cls.at(ux, uy) == kWeak && edges.at(ux, uy) == 0) {
                    edges.at(ux, uy) = 1;
                    queue.emplace_back(ux, uy);
                }
            }
        }
    }
    return edges;
}

double edge_density(const GrayFrame& gray, const CannyParams& params) {
    if (gray.width < 3 || gray.height < 3) return 0.0;
    const auto edges = canny(gray, params);
    std::size_t count = 0;
    for (auto e : edges.data) count += e;
    return static_cast<double>(count) / static_cast<double>(gray.size());
}

double bhattacharyya(const HsvHistogram& h1, const HsvHistogram& h2) {
    if (!h1.same_layout(h2) || h1.bins.size() != h2.bins.size()) {
        throw Error("bhattacharyya: histogram bin layout mismatch");
    }
    double bc = 0.0;
    for (std::size_t i = 0; i < h1.bins.size(); ++i) bc += std::sqrt(h1.bins[i] * h2.bins[i]);
    return -std::log(std::max(bc, kMinBhattacharyyaCoefficient));
}

ContentPriors content_priors(const Frame& frame, const ContentPriorDetector& detector) {
    if (!detector) return {};
    ContentPriors p = detector(frame);
    auto clamp01 = [](double v) { return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0; };
    return {clamp01(p.face), clamp01(p.text)};
}

ExtractedFeatures extract_features_with_histograms(const FrameSequence& seq, const ExtractionOptions& options) {
    if (seq.empty()) throw Error("extract_features: empty sequence");
    ExtractedFeatures out;
    out.matrix.rows.resize(seq.size());
    out.histograms.reserve(seq.size());

    GrayFrame prev_gray;
    for (std::size_t t = 1; t <= seq.size(); ++t) {
        const Frame& frame = seq.frame(t);
        GrayFrame gray = to_gray(frame);
        out.histograms.push_back(to_hsv_histogram(frame, options.hsv_bins));

        FeatureVector fv;
        if (t > 1) {
            fv.diff_mean = motion_residual(prev_gray, gray);
            fv.hist_dist_prev = bhattacharyya(out.histograms[t - 2], out.histograms[t - 1]);
        }
        fv.lap_var = laplacian_variance(gray);
        fv.grad_kurtosis = gradient_kurtosis(gray);
        fv.edge_density = edge_density(gray, options.canny);
        const ContentPriors cp = content_priors(frame, options.priors);
        fv.face = cp.face;
        fv.text = cp.text;

        out.matrix.rows[t - 1] = fv.as_array();
        prev_gray = std::move(gray);
    }
    return out;
}

FeatureMatrix extract_features(const FrameSequence& seq, const ExtractionOptions& options) {
    return extract_features_with_histograms(seq, options).matrix;
}

}  // namespace qrouter::features
