#include "qrouter/localization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace qrouter::localization {

namespace fs = std::filesystem;

FlowField BlockMatchingFlow::estimate(const Frame& reference, const Frame& moving) const {
    if (!reference.same_shape(moving)) throw Error("estimate_flow: dimension mismatch");
    const GrayFrame a = to_gray(reference);
    const GrayFrame b = to_gray(moving);
    const auto W = static_cast<long>(a.width), H = static_cast<long>(a.height);
    const auto B = static_cast<long>(params_.block);
    const long R = params_.radius;
    FlowField flow(a.width, a.height);

    for (long by = 0; by < H; by += B) {
        for (long bx = 0; bx < W; bx += B) {
            const long bw = std::min(B, W - bx), bh = std::min(B, H - by);
            long best_dx = 0, best_dy = 0;
            long best_sad = std::numeric_limits<long>::max();
            long best_norm = 0;
            for (long dy = -R; dy <= R; ++dy) {
                if (by + dy < 0 || by + dy + bh > H) continue;
                for (long dx = -R; dx <= R; ++dx) {
                    if (bx + dx < 0 || bx + dx + bw > W) continue;
                    long sad = 0;
                    for (long y = 0; y < bh && sad <= best_sad; ++y) {
                        for (long x = 0; x < bw; ++x) {
                            sad += std::labs(static_cast<long>(a.at(bx + x, by + y)) -
                                             static_cast<long>(b.at(bx + x + dx, by + y + dy)));
                        }
                    }
                    const long norm = std::labs(dx) + std::labs(dy);
                    if (sad < best_sad || (sad == best_sad && norm < best_norm)) {
                        best_sad = sad;
                        best_norm = norm;
                        best_dx = dx;
                        best_dy = dy;
                    }
                }
            }
            for (long y = 0; y < bh; ++y) {
                for (long x = 0; x < bw; ++x) {
                    flow.at(bx + x, by + y) = {static_cast<double>(best_dx), static_cast<double>(best_dy)};
                }
            }
        }
    }
    return flow;
}

FlowField estimate_flow(const Frame& f1, const Frame& f2, const FlowEstimator& backend) {
    if (!f1.same_shape(f2)) throw Error("estimate_flow: dimension mismatch");
    FlowField flow = backend.estimate(f1, f2);
    if (flow.width != f1.width() || flow.height != f1.height()) throw Error("flow backend returned a mismatched grid");
    for (const auto& v : flow.data) {
        if (!std::isfinite(v.dx) || !std::isfinite(v.dy)) throw Error("flow backend returned non-finite displacement");
    }
    return flow;
}

Frame warp(const Frame& moving, const FlowField& flow) {
    if (flow.width != moving.width() || flow.height != moving.height()) throw Error("warp: flow grid mismatch");
    const double maxx = static_cast<double>(moving.width() - 1), maxy = static_cast<double>(moving.height() - 1);
    Frame out(moving.width(), moving.height());
    for (std::size_t y = 0; y < moving.height(); ++y) {
        for (std::size_t x = 0; x < moving.width(); ++x) {
            const FlowVector d = flow.at(x, y);
            const double sx = std::clamp(static_cast<double>(x) + d.dx, 0.0, maxx);
            const double sy = std::clamp(static_cast<double>(y) + d.dy, 0.0, maxy);
            const auto x0 = static_cast<std::size_t>(std::floor(sx)), y0 = static_cast<std::size_t>(std::floor(sy));
            const std::size_t x1 = std::min(x0 + 1, moving.width() - 1), y1 = std::min(y0 + 1, moving.height() - 1);
            const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
            const Rgb c00 = moving.at(x0, y0), c10 = moving.at(x1, y0), c01 = moving.at(x0, y1), c11 = moving.at(x1, y1);
            auto sample = [&](std::uint8_t Rgb::*ch) {
                const double top = (1 - fx) * (c00.*ch) + fx * (c10.*ch);
                const double bot = (1 - fx) * (c01.*ch) + fx * (c11.*ch);
                const double v = (1 - fy) * top + fy * bot;
                return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            };
            out.set(x, y, {sample(&Rgb::r), sample(&Rgb::g), sample(&Rgb::b)});
        }
    }
    return out;
}

namespace {

Plane<double> sobel_full(const GrayFrame& g) {
    const auto W = static_cast<long>(g.width), H = static_cast<long>(g.height);
    auto p = [&](long x, long y) {
        return static_cast<double>(g.at(static_cast<std::size_t>(std::clamp(x, 0L, W - 1)),
                                        static_cast<std::size_t>(std::clamp(y, 0L, H - 1))));
    };
    Plane<double> out(g.width, g.height);
    for (long y = 0; y < H; ++y) {
        for (long x = 0; x < W; ++x) {
            const double gx = (p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1)) - (p(x - 1, y - 1) + 2 * p(x - 1, y) + p(x - 1, y + 1));
            const double gy = (p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1)) - (p(x - 1, y - 1) + 2 * p(x, y - 1) + p(x + 1, y - 1));
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

Plane<double> box_blur3(const Plane<double>& in) {
    const auto W = static_cast<long>(in.width), H = static_cast<long>(in.height);
    Plane<double> out(in.width, in.height);
    for (long y = 0; y < H; ++y) {
        for (long x = 0; x < W; ++x) {
            double acc = 0;
            for (long j = -1; j <= 1; ++j) {
                for (long i = -1; i <= 1; ++i) {
                    acc += in.at(static_cast<std::size_t>(std::clamp(x + i, 0L, W - 1)),
                                 static_cast<std::size_t>(std::clamp(y + j, 0L, H - 1)));
                }
            }
            out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = acc / 9.0;
        }
    }
    return out;
}

}  // namespace

RawMap ProxyPerceptualMetric::map(const Frame& reference, const Frame& warped) const {
    if (!reference.same_shape(warped)) throw Error("perceptual_map: dimension mismatch");
    const GrayFrame y1 = to_gray(reference), y2 = to_gray(warped);
    const Plane<double> g1 = sobel_full(y1), g2 = sobel_full(y2);
    Plane<double> dy(y1.width, y1.height), dg(y1.width, y1.height);
    for (std::size_t i = 0; i < dy.size(); ++i) {
        dy.data[i] = std::abs(static_cast<double>(y1.data[i]) - static_cast<double>(y2.data[i]));
        dg.data[i] = std::abs(g1.data[i] - g2.data[i]);
    }
    const Plane<double> by = box_blur3(dy), bg = box_blur3(dg);
    RawMap out(y1.width, y1.height);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = 0.5 * by.data[i] + 0.5 * bg.data[i];
    return out;
}

RawMap RemotePerceptualMetric::map(const Frame& reference, const Frame& warped) const {
    if (!reference.same_shape(warped)) throw Error("perceptual_map: dimension mismatch");
    const nlohmann::json request{{"reference_ppm_base64", clients::base64_encode(encode_ppm(reference))},
                                 {"warped_ppm_base64", clients::base64_encode(encode_ppm(warped))}};
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(clients::post_json(endpoint_, request.dump()));
    } catch (const nlohmann::json::exception& e) {
        throw clients::ClientError(clients::ClientErrorKind::Protocol, std::string("malformed metric response: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("width") || !doc.contains("height") || !doc.contains("values") ||
        !doc["values"].is_array()) {
        throw clients::ClientError(clients::ClientErrorKind::Protocol, "metric response lacks width/height/values");
    }
    RawMap out(doc["width"].get<std::size_t>(), doc["height"].get<std::size_t>());
    if (out.width != reference.width() || out.height != reference.height() || doc["values"].size() != out.size()) {
        throw clients::ClientError(clients::ClientErrorKind::Protocol, "metric response grid does not match the frame");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& v = doc["values"][i];
        if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0) {
            throw clients::ClientError(clients::ClientErrorKind::OutOfRange, "metric values must be finite and non-negative");
        }
        out.data[i] = v.get<double>();
    }
    return out;
}

RawMap perceptual_map(const Frame& f1, const Frame& w2, const PerceptualMetric& metric) {
    if (!f1.same_shape(w2)) throw Error("perceptual_map: dimension mismatch");
    RawMap h = metric.map(f1, w2);
    if (h.width != f1.width() || h.height != f1.height()) throw Error("perceptual metric returned a mismatched grid");
    return h;
}

Heatmap normalize_map(const RawMap& h) {
    Heatmap out{Plane<double>(h.width, h.height, 0.0)};
    if (h.size() == 0) return out;
    for (double v : h.data) {
        if (!std::isfinite(v)) throw Error("normalize_map: non-finite value");
    }
    const auto [mn, mx] = std::minmax_element(h.data.begin(), h.data.end());
    const double lo = *mn, range = *mx - *mn;
    if (range <= 0.0) return out;
    for (std::size_t i = 0; i < h.size(); ++i) out.values.data[i] = std::clamp((h.data[i] - lo) / range, 0.0, 1.0);
    return out;
}

double severity(const Heatmap& hm) {
    if (hm.values.size() == 0) return 0.0;
    double sum = 0;
    for (double v : hm.values.data) sum += v;
    return sum / static_cast<double>(hm.values.size());
}

namespace {

struct ColorD {
    double r, g, b;
};

ColorD colormap_d(double v) {
    v = std::clamp(v, 0.0, 1.0);
    if (v <= 0.5) {
        const double t = v / 0.5;
        return {0.0, 255.0 * t, 255.0 * (1.0 - t)};
    }
    const double t = (v - 0.5) / 0.5;
    return {255.0 * t, 255.0 * (1.0 - t), 0.0};
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0)); }

}  // namespace

Rgb colormap(double v) {
    const ColorD c = colormap_d(v);
    return {to_byte(c.r), to_byte(c.g), to_byte(c.b)};
}

Frame render_overlay(const Frame& f1, const Heatmap& hm, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("overlay alpha must lie in [0, 1]");
    if (hm.values.width != f1.width() || hm.values.height != f1.height()) throw Error("render_overlay: dimension mismatch");
    Frame out(f1.width(), f1.height());
    for (std::size_t y = 0; y < f1.height(); ++y) {
        for (std::size_t x = 0; x < f1.width(); ++x) {
            const Rgb p = f1.at(x, y);
            const ColorD c = colormap_d(hm.values.at(x, y));
            out.set(x, y, {to_byte((1 - alpha) * p.r + alpha * c.r), to_byte((1 - alpha) * p.g + alpha * c.g),
                           to_byte((1 - alpha) * p.b + alpha * c.b)});
        }
    }
    return out;
}

GrayFrame heatmap_to_gray(const Heatmap& hm) {
    GrayFrame g(hm.values.width, hm.values.height);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = to_byte(hm.values.data[i] * 255.0);
    return g;
}

LabelMap vlm_filter(const selection::FrameIndexSet& selected, const FrameSequence& seq,
                    const clients::FrameClassifier& classifier) {
    LabelMap labels;
    for (std::size_t t : selected) labels[t] = classifier.classify(t, seq.frame(t));
    return labels;
}

clips::ClipSet restrict_clips(const clips::ClipSet& clips, const LabelMap& labels) {
    clips::ClipSet kept;
    for (const auto& c : clips) {
        const bool flagged = std::any_of(labels.begin(), labels.end(), [&](const auto& kv) {
            return kv.second != clients::ArtifactLabel::None && c.contains(kv.first);
        });
        if (flagged) kept.push_back(c);
    }
    return kept;
}

PairSeverity evaluate_pair(const FrameSequence& seq, std::size_t t, const FlowEstimator& flow,
                           const PerceptualMetric& metric) {
    const Frame& f1 = seq.frame(t);
    const Frame& f2 = seq.frame(t + 1);
    const Frame w2 = warp(f2, estimate_flow(f1, f2, flow));
    PairSeverity ps;
    ps.t = t;
    ps.heatmap = normalize_map(perceptual_map(f1, w2, metric));
    ps.severity = severity(ps.heatmap);
    return ps;
}

namespace {

clients::ArtifactLabel dominant_label(const clips::Clip& clip, const LabelMap& labels) {
    std::array<int, 3> counts{};
    for (const auto& [t, label] : labels) {
        if (label != clients::ArtifactLabel::None && clip.contains(t)) ++counts[static_cast<std::size_t>(label)];
    }
    const auto best = std::max_element(counts.begin(), counts.end());
    if (*best == 0) return clients::ArtifactLabel::None;
    return static_cast<clients::ArtifactLabel>(best - counts.begin());
}

}  // namespace

LocalizationOutput localize(const FrameSequence& seq, const clips::ClipSet& clips, const LabelMap& labels,
                            const FlowEstimator& flow, const PerceptualMetric& metric,
                            const LocalizeOptions& options, const fs::path& out_dir) {
    if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) throw Error("overlay alpha must lie in [0, 1]");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

    LocalizationOutput out;
    for (const auto& clip : clips) {
        if (clip.start < 1 || clip.end > seq.size() || clip.start > clip.end) throw Error("clip outside the sequence");
        const std::string stem = "clip" + std::to_string(clip.start) + "-" + std::to_string(clip.end);
        if (clip.length() < 2) {
            out.warnings.push_back(stem + ": single-frame clip has no consecutive pair; skipped");
            continue;
        }
        PairSeverity best;
        best.severity = -std::numeric_limits<double>::infinity();
        for (std::size_t t = clip.start; t < clip.end; ++t) {
            PairSeverity ps = evaluate_pair(seq, t, flow, metric);
            if (ps.severity > best.severity) best = std::move(ps);
        }

        ClipResult r;
        r.clip = clip;
        r.severity = best.severity;
        r.pair_first = best.t;
        r.pair_second = best.t + 1;
        r.label = dominant_label(clip, labels);
        r.heatmap_path = out_dir / (stem + "_heat.pgm");
        r.overlay_path = out_dir / (stem + "_overlay.ppm");
        write_pgm(r.heatmap_path, heatmap_to_gray(best.heatmap));
        write_ppm(r.overlay_path, render_overlay(seq.frame(best.t), best.heatmap, options.alpha));
        out.results.push_back(std::move(r));
    }
    return out;
}

}  // namespace qrouter::localization
