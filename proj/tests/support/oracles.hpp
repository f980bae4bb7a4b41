#pragma once

// Brute-force reference implementations. Nothing here calls into the library
// under test; they share only plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace qrouter::oracle {

// Clips as maximal runs: a run of p >= lo that contains some p >= hi yields the
// clip [first p >= hi, run end]. Survivors are padded, then coverage runs are read
// off a boolean mask, which merges overlapping and touching clips for free.
inline std::vector<std::pair<std::size_t, std::size_t>> hysteresis(const std::vector<double>& p, double hi, double lo,
                                                                   std::size_t l_min, std::size_t pad) {
    const std::size_t T = p.size();
    std::vector<bool> covered(T + 2, false);
    std::size_t t = 1;
    while (t <= T) {
        if (p[t - 1] < lo) {
            ++t;
            continue;
        }
        std::size_t end = t;
        while (end + 1 <= T && p[end] >= lo) ++end;
        std::size_t first_high = 0;
        for (std::size_t k = t; k <= end; ++k) {
            if (p[k - 1] >= hi) {
                first_high = k;
                break;
            }
        }
        if (first_high != 0 && end - first_high + 1 >= l_min) {
            const std::size_t s = first_high > pad ? first_high - pad : 1;
            const std::size_t e = std::min(T, end + pad);
            for (std::size_t k = s; k <= e; ++k) covered[k] = true;
        }
        t = end + 1;
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 1; k <= T; ++k) {
        if (!covered[k]) continue;
        std::size_t e = k;
        while (e + 1 <= T && covered[e + 1]) ++e;
        out.emplace_back(k, e);
        k = e;
    }
    return out;
}

// Lower median: element (n-1)/2 of the sorted list.
inline double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

// First score (ascending) at which the normalized cumulative weight reaches one half.
inline double cumulative_scan_median(const std::vector<double>& scores, const std::vector<double>& weights) {
    long double total = 0;
    for (double w : weights) total += w;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < scores.size(); ++i) pairs.emplace_back(scores[i], weights[i]);
    std::sort(pairs.begin(), pairs.end());
    long double cum = 0;
    for (const auto& [s, w] : pairs) {
        cum += w / total;
        if (cum >= 0.5L) return s;
    }
    return pairs.back().first;
}

inline double bhattacharyya_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double bc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) bc += std::sqrt(a[i] * b[i]);
    if (bc < 1e-12) bc = 1e-12;
    return -std::log(bc);
}

struct Moments {
    double mean, m2, m4;
};

inline Moments moments(const std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += x;
    const long double mean = s / v.size();
    long double m2 = 0, m4 = 0;
    for (double x : v) {
        const long double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    return {static_cast<double>(mean), static_cast<double>(m2 / v.size()), static_cast<double>(m4 / v.size())};
}

inline double population_variance(const std::vector<double>& v) { return moments(v).m2; }

// Pearson correlation through explicit sums.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cxy = 0, cxx = 0, cyy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    return cxy / std::sqrt(cxx * cyy);
}

// Rank of v[i] = (#less) + (#equal + 1) / 2.
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double u : v) {
            if (u < v[i]) less += 1;
            if (u == v[i]) equal += 1;
        }
        r[i] = less + (equal + 1) / 2;
    }
    return r;
}

// Canny on a row-major 8-bit image: 5x5 Gaussian (replicate border), Sobel on the
// interior, four-direction NMS (> before, >= after), double threshold, and edge
// growth by repeated sweeps until nothing changes.
inline std::vector<std::uint8_t> canny(const std::vector<std::uint8_t>& img, int w, int h, double sigma, double low,
                                       double high) {
    std::vector<std::uint8_t> edges(static_cast<std::size_t>(w * h), 0);
    if (w < 3 || h < 3) return edges;
    auto px = [&](int x, int y) {
        x = std::max(0, std::min(w - 1, x));
        y = std::max(0, std::min(h - 1, y));
        return static_cast<double>(img[static_cast<std::size_t>(y * w + x)]);
    };
    double k[5][5], ksum = 0;
    for (int j = 0; j < 5; ++j) {
        for (int i = 0; i < 5; ++i) {
            k[j][i] = std::exp(-((i - 2) * (i - 2) + (j - 2) * (j - 2)) / (2 * sigma * sigma));
            ksum += k[j][i];
        }
    }
    std::vector<double> b(static_cast<std::size_t>(w * h));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int j = 0; j < 5; ++j)
                for (int i = 0; i < 5; ++i) acc += k[j][i] * px(x + i - 2, y + j - 2);
            b[static_cast<std::size_t>(y * w + x)] = acc / ksum;
        }
    }
    auto B = [&](int x, int y) { return b[static_cast<std::size_t>(y * w + x)]; };
    std::vector<double> mag(static_cast<std::size_t>(w * h), 0), gxs(mag), gys(mag);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double gx = (B(x + 1, y - 1) + 2 * B(x + 1, y) + B(x + 1, y + 1)) -
                              (B(x - 1, y - 1) + 2 * B(x - 1, y) + B(x - 1, y + 1));
            const double gy = (B(x - 1, y + 1) + 2 * B(x, y + 1) + B(x + 1, y + 1)) -
                              (B(x - 1, y - 1) + 2 * B(x, y - 1) + B(x + 1, y - 1));
            const auto i = static_cast<std::size_t>(y * w + x);
            mag[i] = std::sqrt(gx * gx + gy * gy);
            gxs[i] = gx;
            gys[i] = gy;
        }
    }
    auto M = [&](int x, int y) { return mag[static_cast<std::size_t>(y * w + x)]; };
    std::vector<int> cls(static_cast<std::size_t>(w * h), 0);  // 0 none, 1 weak, 2 strong
    const double pi = std::acos(-1.0);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const auto i = static_cast<std::size_t>(y * w + x);
            if (mag[i] < low) continue;
            double deg = std::atan2(gys[i], gxs[i]) * 180 / pi;
            if (deg < 0) deg += 180;
            int bx, by, ax, ay;
            if (deg < 22.5 || deg >= 157.5) {
                bx = x - 1, by = y, ax = x + 1, ay = y;
            } else if (deg < 67.5) {
                bx = x - 1, by = y - 1, ax = x + 1, ay = y + 1;
            } else if (deg < 112.5) {
                bx = x, by = y - 1, ax = x, ay = y + 1;
            } else {
                bx = x + 1, by = y - 1, ax = x - 1, ay = y + 1;
            }
            if (mag[i] > M(bx, by) && mag[i] >= M(ax, ay)) cls[i] = mag[i] >= high ? 2 : 1;
        }
    }
    for (std::size_t i = 0; i < cls.size(); ++i) edges[i] = cls[i] == 2;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto i = static_cast<std::size_t>(y * w + x);
                if (cls[i] != 1 || edges[i]) continue;
                for (int dy = -1; dy <= 1 && !edges[i]; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if ((dx || dy) && nx >= 0 && ny >= 0 && nx < w && ny < h &&
                            edges[static_cast<std::size_t>(ny * w + nx)]) {
                            edges[i] = 1;
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
    }
    return edges;
}

}  // namespace qrouter::oracle
