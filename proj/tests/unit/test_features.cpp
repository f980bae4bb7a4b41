#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qrouter/features.hpp"

using namespace qrouter;
using namespace qrouter::features;

TEST_CASE("motion_residual") {
    const auto a = test::gray_from(3, 3, std::vector<std::uint8_t>(9, 0));
    const auto b = test::gray_from(3, 3, std::vector<std::uint8_t>(9, 255));
    CHECK(motion_residual(a, a) == 0.0);
    CHECK(motion_residual(a, b) == 255.0);
    CHECK(motion_residual(test::gray_from(2, 1, {10, 20}), test::gray_from(2, 1, {13, 26})) == 4.5);
    CHECK_THROWS_AS(motion_residual(a, test::gray_from(1, 1, {0})), Error);
}

TEST_CASE("laplacian_variance") {
    CHECK(laplacian_variance(test::gray_from(4, 4, std::vector<std::uint8_t>(16, 77))) == 0.0);

    std::vector<std::uint8_t> ramp;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 6; ++x) ramp.push_back(static_cast<std::uint8_t>(x * 10));
    CHECK(laplacian_variance(test::gray_from(6, 5, ramp)) == 0.0);

    std::vector<std::uint8_t> three(9, 0);
    three[4] = 100;
    CHECK(laplacian_variance(test::gray_from(3, 3, three)) == 0.0);

    std::vector<std::uint8_t> five(25, 0);
    five[12] = 100;
    const double expected = qrouter::oracle::population_variance({-400, 100, 100, 100, 100, 0, 0, 0, 0});
    CHECK(expected == doctest::Approx(200000.0 / 9.0));
    CHECK(laplacian_variance(test::gray_from(5, 5, five)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kurtosis degenerate branch") {
    const std::vector<double> ones{1, 1, 1, 1};
    CHECK(kurtosis(ones) == 0.0);
    CHECK(gradient_kurtosis(test::gray_from(5, 5, std::vector<std::uint8_t>(25, 40))) == 0.0);
}

TEST_CASE("gradient kurtosis of a constructed {0,0,0,10} magnitude set") {
    // 6x3: interior is the 4 pixels of row 1; a 5 at (5,1) gives one Sobel response of 10.
    std::vector<std::uint8_t> px(18, 0);
    px[1 * 6 + 5] = 5;
    const auto g = test::gray_from(6, 3, px);
    const auto mags = sobel_magnitudes(g);
    REQUIRE(mags == std::vector<double>{0, 0, 0, 10});
    const auto m = qrouter::oracle::moments({0, 0, 0, 10});
    CHECK(m.mean == 2.5);
    CHECK(m.m2 == 18.75);
    CHECK(gradient_kurtosis(g) == m.m4 / (m.m2 * m.m2));
    CHECK(gradient_kurtosis(g) == doctest::Approx(7.0 / 3.0));
}

TEST_CASE("edge density") {
    CHECK(edge_density(test::gray_from(8, 8, std::vector<std::uint8_t>(64, 200))) == 0.0);

    std::vector<std::uint8_t> step(16 * 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) step[y * 16 + x] = x < 8 ? 0 : 255;
    const auto g = test::gray_from(16, 16, step);
    const auto edges = canny(g);
    const auto ref = qrouter::oracle::canny(step, 16, 16, 1.4, 50, 150);
    CHECK(edges.data == ref);
    std::size_t count = 0;
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            if (edges.at(x, y)) {
                ++count;
                CHECK(x >= 6);
                CHECK(x <= 9);
            }
        }
    }
    CHECK(count > 0);
    CHECK(edge_density(g) == doctest::Approx(static_cast<double>(count) / 256.0));
}

TEST_CASE("canny matches the reference on random and structured images") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(0, 255);
    for (int trial = 0; trial < 30; ++trial) {
        const int w = 5 + trial % 13, h = 4 + trial % 9;
        std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
        if (trial % 2 == 0) {
            for (auto& v : px) v = static_cast<std::uint8_t>(d(rng));
        } else {
            // blocky shapes so NMS and hysteresis see long ridges
            const int cx = d(rng) % w, cy = d(rng) % h, r = 1 + d(rng) % 5;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    px[y * w + x] = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r ? 230 : 20;
        }
        const auto edges = canny(test::gray_from(w, h, px));
        CHECK(edges.data == qrouter::oracle::canny(px, w, h, 1.4, 50, 150));
        const double density = edge_density(test::gray_from(w, h, px));
        CHECK(density >= 0.0);
        CHECK(density <= 1.0);
    }
}

TEST_CASE("bhattacharyya") {
    const auto a = test::histogram({1, 0});
    const auto b = test::histogram({0, 1});
    const auto c = test::histogram({0.5, 0.5});
    CHECK(bhattacharyya(a, a) == 0.0);
    CHECK(bhattacharyya(c, c) == 0.0);
    CHECK(bhattacharyya(a, b) == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
    CHECK(bhattacharyya(a, b) == doctest::Approx(27.631021115928547));
    CHECK(bhattacharyya(a, c) == doctest::Approx(-std::log(std::sqrt(0.5))).epsilon(1e-12));
    CHECK(bhattacharyya(a, c) == doctest::Approx(0.34657359027997264));
    CHECK_THROWS_AS(bhattacharyya(a, test::histogram({1, 0, 0})), Error);
}

TEST_CASE("bhattacharyya is symmetric on random unit-mass histograms") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> p(6), q(6);
        double sp = 0, sq = 0;
        for (int k = 0; k < 6; ++k) {
            p[k] = u(rng);
            q[k] = u(rng);
            sp += p[k];
            sq += q[k];
        }
        for (int k = 0; k < 6; ++k) {
            p[k] /= sp;
            q[k] /= sq;
        }
        const auto hp = test::histogram(p), hq = test::histogram(q);
        CHECK(bhattacharyya(hp, hq) == doctest::Approx(bhattacharyya(hq, hp)).epsilon(1e-14));
        CHECK(bhattacharyya(hp, hq) == doctest::Approx(qrouter::oracle::bhattacharyya_distance(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("content priors stub and clamping") {
    const Frame f = test::grey_frame(4, 4, 9);
    const auto p = content_priors(f);
    CHECK(p.face == 0.0);
    CHECK(p.text == 0.0);
    const auto again = content_priors(f);
    CHECK(again.face == p.face);
    const auto clamped = content_priors(f, [](const Frame&) { return ContentPriors{2.5, -1.0}; });
    CHECK(clamped.face == 1.0);
    CHECK(clamped.text == 0.0);
}

TEST_CASE("extract_features on a single frame") {
    const auto m = extract_features(FrameSequence({test::grey_frame(6, 6, 50)}));
    REQUIRE(m.size() == 1);
    CHECK(m.row(1).diff_mean == 0.0);
    CHECK(m.row(1).hist_dist_prev == 0.0);
}

TEST_CASE("extract_features on identical frames") {
    std::mt19937_64 rng(2);
    const Frame f = test::random_frame(8, 8, rng);
    const auto m = extract_features(FrameSequence({f, f, f, f}));
    for (std::size_t t = 1; t <= 4; ++t) {
        CHECK(m.row(t).diff_mean == 0.0);
        CHECK(m.row(t).hist_dist_prev == 0.0);
    }
}

TEST_CASE("extract_features on a hand sequence black, black, white") {
    const auto m = extract_features(
        FrameSequence({test::grey_frame(5, 5, 0), test::grey_frame(5, 5, 0), test::grey_frame(5, 5, 255)}));
    const double disjoint = -std::log(1e-12);
    const std::array<double, 3> diff{0, 0, 255};
    const std::array<double, 3> hist{0, 0, disjoint};
    for (std::size_t t = 1; t <= 3; ++t) {
        const auto r = m.row(t);
        CHECK(r.diff_mean == diff[t - 1]);
        CHECK(r.hist_dist_prev == doctest::Approx(hist[t - 1]));
        CHECK(r.lap_var == 0.0);
        CHECK(r.grad_kurtosis == 0.0);
        CHECK(r.edge_density == 0.0);
        CHECK(r.face == 0.0);
        CHECK(r.text == 0.0);
    }
}

TEST_CASE("extract_features composes the per-frame operators") {
    std::mt19937_64 rng(21);
    std::vector<Frame> frames;
    for (int i = 0; i < 3; ++i) frames.push_back(test::random_frame(9, 7, rng));
    const auto m = extract_features(FrameSequence(frames));
    for (std::size_t t = 1; t <= 3; ++t) {
        const auto g = to_gray(frames[t - 1]);
        const auto r = m.row(t);
        CHECK(r.lap_var == laplacian_variance(g));
        CHECK(r.grad_kurtosis == gradient_kurtosis(g));
        CHECK(r.edge_density == edge_density(g));
        if (t > 1) {
            CHECK(r.diff_mean == motion_residual(frames[t - 2], frames[t - 1]));
            CHECK(r.hist_dist_prev ==
                  bhattacharyya(to_hsv_histogram(frames[t - 2]), to_hsv_histogram(frames[t - 1])));
        }
    }
}

TEST_CASE("per-frame columns are invariant under frame reordering") {
    std::mt19937_64 rng(8);
    std::vector<Frame> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(test::random_frame(8, 6, rng));
    std::vector<Frame> reversed(frames.rbegin(), frames.rend());
    const auto a = extract_features(FrameSequence(frames));
    const auto b = extract_features(FrameSequence(reversed));
    for (std::size_t t = 1; t <= 5; ++t) {
        const auto ra = a.row(t), rb = b.row(6 - t);
        CHECK(ra.lap_var == rb.lap_var);
        CHECK(ra.grad_kurtosis == rb.grad_kurtosis);
        CHECK(ra.edge_density == rb.edge_density);
    }
}

TEST_CASE("features stay finite on random frames") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Frame> frames;
        const std::size_t w = 3 + trial, h = 3 + trial % 4;
        for (int i = 0; i < 4; ++i) frames.push_back(test::random_frame(w, h, rng));
        const auto m = extract_features(FrameSequence(frames));
        for (const auto& row : m.rows) {
            for (double v : row) CHECK(std::isfinite(v));
            CHECK(row[kLapVar] >= 0.0);
        }
    }
}
