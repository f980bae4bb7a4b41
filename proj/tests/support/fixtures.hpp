#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "qrouter/media.hpp"

namespace qrouter::test {

// Removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("qrouter_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Frame grey_frame(std::size_t w, std::size_t h, std::uint8_t v) { return Frame(w, h, Rgb{v, v, v}); }

// Grey frame from row-major luma values.
inline Frame frame_from_luma(std::size_t w, std::size_t h, const std::vector<std::uint8_t>& luma) {
    Frame f(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const std::uint8_t v = luma[y * w + x];
            f.set(x, y, {v, v, v});
        }
    }
    return f;
}

inline GrayFrame gray_from(std::size_t w, std::size_t h, const std::vector<std::uint8_t>& values) {
    GrayFrame g;
    g.width = w;
    g.height = h;
    g.data = values;
    return g;
}

inline Frame random_frame(std::size_t w, std::size_t h, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, 255);
    Frame f(w, h);
    for (auto& b : f.bytes()) b = static_cast<std::uint8_t>(d(rng));
    return f;
}

inline HsvHistogram histogram(std::vector<double> bins) {
    HsvHistogram h;
    h.bins_h = bins.size();
    h.bins_s = 1;
    h.bins_v = 1;
    h.bins = std::move(bins);
    return h;
}

}  // namespace qrouter::test
