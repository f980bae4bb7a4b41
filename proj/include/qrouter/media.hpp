#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrouter {

// Base exception for all library failures that are not client/transport errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Single-channel row-major grid.
template <typename T>
struct Plane {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<T> data;

    Plane() = default;
    Plane(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), data(w * h, fill) {}

    T& at(std::size_t x, std::size_t y) { return data[y * width + x]; }
    const T& at(std::size_t x, std::size_t y) const { return data[y * width + x]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Plane& o) const { return width == o.width && height == o.height; }
};

using GrayFrame = Plane<std::uint8_t>;

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB image, row-major interleaved.
class Frame {
public:
    Frame() = default;
    Frame(std::size_t width, std::size_t height, Rgb fill = {});
    Frame(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t pixel_count() const { return width_ * height_; }

    Rgb at(std::size_t x, std::size_t y) const;
    void set(std::size_t x, std::size_t y, Rgb c);

    const std::vector<std::uint8_t>& bytes() const { return pixels_; }
    std::vector<std::uint8_t>& bytes() { return pixels_; }

    bool same_shape(const Frame& o) const { return width_ == o.width_ && height_ == o.height_; }
    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// Ordered frames of identical shape. Public indices are 1-based.
class FrameSequence {
public:
    FrameSequence() = default;
    explicit FrameSequence(std::vector<Frame> frames);

    std::size_t size() const { return frames_.size(); }
    bool empty() const { return frames_.empty(); }
    std::size_t width() const { return frames_.empty() ? 0 : frames_.front().width(); }
    std::size_t height() const { return frames_.empty() ? 0 : frames_.front().height(); }

    const Frame& frame(std::size_t t) const;  // 1-based
    const std::vector<Frame>& frames() const { return frames_; }

private:
    std::vector<Frame> frames_;
};

struct HsvHistogram {
    std::size_t bins_h = 0, bins_s = 0, bins_v = 0;
    std::vector<double> bins;

    bool same_layout(const HsvHistogram& o) const {
        return bins_h == o.bins_h && bins_s == o.bins_s && bins_v == o.bins_v;
    }
};

struct HsvBins {
    std::size_t h = 8, s = 4, v = 4;
};

struct Hsv {
    double h = 0;  // [0, 360)
    double s = 0;  // [0, 1]
    double v = 0;  // [0, 1]
};

Hsv rgb_to_hsv(Rgb c);

GrayFrame to_gray(const Frame& frame);

HsvHistogram to_hsv_histogram(const Frame& frame, HsvBins bins = {});

// PPM (P6, maxval 255) and PGM (P5) codecs.
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& frame);
void write_pgm(const std::filesystem::path& path, const GrayFrame& gray);
std::string encode_ppm(const Frame& frame);
Frame decode_ppm(const std::string& bytes);

// Loads NNNN.ppm files from a directory, sorted by numeric index.
FrameSequence load_frame_dir(const std::filesystem::path& dir);
void save_frame_dir(const std::filesystem::path& dir, const FrameSequence& seq);

}  // namespace qrouter
