#include "qrouter/media.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace qrouter {

namespace fs = std::filesystem;

Frame::Frame(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height * 3) {
    if (width == 0 || height == 0) throw Error("frame dimensions must be positive");
    for (std::size_t i = 0; i < width * height; ++i) {
        pixels_[3 * i] = fill.r;
        pixels_[3 * i + 1] = fill.g;
        pixels_[3 * i + 2] = fill.b;
    }
}

Frame::Frame(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width == 0 || height == 0) throw Error("frame dimensions must be positive");
    if (pixels_.size() != 3 * width * height) throw Error("pixel buffer length must be 3*width*height");
}

Rgb Frame::at(std::size_t x, std::size_t y) const {
    const std::size_t i = 3 * (y * width_ + x);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Frame::set(std::size_t x, std::size_t y, Rgb c) {
    const std::size_t i = 3 * (y * width_ + x);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
}

FrameSequence::FrameSequence(std::vector<Frame> frames) : frames_(std::move(frames)) {
    if (frames_.empty()) throw Error("no frames");
    for (const auto& f : frames_) {
        if (!f.same_shape(frames_.front())) {
            throw Error("dimension mismatch between frames");
        }
    }
}

const Frame& FrameSequence::frame(std::size_t t) const {
    if (t < 1 || t > frames_.size()) throw Error("frame index out of range: " + std::to_string(t));
    return frames_[t - 1];
}

Hsv rgb_to_hsv(Rgb c) {
    const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    Hsv out;
    out.v = mx;
    out.s = mx > 0 ? delta / mx : 0.0;
    if (delta <= 0) {
        out.h = 0.0;  // achromatic
        return out;
    }
    double h;
    if (mx == r) {
        h = 60.0 * std::fmod((g - b) / delta, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / delta + 2.0);
    } else {
        h = 60.0 * ((r - g) / delta + 4.0);
    }
    if (h < 0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
    return out;
}

GrayFrame to_gray(const Frame& frame) {
    GrayFrame gray(frame.width(), frame.height());
    const auto& px = frame.bytes();
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double y = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
        gray.data[i] = static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
    }
    return gray;
}

namespace {

std::size_t bin_of(double value, double range, std::size_t bins) {
    auto idx = static_cast<std::size_t>(std::floor(value / range * static_cast<double>(bins)));
    return std::min(idx, bins - 1);
}

}  // namespace

HsvHistogram to_hsv_histogram(const Frame& frame, HsvBins bins) {
    if (bins.h == 0 || bins.s == 0 || bins.v == 0) throw Error("histogram bin counts must be >= 1");
    HsvHistogram hist{bins.h, bins.s, bins.v, std::vector<double>(bins.h * bins.s * bins.v, 0.0)};
    const auto n = frame.pixel_count();
    std::vector<std::size_t> counts(hist.bins.size(), 0);
    for (std::size_t y = 0; y < frame.height(); ++y) {
        for (std::size_t x = 0; x < frame.width(); ++x) {
            const Hsv hsv = rgb_to_hsv(frame.at(x, y));
            const std::size_t hi = bin_of(hsv.h, 360.0, bins.h);
            const std::size_t si = bin_of(hsv.s, 1.0, bins.s);
            const std::size_t vi = bin_of(hsv.v, 1.0, bins.v);
            ++counts[(hi * bins.s + si) * bins.v + vi];
        }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        hist.bins[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    }
    return hist;
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

std::size_t parse_dim(const std::string& tok, const char* what) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        throw Error(std::string("malformed PPM header: bad ") + what);
    }
    return std::stoul(tok);
}

Frame decode_ppm_stream(std::istream& in) {
    if (next_token(in) != "P6") throw Error("malformed PPM header: expected P6");
    const std::size_t w = parse_dim(next_token(in), "width");
    const std::size_t h = parse_dim(next_token(in), "height");
    const std::size_t maxval = parse_dim(next_token(in), "maxval");
    if (w == 0 || h == 0) throw Error("malformed PPM header: zero dimension");
    if (maxval != 255) throw Error("malformed PPM header: only maxval 255 is supported");
    std::vector<std::uint8_t> px(3 * w * h);
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (static_cast<std::size_t>(in.gcount()) != px.size()) throw Error("malformed PPM: truncated pixel data");
    return Frame(w, h, std::move(px));
}

}  // namespace

Frame decode_ppm(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return decode_ppm_stream(in);
}

std::string encode_ppm(const Frame& frame) {
    std::string out = "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
    out.append(reinterpret_cast<const char*>(frame.bytes().data()), frame.bytes().size());
    return out;
}

Frame read_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return decode_ppm_stream(in);
    } catch (const Error& e) {
        throw Error(path.filename().string() + ": " + e.what());
    }
}

namespace {

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_ppm(const fs::path& path, const Frame& frame) { write_bytes(path, encode_ppm(frame)); }

void write_pgm(const fs::path& path, const GrayFrame& gray) {
    std::string out = "P5\n" + std::to_string(gray.width) + " " + std::to_string(gray.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(gray.data.data()), gray.data.size());
    write_bytes(path, out);
}

FrameSequence load_frame_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("missing directory: " + dir.string());
    std::map<unsigned long, fs::path> indexed;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".ppm") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            continue;
        }
        const unsigned long idx = std::stoul(stem);
        if (!indexed.emplace(idx, entry.path()).second) {
            throw Error("duplicate frame index " + std::to_string(idx) + " in " + dir.string());
        }
    }
    if (indexed.empty()) throw Error("no frames in " + dir.string());

    std::vector<Frame> frames;
    frames.reserve(indexed.size());
    for (const auto& [idx, path] : indexed) frames.push_back(read_ppm(path));
    for (const auto& f : frames) {
        if (!f.same_shape(frames.front())) throw Error("dimension mismatch between frames in " + dir.string());
    }
    return FrameSequence(std::move(frames));
}

void save_frame_dir(const fs::path& dir, const FrameSequence& seq) {
    fs::create_directories(dir);
    char name[32];
    for (std::size_t t = 1; t <= seq.size(); ++t) {
        std::snprintf(name, sizeof(name), "%04zu.ppm", t);
        write_ppm(dir / name, seq.frame(t));
    }
}

}  // namespace qrouter
