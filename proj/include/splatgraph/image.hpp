#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace splatgraph {

// Row-major single-channel double image.
struct ImageF {
    int width = 0, height = 0;
    std::vector<double> data;

    ImageF() = default;
    ImageF(int w, int h, double fill = 0.0) : width(w), height(h), data(size_t(w) * size_t(h), fill) {}

    double& at(int x, int y) { return data[size_t(y) * size_t(width) + size_t(x)]; }
    double at(int x, int y) const { return data[size_t(y) * size_t(width) + size_t(x)]; }
    bool empty() const { return data.empty(); }
};

struct ImageRGBA8 {
    int width = 0, height = 0;
    std::vector<std::uint8_t> data;  // RGBA interleaved

    ImageRGBA8() = default;
    ImageRGBA8(int w, int h) : width(w), height(h), data(size_t(w) * size_t(h) * 4, 0) {}

    std::uint8_t* pixel(int x, int y) { return &data[(size_t(y) * size_t(width) + size_t(x)) * 4]; }
};

// Minimal PNG encoder (8-bit RGBA, zlib-compressed, filter 0). Deterministic:
// identical input bytes produce identical files.
std::vector<std::uint8_t> encode_png(const ImageRGBA8& img);
void write_png(const ImageRGBA8& img, const std::string& path);

// PFM, single channel, little-endian (negative scale per convention).
void write_pfm(const ImageF& img, const std::string& path);

}  // namespace splatgraph
