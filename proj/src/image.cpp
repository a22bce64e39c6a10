#include "splatgraph/image.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "splatgraph/errors.hpp"

namespace splatgraph {

namespace {

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void push_chunk(std::vector<std::uint8_t>& out, const char type[4],
                const std::uint8_t* payload, size_t n) {
    push_u32(out, std::uint32_t(n));
    const size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload, payload + n);
    const uLong crc = crc32(0, out.data() + start, uInt(out.size() - start));
    push_u32(out, std::uint32_t(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageRGBA8& img) {
    if (img.width <= 0 || img.height <= 0)
        throw ValidationError("encode_png: empty image");

    // Raw scanlines with leading filter byte 0.
    const size_t stride = size_t(img.width) * 4;
    std::vector<std::uint8_t> raw((stride + 1) * size_t(img.height));
    for (int y = 0; y < img.height; ++y) {
        std::uint8_t* row = &raw[size_t(y) * (stride + 1)];
        row[0] = 0;
        std::memcpy(row + 1, &img.data[size_t(y) * stride], stride);
    }

    uLongf bound = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    // Fixed compression level keeps output bytes stable across builds.
    if (compress2(compressed.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw Error("encode_png: deflate failed");
    compressed.resize(bound);

    std::vector<std::uint8_t> out;
    const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    out.insert(out.end(), magic, magic + 8);

    std::uint8_t ihdr[13];
    ihdr[0] = std::uint8_t(std::uint32_t(img.width) >> 24);
    ihdr[1] = std::uint8_t(std::uint32_t(img.width) >> 16);
    ihdr[2] = std::uint8_t(std::uint32_t(img.width) >> 8);
    ihdr[3] = std::uint8_t(img.width);
    ihdr[4] = std::uint8_t(std::uint32_t(img.height) >> 24);
    ihdr[5] = std::uint8_t(std::uint32_t(img.height) >> 16);
    ihdr[6] = std::uint8_t(std::uint32_t(img.height) >> 8);
    ihdr[7] = std::uint8_t(img.height);
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 6;   // RGBA
    ihdr[10] = 0;  // deflate
    ihdr[11] = 0;  // filter method
    ihdr[12] = 0;  // no interlace
    push_chunk(out, "IHDR", ihdr, sizeof ihdr);
    push_chunk(out, "IDAT", compressed.data(), compressed.size());
    push_chunk(out, "IEND", nullptr, 0);
    return out;
}

void write_png(const ImageRGBA8& img, const std::string& path) {
    const std::vector<std::uint8_t> bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

void write_pfm(const ImageF& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
    // PFM rows run bottom-to-top.
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            const float v = float(img.at(x, y));
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace splatgraph
