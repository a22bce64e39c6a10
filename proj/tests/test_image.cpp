#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "splatgraph/image.hpp"

using namespace splatgraph;

namespace {

std::vector<std::uint8_t> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

ImageRGBA8 gradient_image(int w, int h) {
    ImageRGBA8 img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto* p = img.pixel(x, y);
            p[0] = std::uint8_t(x * 255 / std::max(1, w - 1));
            p[1] = std::uint8_t(y * 255 / std::max(1, h - 1));
            p[2] = std::uint8_t((x ^ y) & 0xff);
            p[3] = 255;
        }
    return img;
}

}  // namespace

TEST_CASE("png starts with signature and IHDR") {
    const auto bytes = encode_png(gradient_image(16, 9));
    REQUIRE(bytes.size() > 33);
    const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    CHECK(std::memcmp(bytes.data(), sig, 8) == 0);
    // IHDR length 13 immediately after the signature.
    CHECK(bytes[8] == 0);
    CHECK(bytes[9] == 0);
    CHECK(bytes[10] == 0);
    CHECK(bytes[11] == 13);
    CHECK(std::memcmp(&bytes[12], "IHDR", 4) == 0);
    // Width 16, height 9, bit depth 8, color type 6 (RGBA).
    CHECK(bytes[16] == 0);
    CHECK(bytes[17] == 0);
    CHECK(bytes[18] == 0);
    CHECK(bytes[19] == 16);
    CHECK(bytes[23] == 9);
    CHECK(bytes[24] == 8);
    CHECK(bytes[25] == 6);
    // IEND terminates the stream.
    CHECK(std::memcmp(&bytes[bytes.size() - 8], "IEND", 4) == 0);
}

TEST_CASE("png encoding is deterministic") {
    const ImageRGBA8 img = gradient_image(33, 21);
    CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("write_png emits the encoded bytes") {
    const auto dir = std::filesystem::temp_directory_path() / "splatgraph_img_tests";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "grad.png").string();
    const ImageRGBA8 img = gradient_image(8, 8);
    write_png(img, path);
    CHECK(read_all(path) == encode_png(img));
}

TEST_CASE("pfm header and payload") {
    const auto dir = std::filesystem::temp_directory_path() / "splatgraph_img_tests";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "depth.pfm").string();
    ImageF img(3, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) img.at(x, y) = 10.0 * y + x;
    write_pfm(img, path);

    std::ifstream in(path, std::ios::binary);
    std::string type, dims, scale;
    std::getline(in, type);
    std::getline(in, dims);
    std::getline(in, scale);
    CHECK(type == "Pf");
    CHECK(dims == "3 2");
    CHECK(scale.find('-') == 0);  // little-endian marker

    // PFM rows are bottom-to-top.
    std::vector<float> vals(6);
    in.read(reinterpret_cast<char*>(vals.data()), 6 * sizeof(float));
    REQUIRE(in.good());
    CHECK(vals[0] == doctest::Approx(10.0));
    CHECK(vals[1] == doctest::Approx(11.0));
    CHECK(vals[2] == doctest::Approx(12.0));
    CHECK(vals[3] == doctest::Approx(0.0));
    CHECK(vals[4] == doctest::Approx(1.0));
    CHECK(vals[5] == doctest::Approx(2.0));
}
