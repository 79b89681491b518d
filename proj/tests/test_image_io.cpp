#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "clumpsplit/image_io.hpp"

using namespace clumpsplit;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("clumpsplit_io_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

GrayImage random_gray(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> dist(0, 255);
    GrayImage img(w, h);
    for (std::uint8_t& v : img.data()) v = static_cast<std::uint8_t>(dist(rng));
    return img;
}

LabelMap random_labels(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> dist(0, 40000);
    LabelMap map(w, h);
    for (std::uint16_t& v : map.data()) v = static_cast<std::uint16_t>(dist(rng));
    return map;
}

} // namespace

TEST_CASE("PNG round trip for 8-bit gray") {
    TempDir dir;
    std::mt19937 rng(1);
    for (auto [w, h] : {std::pair{1, 1}, std::pair{31, 7}, std::pair{64, 64}}) {
        GrayImage img = random_gray(rng, w, h);
        const std::string path = dir.file("gray.png");
        write_gray(path, img);
        CHECK(read_gray(path) == img);
    }
}

TEST_CASE("PNG round trip for 16-bit labels") {
    TempDir dir;
    std::mt19937 rng(2);
    LabelMap map = random_labels(rng, 50, 33);
    const std::string path = dir.file("labels.png");
    write_labels(path, map);
    CHECK(read_labels(path) == map);
}

TEST_CASE("PGM round trips") {
    TempDir dir;
    std::mt19937 rng(3);
    GrayImage img = random_gray(rng, 20, 14);
    write_gray(dir.file("img.pgm"), img);
    CHECK(read_gray(dir.file("img.pgm")) == img);

    LabelMap map = random_labels(rng, 9, 12);
    write_labels(dir.file("labels.pgm"), map);
    CHECK(read_labels(dir.file("labels.pgm")) == map);
}

TEST_CASE("ASCII PGM reads") {
    TempDir dir;
    const std::string path = dir.file("ascii.pgm");
    std::ofstream out(path);
    out << "P2\n# comment\n3 2\n255\n0 128 255\n7 9 11\n";
    out.close();
    GrayImage img = read_gray(path);
    CHECK(img.width() == 3);
    CHECK(img.height() == 2);
    CHECK(img.at(1, 0) == 128);
    CHECK(img.at(2, 1) == 11);
}

TEST_CASE("CSV label round trip") {
    TempDir dir;
    std::mt19937 rng(4);
    LabelMap map = random_labels(rng, 11, 6);
    const std::string path = dir.file("labels.csv");
    write_labels(path, map);
    CHECK(read_labels(path) == map);
}

TEST_CASE("RGB PNG writes and reads back as luma") {
    TempDir dir;
    RgbImage rgb(5, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x)
            rgb.set(x, y, static_cast<std::uint8_t>(x * 40), static_cast<std::uint8_t>(y * 60), 10);
    const std::string path = dir.file("rgb.png");
    write_rgb_png(path, rgb);
    GrayImage gray = read_gray(path);
    CHECK(gray.width() == 5);
    CHECK(gray.height() == 4);
    // spot-check one Rec.601 conversion
    const int expect = static_cast<int>(std::lround(0.299 * 80 + 0.587 * 180 + 0.114 * 10));
    CHECK(gray.at(2, 3) == expect);
}

TEST_CASE("truncated PNG fails cleanly") {
    TempDir dir;
    GrayImage img(16, 16, 100);
    const std::string path = dir.file("trunc.png");
    write_gray(path, img);
    auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size / 2);
    CHECK_THROWS_AS(read_gray(path), io_error);
}

TEST_CASE("nonexistent and garbage files fail cleanly") {
    TempDir dir;
    CHECK_THROWS_AS(read_gray(dir.file("missing.png")), io_error);
    const std::string garbage = dir.file("garbage.bin");
    std::ofstream(garbage) << "not an image at all";
    CHECK_THROWS_AS(read_gray(garbage), io_error);
    CHECK_THROWS_AS(read_labels(garbage), io_error);
}

TEST_CASE("minimal TIFF reads") {
    TempDir dir;
    // hand-built little-endian uncompressed 8-bit gray 4x3 TIFF, single strip
    const int w = 4, h = 3;
    std::vector<unsigned char> pixels;
    for (int i = 0; i < w * h; ++i) pixels.push_back(static_cast<unsigned char>(i * 5));

    std::vector<unsigned char> tif{'I', 'I', 42, 0, 8, 0, 0, 0};
    auto push16 = [&](std::uint16_t v) {
        tif.push_back(static_cast<unsigned char>(v & 0xff));
        tif.push_back(static_cast<unsigned char>(v >> 8));
    };
    auto push32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) tif.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    auto entry = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t count, std::uint32_t value) {
        push16(tag);
        push16(type);
        push32(count);
        push32(value);
    };
    const std::uint32_t data_offset = 8 + 2 + 9 * 12 + 4;
    push16(9); // entry count
    entry(256, 3, 1, w);
    entry(257, 3, 1, h);
    entry(258, 3, 1, 8);
    entry(259, 3, 1, 1); // uncompressed
    entry(262, 3, 1, 1); // black is zero
    entry(273, 4, 1, data_offset);
    entry(277, 3, 1, 1);
    entry(278, 3, 1, h);
    entry(279, 4, 1, static_cast<std::uint32_t>(pixels.size()));
    push32(0); // next IFD
    tif.insert(tif.end(), pixels.begin(), pixels.end());

    const std::string path = dir.file("img.tif");
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(tif.data()), static_cast<std::streamsize>(tif.size()));
    GrayImage img = read_gray(path);
    CHECK(img.width() == w);
    CHECK(img.height() == h);
    CHECK(img.at(3, 2) == 55);
}

TEST_CASE("read_mask accepts binary images and flags others") {
    TempDir dir;
    GrayImage binary(6, 6, 0);
    binary.set(2, 2, 255);
    binary.set(3, 2, 255);
    const std::string path = dir.file("mask.png");
    write_gray(path, binary);
    BinaryMask mask = read_mask(path);
    CHECK(mask.count() == 2);
    CHECK(mask.at(2, 2));

    GrayImage messy(6, 6, 0);
    messy.set(1, 1, 100);
    messy.set(2, 2, 200);
    write_gray(path, messy);
    CHECK_THROWS_AS(read_mask(path), io_error);
    CHECK(read_mask(path, 150).count() == 1);
}
