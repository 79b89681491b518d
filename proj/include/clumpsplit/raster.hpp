#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace clumpsplit {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct PointF {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const PointF&, const PointF&) = default;
};

/// Raster-scan ordering (top-to-bottom, then left-to-right).
inline bool raster_less(Point a, Point b) noexcept {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

namespace detail {
inline std::size_t checked_area(int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("raster dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}
} // namespace detail

/// 2D boolean grid, row-major, true = foreground.
class BinaryMask {
public:
    BinaryMask(int width, int height, bool value = false)
        : width_(width), height_(height),
          data_(detail::checked_area(width, height), value ? 1 : 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    bool at(int x, int y) const { return data_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { data_[index(x, y)] = v ? 1 : 0; }

    /// Out-of-bounds coordinates read as background.
    bool test(int x, int y) const noexcept {
        return in_bounds(x, y) && data_[index(x, y)] != 0;
    }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (std::uint8_t v : data_) n += v != 0;
        return n;
    }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// 8-bit grayscale image, row-major.
class GrayImage {
public:
    GrayImage(int width, int height, std::uint8_t value = 0)
        : width_(width), height_(height),
          data_(detail::checked_area(width, height), value) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
    void set(int x, int y, std::uint8_t v) { data_[index(x, y)] = v; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }
    std::vector<std::uint8_t>& data() noexcept { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// 16-bit label image; 0 = background.
class LabelMap {
public:
    LabelMap(int width, int height)
        : width_(width), height_(height),
          data_(detail::checked_area(width, height), 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::uint16_t at(int x, int y) const { return data_[index(x, y)]; }
    void set(int x, int y, std::uint16_t v) { data_[index(x, y)] = v; }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    std::uint16_t max_label() const noexcept {
        std::uint16_t m = 0;
        for (std::uint16_t v : data_)
            if (v > m) m = v;
        return m;
    }

    const std::vector<std::uint16_t>& data() const noexcept { return data_; }
    std::vector<std::uint16_t>& data() noexcept { return data_; }

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint16_t> data_;
};

/// Interleaved 8-bit RGB image.
class RgbImage {
public:
    RgbImage(int width, int height)
        : width_(width), height_(height),
          data_(detail::checked_area(width, height) * 3, 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::size_t i = index(x, y) * 3;
        data_[i] = r;
        data_[i + 1] = g;
        data_[i + 2] = b;
    }

    std::uint8_t red(int x, int y) const { return data_[index(x, y) * 3]; }
    std::uint8_t green(int x, int y) const { return data_[index(x, y) * 3 + 1]; }
    std::uint8_t blue(int x, int y) const { return data_[index(x, y) * 3 + 2]; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

} // namespace clumpsplit
