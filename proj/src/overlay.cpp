#include "clumpsplit/overlay.hpp"

#include "clumpsplit/geometry.hpp"

namespace clumpsplit {

namespace {

constexpr int point_circle_radius = 5;

void draw_pixel(RgbImage& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (img.in_bounds(x, y)) img.set(x, y, r, g, b);
}

// midpoint circle outline
void draw_circle(RgbImage& img, Point c, int radius, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
    int x = radius;
    int y = 0;
    int err = 1 - radius;
    while (x >= y) {
        draw_pixel(img, c.x + x, c.y + y, r, g, b);
        draw_pixel(img, c.x + y, c.y + x, r, g, b);
        draw_pixel(img, c.x - y, c.y + x, r, g, b);
        draw_pixel(img, c.x - x, c.y + y, r, g, b);
        draw_pixel(img, c.x - x, c.y - y, r, g, b);
        draw_pixel(img, c.x - y, c.y - x, r, g, b);
        draw_pixel(img, c.x + y, c.y - x, r, g, b);
        draw_pixel(img, c.x + x, c.y - y, r, g, b);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

void draw_annotations(RgbImage& img, const SegmentationResult& result) {
    for (const ClumpTrace& ct : result.traces) {
        for (const SplitStep& step : ct.trace.steps) {
            for (const Point& p : step.validated_part1)
                draw_circle(img, p, point_circle_radius, 40, 90, 255);
            for (const Point& p : step.validated_part2)
                draw_circle(img, p, point_circle_radius, 40, 90, 255);
            if (step.cut_applied && step.chosen) {
                for (const Point& p : bresenham_line(step.chosen->first, step.chosen->second))
                    draw_pixel(img, p.x, p.y, 255, 0, 0);
            }
        }
    }
}

} // namespace

RgbImage render_overlay(const GrayImage& base, const SegmentationResult& result) {
    RgbImage img(base.width(), base.height());
    for (int y = 0; y < base.height(); ++y) {
        for (int x = 0; x < base.width(); ++x) {
            const std::uint8_t v = base.at(x, y);
            img.set(x, y, v, v, v);
        }
    }
    draw_annotations(img, result);
    return img;
}

RgbImage render_overlay(const BinaryMask& base, const SegmentationResult& result) {
    RgbImage img(base.width(), base.height());
    for (int y = 0; y < base.height(); ++y) {
        for (int x = 0; x < base.width(); ++x) {
            const std::uint8_t v = base.at(x, y) ? 200 : 0;
            img.set(x, y, v, v, v);
        }
    }
    draw_annotations(img, result);
    return img;
}

} // namespace clumpsplit
