#pragma once

#include <optional>
#include <span>
#include <vector>

#include "clumpsplit/raster.hpp"

namespace clumpsplit {

/// One labeled 8-connected foreground component.
struct Clump {
    int label = 0;
    std::vector<Point> pixels; // raster order
    PointF centroid;

    std::size_t area() const noexcept { return pixels.size(); }
};

/// Closed exterior boundary; consecutive points are 8-neighbors and the last
/// point connects back to the first. Orientation is counterclockwise in
/// (x, y) coordinates and the start point is the minimal (y, x) pixel.
struct Contour {
    std::vector<Point> points;

    int length() const noexcept { return static_cast<int>(points.size()); }
};

struct ConcavePart {
    std::vector<Point> pixels;

    std::size_t area() const noexcept { return pixels.size(); }
};

/// Connected components of (convex hull minus clump), noise-filtered and
/// sorted by area descending.
struct ConcaveSet {
    std::vector<ConcavePart> parts;

    int count() const noexcept { return static_cast<int>(parts.size()); }
};

/// Labels maximal 8-connected foreground components 1..K in raster-scan
/// discovery order. Empty mask gives an empty list.
std::vector<Clump> label_components(const BinaryMask& mask);

/// Arithmetic mean of pixel coordinates. Throws std::invalid_argument on
/// empty input.
PointF centroid(std::span<const Point> pixels);

/// Moore-neighbor boundary trace of the clump's exterior. Interior holes are
/// ignored; pixels on one-pixel-wide limbs may appear twice.
Contour trace_contour(const Clump& clump, const BinaryMask& mask);

/// Filled rasterization of the convex hull polygon of the clump's pixel
/// centers. A pixel is set iff its center lies inside or on the hull, so the
/// result is always a superset of the clump.
BinaryMask convex_hull_mask(const Clump& clump, int width, int height);

/// 4-connected components of hull minus clump with area >= min_area, sorted
/// by area descending (ties by discovery order). Throws if the hull does not
/// cover the clump.
ConcaveSet concave_parts(const Clump& clump, const BinaryMask& hull, int min_area);

/// Clears the Bresenham segment p1->p2 (thickness 1). If the clump containing
/// p1 is left with fewer than two components, retries with thickness 2; if it
/// still is, returns std::nullopt.
std::optional<BinaryMask> try_cut_line(const BinaryMask& mask, Point p1, Point p2);

/// As try_cut_line but throws std::runtime_error("cut ineffective") on
/// failure.
BinaryMask cut_line(const BinaryMask& mask, Point p1, Point p2);

/// Pixels of the rasterized segment p1->p2 (all-octant Bresenham).
std::vector<Point> bresenham_line(Point p1, Point p2);

/// Builds a mask of the given dimensions with exactly these pixels set.
BinaryMask mask_from_pixels(std::span<const Point> pixels, int width, int height);

} // namespace clumpsplit
