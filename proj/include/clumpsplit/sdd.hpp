#pragma once

#include <span>
#include <vector>

#include "clumpsplit/geometry.hpp"
#include "clumpsplit/raster.hpp"

namespace clumpsplit {

/// Ordered contour with its centroid-distance signature, raw and smoothed.
struct RadialBoundary {
    Contour contour;
    std::vector<double> raw;
    std::vector<double> smoothed;
    int bandwidth = 0;
};

enum class Polarity { maximum, minimum };

struct Extremum {
    int index = 0;
    Polarity polarity = Polarity::maximum;
    double magnitude = 0.0; // |s| at the extremum
};

/// Per-point slope difference values (cyclic) with detected extrema.
struct SddProfile {
    std::vector<double> values;
    int half_window = 0;
    std::vector<Extremum> extrema;
};

struct SlopePair {
    double left = 0.0;
    double right = 0.0;
};

/// Euclidean distance from each contour point to the centroid, in contour
/// order.
std::vector<double> radial_signature(const Contour& contour, PointF centroid);

/// DFT low-pass filter: frequency bins with index in (W, L-1-W) are zeroed,
/// the symmetric band around DC is kept, and the real part of the inverse
/// transform is returned. W >= floor(L/2) leaves the signal unchanged; W = 0
/// keeps only the mean.
std::vector<double> lowpass_dft(std::span<const double> signal, int bandwidth);

/// Least-squares line slopes over the N samples ending at j (left) and the N
/// samples starting at j (right); indices wrap cyclically. Requires N >= 2
/// and signal length >= 2N + 1.
SlopePair fit_slopes(std::span<const double> signal, int j, int half_window);

/// Slope difference distribution: values[j] = right slope - left slope,
/// computed for every index under cyclic extension.
std::vector<double> sdd(std::span<const double> signal, int half_window);

/// Strict cyclic local extrema of both polarities with |s| at least
/// prominence_floor times max |s|. Plateau runs report their center index,
/// rounded toward the run start. Result is sorted by index.
std::vector<Extremum> detect_extrema(std::span<const double> values, double prominence_floor);

/// Maps 1D extremum indices back to 2D contour points. Throws
/// std::out_of_range on a bad index.
std::vector<Point> back_project(std::span<const int> indices, const Contour& contour);

/// Convenience composition of radial_signature + lowpass_dft.
RadialBoundary radial_boundary(Contour contour, PointF centroid, int bandwidth);

/// Convenience composition of sdd + detect_extrema.
SddProfile sdd_profile(std::span<const double> signal, int half_window, double prominence_floor);

} // namespace clumpsplit
