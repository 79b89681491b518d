#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clumpsplit/raster.hpp"

namespace clumpsplit {

struct unimodal_histogram_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GrayHistogram {
    std::array<std::uint64_t, 256> bins{};
    std::vector<double> smoothed; // unit-mass normalized, then low-pass filtered
    int bandwidth = 0;
};

GrayHistogram build_histogram(const GrayImage& image, int bandwidth);

struct ThresholdConfig {
    int hist_bandwidth = 16; // histograms need much stronger smoothing than contours
    int half_window = 5;
    double prominence_floor = 0.01; // a minor mode's valley shoulder is weak
                                    // next to a dominant peak's curvature
    double min_tail_fraction = 0.001; // mass required on each side of a valley
};

/// Valley selection on the smoothed intensity histogram: slope-difference
/// extrema of positive polarity are valley candidates; the deepest one
/// strictly between the two tallest smoothed peaks is returned. Throws
/// unimodal_histogram_error when no such valley exists.
int sdd_threshold(const GrayImage& image, const ThresholdConfig& config = {});

/// Foreground = intensity > threshold.
BinaryMask apply_threshold(const GrayImage& image, int threshold);

} // namespace clumpsplit
