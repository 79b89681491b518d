#pragma once

#include <stdexcept>
#include <string>

#include "clumpsplit/raster.hpp"

namespace clumpsplit {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads an 8-bit grayscale image. The format is detected from the file
/// magic: PNG (gray 8/16-bit or RGB, reduced to gray), PGM (P2/P5), or
/// uncompressed grayscale TIFF.
GrayImage read_gray(const std::string& path);

/// Reads a label map: 8/16-bit grayscale PNG, PGM, or a CSV grid of integer
/// labels (detected by a .csv extension).
LabelMap read_labels(const std::string& path);

/// Reads a grayscale image and interprets it as a binary mask. Throws when
/// pixels other than 0 and one nonzero value are present and `threshold` is
/// not given; with a threshold, foreground = value > threshold.
BinaryMask read_mask(const std::string& path, int threshold = -1);

void write_gray(const std::string& path, const GrayImage& image);   // .png or .pgm
void write_labels(const std::string& path, const LabelMap& labels); // .png, .pgm or .csv
void write_rgb_png(const std::string& path, const RgbImage& image);

} // namespace clumpsplit
