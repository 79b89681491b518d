#pragma once

#include "clumpsplit/pipeline.hpp"
#include "clumpsplit/raster.hpp"

namespace clumpsplit {

/// Inspection rendering over the input image: applied cut lines are drawn in
/// red (one pixel wide) and validated bottleneck points as blue circles of
/// radius 5. Conventions are fixed so golden-image tests stay stable.
RgbImage render_overlay(const GrayImage& base, const SegmentationResult& result);

/// Mask variant: foreground is rendered light gray, background black.
RgbImage render_overlay(const BinaryMask& base, const SegmentationResult& result);

} // namespace clumpsplit
