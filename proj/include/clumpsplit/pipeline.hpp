#pragma once

#include <optional>
#include <vector>

#include "clumpsplit/evaluation.hpp"
#include "clumpsplit/splitter.hpp"
#include "clumpsplit/thresholding.hpp"

namespace clumpsplit {

struct PipelineConfig {
    SplitConfig split;
    ThresholdConfig threshold;
    bool invert = false; // foreground darker than background
    int workers = 1;

    void validate() const;
};

/// Trace of one top-level clump through the splitter.
struct ClumpTrace {
    int clump_label = 0;
    SplitTrace trace;
};

struct SegmentationResult {
    std::vector<CellRecord> cells; // labels match label_map, assigned in raster
                                   // order of cell centroids
    LabelMap label_map;
    std::vector<ClumpTrace> traces;
    std::vector<Point> cut_pixels;
    int initial_clumps = 0;
    std::optional<int> threshold_used;
    PipelineConfig config;

    SegmentationResult() : label_map(1, 1) {}
};

/// Splits every labeled clump of the mask and relabels the resulting cells
/// canonically by (centroid y, centroid x). Clumps are processed in parallel
/// when workers > 1; results are independent of the worker count.
SegmentationResult run(const BinaryMask& mask, const PipelineConfig& config = {});

/// Thresholds the grayscale image first (propagates unimodal_histogram_error),
/// then proceeds as the mask overload.
SegmentationResult run(const GrayImage& image, const PipelineConfig& config = {});

} // namespace clumpsplit
