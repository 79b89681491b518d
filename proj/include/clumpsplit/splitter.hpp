#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clumpsplit/geometry.hpp"
#include "clumpsplit/sdd.hpp"

namespace clumpsplit {

struct SplitConfig {
    int bandwidth = 50;            // low-pass DFT band kept each side of DC
    int half_window = 5;           // samples per side for the slope fits
    double prominence_floor = 0.12; // fraction of max |s| an extremum must reach
    int min_concave_area_px = 3;
    double min_concave_area_frac = 0.001; // of clump area
    double min_pair_alignment = 0.7; // cosine between the cut chord and the
                                     // boundary normals at its endpoints
    int max_depth = 32;

    /// Throws std::invalid_argument when any field is out of range.
    void validate() const;

    int effective_min_concave_area(std::size_t clump_area) const;
};

enum class TerminalReason { none, single_cell, no_valid_pair, cut_ineffective, max_depth };

std::string to_string(TerminalReason reason);

/// One record per clump examined during the recursion.
struct SplitStep {
    int clump_label = 0;
    int concave_count = 0; // Q
    std::vector<Point> candidates;
    std::vector<Point> validated_part1;
    std::vector<Point> validated_part2;
    std::optional<std::pair<Point, Point>> chosen;
    bool cut_applied = false;
    TerminalReason reason = TerminalReason::none;
};

struct SplitTrace {
    std::vector<SplitStep> steps;
};

struct Classification {
    bool overlapped = false;
    ConcaveSet parts; // sorted by area descending; the two largest lead
};

/// Step-2 decision: fewer than two filtered concave parts means single cell.
Classification classify(const Clump& clump, const SplitConfig& config, int mask_width,
                        int mask_height);

/// A back-projected bottleneck candidate: contour position plus its index on
/// the contour (kept for normal estimation and tie-breaks).
struct BottleneckCandidate {
    int contour_index = 0;
    Point position;
    friend bool operator==(const BottleneckCandidate&, const BottleneckCandidate&) = default;
};

struct ValidatedCandidates {
    std::vector<BottleneckCandidate> part1;
    std::vector<BottleneckCandidate> part2;
};

/// Keeps candidates lying in (or 8-adjacent to) one of the two concave
/// parts; back-projected contour points sit on the clump next to the
/// subtracted region, so membership is tested with a one-pixel tolerance.
ValidatedCandidates validate_bottlenecks(std::span<const BottleneckCandidate> candidates,
                                         const ConcavePart& part1, const ConcavePart& part2);

/// Minimum-distance pair across the two groups; ties broken by lower
/// (index in part1, index in part2). Coincident points never form a pair.
std::optional<std::pair<Point, Point>> choose_pair(std::span<const BottleneckCandidate> part1,
                                                   std::span<const BottleneckCandidate> part2);

struct SplitResult {
    std::vector<Clump> cells;
    std::vector<Point> cut_pixels; // removed from the input clump
    SplitTrace trace;
};

/// Recursive separation: classify, detect bottleneck candidates on the
/// smoothed radial boundary, validate against the two largest concave parts,
/// cut along the minimum-distance pair, and recurse into the daughters. Any
/// terminal condition returns the clump unsplit with the reason recorded.
SplitResult split_clump(const Clump& clump, const BinaryMask& mask, const SplitConfig& config,
                        int depth = 0);

} // namespace clumpsplit
