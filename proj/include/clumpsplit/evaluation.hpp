#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clumpsplit/raster.hpp"

namespace clumpsplit {

/// One final labeled cell with its pixel list and mean-coordinate centroid.
struct CellRecord {
    int label = 0;
    std::vector<Point> pixels;
    PointF centroid;

    std::size_t area() const noexcept { return pixels.size(); }
};

struct VacCounts {
    std::int64_t n_segment = 0;
    std::int64_t n_split = 0;
    std::int64_t n_merge = 0;
    std::int64_t n_add = 0;
    std::int64_t n_missing = 0;

    std::int64_t total() const noexcept {
        return n_segment + n_split + n_merge + n_add + n_missing;
    }
    friend bool operator==(const VacCounts&, const VacCounts&) = default;
};

struct VacReport : VacCounts {
    double vac = 0.0;
};

/// Correspondence counting: a prediction links to a truth cell when their
/// IoU reaches 0.5 or the prediction's centroid lies inside the truth cell.
/// One-to-one links count as segment; a truth with k > 1 partners adds k - 1
/// splits; a prediction covering k > 1 truths adds k - 1 merges; unmatched
/// predictions are additions and unmatched truths are missing.
VacCounts match(std::span<const CellRecord> predicted, int predicted_width,
                int predicted_height, const LabelMap& truth);

/// Exact quotient n_segment / (sum of all five counts). Throws
/// std::invalid_argument("empty evaluation") when every count is zero.
double vac(const VacCounts& counts);

VacReport evaluate(std::span<const CellRecord> predicted, int predicted_width,
                   int predicted_height, const LabelMap& truth);

/// Collects the cells of a label map (labels may be sparse; order is by
/// ascending label).
std::vector<CellRecord> cells_from_label_map(const LabelMap& map);

struct Ellipse {
    PointF center;
    double semi_x = 0.0;  // semi-axis along the unrotated x direction
    double semi_y = 0.0;
    double rotation = 0.0; // radians

    bool contains(double x, double y) const noexcept;
    /// Boundary radius along a direction given as a unit vector.
    double support_radius(double ux, double uy) const noexcept;
};

struct SceneSpec {
    int width = 512;
    int height = 512;
    int min_count = 2;
    int max_count = 4;
    double min_axis = 15.0;
    double max_axis = 40.0;
    double overlap_min = 0.8; // center distance factors, times max(r1, r2)
    double overlap_max = 1.2;
    std::uint8_t foreground = 200;
    std::uint8_t background = 30;
    double noise_sigma = 0.0;
    int max_attempts = 1000;

    void validate() const;
};

struct SyntheticScene {
    int width = 0;
    int height = 0;
    std::vector<Ellipse> ellipses;
    LabelMap truth;   // overlap pixels go to the nearest ellipse center
    GrayImage gray;
    SceneSpec spec;

    SyntheticScene() : truth(1, 1), gray(1, 1) {}
};

/// Deterministic chain of overlapping ellipses: each one overlaps its
/// predecessor at a center distance in [overlap_min, overlap_max] times the
/// larger directional radius, while non-consecutive pairs stay disjoint.
/// Throws std::runtime_error("infeasible packing") when placement fails.
SyntheticScene generate_scene(const SceneSpec& spec, std::uint64_t seed);

} // namespace clumpsplit
