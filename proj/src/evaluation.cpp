#include "clumpsplit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "clumpsplit/geometry.hpp"
#include <stdexcept>

namespace clumpsplit {

namespace {

/// Deterministic uniform/normal sampling on top of the fully specified
/// mt19937_64 engine; std::uniform_*_distribution is implementation-defined
/// and would break cross-platform reproducibility of seeded scenes.
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    int uniform_int(int lo, int hi) { // inclusive
        const double u = uniform(0.0, 1.0);
        const int span = hi - lo + 1;
        return lo + std::min(span - 1, static_cast<int>(u * span));
    }

    double normal(double sigma) {
        // Box-Muller
        double u1 = uniform(0.0, 1.0);
        while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return sigma * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

double squared(double v) { return v * v; }

// Rasterizes the pair in isolation and checks that its union shows two
// clearly detectable neck indentations; a tangential crossing overlaps
// without forming a neck.
bool neck_indentations_ok(const Ellipse& a, const Ellipse& b, int min_indent_area) {
    const double pad = 2.0;
    const double reach_a = std::max(a.semi_x, a.semi_y);
    const double reach_b = std::max(b.semi_x, b.semi_y);
    const int x0 = static_cast<int>(std::floor(std::min(a.center.x - reach_a, b.center.x - reach_b) - pad));
    const int y0 = static_cast<int>(std::floor(std::min(a.center.y - reach_a, b.center.y - reach_b) - pad));
    const int x1 = static_cast<int>(std::ceil(std::max(a.center.x + reach_a, b.center.x + reach_b) + pad));
    const int y1 = static_cast<int>(std::ceil(std::max(a.center.y + reach_a, b.center.y + reach_b) + pad));
    const int w = x1 - x0 + 1;
    const int h = y1 - y0 + 1;

    BinaryMask mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (a.contains(x + x0, y + y0) || b.contains(x + x0, y + y0))
                mask.set(x, y, true);

    const std::vector<Clump> clumps = label_components(mask);
    if (clumps.size() != 1) return false; // barely touching or disjoint raster
    const BinaryMask hull = convex_hull_mask(clumps[0], w, h);
    return concave_parts(clumps[0], hull, min_indent_area).count() >= 2;
}

} // namespace

bool Ellipse::contains(double x, double y) const noexcept {
    const double dx = x - center.x;
    const double dy = y - center.y;
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double u = dx * c + dy * s;
    const double v = -dx * s + dy * c;
    return squared(u / semi_x) + squared(v / semi_y) <= 1.0;
}

double Ellipse::support_radius(double ux, double uy) const noexcept {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    const double u = ux * c + uy * s;
    const double v = -ux * s + uy * c;
    // boundary point along (u, v): r such that (r u / a)^2 + (r v / b)^2 = 1
    return 1.0 / std::sqrt(squared(u / semi_x) + squared(v / semi_y));
}

VacCounts match(std::span<const CellRecord> predicted, int predicted_width,
                int predicted_height, const LabelMap& truth) {
    if (predicted_width != truth.width() || predicted_height != truth.height())
        throw std::invalid_argument("dimension mismatch");

    std::map<std::uint16_t, std::int64_t> truth_area;
    for (std::uint16_t v : truth.data())
        if (v != 0) ++truth_area[v];

    std::map<std::uint16_t, int> truth_partners;
    for (const auto& [lbl, area] : truth_area) truth_partners[lbl] = 0;

    // bipartite links per prediction: IoU >= 0.5 or centroid containment
    std::vector<std::vector<std::uint16_t>> links(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const CellRecord& cell = predicted[i];
        std::map<std::uint16_t, std::int64_t> overlap;
        for (const Point& p : cell.pixels) {
            if (!truth.in_bounds(p.x, p.y))
                throw std::invalid_argument("dimension mismatch");
            const std::uint16_t t = truth.at(p.x, p.y);
            if (t != 0) ++overlap[t];
        }

        std::uint16_t centroid_label = 0;
        const int cx = static_cast<int>(std::llround(cell.centroid.x));
        const int cy = static_cast<int>(std::llround(cell.centroid.y));
        if (truth.in_bounds(cx, cy)) centroid_label = truth.at(cx, cy);

        for (const auto& [t, inter] : overlap) {
            const std::int64_t uni =
                static_cast<std::int64_t>(cell.area()) + truth_area[t] - inter;
            const bool iou_link = 2 * inter >= uni; // IoU >= 0.5 without division
            if (iou_link || t == centroid_label) {
                links[i].push_back(t);
                ++truth_partners[t];
            }
        }
    }

    VacCounts counts;
    for (const std::vector<std::uint16_t>& l : links) {
        if (l.empty())
            ++counts.n_add;
        else if (l.size() >= 2)
            counts.n_merge += static_cast<std::int64_t>(l.size()) - 1;
    }
    // one-to-one pairs counted from the prediction side are exactly the
    // truths with a single exclusive partner
    for (const std::vector<std::uint16_t>& l : links)
        if (l.size() == 1 && truth_partners[l[0]] == 1) ++counts.n_segment;

    for (const auto& [lbl, partners] : truth_partners) {
        if (partners == 0)
            ++counts.n_missing;
        else if (partners >= 2)
            counts.n_split += partners - 1;
    }
    return counts;
}

double vac(const VacCounts& counts) {
    const std::int64_t denom = counts.total();
    if (denom <= 0) throw std::invalid_argument("empty evaluation");
    return static_cast<double>(counts.n_segment) / static_cast<double>(denom);
}

VacReport evaluate(std::span<const CellRecord> predicted, int predicted_width,
                   int predicted_height, const LabelMap& truth) {
    VacReport report;
    static_cast<VacCounts&>(report) = match(predicted, predicted_width, predicted_height, truth);
    report.vac = vac(report);
    return report;
}

std::vector<CellRecord> cells_from_label_map(const LabelMap& map) {
    std::map<std::uint16_t, CellRecord> by_label;
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            const std::uint16_t v = map.at(x, y);
            if (v == 0) continue;
            CellRecord& cell = by_label[v];
            cell.label = v;
            cell.pixels.push_back({x, y});
        }
    }
    std::vector<CellRecord> out;
    out.reserve(by_label.size());
    for (auto& [lbl, cell] : by_label) {
        double sx = 0.0, sy = 0.0;
        for (const Point& p : cell.pixels) {
            sx += p.x;
            sy += p.y;
        }
        cell.centroid = {sx / static_cast<double>(cell.pixels.size()),
                         sy / static_cast<double>(cell.pixels.size())};
        out.push_back(std::move(cell));
    }
    return out;
}

void SceneSpec::validate() const {
    if (width < 8 || height < 8) throw std::invalid_argument("scene too small");
    if (min_count < 1 || max_count < min_count) throw std::invalid_argument("bad ellipse count");
    if (min_axis <= 0.0 || max_axis < min_axis) throw std::invalid_argument("bad axis range");
    if (overlap_min <= 0.0 || overlap_max < overlap_min)
        throw std::invalid_argument("bad overlap range");
    if (noise_sigma < 0.0) throw std::invalid_argument("bad noise sigma");
    if (max_attempts < 1) throw std::invalid_argument("bad retry bound");
}

SyntheticScene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
    spec.validate();
    SceneRng rng(seed);

    const double margin = spec.max_axis + 3.0;
    if (2.0 * margin >= spec.width || 2.0 * margin >= spec.height)
        throw std::runtime_error("infeasible packing");

    const int count = rng.uniform_int(spec.min_count, spec.max_count);

    auto sample_shape = [&](PointF center) {
        Ellipse e;
        e.center = center;
        e.semi_x = rng.uniform(spec.min_axis, spec.max_axis);
        e.semi_y = rng.uniform(spec.min_axis, spec.max_axis);
        e.rotation = rng.uniform(0.0, std::numbers::pi);
        return e;
    };

    std::vector<Ellipse> ellipses;
    for (int attempt = 0; attempt < spec.max_attempts && ellipses.empty(); ++attempt) {
        std::vector<Ellipse> chain;
        chain.push_back(sample_shape({rng.uniform(margin, spec.width - margin),
                                      rng.uniform(margin, spec.height - margin)}));
        bool ok = true;
        double prev_theta = 0.0;
        for (int i = 1; i < count && ok; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 64 && !placed; ++tries) {
                const Ellipse& anchor = chain.back();
                // chains bend: nearly collinear continuations merge the neck
                // indentations of consecutive junctions into ambiguous strips
                double theta;
                if (i == 1) {
                    theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
                } else {
                    const double turn = rng.uniform(std::numbers::pi / 6.0,
                                                    2.0 * std::numbers::pi / 3.0);
                    theta = prev_theta + (rng.uniform(0.0, 1.0) < 0.5 ? turn : -turn);
                }
                const double ux = std::cos(theta);
                const double uy = std::sin(theta);
                Ellipse cand = sample_shape({0.0, 0.0});
                const double r1 = anchor.support_radius(ux, uy);
                const double r2 = cand.support_radius(-ux, -uy);
                const double gap = rng.uniform(spec.overlap_min, spec.overlap_max);
                const double dist = gap * std::max(r1, r2);
                cand.center = {anchor.center.x + dist * ux, anchor.center.y + dist * uy};

                if (cand.center.x < margin || cand.center.x > spec.width - margin ||
                    cand.center.y < margin || cand.center.y > spec.height - margin)
                    continue;
                // non-consecutive ellipses must stay clear of each other
                bool clear = true;
                for (std::size_t j = 0; j + 1 < chain.size() && clear; ++j) {
                    const double dx = cand.center.x - chain[j].center.x;
                    const double dy = cand.center.y - chain[j].center.y;
                    const double d = std::hypot(dx, dy);
                    const double rj = chain[j].support_radius(dx / d, dy / d);
                    const double rc = cand.support_radius(-dx / d, -dy / d);
                    clear = d >= rj + rc + 4.0;
                }
                if (!clear) continue;
                if (!neck_indentations_ok(anchor, cand, 12)) continue;
                chain.push_back(cand);
                prev_theta = theta;
                placed = true;
            }
            ok = placed;
        }
        if (ok) ellipses = std::move(chain);
    }
    if (ellipses.empty()) throw std::runtime_error("infeasible packing");

    SyntheticScene scene;
    scene.width = spec.width;
    scene.height = spec.height;
    scene.ellipses = ellipses;
    scene.spec = spec;
    scene.truth = LabelMap(spec.width, spec.height);
    scene.gray = GrayImage(spec.width, spec.height, spec.background);

    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            int owner = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ellipses.size(); ++i) {
                if (!ellipses[i].contains(x, y)) continue;
                const double d2 = squared(x - ellipses[i].center.x) +
                                  squared(y - ellipses[i].center.y);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    owner = static_cast<int>(i) + 1;
                }
            }
            if (owner != 0) {
                scene.truth.set(x, y, static_cast<std::uint16_t>(owner));
                scene.gray.set(x, y, spec.foreground);
            }
        }
    }

    if (spec.noise_sigma > 0.0) {
        for (std::uint8_t& v : scene.gray.data()) {
            const double noisy = v + rng.normal(spec.noise_sigma);
            v = static_cast<std::uint8_t>(std::clamp(noisy, 0.0, 255.0));
        }
    }
    return scene;
}

} // namespace clumpsplit
