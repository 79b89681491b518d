#include "clumpsplit/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace clumpsplit {

namespace {

std::int64_t pixel_key(Point p) {
    return (static_cast<std::int64_t>(p.y) << 32) | static_cast<std::uint32_t>(p.x);
}

std::unordered_set<std::int64_t> pixel_set(const ConcavePart& part) {
    std::unordered_set<std::int64_t> s;
    s.reserve(part.pixels.size() * 2);
    for (const Point& p : part.pixels) s.insert(pixel_key(p));
    return s;
}

bool near_part(const std::unordered_set<std::int64_t>& part, Point p) {
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (part.contains(pixel_key({p.x + dx, p.y + dy}))) return true;
    return false;
}

double squared_distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct Normal {
    double x = 0.0;
    double y = 0.0;
    bool valid = false;
};

// Inward unit normals from the tangent of the low-pass-smoothed contour
// coordinates; raw raster tangents jitter by ten degrees and more. The sign
// is fixed by probing two pixels into the mask.
std::vector<Normal> inward_normals(const Contour& contour, const BinaryMask& mask,
                                   int bandwidth) {
    const int length = contour.length();
    std::vector<double> xs(static_cast<std::size_t>(length));
    std::vector<double> ys(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) {
        xs[static_cast<std::size_t>(i)] = contour.points[static_cast<std::size_t>(i)].x;
        ys[static_cast<std::size_t>(i)] = contour.points[static_cast<std::size_t>(i)].y;
    }
    const std::vector<double> sx = lowpass_dft(xs, bandwidth);
    const std::vector<double> sy = lowpass_dft(ys, bandwidth);

    std::vector<Normal> normals(static_cast<std::size_t>(length));
    const int reach = 2;
    if (length < 2 * reach + 1) return normals;
    for (int i = 0; i < length; ++i) {
        const std::size_t before = static_cast<std::size_t>(((i - reach) % length + length) % length);
        const std::size_t after = static_cast<std::size_t>((i + reach) % length);
        const double tx = sx[after] - sx[before];
        const double ty = sy[after] - sy[before];
        const double norm = std::hypot(tx, ty);
        if (norm == 0.0) continue;
        const double nx = -ty / norm;
        const double ny = tx / norm;
        const Point at = contour.points[static_cast<std::size_t>(i)];
        const bool pos_inside = mask.test(at.x + static_cast<int>(std::lround(2.0 * nx)),
                                          at.y + static_cast<int>(std::lround(2.0 * ny)));
        const bool neg_inside = mask.test(at.x - static_cast<int>(std::lround(2.0 * nx)),
                                          at.y - static_cast<int>(std::lround(2.0 * ny)));
        if (pos_inside == neg_inside) continue;
        normals[static_cast<std::size_t>(i)] = {pos_inside ? nx : -nx, pos_inside ? ny : -ny, true};
    }
    return normals;
}

// A bottleneck chord connects boundary flanks that face each other, so it
// runs along the inward normals of both endpoints. Oblique pairs (across two
// different necks, or along a cut scar) fail this.
bool chord_aligned(const BottleneckCandidate& a, const BottleneckCandidate& b,
                   std::span<const Normal> normals, double min_alignment) {
    const double dx = b.position.x - a.position.x;
    const double dy = b.position.y - a.position.y;
    const double norm = std::hypot(dx, dy);
    if (norm == 0.0) return false;
    const Normal& na = normals[static_cast<std::size_t>(a.contour_index)];
    const Normal& nb = normals[static_cast<std::size_t>(b.contour_index)];
    if (na.valid && (dx * na.x + dy * na.y) / norm < min_alignment) return false;
    if (nb.valid && -(dx * nb.x + dy * nb.y) / norm < min_alignment) return false;
    return true;
}

std::optional<std::pair<Point, Point>> choose_aligned_pair(
    std::span<const BottleneckCandidate> part1, std::span<const BottleneckCandidate> part2,
    std::span<const Normal> normals, double min_alignment) {
    std::optional<std::pair<Point, Point>> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const BottleneckCandidate& a : part1) {
        for (const BottleneckCandidate& b : part2) {
            if (a.position == b.position) continue;
            const double d2 = squared_distance(a.position, b.position);
            if (d2 >= best_d2) continue;
            if (!chord_aligned(a, b, normals, min_alignment)) continue;
            best_d2 = d2;
            best = std::make_pair(a.position, b.position);
        }
    }
    return best;
}

struct Recursion {
    const SplitConfig& config;
    int width;
    int height;
    int next_label;
    SplitResult result;

    void visit(const Clump& clump, int depth);
};

void Recursion::visit(const Clump& clump, int depth) {
    SplitStep step;
    step.clump_label = clump.label;

    if (depth >= config.max_depth) {
        step.reason = TerminalReason::max_depth;
        result.trace.steps.push_back(std::move(step));
        result.cells.push_back(clump);
        return;
    }

    Classification cls = classify(clump, config, width, height);
    step.concave_count = cls.parts.count();
    if (!cls.overlapped) {
        step.reason = TerminalReason::single_cell;
        result.trace.steps.push_back(std::move(step));
        result.cells.push_back(clump);
        return;
    }

    const BinaryMask clump_mask = mask_from_pixels(clump.pixels, width, height);
    const Contour contour = trace_contour(clump, clump_mask);
    if (contour.length() < 2 * config.half_window + 1) {
        // too short for the slope fits; degenerate tiny clump
        step.reason = TerminalReason::single_cell;
        result.trace.steps.push_back(std::move(step));
        result.cells.push_back(clump);
        return;
    }

    const std::vector<double> raw = radial_signature(contour, clump.centroid);
    const std::vector<double> smoothed = lowpass_dft(raw, config.bandwidth);
    const SddProfile profile = sdd_profile(smoothed, config.half_window, config.prominence_floor);

    std::vector<BottleneckCandidate> candidates;
    candidates.reserve(profile.extrema.size());
    for (const Extremum& e : profile.extrema)
        candidates.push_back({e.index, contour.points[static_cast<std::size_t>(e.index)]});
    step.candidates.reserve(candidates.size());
    for (const BottleneckCandidate& c : candidates) step.candidates.push_back(c.position);

    // Part pairs in decreasing combined-area order: the two largest parts
    // first, smaller flanks only when the leading pair yields nothing (the
    // true neck flank of a daughter clump is often a minor part).
    std::vector<std::pair<int, int>> part_pairs;
    for (int i = 0; i < cls.parts.count(); ++i)
        for (int j = i + 1; j < cls.parts.count(); ++j) part_pairs.push_back({i, j});
    std::stable_sort(part_pairs.begin(), part_pairs.end(),
                     [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                         return cls.parts.parts[a.first].area() + cls.parts.parts[a.second].area() >
                                cls.parts.parts[b.first].area() + cls.parts.parts[b.second].area();
                     });
    constexpr std::size_t max_part_pairs = 8;
    if (part_pairs.size() > max_part_pairs) part_pairs.resize(max_part_pairs);

    const std::vector<Normal> normals = inward_normals(contour, clump_mask, config.bandwidth);

    std::optional<std::pair<Point, Point>> chosen;
    for (std::size_t pi = 0; pi < part_pairs.size() && !chosen; ++pi) {
        const auto [i, j] = part_pairs[pi];
        ValidatedCandidates validated =
            validate_bottlenecks(candidates, cls.parts.parts[i], cls.parts.parts[j]);
        chosen = choose_aligned_pair(validated.part1, validated.part2, normals,
                                     config.min_pair_alignment);
        if (pi == 0 || chosen) {
            step.validated_part1.clear();
            step.validated_part2.clear();
            for (const BottleneckCandidate& c : validated.part1)
                step.validated_part1.push_back(c.position);
            for (const BottleneckCandidate& c : validated.part2)
                step.validated_part2.push_back(c.position);
        }
    }

    step.chosen = chosen;
    if (!chosen) {
        step.reason = TerminalReason::no_valid_pair;
        result.trace.steps.push_back(std::move(step));
        result.cells.push_back(clump);
        return;
    }

    std::optional<BinaryMask> cut = try_cut_line(clump_mask, chosen->first, chosen->second);
    if (!cut) {
        step.reason = TerminalReason::cut_ineffective;
        result.trace.steps.push_back(std::move(step));
        result.cells.push_back(clump);
        return;
    }

    step.cut_applied = true;
    for (const Point& p : clump.pixels)
        if (!cut->at(p.x, p.y)) result.cut_pixels.push_back(p);

    std::vector<Clump> daughters = label_components(*cut);
    for (Clump& d : daughters) d.label = ++next_label;
    result.trace.steps.push_back(std::move(step));

    for (const Clump& d : daughters) visit(d, depth + 1);
}

} // namespace

void SplitConfig::validate() const {
    if (bandwidth <= 0) throw std::invalid_argument("bandwidth must be positive");
    if (half_window < 2) throw std::invalid_argument("half window must be at least 2");
    if (prominence_floor <= 0.0 || prominence_floor > 1.0)
        throw std::invalid_argument("prominence floor must be in (0, 1]");
    if (min_concave_area_px <= 0) throw std::invalid_argument("min concave area must be positive");
    if (min_concave_area_frac < 0.0 || min_concave_area_frac >= 1.0)
        throw std::invalid_argument("min concave area fraction must be in [0, 1)");
    if (min_pair_alignment < 0.0 || min_pair_alignment > 1.0)
        throw std::invalid_argument("pair alignment must be in [0, 1]");
    if (max_depth < 1) throw std::invalid_argument("max depth must be at least 1");
}

int SplitConfig::effective_min_concave_area(std::size_t clump_area) const {
    const double frac = min_concave_area_frac * static_cast<double>(clump_area);
    return std::max(min_concave_area_px, static_cast<int>(std::ceil(frac)));
}

std::string to_string(TerminalReason reason) {
    switch (reason) {
    case TerminalReason::none: return "none";
    case TerminalReason::single_cell: return "single-cell";
    case TerminalReason::no_valid_pair: return "no-valid-pair";
    case TerminalReason::cut_ineffective: return "cut-ineffective";
    case TerminalReason::max_depth: return "max-depth";
    }
    return "unknown";
}

Classification classify(const Clump& clump, const SplitConfig& config, int mask_width,
                        int mask_height) {
    const BinaryMask hull = convex_hull_mask(clump, mask_width, mask_height);
    ConcaveSet parts =
        concave_parts(clump, hull, config.effective_min_concave_area(clump.area()));
    const bool overlapped = parts.count() >= 2;
    return {overlapped, std::move(parts)};
}

ValidatedCandidates validate_bottlenecks(std::span<const BottleneckCandidate> candidates,
                                         const ConcavePart& part1, const ConcavePart& part2) {
    const auto set1 = pixel_set(part1);
    const auto set2 = pixel_set(part2);
    ValidatedCandidates out;
    for (const BottleneckCandidate& c : candidates) {
        if (near_part(set1, c.position))
            out.part1.push_back(c);
        else if (near_part(set2, c.position))
            out.part2.push_back(c);
    }
    return out;
}

std::optional<std::pair<Point, Point>> choose_pair(std::span<const BottleneckCandidate> part1,
                                                   std::span<const BottleneckCandidate> part2) {
    std::optional<std::pair<Point, Point>> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const BottleneckCandidate& a : part1) {
        for (const BottleneckCandidate& b : part2) {
            if (a.position == b.position) continue; // a zero-length line cannot cut
            const double d2 = squared_distance(a.position, b.position);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = std::make_pair(a.position, b.position);
            }
        }
    }
    return best;
}

SplitResult split_clump(const Clump& clump, const BinaryMask& mask, const SplitConfig& config,
                        int depth) {
    config.validate();
    if (depth > config.max_depth) throw std::invalid_argument("depth exceeds max depth");
    Recursion rec{config, mask.width(), mask.height(), clump.label, {}};
    rec.visit(clump, depth);
    return std::move(rec.result);
}

} // namespace clumpsplit
