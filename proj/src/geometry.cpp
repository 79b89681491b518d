#include "clumpsplit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace clumpsplit {

namespace {

// Clockwise 8-neighborhood in image coordinates (y down):
// 0:E, 1:SE, 2:S, 3:SW, 4:W, 5:NW, 6:N, 7:NE
constexpr int dx8[8] = {+1, +1, 0, -1, -1, -1, 0, +1};
constexpr int dy8[8] = {0, +1, +1, +1, 0, -1, -1, -1};

constexpr int dx4[4] = {+1, -1, 0, 0};
constexpr int dy4[4] = {0, 0, +1, -1};

int dir_from_delta(int dx, int dy) {
    for (int d = 0; d < 8; ++d)
        if (dx8[d] == dx && dy8[d] == dy) return d;
    return -1;
}

long long shoelace2(std::span<const Point> poly) {
    long long a2 = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        a2 += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    }
    return a2;
}

void rotate_to_min_yx(std::vector<Point>& pts) {
    if (pts.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (raster_less(pts[i], pts[best])) best = i;
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(best), pts.end());
}

// Flood fill over the mask starting at seed, 8-connected, restricted to
// pixels that are foreground and not yet visited.
std::vector<Point> flood8(const BinaryMask& mask, Point seed, std::vector<std::uint8_t>& visited) {
    const int w = mask.width();
    std::vector<Point> out;
    std::vector<Point> stack{seed};
    visited[static_cast<std::size_t>(seed.y) * w + seed.x] = 1;
    while (!stack.empty()) {
        Point p = stack.back();
        stack.pop_back();
        out.push_back(p);
        for (int d = 0; d < 8; ++d) {
            int nx = p.x + dx8[d];
            int ny = p.y + dy8[d];
            if (!mask.test(nx, ny)) continue;
            std::size_t i = static_cast<std::size_t>(ny) * w + nx;
            if (visited[i]) continue;
            visited[i] = 1;
            stack.push_back({nx, ny});
        }
    }
    return out;
}

long long cross(Point o, Point a, Point b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

// Monotone chain; returns hull vertices in counterclockwise shoelace order
// with collinear points removed. Degenerate inputs give 1 or 2 vertices.
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(),
              [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() >= 3 && shoelace2(hull) < 0)
        std::reverse(hull.begin(), hull.end());
    return hull;
}

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long ceil_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

void thicken_line(std::vector<Point>& line, Point p1, Point p2) {
    const bool x_major = std::abs(p2.x - p1.x) >= std::abs(p2.y - p1.y);
    const std::size_t n = line.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point p = line[i];
        line.push_back(x_major ? Point{p.x, p.y + 1} : Point{p.x + 1, p.y});
    }
}

// Number of 8-connected components among `component` pixels after the cut
// pixels are removed. Stops early once two are found.
int count_components_after_cut(std::span<const Point> component, const BinaryMask& cut_mask) {
    if (component.empty()) return 0;
    int minx = std::numeric_limits<int>::max(), miny = minx;
    int maxx = std::numeric_limits<int>::min(), maxy = maxx;
    for (const Point& p : component) {
        minx = std::min(minx, p.x);
        miny = std::min(miny, p.y);
        maxx = std::max(maxx, p.x);
        maxy = std::max(maxy, p.y);
    }
    const int bw = maxx - minx + 1;
    const int bh = maxy - miny + 1;
    BinaryMask local(bw, bh);
    std::size_t remaining = 0;
    for (const Point& p : component) {
        if (cut_mask.at(p.x, p.y)) { // survived the cut
            local.set(p.x - minx, p.y - miny, true);
            ++remaining;
        }
    }
    if (remaining == 0) return 0;

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(bw) * bh, 0);
    int components = 0;
    for (int y = 0; y < bh && components < 2; ++y) {
        for (int x = 0; x < bw; ++x) {
            if (!local.at(x, y) || visited[static_cast<std::size_t>(y) * bw + x]) continue;
            flood8(local, {x, y}, visited);
            if (++components >= 2) break;
        }
    }
    return components;
}

} // namespace

std::vector<Clump> label_components(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> label_of(static_cast<std::size_t>(w) * h, 0);

    int next_label = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!mask.at(x, y) || visited[i]) continue;
            ++next_label;
            for (const Point& p : flood8(mask, {x, y}, visited))
                label_of[static_cast<std::size_t>(p.y) * w + p.x] = next_label;
        }
    }

    std::vector<Clump> clumps(static_cast<std::size_t>(next_label));
    for (int k = 0; k < next_label; ++k) clumps[static_cast<std::size_t>(k)].label = k + 1;
    // second sweep puts each pixel list in raster order
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int lbl = label_of[static_cast<std::size_t>(y) * w + x];
            if (lbl > 0) clumps[static_cast<std::size_t>(lbl - 1)].pixels.push_back({x, y});
        }
    }
    for (Clump& c : clumps) c.centroid = centroid(c.pixels);
    return clumps;
}

PointF centroid(std::span<const Point> pixels) {
    if (pixels.empty()) throw std::invalid_argument("empty clump");
    double sx = 0.0, sy = 0.0;
    for (const Point& p : pixels) {
        sx += p.x;
        sy += p.y;
    }
    const double n = static_cast<double>(pixels.size());
    return {sx / n, sy / n};
}

Contour trace_contour(const Clump& clump, const BinaryMask& mask) {
    if (clump.pixels.empty()) throw std::invalid_argument("empty clump");

    const Point start = *std::min_element(
        clump.pixels.begin(), clump.pixels.end(),
        [](Point a, Point b) { return raster_less(a, b); });

    bool has_neighbor = false;
    for (int d = 0; d < 8 && !has_neighbor; ++d)
        has_neighbor = mask.test(start.x + dx8[d], start.y + dy8[d]);
    if (!has_neighbor) return Contour{{start}};

    // start is the minimal (y, x) pixel, so its west neighbor is background
    const Point back0{start.x - 1, start.y};

    auto step = [&](Point cur, Point back) -> std::pair<Point, Point> {
        int db = dir_from_delta(back.x - cur.x, back.y - cur.y);
        for (int t = 1; t <= 8; ++t) {
            int d = (db + t) & 7;
            int nx = cur.x + dx8[d];
            int ny = cur.y + dy8[d];
            if (mask.test(nx, ny)) {
                int prev = (d + 7) & 7;
                return {{nx, ny}, {cur.x + dx8[prev], cur.y + dy8[prev]}};
            }
        }
        return {cur, back}; // unreachable: has_neighbor checked above
    };

    // The walk on (pixel, backtrack) states is deterministic, so it ends in a
    // cycle; the artificial initial backtrack may never recur (the cycle can
    // enter the start pixel from elsewhere), hence plain Jacob stopping can
    // loop. Detecting the first repeated state and emitting its cycle handles
    // every shape.
    std::unordered_map<std::uint64_t, std::size_t> seen;
    std::vector<Point> walk;
    Point cur = start;
    Point back = back0;
    std::size_t cycle_start = 0;
    for (;;) {
        const int back_dir = dir_from_delta(back.x - cur.x, back.y - cur.y);
        const std::uint64_t key =
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cur.y)) << 36) |
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cur.x)) << 4) |
            static_cast<std::uint64_t>(back_dir);
        auto [it, inserted] = seen.try_emplace(key, walk.size());
        if (!inserted) {
            cycle_start = it->second;
            break;
        }
        walk.push_back(cur);
        auto [next, nback] = step(cur, back);
        cur = next;
        back = nback;
    }
    std::vector<Point> points(walk.begin() + static_cast<std::ptrdiff_t>(cycle_start), walk.end());

    if (shoelace2(points) < 0) std::reverse(points.begin(), points.end());
    rotate_to_min_yx(points);
    return Contour{std::move(points)};
}

BinaryMask convex_hull_mask(const Clump& clump, int width, int height) {
    if (clump.pixels.empty()) throw std::invalid_argument("empty clump");
    BinaryMask out(width, height);

    std::vector<Point> hull = convex_hull(clump.pixels);
    if (hull.size() == 1) {
        out.set(hull[0].x, hull[0].y, true);
        return out;
    }
    if (hull.size() == 2) {
        for (const Point& p : bresenham_line(hull[0], hull[1]))
            if (out.in_bounds(p.x, p.y)) out.set(p.x, p.y, true);
        return out;
    }

    int miny = hull[0].y, maxy = hull[0].y;
    for (const Point& p : hull) {
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    miny = std::max(miny, 0);
    maxy = std::min(maxy, height - 1);

    // Exact integer half-plane fill: pixel (x, y) is inside iff
    // cross(b - a, p - a) >= 0 for every CCW edge a->b.
    const std::size_t n = hull.size();
    for (int y = miny; y <= maxy; ++y) {
        long long xlo = std::numeric_limits<long long>::min();
        long long xhi = std::numeric_limits<long long>::max();
        bool row_ok = true;
        for (std::size_t i = 0; i < n && row_ok; ++i) {
            const Point a = hull[i];
            const Point b = hull[(i + 1) % n];
            const long long c1 = static_cast<long long>(b.x - a.x) * (y - a.y);
            const long long c2 = b.y - a.y;
            if (c2 == 0) {
                if (c1 < 0) row_ok = false;
                continue;
            }
            const long long rhs = c1 + c2 * a.x;
            if (c2 > 0)
                xhi = std::min(xhi, floor_div(rhs, c2));
            else
                xlo = std::max(xlo, ceil_div(rhs, c2));
        }
        if (!row_ok || xlo > xhi) continue;
        const int x0 = static_cast<int>(std::max<long long>(xlo, 0));
        const int x1 = static_cast<int>(std::min<long long>(xhi, width - 1));
        for (int x = x0; x <= x1; ++x) out.set(x, y, true);
    }
    return out;
}

ConcaveSet concave_parts(const Clump& clump, const BinaryMask& hull, int min_area) {
    const int w = hull.width();
    const int h = hull.height();
    BinaryMask diff = hull;
    for (const Point& p : clump.pixels) {
        if (!diff.test(p.x, p.y))
            throw std::invalid_argument("hull does not cover clump");
        diff.set(p.x, p.y, false);
    }

    // 4-connected components of hull minus clump
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<ConcavePart> parts;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (!diff.at(x, y) || visited[i]) continue;
            ConcavePart part;
            std::vector<Point> stack{{x, y}};
            visited[i] = 1;
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                part.pixels.push_back(p);
                for (int d = 0; d < 4; ++d) {
                    int nx = p.x + dx4[d];
                    int ny = p.y + dy4[d];
                    if (!diff.test(nx, ny)) continue;
                    std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                    if (visited[j]) continue;
                    visited[j] = 1;
                    stack.push_back({nx, ny});
                }
            }
            if (static_cast<int>(part.area()) >= min_area)
                parts.push_back(std::move(part));
        }
    }
    std::stable_sort(parts.begin(), parts.end(),
                     [](const ConcavePart& a, const ConcavePart& b) { return a.area() > b.area(); });
    return ConcaveSet{std::move(parts)};
}

std::vector<Point> bresenham_line(Point p1, Point p2) {
    std::vector<Point> out;
    int x = p1.x, y = p1.y;
    const int dx = std::abs(p2.x - p1.x);
    const int dy = -std::abs(p2.y - p1.y);
    const int sx = p1.x < p2.x ? 1 : -1;
    const int sy = p1.y < p2.y ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        out.push_back({x, y});
        if (x == p2.x && y == p2.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return out;
}

std::optional<BinaryMask> try_cut_line(const BinaryMask& mask, Point p1, Point p2) {
    if (!mask.in_bounds(p1.x, p1.y) || !mask.in_bounds(p2.x, p2.y))
        throw std::invalid_argument("cut endpoints out of bounds");

    std::vector<Point> line = bresenham_line(p1, p2);

    // the clump whose separation the cut must achieve: the one containing
    // p1, or the first one the segment touches when p1 is background
    std::vector<Point> component;
    for (const Point& p : line) {
        if (!mask.at(p.x, p.y)) continue;
        std::vector<std::uint8_t> visited(
            static_cast<std::size_t>(mask.width()) * mask.height(), 0);
        component = flood8(mask, p, visited);
        break;
    }
    for (int thickness = 1; thickness <= 2; ++thickness) {
        if (thickness == 2) thicken_line(line, p1, p2);
        BinaryMask out = mask;
        for (const Point& p : line)
            if (out.in_bounds(p.x, p.y)) out.set(p.x, p.y, false);
        if (count_components_after_cut(component, out) >= 2) return out;
    }
    return std::nullopt;
}

BinaryMask cut_line(const BinaryMask& mask, Point p1, Point p2) {
    if (auto cut = try_cut_line(mask, p1, p2)) return std::move(*cut);
    throw std::runtime_error("cut ineffective");
}

BinaryMask mask_from_pixels(std::span<const Point> pixels, int width, int height) {
    BinaryMask out(width, height);
    for (const Point& p : pixels) out.set(p.x, p.y, true);
    return out;
}

} // namespace clumpsplit
