#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "clumpsplit/geometry.hpp"
#include "clumpsplit/raster.hpp"

namespace test_support {

using clumpsplit::BinaryMask;
using clumpsplit::Point;

inline BinaryMask mask_from_predicate(int width, int height,
                                      const std::function<bool(int, int)>& inside) {
    BinaryMask mask(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (inside(x, y)) mask.set(x, y, true);
    return mask;
}

inline BinaryMask circle_mask(int width, int height, double cx, double cy, double r) {
    return mask_from_predicate(width, height, [=](int x, int y) {
        return std::hypot(x - cx, y - cy) <= r;
    });
}

inline BinaryMask dumbbell_mask(int width, int height, double cx1, double cx2, double cy,
                                double r) {
    return mask_from_predicate(width, height, [=](int x, int y) {
        return std::hypot(x - cx1, y - cy) <= r || std::hypot(x - cx2, y - cy) <= r;
    });
}

// Independent hull oracle: gift wrapping plus an exact integer point-in-hull
// test, deliberately a different algorithm from the library's monotone chain.
inline std::vector<Point> jarvis_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;

    auto cross = [](Point o, Point a, Point b) {
        return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
               static_cast<long long>(a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull;
    const Point start = pts.front(); // lexicographically least
    Point on_hull = start;
    do {
        hull.push_back(on_hull);
        Point best = pts[0] == on_hull && pts.size() > 1 ? pts[1] : pts[0];
        for (const Point& q : pts) {
            if (q == on_hull) continue;
            const long long c = cross(on_hull, best, q);
            if (c < 0) {
                best = q;
            } else if (c == 0) {
                const long long db = static_cast<long long>(best.x - on_hull.x) * (best.x - on_hull.x) +
                                     static_cast<long long>(best.y - on_hull.y) * (best.y - on_hull.y);
                const long long dq = static_cast<long long>(q.x - on_hull.x) * (q.x - on_hull.x) +
                                     static_cast<long long>(q.y - on_hull.y) * (q.y - on_hull.y);
                if (dq > db) best = q;
            }
        }
        on_hull = best;
    } while (!(on_hull == start) && hull.size() <= pts.size());
    return hull;
}

inline bool point_in_hull(const std::vector<Point>& hull, Point p) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return p == hull[0];
    auto cross = [](Point o, Point a, Point b) {
        return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
               static_cast<long long>(a.y - o.y) * (b.x - o.x);
    };
    if (hull.size() == 2) {
        if (cross(hull[0], hull[1], p) != 0) return false;
        return p.x >= std::min(hull[0].x, hull[1].x) && p.x <= std::max(hull[0].x, hull[1].x) &&
               p.y >= std::min(hull[0].y, hull[1].y) && p.y <= std::max(hull[0].y, hull[1].y);
    }
    long long sign = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const long long c = cross(hull[i], hull[(i + 1) % hull.size()], p);
        if (c == 0) continue;
        if (sign == 0)
            sign = c > 0 ? 1 : -1;
        else if ((c > 0 ? 1 : -1) != sign)
            return false;
    }
    return true;
}

inline std::vector<double> random_signal(std::mt19937& rng, int length, double amplitude = 10.0) {
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    std::vector<double> out(static_cast<std::size_t>(length));
    for (double& v : out) v = dist(rng);
    return out;
}

} // namespace test_support
