#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "clumpsplit/evaluation.hpp"
#include "clumpsplit/geometry.hpp"

using namespace clumpsplit;

namespace {

LabelMap map_from_grid(const std::vector<std::vector<int>>& rows) {
    LabelMap map(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
            map.set(x, y, static_cast<std::uint16_t>(rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]));
    return map;
}

// Brute-force matcher working purely on pixel sets; an independent
// reimplementation of the correspondence rule.
VacCounts oracle_match(const std::vector<CellRecord>& preds, const LabelMap& truth) {
    std::map<int, std::set<std::pair<int, int>>> truth_sets;
    for (int y = 0; y < truth.height(); ++y)
        for (int x = 0; x < truth.width(); ++x)
            if (truth.at(x, y) != 0) truth_sets[truth.at(x, y)].insert({x, y});

    std::map<int, int> truth_partner_count;
    for (auto& [lbl, pixels] : truth_sets) truth_partner_count[lbl] = 0;

    std::vector<std::vector<int>> pred_links(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::set<std::pair<int, int>> pset;
        for (const Point& p : preds[i].pixels) pset.insert({p.x, p.y});
        const int cx = static_cast<int>(std::llround(preds[i].centroid.x));
        const int cy = static_cast<int>(std::llround(preds[i].centroid.y));
        for (auto& [lbl, tset] : truth_sets) {
            std::size_t inter = 0;
            for (auto& px : pset) inter += tset.contains(px);
            const std::size_t uni = pset.size() + tset.size() - inter;
            const double iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
            const bool centroid_inside =
                truth.in_bounds(cx, cy) && truth.at(cx, cy) == lbl;
            if (iou >= 0.5 || centroid_inside) {
                pred_links[i].push_back(lbl);
                ++truth_partner_count[lbl];
            }
        }
    }

    VacCounts counts;
    for (auto& links : pred_links) {
        if (links.empty()) ++counts.n_add;
        if (links.size() >= 2) counts.n_merge += static_cast<std::int64_t>(links.size()) - 1;
        if (links.size() == 1 && truth_partner_count[links[0]] == 1) ++counts.n_segment;
    }
    for (auto& [lbl, n] : truth_partner_count) {
        if (n == 0) ++counts.n_missing;
        if (n >= 2) counts.n_split += n - 1;
    }
    return counts;
}

std::vector<CellRecord> random_prediction(std::mt19937& rng, int w, int h, int cells) {
    // random rectangles, possibly overlapping truth cells in odd ways
    std::uniform_int_distribution<int> xs(0, w - 8), ys(0, h - 8), size(2, 7);
    std::vector<CellRecord> out;
    std::set<std::pair<int, int>> taken;
    for (int i = 0; i < cells; ++i) {
        CellRecord cell;
        cell.label = i + 1;
        const int x0 = xs(rng), y0 = ys(rng), sw = size(rng), sh = size(rng);
        for (int y = y0; y < y0 + sh; ++y)
            for (int x = x0; x < x0 + sw; ++x)
                if (taken.insert({x, y}).second) cell.pixels.push_back({x, y});
        if (cell.pixels.empty()) continue;
        cell.centroid = centroid(cell.pixels);
        out.push_back(std::move(cell));
    }
    return out;
}

} // namespace

TEST_CASE("match on identical maps counts every cell as segment") {
    LabelMap truth = map_from_grid({
        {1, 1, 0, 2, 2},
        {1, 1, 0, 2, 2},
        {0, 0, 0, 0, 0},
        {3, 3, 3, 0, 0},
    });
    auto cells = cells_from_label_map(truth);
    VacCounts c = match(cells, truth.width(), truth.height(), truth);
    CHECK(c.n_segment == 3);
    CHECK(c.n_split == 0);
    CHECK(c.n_merge == 0);
    CHECK(c.n_add == 0);
    CHECK(c.n_missing == 0);
    CHECK(vac(c) == doctest::Approx(1.0));
}

TEST_CASE("match flags a union of two truth cells as one merge") {
    LabelMap truth = map_from_grid({
        {1, 1, 1, 2, 2, 2},
        {1, 1, 1, 2, 2, 2},
    });
    LabelMap pred = map_from_grid({
        {1, 1, 1, 1, 1, 1},
        {1, 1, 1, 1, 1, 1},
    });
    auto cells = cells_from_label_map(pred);
    VacCounts c = match(cells, pred.width(), pred.height(), truth);
    CHECK(c.n_merge == 1);
    CHECK(c.n_segment == 0);
    CHECK(c.n_missing == 0);
    CHECK(c.n_add == 0);
}

TEST_CASE("match equals the brute-force oracle on random scenes") {
    std::mt19937 rng(2025);
    for (int round = 0; round < 60; ++round) {
        LabelMap truth(24, 18);
        std::uniform_int_distribution<int> xs(0, 16), ys(0, 10), size(3, 7);
        const int truth_cells = 1 + round % 4;
        for (int i = 1; i <= truth_cells; ++i) {
            const int x0 = xs(rng), y0 = ys(rng), sw = size(rng), sh = size(rng);
            for (int y = y0; y < std::min(18, y0 + sh); ++y)
                for (int x = x0; x < std::min(24, x0 + sw); ++x)
                    truth.set(x, y, static_cast<std::uint16_t>(i));
        }
        auto preds = random_prediction(rng, 24, 18, 1 + round % 5);
        CHECK(match(preds, 24, 18, truth) == oracle_match(preds, truth));
    }
}

TEST_CASE("match rejects dimension mismatches") {
    LabelMap truth(8, 8);
    CHECK_THROWS_WITH_AS(match({}, 9, 8, truth), "dimension mismatch", std::invalid_argument);
}

TEST_CASE("match is invariant under prediction relabeling") {
    LabelMap truth = map_from_grid({
        {1, 1, 0, 2, 2},
        {1, 1, 0, 2, 2},
    });
    auto cells = cells_from_label_map(truth);
    std::reverse(cells.begin(), cells.end());
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].label = static_cast<int>(100 - i);
    VacCounts c = match(cells, truth.width(), truth.height(), truth);
    CHECK(c.n_segment == 2);
    CHECK(c.total() == 2);
}

TEST_CASE("vac reproduces the published table rows") {
    CHECK(vac({3515, 53, 86, 15, 29}) == doctest::Approx(0.9505).epsilon(5e-5));
    CHECK(vac({3568, 11, 97, 13, 9}) == doctest::Approx(0.9648).epsilon(5e-5));
    CHECK(vac({7, 0, 0, 0, 0}) == doctest::Approx(1.0));
    CHECK_THROWS_WITH_AS(vac({0, 0, 0, 0, 0}), "empty evaluation", std::invalid_argument);
}

TEST_CASE("vac is monotone in n_segment") {
    double prev = 0.0;
    for (std::int64_t seg = 1; seg <= 50; seg += 7) {
        const double v = vac({seg, 3, 2, 1, 4});
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("generate_scene with count 1 makes one ellipse") {
    SceneSpec spec;
    spec.min_count = 1;
    spec.max_count = 1;
    SyntheticScene scene = generate_scene(spec, 5);
    CHECK(scene.ellipses.size() == 1);
    CHECK(scene.truth.max_label() == 1);
}

TEST_CASE("generate_scene is bit-deterministic per seed") {
    SceneSpec spec;
    SyntheticScene a = generate_scene(spec, 908);
    SyntheticScene b = generate_scene(spec, 908);
    CHECK(a.truth == b.truth);
    CHECK(a.gray == b.gray);
    REQUIRE(a.ellipses.size() == b.ellipses.size());
    for (std::size_t i = 0; i < a.ellipses.size(); ++i) {
        CHECK(a.ellipses[i].center == b.ellipses[i].center);
        CHECK(a.ellipses[i].semi_x == b.ellipses[i].semi_x);
        CHECK(a.ellipses[i].semi_y == b.ellipses[i].semi_y);
        CHECK(a.ellipses[i].rotation == b.ellipses[i].rotation);
    }
    SyntheticScene c = generate_scene(spec, 909);
    CHECK(a.gray != c.gray);
}

TEST_CASE("generate_scene never makes more clumps than ellipses") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        SceneSpec spec;
        SyntheticScene scene = generate_scene(spec, seed);
        BinaryMask fg(scene.width, scene.height);
        for (int y = 0; y < scene.height; ++y)
            for (int x = 0; x < scene.width; ++x) fg.set(x, y, scene.truth.at(x, y) != 0);
        CHECK(label_components(fg).size() <= scene.ellipses.size());
        CHECK(scene.truth.max_label() == scene.ellipses.size());
    }
}

TEST_CASE("generate_scene validates its spec and reports infeasible packing") {
    SceneSpec spec;
    spec.min_count = 0;
    CHECK_THROWS_AS(generate_scene(spec, 1), std::invalid_argument);
    spec = {};
    spec.width = 64; // margin for 40 px axes cannot fit
    spec.height = 64;
    CHECK_THROWS_WITH_AS(generate_scene(spec, 1), "infeasible packing", std::runtime_error);
}

TEST_CASE("ellipse support radius matches the boundary") {
    Ellipse e{{0.0, 0.0}, 20.0, 10.0, 0.7};
    for (double theta = 0.0; theta < 6.28; theta += 0.37) {
        const double ux = std::cos(theta), uy = std::sin(theta);
        const double r = e.support_radius(ux, uy);
        CHECK(e.contains(0.999 * r * ux, 0.999 * r * uy));
        CHECK(!e.contains(1.001 * r * ux, 1.001 * r * uy));
    }
}

TEST_CASE("cells_from_label_map computes mean centroids") {
    LabelMap map = map_from_grid({
        {0, 5, 5, 0},
        {0, 5, 5, 0},
    });
    auto cells = cells_from_label_map(map);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].label == 5);
    CHECK(cells[0].area() == 4);
    CHECK(cells[0].centroid.x == doctest::Approx(1.5));
    CHECK(cells[0].centroid.y == doctest::Approx(0.5));
}
