#include <doctest.h>

#include <set>

#include "clumpsplit/pipeline.hpp"
#include "test_support.hpp"

using namespace clumpsplit;
using test_support::mask_from_predicate;

TEST_CASE("run on a blank mask yields no cells") {
    SegmentationResult r = run(BinaryMask(32, 32));
    CHECK(r.cells.empty());
    CHECK(r.initial_clumps == 0);
    CHECK(r.label_map.max_label() == 0);
    CHECK(!r.threshold_used.has_value());
}

TEST_CASE("run keeps three disjoint ellipses untouched") {
    BinaryMask mask = mask_from_predicate(220, 80, [](int x, int y) {
        auto inside = [&](double cx, double cy, double a, double b) {
            const double u = (x - cx) / a, v = (y - cy) / b;
            return u * u + v * v <= 1.0;
        };
        return inside(40, 40, 24, 14) || inside(110, 40, 18, 18) || inside(180, 40, 25, 12);
    });
    SegmentationResult r = run(mask);
    CHECK(r.initial_clumps == 3);
    REQUIRE(r.cells.size() == 3);
    // pixels unchanged: label map foreground equals the input mask
    for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 220; ++x) CHECK((r.label_map.at(x, y) != 0) == mask.at(x, y));
    CHECK(r.cut_pixels.empty());
    // canonical labels follow raster order of centroids (same row here)
    CHECK(r.cells[0].centroid.x < r.cells[1].centroid.x);
    CHECK(r.cells[1].centroid.x < r.cells[2].centroid.x);
}

TEST_CASE("run splits a generated two-ellipse scene to VAC 1") {
    SceneSpec spec;
    spec.min_count = 2;
    spec.max_count = 2;
    SyntheticScene scene = generate_scene(spec, 77);
    SegmentationResult r = run(scene.gray);
    REQUIRE(r.threshold_used.has_value());
    VacReport report = evaluate(r.cells, r.label_map.width(), r.label_map.height(), scene.truth);
    CHECK(report.vac == doctest::Approx(1.0));
    CHECK(report.n_segment == 2);
}

TEST_CASE("run conserves pixels between labels and cuts") {
    SceneSpec spec;
    SyntheticScene scene = generate_scene(spec, 4242);
    SegmentationResult r = run(scene.gray);
    BinaryMask mask = apply_threshold(scene.gray, *r.threshold_used);

    std::set<std::pair<int, int>> covered;
    for (const CellRecord& cell : r.cells)
        for (const Point& p : cell.pixels) CHECK(covered.insert({p.x, p.y}).second);
    for (const Point& p : r.cut_pixels) CHECK(covered.insert({p.x, p.y}).second);
    CHECK(covered.size() == mask.count());
    for (const auto& [x, y] : covered) CHECK(mask.at(x, y));

    // label map mirrors cells exactly
    for (const CellRecord& cell : r.cells)
        for (const Point& p : cell.pixels)
            CHECK(r.label_map.at(p.x, p.y) == static_cast<std::uint16_t>(cell.label));
}

TEST_CASE("run is deterministic across worker counts") {
    SceneSpec spec;
    spec.min_count = 4;
    spec.max_count = 4;
    for (std::uint64_t seed : {8ull, 21ull, 34ull}) {
        SyntheticScene scene = generate_scene(spec, seed);
        PipelineConfig serial;
        serial.workers = 1;
        PipelineConfig parallel;
        parallel.workers = 4;
        SegmentationResult a = run(scene.gray, serial);
        SegmentationResult b = run(scene.gray, parallel);
        CHECK(a.label_map == b.label_map);
        REQUIRE(a.cells.size() == b.cells.size());
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
            CHECK(a.cells[i].label == b.cells[i].label);
            CHECK(a.cells[i].pixels == b.cells[i].pixels);
        }
    }
}

TEST_CASE("run propagates the unimodal error for flat gray input") {
    GrayImage flat(64, 64, 128);
    CHECK_THROWS_AS(run(flat), unimodal_histogram_error);
}

TEST_CASE("run honors the invert flag") {
    // dark cells on a bright background
    SceneSpec spec;
    spec.min_count = 2;
    spec.max_count = 2;
    spec.foreground = 40;
    spec.background = 210;
    SyntheticScene scene = generate_scene(spec, 303);
    PipelineConfig config;
    config.invert = true;
    SegmentationResult r = run(scene.gray, config);
    VacReport report = evaluate(r.cells, r.label_map.width(), r.label_map.height(), scene.truth);
    CHECK(report.vac == doctest::Approx(1.0));
}

TEST_CASE("run validates its config") {
    PipelineConfig config;
    config.workers = 0;
    CHECK_THROWS_AS(run(BinaryMask(8, 8), config), std::invalid_argument);
    config = {};
    config.split.bandwidth = -3;
    CHECK_THROWS_AS(run(BinaryMask(8, 8), config), std::invalid_argument);
}
