#include "clumpsplit/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace clumpsplit {

namespace {

bool canonical_cell_order(const CellRecord& a, const CellRecord& b) {
    if (a.centroid.y != b.centroid.y) return a.centroid.y < b.centroid.y;
    if (a.centroid.x != b.centroid.x) return a.centroid.x < b.centroid.x;
    return raster_less(a.pixels.front(), b.pixels.front()); // exact tie-break
}

} // namespace

void PipelineConfig::validate() const {
    split.validate();
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
}

SegmentationResult run(const BinaryMask& mask, const PipelineConfig& config) {
    config.validate();

    SegmentationResult result;
    result.config = config;
    result.label_map = LabelMap(mask.width(), mask.height());

    const std::vector<Clump> clumps = label_components(mask);
    result.initial_clumps = static_cast<int>(clumps.size());

    std::vector<SplitResult> per_clump(clumps.size());
    auto process = [&](std::size_t i) {
        per_clump[i] = split_clump(clumps[i], mask, config.split);
    };
    const int workers =
        std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(clumps.size(), 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < clumps.size(); ++i) process(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = static_cast<std::size_t>(t); i < clumps.size();
                     i += static_cast<std::size_t>(workers))
                    process(i);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    std::vector<CellRecord> cells;
    for (std::size_t i = 0; i < clumps.size(); ++i) {
        result.traces.push_back({clumps[i].label, std::move(per_clump[i].trace)});
        for (const Point& p : per_clump[i].cut_pixels) result.cut_pixels.push_back(p);
        for (Clump& c : per_clump[i].cells)
            cells.push_back({0, std::move(c.pixels), c.centroid});
    }

    // canonical relabel keeps the output independent of recursion and
    // scheduling order
    std::sort(cells.begin(), cells.end(), canonical_cell_order);
    if (cells.size() > 65535) throw std::runtime_error("more than 65535 cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].label = static_cast<int>(i) + 1;
        for (const Point& p : cells[i].pixels)
            result.label_map.set(p.x, p.y, static_cast<std::uint16_t>(i + 1));
    }
    result.cells = std::move(cells);
    return result;
}

SegmentationResult run(const GrayImage& image, const PipelineConfig& config) {
    config.validate();
    const int threshold = sdd_threshold(image, config.threshold);
    BinaryMask mask = apply_threshold(image, threshold);
    if (config.invert) {
        BinaryMask flipped(mask.width(), mask.height());
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                flipped.set(x, y, !mask.at(x, y));
        mask = std::move(flipped);
    }
    SegmentationResult result = run(mask, config);
    result.threshold_used = threshold;
    return result;
}

} // namespace clumpsplit
