#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "clumpsplit/image_io.hpp"
#include "clumpsplit/overlay.hpp"
#include "clumpsplit/pipeline.hpp"

using json = nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_config = 2;
constexpr int exit_unimodal = 3;

std::string strip_extension(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

json point_json(clumpsplit::Point p) { return json::array({p.x, p.y}); }

json config_json(const clumpsplit::PipelineConfig& cfg) {
    return {
        {"bandwidth", cfg.split.bandwidth},
        {"half_window", cfg.split.half_window},
        {"prominence_floor", cfg.split.prominence_floor},
        {"min_concave_area_px", cfg.split.min_concave_area_px},
        {"min_concave_area_frac", cfg.split.min_concave_area_frac},
        {"max_depth", cfg.split.max_depth},
        {"hist_bandwidth", cfg.threshold.hist_bandwidth},
        {"min_tail_fraction", cfg.threshold.min_tail_fraction},
        {"invert", cfg.invert},
        {"workers", cfg.workers},
    };
}

json trace_json(const clumpsplit::SegmentationResult& result) {
    json traces = json::array();
    for (const clumpsplit::ClumpTrace& ct : result.traces) {
        json steps = json::array();
        for (const clumpsplit::SplitStep& s : ct.trace.steps) {
            json candidates = json::array();
            for (const clumpsplit::Point& p : s.candidates) candidates.push_back(point_json(p));
            json validated = json::array();
            for (const clumpsplit::Point& p : s.validated_part1) validated.push_back(point_json(p));
            for (const clumpsplit::Point& p : s.validated_part2) validated.push_back(point_json(p));
            json step = {
                {"label", s.clump_label},
                {"concave_count", s.concave_count},
                {"candidates", candidates},
                {"validated", validated},
                {"cut_applied", s.cut_applied},
                {"reason", to_string(s.reason)},
            };
            if (s.chosen)
                step["chosen"] = json::array({point_json(s.chosen->first), point_json(s.chosen->second)});
            steps.push_back(std::move(step));
        }
        traces.push_back({{"clump", ct.clump_label}, {"steps", std::move(steps)}});
    }
    return traces;
}

void write_cells_csv(const std::string& path, const clumpsplit::SegmentationResult& result) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw clumpsplit::io_error("cannot open " + path + " for writing");
    out << "label,x,y,area\n";
    for (const clumpsplit::CellRecord& cell : result.cells)
        out << cell.label << ',' << cell.centroid.x << ',' << cell.centroid.y << ','
            << cell.area() << '\n';
    if (!out) throw clumpsplit::io_error("write failure on " + path);
}

void write_report(const std::string& path, const clumpsplit::SegmentationResult& result) {
    json report = {
        {"config", config_json(result.config)},
        {"clump_count", result.initial_clumps},
        {"cell_count", result.cells.size()},
        {"cut_pixel_count", result.cut_pixels.size()},
        {"traces", trace_json(result)},
    };
    if (result.threshold_used) report["threshold"] = *result.threshold_used;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw clumpsplit::io_error("cannot open " + path + " for writing");
    out << report.dump(2) << '\n';
    if (!out) throw clumpsplit::io_error("write failure on " + path);
}

struct OutputFlags {
    std::string prefix;
    std::string format = "png";
    bool overlay = false;
};

void write_outputs(const OutputFlags& out, const clumpsplit::SegmentationResult& result,
                   const clumpsplit::GrayImage* gray_base, const clumpsplit::BinaryMask* mask_base) {
    const std::string label_path =
        out.prefix + (out.format == "csv" ? ".labels.csv" : ".labels.png");
    clumpsplit::write_labels(label_path, result.label_map);
    write_cells_csv(out.prefix + ".cells.csv", result);
    write_report(out.prefix + ".report.json", result);
    if (out.overlay) {
        const clumpsplit::RgbImage img = gray_base
                                             ? render_overlay(*gray_base, result)
                                             : render_overlay(*mask_base, result);
        clumpsplit::write_rgb_png(out.prefix + ".overlay.png", img);
    }
}

void add_split_options(CLI::App* cmd, clumpsplit::PipelineConfig& cfg, OutputFlags& out) {
    cmd->add_option("--bandwidth", cfg.split.bandwidth, "Low-pass DFT bandwidth")
        ->envname("CLUMPSPLIT_BANDWIDTH")
        ->capture_default_str();
    cmd->add_option("--half-window", cfg.split.half_window, "Samples per side for slope fits")
        ->envname("CLUMPSPLIT_HALF_WINDOW")
        ->capture_default_str();
    cmd->add_option("--prominence", cfg.split.prominence_floor,
                    "Extremum floor as a fraction of max |s|")
        ->envname("CLUMPSPLIT_PROMINENCE")
        ->capture_default_str();
    cmd->add_option("--min-concave-px", cfg.split.min_concave_area_px,
                    "Minimum concave part area in pixels")
        ->envname("CLUMPSPLIT_MIN_CONCAVE_PX")
        ->capture_default_str();
    cmd->add_option("--min-concave-frac", cfg.split.min_concave_area_frac,
                    "Minimum concave part area as a fraction of clump area")
        ->envname("CLUMPSPLIT_MIN_CONCAVE_FRAC")
        ->capture_default_str();
    cmd->add_option("--max-depth", cfg.split.max_depth, "Recursion bound")
        ->envname("CLUMPSPLIT_MAX_DEPTH")
        ->capture_default_str();
    cmd->add_option("--workers", cfg.workers, "Worker threads for per-clump processing")
        ->envname("CLUMPSPLIT_WORKERS")
        ->capture_default_str();
    cmd->add_option("--format", out.format, "Label map format")
        ->check(CLI::IsMember({"png", "csv"}))
        ->envname("CLUMPSPLIT_FORMAT")
        ->capture_default_str();
    cmd->add_flag("--overlay", out.overlay, "Write an RGB overlay with cuts and bottleneck points")
        ->envname("CLUMPSPLIT_OVERLAY");
}

int run_segment(const std::string& input, clumpsplit::PipelineConfig& cfg, OutputFlags& out) {
    const clumpsplit::GrayImage image = clumpsplit::read_gray(input);
    if (out.prefix.empty()) out.prefix = strip_extension(input);
    const clumpsplit::SegmentationResult result = clumpsplit::run(image, cfg);
    write_outputs(out, result, &image, nullptr);
    std::cout << result.cells.size() << " cells from " << result.initial_clumps
              << " clumps (threshold " << *result.threshold_used << ")\n";
    return exit_ok;
}

int run_split(const std::string& input, int threshold, clumpsplit::PipelineConfig& cfg,
              OutputFlags& out) {
    const clumpsplit::GrayImage image = clumpsplit::read_gray(input);
    std::set<std::uint8_t> nonzero;
    for (std::uint8_t v : image.data())
        if (v != 0) nonzero.insert(v);
    if (threshold < 0 && nonzero.size() > 1) {
        std::cerr << "input is not a binary image; pass --threshold\n";
        return exit_config;
    }
    clumpsplit::BinaryMask mask(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            mask.set(x, y, image.at(x, y) > std::max(threshold, 0));

    if (out.prefix.empty()) out.prefix = strip_extension(input);
    const clumpsplit::SegmentationResult result = clumpsplit::run(mask, cfg);
    write_outputs(out, result, nullptr, &mask);
    std::cout << result.cells.size() << " cells from " << result.initial_clumps << " clumps\n";
    return exit_ok;
}

int run_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& out_path) {
    const clumpsplit::LabelMap pred = clumpsplit::read_labels(pred_path);
    const clumpsplit::LabelMap truth = clumpsplit::read_labels(truth_path);
    const std::vector<clumpsplit::CellRecord> cells = clumpsplit::cells_from_label_map(pred);
    const clumpsplit::VacReport report =
        clumpsplit::evaluate(cells, pred.width(), pred.height(), truth);

    const json doc = {
        {"n_segment", report.n_segment}, {"n_split", report.n_split},
        {"n_merge", report.n_merge},     {"n_add", report.n_add},
        {"n_missing", report.n_missing}, {"vac", report.vac},
    };
    std::cout << doc.dump(2) << '\n';
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw clumpsplit::io_error("cannot open " + out_path + " for writing");
        out << doc.dump(2) << '\n';
    }
    return exit_ok;
}

int run_synth(const clumpsplit::SceneSpec& spec, std::uint64_t seed, const std::string& prefix) {
    const clumpsplit::SyntheticScene scene = clumpsplit::generate_scene(spec, seed);
    clumpsplit::write_gray(prefix + ".gray.png", scene.gray);
    clumpsplit::write_labels(prefix + ".truth.png", scene.truth);

    json ellipses = json::array();
    for (const clumpsplit::Ellipse& e : scene.ellipses)
        ellipses.push_back({{"cx", e.center.x},
                            {"cy", e.center.y},
                            {"semi_x", e.semi_x},
                            {"semi_y", e.semi_y},
                            {"rotation", e.rotation}});
    const json meta = {{"seed", seed},
                       {"width", scene.width},
                       {"height", scene.height},
                       {"ellipses", std::move(ellipses)}};
    std::ofstream out(prefix + ".meta.json", std::ios::trunc);
    if (!out) throw clumpsplit::io_error("cannot open " + prefix + ".meta.json for writing");
    out << meta.dump(2) << '\n';
    std::cout << scene.ellipses.size() << " ellipses -> " << prefix << ".{gray,truth}.png\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlapped-cell separation by boundary bottleneck detection"};
    app.require_subcommand(1);

    clumpsplit::PipelineConfig cfg;
    OutputFlags out;
    std::string input;
    int fixed_threshold = -1;

    CLI::App* segment = app.add_subcommand("segment", "Threshold a grayscale image and split clumps");
    segment->add_option("input", input, "Grayscale image (PNG, PGM or TIFF)")->required();
    segment->add_option("--out-prefix", out.prefix, "Output path prefix (default: input stem)")
        ->envname("CLUMPSPLIT_OUT_PREFIX");
    segment->add_option("--hist-bandwidth", cfg.threshold.hist_bandwidth,
                        "Low-pass bandwidth for the histogram")
        ->envname("CLUMPSPLIT_HIST_BANDWIDTH")
        ->capture_default_str();
    segment->add_flag("--invert", cfg.invert, "Foreground darker than background")
        ->envname("CLUMPSPLIT_INVERT");
    add_split_options(segment, cfg, out);

    CLI::App* split = app.add_subcommand("split", "Split clumps of a binary mask");
    split->add_option("input", input, "Binary mask image")->required();
    split->add_option("--out-prefix", out.prefix, "Output path prefix (default: input stem)")
        ->envname("CLUMPSPLIT_OUT_PREFIX");
    split->add_option("--threshold", fixed_threshold,
                      "Binarize a non-binary input at this intensity")
        ->check(CLI::Range(0, 255))
        ->envname("CLUMPSPLIT_THRESHOLD");
    add_split_options(split, cfg, out);

    std::string pred_path, truth_path, eval_out;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a predicted label map against truth");
    evaluate->add_option("--pred", pred_path, "Predicted label map (PNG/PGM/CSV)")
        ->envname("CLUMPSPLIT_PRED")
        ->required();
    evaluate->add_option("--truth", truth_path, "Ground-truth label map")
        ->envname("CLUMPSPLIT_TRUTH")
        ->required();
    evaluate->add_option("--out", eval_out, "Also write the JSON report here")
        ->envname("CLUMPSPLIT_EVAL_OUT");

    clumpsplit::SceneSpec spec;
    std::uint64_t seed = 1;
    int fixed_count = 0;
    std::string synth_prefix = "scene";
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic overlapping-ellipse scene");
    synth->add_option("--out-prefix", synth_prefix, "Output path prefix")
        ->envname("CLUMPSPLIT_OUT_PREFIX")
        ->capture_default_str();
    synth->add_option("--seed", seed, "Scene seed")->envname("CLUMPSPLIT_SEED")->capture_default_str();
    synth->add_option("--count", fixed_count, "Exact ellipse count (overrides the range)")
        ->envname("CLUMPSPLIT_COUNT");
    synth->add_option("--count-min", spec.min_count, "Minimum ellipse count")
        ->envname("CLUMPSPLIT_COUNT_MIN")
        ->capture_default_str();
    synth->add_option("--count-max", spec.max_count, "Maximum ellipse count")
        ->envname("CLUMPSPLIT_COUNT_MAX")
        ->capture_default_str();
    synth->add_option("--width", spec.width, "Scene width")
        ->envname("CLUMPSPLIT_WIDTH")
        ->capture_default_str();
    synth->add_option("--height", spec.height, "Scene height")
        ->envname("CLUMPSPLIT_HEIGHT")
        ->capture_default_str();
    synth->add_option("--min-axis", spec.min_axis, "Minimum semi-axis")
        ->envname("CLUMPSPLIT_MIN_AXIS")
        ->capture_default_str();
    synth->add_option("--max-axis", spec.max_axis, "Maximum semi-axis")
        ->envname("CLUMPSPLIT_MAX_AXIS")
        ->capture_default_str();
    synth->add_option("--overlap-min", spec.overlap_min, "Minimum center distance factor")
        ->envname("CLUMPSPLIT_OVERLAP_MIN")
        ->capture_default_str();
    synth->add_option("--overlap-max", spec.overlap_max, "Maximum center distance factor")
        ->envname("CLUMPSPLIT_OVERLAP_MAX")
        ->capture_default_str();
    synth->add_option("--noise-sigma", spec.noise_sigma, "Gaussian noise sigma")
        ->envname("CLUMPSPLIT_NOISE_SIGMA")
        ->capture_default_str();
    synth->add_option("--fg", spec.foreground, "Foreground intensity")
        ->envname("CLUMPSPLIT_FG")
        ->capture_default_str();
    synth->add_option("--bg", spec.background, "Background intensity")
        ->envname("CLUMPSPLIT_BG")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_config;
    }

    try {
        if (segment->parsed()) return run_segment(input, cfg, out);
        if (split->parsed()) return run_split(input, fixed_threshold, cfg, out);
        if (evaluate->parsed()) return run_evaluate(pred_path, truth_path, eval_out);
        if (fixed_count > 0) {
            spec.min_count = fixed_count;
            spec.max_count = fixed_count;
        }
        return run_synth(spec, seed, synth_prefix);
    } catch (const clumpsplit::unimodal_histogram_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_unimodal;
    } catch (const clumpsplit::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
}
