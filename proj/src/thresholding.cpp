#include "clumpsplit/thresholding.hpp"

#include <algorithm>

#include "clumpsplit/sdd.hpp"

namespace clumpsplit {

namespace {

// Local maxima of the smoothed histogram (plateau-aware, non-cyclic), with
// their heights. Endpoints count when they dominate their inner neighbor.
std::vector<std::pair<int, double>> smoothed_peaks(const std::vector<double>& h) {
    std::vector<std::pair<int, double>> peaks;
    const int n = static_cast<int>(h.size());
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && h[j + 1] == h[i]) ++j;
        const bool left_up = i == 0 || h[i] > h[i - 1];
        const bool right_up = j == n - 1 || h[j] > h[j + 1];
        if (left_up && right_up) peaks.emplace_back((i + j) / 2, h[i]);
        i = j + 1;
    }
    return peaks;
}

} // namespace

GrayHistogram build_histogram(const GrayImage& image, int bandwidth) {
    GrayHistogram hist;
    hist.bandwidth = bandwidth;
    for (std::uint8_t v : image.data()) ++hist.bins[v];

    // unit mass so prominence comparisons are scale-free
    const double total = static_cast<double>(image.data().size());
    std::vector<double> normalized(256);
    for (int i = 0; i < 256; ++i) normalized[i] = static_cast<double>(hist.bins[i]) / total;
    hist.smoothed = lowpass_dft(normalized, bandwidth);
    return hist;
}

int sdd_threshold(const GrayImage& image, const ThresholdConfig& config) {
    const GrayHistogram hist = build_histogram(image, config.hist_bandwidth);

    const double total = static_cast<double>(image.data().size());

    // A real mode carries raw mass near it; the ringing sidelobes that the
    // low-pass filter paints around an isolated spike do not.
    auto peak_mass = [&](int index) {
        double mass = 0.0;
        for (int i = std::max(0, index - 4); i <= std::min(255, index + 4); ++i)
            mass += static_cast<double>(hist.bins[i]);
        return mass / total;
    };
    auto peaks = smoothed_peaks(hist.smoothed);
    std::erase_if(peaks, [&](const auto& p) { return peak_mass(p.first) < config.min_tail_fraction; });
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    // Two modes must be separated by a genuine dip; a sampling-noise wiggle
    // on the flank of a tall peak is not a second mode.
    auto dip_between = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        double dip = hist.smoothed[static_cast<std::size_t>(a)];
        for (int i = a; i <= b; ++i)
            dip = std::min(dip, hist.smoothed[static_cast<std::size_t>(i)]);
        return dip;
    };
    int lo = -1, hi = -1;
    if (!peaks.empty()) {
        lo = peaks[0].first;
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            const double height = std::min(peaks[0].second, peaks[i].second);
            if (dip_between(peaks[0].first, peaks[i].first) < 0.75 * height) {
                hi = peaks[i].first;
                break;
            }
        }
    }
    if (lo < 0 || hi < 0) throw unimodal_histogram_error("unimodal histogram");
    if (lo > hi) std::swap(lo, hi);

    // cumulative mass for the tail guard
    std::array<double, 256> cumulative{};
    double acc = 0.0;
    for (int i = 0; i < 256; ++i) {
        acc += static_cast<double>(hist.bins[i]);
        cumulative[i] = acc / total;
    }

    const SddProfile profile =
        sdd_profile(hist.smoothed, config.half_window, config.prominence_floor);

    // Valley candidates are the positive slope-difference extrema between the
    // peaks; on a wide flat valley they flank it (slope falls to zero at one
    // shoulder and rises from zero at the other), so the threshold is the
    // smoothed minimum over the candidate-bracketed interval.
    int first = -1, last = -1;
    for (const Extremum& e : profile.extrema) {
        if (e.polarity != Polarity::maximum) continue; // a valley turns slope - into +
        if (e.index <= lo || e.index >= hi) continue;
        const double below = cumulative[e.index];
        if (below < config.min_tail_fraction || 1.0 - below < config.min_tail_fraction)
            continue;
        if (first < 0) first = e.index;
        last = e.index;
    }
    if (first < 0) throw unimodal_histogram_error("unimodal histogram");

    int best = first;
    for (int i = first; i <= last; ++i)
        if (hist.smoothed[static_cast<std::size_t>(i)] <
            hist.smoothed[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

BinaryMask apply_threshold(const GrayImage& image, int threshold) {
    if (threshold < 0 || threshold > 255)
        throw std::invalid_argument("threshold must be in [0, 255]");
    BinaryMask out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            out.set(x, y, image.at(x, y) > threshold);
    return out;
}

} // namespace clumpsplit
