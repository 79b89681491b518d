#include "clumpsplit/sdd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace clumpsplit {

namespace {

void check_window(std::size_t length, int half_window) {
    if (half_window < 2)
        throw std::invalid_argument("half window must be at least 2");
    if (length < 2 * static_cast<std::size_t>(half_window) + 1)
        throw std::invalid_argument("signal shorter than 2N + 1");
}

std::size_t wrap(long long i, std::size_t length) {
    long long n = static_cast<long long>(length);
    long long m = i % n;
    if (m < 0) m += n;
    return static_cast<std::size_t>(m);
}

} // namespace

std::vector<double> radial_signature(const Contour& contour, PointF c) {
    if (contour.points.empty()) throw std::invalid_argument("empty contour");
    std::vector<double> out;
    out.reserve(contour.points.size());
    for (const Point& p : contour.points)
        out.push_back(std::hypot(p.x - c.x, p.y - c.y));
    return out;
}

std::vector<double> lowpass_dft(std::span<const double> signal, int bandwidth) {
    const std::size_t length = signal.size();
    if (length == 0) throw std::invalid_argument("empty signal");
    if (bandwidth < 0) throw std::invalid_argument("bandwidth must be nonnegative");

    const long long n = static_cast<long long>(length);
    if (bandwidth >= static_cast<int>(length / 2))
        return {signal.begin(), signal.end()}; // no bins zeroed

    // Twiddle table with exact angle reduction: tw[m] = exp(-2*pi*i*m/L).
    std::vector<std::complex<double>> tw(length);
    for (std::size_t m = 0; m < length; ++m) {
        double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        tw[m] = {std::cos(angle), std::sin(angle)};
    }

    // Kept bins: 0..W and L-W..L-1. Zeroed bins contribute nothing to the
    // inverse transform, so only the kept band is ever computed.
    std::vector<int> kept;
    kept.reserve(2 * static_cast<std::size_t>(bandwidth) + 1);
    for (int k = 0; k <= bandwidth; ++k) kept.push_back(k);
    for (int k = static_cast<int>(length) - bandwidth; k < static_cast<int>(length); ++k)
        kept.push_back(k);

    std::vector<std::complex<double>> spectrum(kept.size());
    for (std::size_t ki = 0; ki < kept.size(); ++ki) {
        const long long k = kept[ki];
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < length; ++j)
            acc += signal[j] * tw[wrap(k * static_cast<long long>(j), length)];
        spectrum[ki] = acc;
    }

    std::vector<double> out(length);
    for (std::size_t j = 0; j < length; ++j) {
        std::complex<double> acc = 0.0;
        for (std::size_t ki = 0; ki < kept.size(); ++ki) {
            const long long k = kept[ki];
            acc += spectrum[ki] * std::conj(tw[wrap(k * static_cast<long long>(j), length)]);
        }
        acc /= static_cast<double>(n);
        assert(std::abs(acc.imag()) < 1e-9); // symmetric band keeps the result real
        out[j] = acc.real();
    }
    return out;
}

SlopePair fit_slopes(std::span<const double> signal, int j, int half_window) {
    check_window(signal.size(), half_window);
    const int n = half_window;
    // Closed-form least squares with abscissas 0..N-1:
    // slope = sum((k - (N-1)/2) * y_k) / (N (N^2 - 1) / 12)
    const double xbar = (n - 1) / 2.0;
    const double denom = static_cast<double>(n) * (static_cast<double>(n) * n - 1.0) / 12.0;

    double num_left = 0.0, num_right = 0.0;
    for (int k = 0; k < n; ++k) {
        const double wgt = k - xbar;
        num_left += wgt * signal[wrap(static_cast<long long>(j) - n + 1 + k, signal.size())];
        num_right += wgt * signal[wrap(static_cast<long long>(j) + k, signal.size())];
    }
    return {num_left / denom, num_right / denom};
}

std::vector<double> sdd(std::span<const double> signal, int half_window) {
    check_window(signal.size(), half_window);
    std::vector<double> out(signal.size());
    for (std::size_t j = 0; j < signal.size(); ++j) {
        SlopePair s = fit_slopes(signal, static_cast<int>(j), half_window);
        out[j] = s.right - s.left;
    }
    return out;
}

std::vector<Extremum> detect_extrema(std::span<const double> values, double prominence_floor) {
    const std::size_t length = values.size();
    if (length == 0) return {};

    double max_abs = 0.0;
    for (double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return {};
    const double floor_value = prominence_floor * max_abs;

    // Anchor the run scan at a value change; a fully constant signal has no
    // strict extrema.
    std::size_t anchor = length;
    for (std::size_t i = 0; i < length; ++i) {
        if (values[i] != values[(i + length - 1) % length]) {
            anchor = i;
            break;
        }
    }
    if (anchor == length) return {};

    std::vector<Extremum> out;
    std::size_t run_start = anchor;
    while (true) {
        const double v = values[run_start];
        std::size_t run_len = 1;
        while (run_len < length && values[(run_start + run_len) % length] == v) ++run_len;

        const double prev = values[(run_start + length - 1) % length];
        const double next = values[(run_start + run_len) % length];
        const bool is_max = v > prev && v > next;
        const bool is_min = v < prev && v < next;
        if ((is_max || is_min) && std::abs(v) >= floor_value) {
            const std::size_t center = (run_start + (run_len - 1) / 2) % length;
            out.push_back({static_cast<int>(center),
                           is_max ? Polarity::maximum : Polarity::minimum, std::abs(v)});
        }

        run_start = (run_start + run_len) % length;
        if (run_start == anchor) break;
    }
    std::sort(out.begin(), out.end(),
              [](const Extremum& a, const Extremum& b) { return a.index < b.index; });
    return out;
}

std::vector<Point> back_project(std::span<const int> indices, const Contour& contour) {
    std::vector<Point> out;
    out.reserve(indices.size());
    for (int i : indices) {
        if (i < 0 || i >= contour.length())
            throw std::out_of_range("extremum index outside contour");
        out.push_back(contour.points[static_cast<std::size_t>(i)]);
    }
    return out;
}

RadialBoundary radial_boundary(Contour contour, PointF centroid, int bandwidth) {
    RadialBoundary rb;
    rb.raw = radial_signature(contour, centroid);
    rb.smoothed = lowpass_dft(rb.raw, bandwidth);
    rb.bandwidth = bandwidth;
    rb.contour = std::move(contour);
    return rb;
}

SddProfile sdd_profile(std::span<const double> signal, int half_window, double prominence_floor) {
    SddProfile profile;
    profile.values = sdd(signal, half_window);
    profile.half_window = half_window;
    profile.extrema = detect_extrema(profile.values, prominence_floor);
    return profile;
}

} // namespace clumpsplit
