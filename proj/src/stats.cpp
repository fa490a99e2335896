#include "tsexam/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tsexam/errors.hpp"

namespace tsexam::stats {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double autocorrelation(std::span<const double> x, std::size_t lag) {
    if (lag >= x.size()) throw RangeError("autocorrelation: lag >= series length");
    const double m = mean(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (denom == 0.0) return 0.0;
    double num = 0.0;
    for (std::size_t t = lag; t < x.size(); ++t) {
        num += (x[t] - m) * (x[t - lag] - m);
    }
    return num / denom;
}

double cross_correlation(std::span<const double> x, std::span<const double> y, std::ptrdiff_t d) {
    // Overlap of x[t] with y[t + d].
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t ny = static_cast<std::ptrdiff_t>(y.size());
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -d);
    const std::ptrdiff_t t1 = std::min(nx, ny - d);
    if (t1 - t0 < 3) return 0.0;
    const std::size_t n = static_cast<std::size_t>(t1 - t0);
    double mx = 0.0, my = 0.0;
    for (std::ptrdiff_t t = t0; t < t1; ++t) {
        mx += x[static_cast<std::size_t>(t)];
        my += y[static_cast<std::size_t>(t + d)];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::ptrdiff_t t = t0; t < t1; ++t) {
        const double a = x[static_cast<std::size_t>(t)] - mx;
        const double b = y[static_cast<std::size_t>(t + d)] - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> x) {
    if (x.empty()) throw RangeError("median: empty input");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid), x.end());
    double hi = x[mid];
    if (x.size() % 2 == 1) return hi;
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mid) - 1, x.end());
    return 0.5 * (x[mid - 1] + hi);
}

double robust_scale(std::span<const double> x) {
    if (x.empty()) return 0.0;
    std::vector<double> v(x.begin(), x.end());
    const double med = median(v);
    for (double& e : v) e = std::abs(e - med);
    return 1.4826 * median(std::move(v));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw RangeError("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw RangeError("quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw RangeError("pearson: inputs must share length >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> minmax_normalize(std::span<const double> x, bool* degenerate) {
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    std::vector<double> out(x.size());
    if (x.empty() || *mn == *mx) {
        std::fill(out.begin(), out.end(), 0.5);
        if (degenerate) *degenerate = true;
        return out;
    }
    if (degenerate) *degenerate = false;
    const double span = *mx - *mn;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *mn) / span;
    return out;
}

}  // namespace tsexam::stats
