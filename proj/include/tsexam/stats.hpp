#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsexam::stats {

double mean(std::span<const double> x);

// Sample variance with the 1/(n-1) divisor; 0 for n < 2.
double variance(std::span<const double> x);

// Sample autocorrelation at the given lag (biased denominator, the usual
// time-series convention). Returns 0 for a constant series.
double autocorrelation(std::span<const double> x, std::size_t lag);

// Normalized cross-correlation of (x, y) at integer displacement d, i.e.
// corr(x[t], y[t + d]) over the overlapping window.
double cross_correlation(std::span<const double> x, std::span<const double> y, std::ptrdiff_t d);

double median(std::vector<double> x);

// Median absolute deviation scaled by 1.4826 (consistent with the normal
// standard deviation).
double robust_scale(std::span<const double> x);

// Quantile by linear interpolation between closest ranks: for sorted values
// v_0..v_{m-1} and q in [0,1] the result is v at fractional rank q*(m-1).
double quantile(std::vector<double> values, double q);

// Pearson correlation; 0 if either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Min-max normalization to [0, 1]. When max == min every entry maps to 0.5
// and *degenerate (if non-null) is set.
std::vector<double> minmax_normalize(std::span<const double> x, bool* degenerate = nullptr);

}  // namespace tsexam::stats
