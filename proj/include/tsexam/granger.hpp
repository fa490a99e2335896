#pragma once

#include <cstddef>
#include <span>

namespace tsexam::synth {

// Nested-regression F-test report for "x Granger-causes y".
struct GrangerReport {
    double f_stat = 0.0;
    double p_value = 1.0;
    bool rejected = false;  // at alpha = 0.05
    std::size_t max_lag = 0;
    std::size_t n_obs = 0;  // rows actually regressed (length - max_lag)
    double rss_restricted = 0.0;
    double rss_unrestricted = 0.0;
};

// Tests whether past values of x improve prediction of y beyond y's own past.
// Fits y_t ~ 1 + y_{t-1..t-p} (restricted) and the same plus x_{t-1..t-p}
// (unrestricted) by least squares and compares them with the standard
// nested-model F statistic. Deterministic for fixed inputs.
//
// pre: x and y share length >= 4 * max_lag, max_lag >= 1
// throws DegenerateInputError on a rank-deficient design matrix,
// RangeError / ConfigError on precondition violations.
GrangerReport verify_granger(std::span<const double> x, std::span<const double> y,
                             std::size_t max_lag);

}  // namespace tsexam::synth
