#include <doctest.h>

#include <cmath>
#include <vector>

#include "tsexam/errors.hpp"
#include "tsexam/rng.hpp"
#include "tsexam/stats.hpp"

namespace stats = tsexam::stats;

TEST_CASE("mean and variance on a known sample") {
    const std::vector<double> x = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    CHECK(stats::mean(x) == doctest::Approx(5.0));
    CHECK(stats::variance(x) == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("variance of fewer than two points is zero") {
    const std::vector<double> x = {3.0};
    CHECK(stats::variance(x) == 0.0);
}

TEST_CASE("autocorrelation of an alternating series is -1 at lag 1") {
    std::vector<double> x(1000);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = (t % 2 == 0) ? 1.0 : -1.0;
    CHECK(stats::autocorrelation(x, 1) == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(stats::autocorrelation(x, 2) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("autocorrelation of a constant series is zero") {
    const std::vector<double> x(64, 5.5);
    CHECK(stats::autocorrelation(x, 1) == 0.0);
}

TEST_CASE("cross correlation peaks at the true displacement") {
    // y[t] = x[t - 3], so corr(x[t], y[t + d]) peaks at d = 3.
    tsexam::SeededRng rng(11);
    std::vector<double> x(256), y(256);
    for (double& v : x) v = rng.normal();
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = t >= 3 ? x[t - 3] : x[0];
    double best = -2.0;
    std::ptrdiff_t best_d = -100;
    for (std::ptrdiff_t d = -10; d <= 10; ++d) {
        const double c = stats::cross_correlation(x, y, d);
        if (c > best) {
            best = c;
            best_d = d;
        }
    }
    CHECK(best_d == 3);
    CHECK(best > 0.99);
}

TEST_CASE("median of odd and even counts") {
    CHECK(stats::median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
    CHECK(stats::median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
}

TEST_CASE("robust scale matches 1.4826 * MAD") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 100.0};
    // median = 3, |x - 3| = {2,1,0,1,97}, MAD = 1.
    CHECK(stats::robust_scale(x) == doctest::Approx(1.4826));
}

TEST_CASE("quantile interpolates linearly between order statistics") {
    const std::vector<double> v = {10.0, 20.0, 30.0, 40.0};
    CHECK(stats::quantile(v, 0.0) == doctest::Approx(10.0));
    CHECK(stats::quantile(v, 1.0) == doctest::Approx(40.0));
    CHECK(stats::quantile(v, 0.5) == doctest::Approx(25.0));
    // h = 0.2 * 3 = 0.6 -> 10 + 0.6*(20-10) = 16.
    CHECK(stats::quantile(v, 0.2) == doctest::Approx(16.0));
}

TEST_CASE("quantile rejects bad inputs") {
    CHECK_THROWS_AS(stats::quantile({}, 0.5), tsexam::RangeError);
    CHECK_THROWS_AS(stats::quantile({1.0}, -0.1), tsexam::RangeError);
    CHECK_THROWS_AS(stats::quantile({1.0}, 1.1), tsexam::RangeError);
}

TEST_CASE("pearson correlation of exact linear relation is +-1") {
    std::vector<double> x(50), up(50), down(50);
    for (std::size_t i = 0; i < 50; ++i) {
        x[i] = static_cast<double>(i);
        up[i] = 2.0 * x[i] + 1.0;
        down[i] = -0.5 * x[i] + 4.0;
    }
    CHECK(stats::pearson(x, up) == doctest::Approx(1.0));
    CHECK(stats::pearson(x, down) == doctest::Approx(-1.0));
}

TEST_CASE("pearson handles zero variance and length mismatch") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> flat = {7.0, 7.0, 7.0};
    CHECK(stats::pearson(x, flat) == 0.0);
    const std::vector<double> shorter = {1.0, 2.0};
    CHECK_THROWS_AS(stats::pearson(x, shorter), tsexam::RangeError);
}

TEST_CASE("minmax normalization maps to [0,1] and flags degenerate input") {
    const std::vector<double> x = {2.0, 4.0, 6.0};
    bool degenerate = true;
    const auto n = stats::minmax_normalize(x, &degenerate);
    CHECK_FALSE(degenerate);
    CHECK(n[0] == doctest::Approx(0.0));
    CHECK(n[1] == doctest::Approx(0.5));
    CHECK(n[2] == doctest::Approx(1.0));

    const std::vector<double> flat = {3.0, 3.0};
    const auto nf = stats::minmax_normalize(flat, &degenerate);
    CHECK(degenerate);
    CHECK(nf[0] == doctest::Approx(0.5));
    CHECK(nf[1] == doctest::Approx(0.5));
}
