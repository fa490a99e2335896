#include "tsexam/granger.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>

#include "tsexam/errors.hpp"

namespace tsexam::synth {

namespace {

// Least-squares RSS via column-pivoted QR; throws if the design is
// rank-deficient rather than silently fitting a pseudo-inverse.
double fit_rss(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, const char* which) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) {
        throw DegenerateInputError(std::string("verify_granger: singular ") + which +
                                   " design matrix (rank " + std::to_string(qr.rank()) + " of " +
                                   std::to_string(design.cols()) + ")");
    }
    const Eigen::VectorXd beta = qr.solve(target);
    return (target - design * beta).squaredNorm();
}

}  // namespace

GrangerReport verify_granger(std::span<const double> x, std::span<const double> y,
                             std::size_t max_lag) {
    if (max_lag < 1) throw ConfigError("verify_granger: max_lag must be >= 1");
    if (x.size() != y.size()) {
        throw ConfigError("verify_granger: series lengths differ (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 4 * max_lag) {
        throw RangeError("verify_granger: length " + std::to_string(n) + " is below 4*max_lag = " +
                         std::to_string(4 * max_lag));
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(x[t]) || !std::isfinite(y[t])) {
            throw ConfigError("verify_granger: non-finite input at t=" + std::to_string(t));
        }
    }

    const std::size_t p = max_lag;
    const std::size_t rows = n - p;
    const std::size_t cols_r = 1 + p;
    const std::size_t cols_u = 1 + 2 * p;
    if (rows <= cols_u) {
        throw DegenerateInputError("verify_granger: too few rows (" + std::to_string(rows) +
                                   ") for " + std::to_string(cols_u) + " regressors");
    }

    Eigen::VectorXd target(static_cast<Eigen::Index>(rows));
    Eigen::MatrixXd restricted(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols_r));
    Eigen::MatrixXd unrestricted(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols_u));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + p;
        const auto ri = static_cast<Eigen::Index>(r);
        target(ri) = y[t];
        restricted(ri, 0) = 1.0;
        unrestricted(ri, 0) = 1.0;
        for (std::size_t j = 1; j <= p; ++j) {
            restricted(ri, static_cast<Eigen::Index>(j)) = y[t - j];
            unrestricted(ri, static_cast<Eigen::Index>(j)) = y[t - j];
            unrestricted(ri, static_cast<Eigen::Index>(p + j)) = x[t - j];
        }
    }

    GrangerReport report;
    report.max_lag = max_lag;
    report.n_obs = rows;
    report.rss_restricted = fit_rss(restricted, target, "restricted");
    report.rss_unrestricted = fit_rss(unrestricted, target, "unrestricted");

    const double df1 = static_cast<double>(p);
    const double df2 = static_cast<double>(rows - cols_u);
    const double numerator = std::max(report.rss_restricted - report.rss_unrestricted, 0.0) / df1;

    if (report.rss_unrestricted <= 0.0) {
        report.f_stat = std::numeric_limits<double>::infinity();
        report.p_value = 0.0;
    } else {
        report.f_stat = numerator / (report.rss_unrestricted / df2);
        const boost::math::fisher_f_distribution<double> dist(df1, df2);
        report.p_value = boost::math::cdf(boost::math::complement(dist, report.f_stat));
    }
    report.rejected = report.p_value < 0.05;
    return report;
}

}  // namespace tsexam::synth
