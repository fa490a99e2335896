#include "tsexam/irt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tsexam/errors.hpp"
#include "tsexam/stats.hpp"

namespace tsexam::irt {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(sigmoid(z)) without underflow on large negative z.
double log_sigmoid(double z) {
    if (z >= 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

std::vector<std::size_t> sorted_order(const std::vector<std::string>& ids) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return ids[x] < ids[y]; });
    return order;
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::set<std::string> seen(ids.begin(), ids.end());
    if (seen.size() != ids.size()) {
        throw ConfigError(std::string("response matrix: duplicate ") + what + " id");
    }
}

}  // namespace

void ResponseMatrix::validate(bool for_fitting) const {
    if (r.size() != items.size()) {
        throw ConfigError("response matrix: row count " + std::to_string(r.size()) +
                          " does not match item count " + std::to_string(items.size()));
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i].size() != candidates.size()) {
            throw ConfigError("response matrix: row " + std::to_string(i) + " has " +
                              std::to_string(r[i].size()) + " cells, expected " +
                              std::to_string(candidates.size()));
        }
        for (std::uint8_t cell : r[i]) {
            if (cell > 1) throw ConfigError("response matrix: cell values must be 0 or 1");
        }
    }
    check_unique(candidates, "candidate");
    check_unique(items, "item");
    if (for_fitting) {
        if (items.size() < 2 || candidates.size() < 2) {
            throw DegenerateInputError("fit_2pl needs at least 2 items and 2 candidates");
        }
        bool any0 = false, any1 = false;
        for (const auto& row : r) {
            for (std::uint8_t cell : row) (cell ? any1 : any0) = true;
        }
        if (!any0 || !any1) {
            throw DegenerateInputError("fit_2pl needs both a correct and an incorrect response");
        }
    }
}

void FitConfig::validate() const {
    if (epochs < 1) throw ConfigError("fit config: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("fit config: learning rate must be > 0");
    if (!(lr_decay > 0.0) || lr_decay > 1.0) throw ConfigError("fit config: decay must be in (0, 1]");
    if (!(a_clamp > 0.0)) throw ConfigError("fit config: a clamp must be > 0");
}

void RefineConfig::validate() const {
    if (!(drop_percentage > 0.0) || !(drop_percentage < 1.0)) {
        throw ConfigError("refine config: drop percentage must lie in (0, 1)");
    }
}

double p_correct(double a, double b, double theta) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(theta)) {
        throw ConfigError("p_correct: non-finite argument");
    }
    return sigmoid(a * (theta - b));
}

IrtFit fit_2pl(const ResponseMatrix& responses, const FitConfig& config) {
    config.validate();
    responses.validate(true);

    const std::size_t ni = responses.n_items();
    const std::size_t nc = responses.n_candidates();

    // Canonical id order makes the arithmetic independent of input order.
    const auto item_order = sorted_order(responses.items);
    const auto cand_order = sorted_order(responses.candidates);
    std::vector<std::vector<double>> r(ni, std::vector<double>(nc));
    for (std::size_t i = 0; i < ni; ++i) {
        const auto& src = responses.r[item_order[i]];
        for (std::size_t j = 0; j < nc; ++j) r[i][j] = src[cand_order[j]];
    }

    std::vector<double> a(ni, 1.0), b(ni), theta(nc);
    std::vector<std::size_t> degenerate;
    for (std::size_t i = 0; i < ni; ++i) {
        const double correct = std::accumulate(r[i].begin(), r[i].end(), 0.0);
        if (correct == 0.0 || correct == static_cast<double>(nc)) {
            degenerate.push_back(item_order[i]);
        }
        const double frac_wrong =
            std::clamp(1.0 - correct / static_cast<double>(nc), 0.05, 0.95);
        b[i] = std::log(frac_wrong / (1.0 - frac_wrong));
    }
    {
        std::vector<double> raw(nc, 0.0);
        for (std::size_t i = 0; i < ni; ++i) {
            for (std::size_t j = 0; j < nc; ++j) raw[j] += r[i][j];
        }
        const double mu = stats::mean(raw);
        double var = 0.0;
        for (double v : raw) var += (v - mu) * (v - mu);
        const double sd = std::sqrt(var / static_cast<double>(nc));
        for (std::size_t j = 0; j < nc; ++j) {
            theta[j] = sd > 1e-12 ? (raw[j] - mu) / sd : 0.0;
        }
    }

    auto log_likelihood = [&](const std::vector<double>& av, const std::vector<double>& bv,
                              const std::vector<double>& tv) {
        double ll = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            for (std::size_t j = 0; j < nc; ++j) {
                const double z = av[i] * (tv[j] - bv[i]);
                ll += r[i][j] == 1.0 ? log_sigmoid(z) : log_sigmoid(-z);
            }
        }
        return ll;
    };

    IrtFit fit;
    fit.config = config;
    fit.degenerate_items = std::move(degenerate);
    std::sort(fit.degenerate_items.begin(), fit.degenerate_items.end());
    fit.loss_trace.reserve(config.epochs);

    std::vector<double> best_a = a, best_b = b, best_theta = theta;
    double best_ll = log_likelihood(a, b, theta);

    std::vector<double> grad_a(ni), grad_b(ni), grad_theta(nc);
    double lr = config.learning_rate;
    double last_step = 0.0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad_a.begin(), grad_a.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        std::fill(grad_theta.begin(), grad_theta.end(), 0.0);
        double ll = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            const double ai = a[i], bi = b[i];
            for (std::size_t j = 0; j < nc; ++j) {
                const double z = ai * (theta[j] - bi);
                const double p = sigmoid(z);
                const double e = r[i][j] - p;
                grad_a[i] += e * (theta[j] - bi);
                grad_b[i] -= e * ai;
                grad_theta[j] += e * ai;
                ll += r[i][j] == 1.0 ? log_sigmoid(z) : log_sigmoid(-z);
            }
        }
        if (!std::isfinite(ll)) {
            throw NumericError("fit_2pl: non-finite likelihood at epoch " + std::to_string(epoch));
        }
        fit.loss_trace.push_back(-ll);
        if (ll > best_ll) {
            best_ll = ll;
            best_a = a;
            best_b = b;
            best_theta = theta;
        }

        // Gradients are means over the opposing dimension so the step size is
        // insensitive to matrix shape.
        last_step = 0.0;
        for (std::size_t i = 0; i < ni; ++i) {
            const double da = lr * grad_a[i] / static_cast<double>(nc);
            const double db = lr * grad_b[i] / static_cast<double>(nc);
            a[i] = std::clamp(a[i] + da, -config.a_clamp, config.a_clamp);
            b[i] += db;
            last_step = std::max({last_step, std::abs(da), std::abs(db)});
        }
        for (std::size_t j = 0; j < nc; ++j) {
            const double dt = lr * grad_theta[j] / static_cast<double>(ni);
            theta[j] += dt;
            last_step = std::max(last_step, std::abs(dt));
        }
        lr *= config.lr_decay;

        // Identification: standardize theta, compensate (a, b) so the
        // likelihood value is untouched by the constraint.
        const double mu = stats::mean(theta);
        double var = 0.0;
        for (double v : theta) var += (v - mu) * (v - mu);
        const double sd = std::sqrt(var / static_cast<double>(nc));
        if (sd > 1e-9) {
            for (std::size_t j = 0; j < nc; ++j) theta[j] = (theta[j] - mu) / sd;
            for (std::size_t i = 0; i < ni; ++i) {
                a[i] = std::clamp(a[i] * sd, -config.a_clamp, config.a_clamp);
                b[i] = (b[i] - mu) / sd;
            }
        }
    }

    const double final_ll = log_likelihood(a, b, theta);
    if (final_ll > best_ll) {
        best_ll = final_ll;
        best_a = std::move(a);
        best_b = std::move(b);
        best_theta = std::move(theta);
    }
    fit.converged = last_step < config.convergence_tol;
    fit.log_likelihood = best_ll;

    // Undo the canonical permutation.
    fit.a.resize(ni);
    fit.b.resize(ni);
    fit.theta.resize(nc);
    for (std::size_t i = 0; i < ni; ++i) {
        fit.a[item_order[i]] = best_a[i];
        fit.b[item_order[i]] = best_b[i];
    }
    for (std::size_t j = 0; j < nc; ++j) fit.theta[cand_order[j]] = best_theta[j];
    return fit;
}

ItemScores score_items(const IrtFit& fit) {
    if (fit.a.size() < 2) throw ConfigError("score_items: need at least 2 items");
    ItemScores out;
    const auto na = stats::minmax_normalize(fit.a, &out.a_degenerate);
    const auto nb = stats::minmax_normalize(fit.b, &out.b_degenerate);
    out.s.resize(na.size());
    for (std::size_t i = 0; i < na.size(); ++i) out.s[i] = na[i] + nb[i];
    return out;
}

std::size_t best_candidate(const IrtFit& fit, const ResponseMatrix& responses) {
    responses.validate(false);
    if (fit.theta.size() != responses.n_candidates()) {
        throw RefinementError("best_candidate: fit and responses disagree on candidate count");
    }
    const std::size_t nc = responses.n_candidates();
    std::vector<std::size_t> correct(nc, 0);
    for (const auto& row : responses.r) {
        for (std::size_t j = 0; j < nc; ++j) correct[j] += row[j];
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < nc; ++j) {
        if (correct[j] > correct[best]) {
            best = j;
        } else if (correct[j] == correct[best]) {
            if (fit.theta[j] > fit.theta[best]) {
                best = j;
            } else if (fit.theta[j] == fit.theta[best] &&
                       responses.candidates[j] < responses.candidates[best]) {
                best = j;
            }
        }
    }
    return best;
}

std::vector<std::size_t> drop_below_quantile(const std::vector<double>& scores,
                                             const std::vector<double>& threshold_set,
                                             double drop_percentage) {
    if (threshold_set.empty()) {
        throw RefinementError(
            "drop rule: empty threshold set; fall back to the global score quantile");
    }
    const double threshold = stats::quantile(threshold_set, drop_percentage);
    std::vector<std::size_t> dropped;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < threshold) dropped.push_back(i);
    }
    return dropped;
}

std::vector<std::size_t> select_drop_set(const IrtFit& fit, const ResponseMatrix& responses,
                                         const RefineConfig& config) {
    config.validate();
    if (fit.a.size() != responses.n_items()) {
        throw RefinementError("select_drop_set: fit and responses disagree on item count");
    }
    const auto scores = score_items(fit).s;
    const std::size_t best = best_candidate(fit, responses);
    std::vector<double> correct_scores;
    for (std::size_t i = 0; i < responses.n_items(); ++i) {
        if (responses.r[i][best] == 1) correct_scores.push_back(scores[i]);
    }
    if (correct_scores.empty()) {
        throw RefinementError(
            "select_drop_set: best candidate answered nothing correctly; "
            "fall back to the global score quantile");
    }
    return drop_below_quantile(scores, correct_scores, config.drop_percentage);
}

}  // namespace tsexam::irt
