#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsexam/errors.hpp"
#include "tsexam/irt.hpp"
#include "tsexam/rng.hpp"
#include "tsexam/stats.hpp"

using namespace tsexam;
using namespace tsexam::irt;

namespace {

// Simulation oracle: responses drawn from the 2PL model with known truth.
struct SimData {
    std::vector<double> a, b, theta;
    ResponseMatrix responses;
};

SimData simulate(std::size_t n_items, std::size_t n_candidates, std::uint64_t seed) {
    SeededRng rng(seed);
    SimData sim;
    sim.a.resize(n_items);
    sim.b.resize(n_items);
    sim.theta.resize(n_candidates);
    for (auto& v : sim.a) v = rng.uniform(0.5, 2.5);
    for (auto& v : sim.b) v = rng.uniform(-2.0, 2.0);
    for (auto& v : sim.theta) v = rng.uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < n_items; ++i) {
        sim.responses.items.push_back("item-" + std::to_string(i));
    }
    for (std::size_t j = 0; j < n_candidates; ++j) {
        sim.responses.candidates.push_back("cand-" + std::to_string(j));
    }
    sim.responses.r.assign(n_items, std::vector<std::uint8_t>(n_candidates, 0));
    for (std::size_t i = 0; i < n_items; ++i) {
        for (std::size_t j = 0; j < n_candidates; ++j) {
            const double p = p_correct(sim.a[i], sim.b[i], sim.theta[j]);
            sim.responses.r[i][j] = rng.uniform() < p ? 1 : 0;
        }
    }
    return sim;
}

}  // namespace

TEST_CASE("p_correct fixed points") {
    CHECK(p_correct(1.7, 0.3, 0.3) == 0.5);
    CHECK(p_correct(-2.0, 1.0, 1.0) == 0.5);
    CHECK(p_correct(0.0, -4.0, 3.0) == 0.5);
    CHECK(std::abs(p_correct(1.0, 0.0, std::log(3.0)) - 0.75) <= 1e-12);
}

TEST_CASE("p_correct is stable at extreme exponents") {
    CHECK(p_correct(350.0, 0.0, 2.0) == doctest::Approx(1.0));
    CHECK(p_correct(350.0, 0.0, -2.0) == doctest::Approx(0.0));
    CHECK(std::isfinite(p_correct(700.0, -1.0, 0.0)));
    CHECK_THROWS_AS(p_correct(std::nan(""), 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(p_correct(1.0, 0.0, std::numeric_limits<double>::infinity()), ConfigError);
}

TEST_CASE("p_correct monotonicity in theta and b") {
    SeededRng rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const double a = rng.uniform(0.1, 3.0);
        const double b = rng.uniform(-3.0, 3.0);
        const double t1 = rng.uniform(-3.0, 3.0);
        const double t2 = t1 + rng.uniform(0.01, 1.0);
        CHECK(p_correct(a, b, t2) > p_correct(a, b, t1));
        CHECK(p_correct(a, b + 0.5, t1) < p_correct(a, b, t1));
    }
}

TEST_CASE("p_correct logistic symmetry about b") {
    SeededRng rng(32);
    for (int trial = 0; trial < 2000; ++trial) {
        const double a = rng.uniform(-3.0, 3.0);
        const double b = rng.uniform(-3.0, 3.0);
        const double t = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(p_correct(a, b, t) + p_correct(a, b, 2.0 * b - t) - 1.0) <= 1e-12);
    }
}

TEST_CASE("parameter recovery on simulated data") {
    const auto sim = simulate(50, 200, 42);
    const auto fit = fit_2pl(sim.responses);
    CHECK(stats::pearson(fit.a, sim.a) >= 0.8);
    CHECK(stats::pearson(fit.b, sim.b) >= 0.9);
    CHECK(stats::pearson(fit.theta, sim.theta) >= 0.9);
    for (double v : fit.a) CHECK(std::isfinite(v));
    for (double v : fit.b) CHECK(std::isfinite(v));
    for (double v : fit.theta) CHECK(std::isfinite(v));
}

TEST_CASE("optimizer makes progress and the loss trace stays finite") {
    const auto sim = simulate(20, 60, 7);
    const auto fit = fit_2pl(sim.responses);
    REQUIRE_FALSE(fit.loss_trace.empty());
    CHECK(fit.log_likelihood >= -fit.loss_trace.front());
    for (double loss : fit.loss_trace) CHECK(std::isfinite(loss));
    // Best tracked likelihood equals the minimum traced loss.
    const double best_traced = *std::min_element(fit.loss_trace.begin(), fit.loss_trace.end());
    CHECK(fit.log_likelihood >= -best_traced - 1e-9);
}

TEST_CASE("separable items earn positive discrimination") {
    // Top half of candidates (by true theta) answer correctly, bottom half miss.
    ResponseMatrix m;
    const std::size_t nc = 40;
    for (std::size_t j = 0; j < nc; ++j) m.candidates.push_back("c" + std::to_string(j));
    m.items = {"easy-split", "noise-a", "noise-b"};
    m.r.assign(3, std::vector<std::uint8_t>(nc, 0));
    SeededRng rng(5);
    for (std::size_t j = 0; j < nc; ++j) {
        m.r[0][j] = j < nc / 2 ? 1 : 0;
        m.r[1][j] = rng.uniform() < 0.5 ? 1 : 0;
        m.r[2][j] = rng.uniform() < 0.5 ? 1 : 0;
    }
    const auto fit = fit_2pl(m);
    CHECK(fit.a[0] > 0.5);
}

TEST_CASE("identical response rows get identical abilities") {
    auto sim = simulate(25, 30, 11);
    for (std::size_t i = 0; i < sim.responses.r.size(); ++i) {
        sim.responses.r[i][3] = sim.responses.r[i][17];
    }
    const auto fit = fit_2pl(sim.responses);
    CHECK(std::abs(fit.theta[3] - fit.theta[17]) <= 1e-6);
}

TEST_CASE("fit is invariant to candidate and item order") {
    const auto sim = simulate(15, 25, 77);
    const auto fit = fit_2pl(sim.responses);

    ResponseMatrix shuffled;
    std::vector<std::size_t> cperm(sim.responses.n_candidates());
    std::vector<std::size_t> iperm(sim.responses.n_items());
    std::iota(cperm.begin(), cperm.end(), 0);
    std::iota(iperm.begin(), iperm.end(), 0);
    std::reverse(cperm.begin(), cperm.end());
    std::rotate(iperm.begin(), iperm.begin() + 7, iperm.end());
    for (auto i : iperm) shuffled.items.push_back(sim.responses.items[i]);
    for (auto j : cperm) shuffled.candidates.push_back(sim.responses.candidates[j]);
    for (auto i : iperm) {
        std::vector<std::uint8_t> row;
        for (auto j : cperm) row.push_back(sim.responses.r[i][j]);
        shuffled.r.push_back(std::move(row));
    }

    const auto refit = fit_2pl(shuffled);
    for (std::size_t k = 0; k < iperm.size(); ++k) {
        CHECK(std::abs(refit.a[k] - fit.a[iperm[k]]) <= 1e-9);
        CHECK(std::abs(refit.b[k] - fit.b[iperm[k]]) <= 1e-9);
    }
    for (std::size_t k = 0; k < cperm.size(); ++k) {
        CHECK(std::abs(refit.theta[k] - fit.theta[cperm[k]]) <= 1e-9);
    }
}

TEST_CASE("constant item rows are flagged as degenerate but fitted") {
    auto sim = simulate(10, 20, 3);
    std::fill(sim.responses.r[4].begin(), sim.responses.r[4].end(), std::uint8_t{1});
    std::fill(sim.responses.r[7].begin(), sim.responses.r[7].end(), std::uint8_t{0});
    const auto fit = fit_2pl(sim.responses);
    CHECK(fit.degenerate_items == std::vector<std::size_t>{4, 7});
    CHECK(std::isfinite(fit.a[4]));
    CHECK(std::isfinite(fit.b[7]));
}

TEST_CASE("response matrix validation") {
    ResponseMatrix m;
    m.candidates = {"c0", "c1"};
    m.items = {"i0"};
    m.r = {{1, 0}, {0, 1}};
    CHECK_THROWS_AS(m.validate(false), ConfigError);

    m.items = {"i0", "i1"};
    m.r = {{1, 0}, {0}};
    CHECK_THROWS_AS(m.validate(false), ConfigError);

    m.r = {{1, 0}, {0, 2}};
    CHECK_THROWS_AS(m.validate(false), ConfigError);

    m.r = {{1, 0}, {0, 1}};
    m.items = {"dup", "dup"};
    CHECK_THROWS_AS(m.validate(false), ConfigError);

    m.items = {"i0", "i1"};
    m.r = {{1, 1}, {1, 1}};
    CHECK_THROWS_AS(m.validate(true), DegenerateInputError);

    m.r = {{1, 0}, {0, 1}};
    CHECK_NOTHROW(m.validate(true));
}

TEST_CASE("fit config validation") {
    FitConfig c;
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.lr_decay = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(FitConfig{}.validate());
    CHECK(FitConfig{}.epochs == 2000);
    CHECK(FitConfig{}.learning_rate == 0.1);
    CHECK(FitConfig{}.lr_decay == 0.9999);
}

TEST_CASE("score_items normalizes each parameter to [0,1]") {
    IrtFit fit;
    fit.a = {1.0, 2.0, 3.0};
    fit.b = {0.5, -1.0, 2.0};
    const auto scores = score_items(fit);
    CHECK_FALSE(scores.a_degenerate);
    CHECK_FALSE(scores.b_degenerate);
    // normalized a = (0, 0.5, 1); normalized b = (0.5, 0, 1).
    CHECK(scores.s[0] == doctest::Approx(0.5));
    CHECK(scores.s[1] == doctest::Approx(0.5));
    CHECK(scores.s[2] == doctest::Approx(2.0));
    for (double s : scores.s) {
        CHECK(s >= 0.0);
        CHECK(s <= 2.0);
    }
}

TEST_CASE("score_items flags a degenerate parameter spread") {
    IrtFit fit;
    fit.a = {1.5, 1.5, 1.5};
    fit.b = {0.0, 1.0, 2.0};
    const auto scores = score_items(fit);
    CHECK(scores.a_degenerate);
    CHECK_FALSE(scores.b_degenerate);
    CHECK(scores.s[0] == doctest::Approx(0.5));
    CHECK(scores.s[1] == doctest::Approx(1.0));
    CHECK(scores.s[2] == doctest::Approx(1.5));
}

TEST_CASE("drop threshold follows the interpolated quantile of the reference set") {
    const std::vector<double> sprime = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    // 0.2-quantile at fractional rank 1.8 -> 0.2 + 0.8*0.1 = 0.28.
    const auto dropped = drop_below_quantile(sprime, sprime, 0.2);
    CHECK(dropped == std::vector<std::size_t>{0, 1});
}

TEST_CASE("identical scores are never dropped under the strict rule") {
    const std::vector<double> scores(8, 1.3);
    CHECK(drop_below_quantile(scores, scores, 0.2).empty());
}

TEST_CASE("select_drop_set uses the best candidate's correct items as reference") {
    IrtFit fit;
    fit.a = {0.0, 1.0, 2.0, 3.0};   // normalized: 0, 1/3, 2/3, 1
    fit.b = {0.0, 3.0, 1.0, 2.0};   // normalized: 0, 1, 1/3, 2/3
    fit.theta = {2.0, 0.0, -1.0};
    // scores s = {0, 4/3, 1, 5/3}

    ResponseMatrix m;
    m.candidates = {"c0", "c1", "c2"};
    m.items = {"i0", "i1", "i2", "i3"};
    m.r = {
        {0, 1, 0},
        {1, 0, 0},
        {1, 0, 1},
        {1, 0, 0},
    };
    // c0 has 3 correct -> best. S' = scores of items 1..3 = {4/3, 1, 5/3}.
    // 0.2-quantile of sorted {1, 4/3, 5/3} -> rank 0.4 -> 1 + 0.4/3 = 1.1333.
    RefineConfig config;
    const auto dropped = select_drop_set(fit, m, config);
    // Item 0 (s=0, answered wrong by best) and item 2 (s=1) fall below.
    CHECK(dropped == std::vector<std::size_t>{0, 2});
}

TEST_CASE("best candidate tie-breaks on theta then id") {
    IrtFit fit;
    fit.a = {1.0, 1.0};
    fit.b = {0.0, 0.0};
    fit.theta = {0.5, 1.5, 1.5};
    ResponseMatrix m;
    m.candidates = {"zeta", "beta", "alpha"};
    m.items = {"i0", "i1"};
    m.r = {{1, 1, 1}, {0, 0, 0}};
    // All share accuracy 1/2; candidates 1 and 2 share theta; "alpha" < "beta".
    CHECK(best_candidate(fit, m) == 2);

    fit.theta = {0.5, 2.5, 1.5};
    CHECK(best_candidate(fit, m) == 1);

    m.r = {{1, 1, 0}, {1, 0, 0}};
    CHECK(best_candidate(fit, m) == 0);
}

TEST_CASE("empty reference set raises a refinement error") {
    IrtFit fit;
    fit.a = {1.0, 2.0};
    fit.b = {0.0, 1.0};
    fit.theta = {0.1, 0.2};
    ResponseMatrix m;
    m.candidates = {"c0", "c1"};
    m.items = {"i0", "i1"};
    m.r = {{0, 0}, {0, 0}};
    CHECK_THROWS_AS(select_drop_set(fit, m, RefineConfig{}), RefinementError);
    CHECK_THROWS_AS(drop_below_quantile({1.0}, {}, 0.2), RefinementError);
}

TEST_CASE("refine config validation") {
    RefineConfig c;
    CHECK(c.num_iterations == 3);
    CHECK(c.drop_percentage == 0.2);
    CHECK_NOTHROW(c.validate());
    c.drop_percentage = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.drop_percentage = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
