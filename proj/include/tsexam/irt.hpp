#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tsexam::irt {

// Binary response matrix: r[item][candidate] is 1 when the candidate answered
// the item correctly.
struct ResponseMatrix {
    std::vector<std::string> candidates;
    std::vector<std::string> items;
    std::vector<std::vector<std::uint8_t>> r;

    std::size_t n_items() const { return items.size(); }
    std::size_t n_candidates() const { return candidates.size(); }

    // Dimension/id/cell checks. `for_fitting` additionally requires at least
    // two candidates, two items, and both outcomes present somewhere.
    void validate(bool for_fitting) const;
};

// Gradient-ascent schedule. Defaults are the reference hyperparameters.
struct FitConfig {
    std::size_t epochs = 2000;
    double learning_rate = 0.1;
    double lr_decay = 0.9999;
    double a_clamp = 5.0;          // discrimination kept within [-a_clamp, a_clamp]
    double convergence_tol = 1e-4; // max parameter step in the final epoch

    void validate() const;
};

struct IrtFit {
    std::vector<double> a;      // per-item discrimination
    std::vector<double> b;      // per-item difficulty
    std::vector<double> theta;  // per-candidate ability
    double log_likelihood = 0.0;
    bool converged = false;
    // Items whose responses were all-0 or all-1 (difficulty direction is not
    // identifiable for them; they are fitted anyway).
    std::vector<std::size_t> degenerate_items;
    // Negated log-likelihood per epoch, finite throughout.
    std::vector<double> loss_trace;
    FitConfig config;
};

struct RefineConfig {
    std::size_t num_iterations = 3;
    double drop_percentage = 0.2;

    void validate() const;
};

// Per-item combined score s = normalized(a) + normalized(b), each min-max
// normalized to [0,1] across items. A degenerate spread (max == min) maps
// that parameter to 0.5 everywhere and raises the flag.
struct ItemScores {
    std::vector<double> s;
    bool a_degenerate = false;
    bool b_degenerate = false;
};

// 2PL response probability 1/(1 + exp(-a*(theta - b))), numerically stable
// for exponents up to +-700. Throws ConfigError on non-finite input.
double p_correct(double a, double b, double theta);

// Maximum-likelihood fit by full-batch gradient ascent on the Bernoulli
// log-likelihood. Identification: theta is standardized to mean 0 / unit
// variance after each epoch with the compensating (a, b) rescaling, so the
// likelihood is unchanged by the constraint. Deterministic; candidates and
// items are processed in id order internally, so permuting input order
// permutes the outputs identically.
IrtFit fit_2pl(const ResponseMatrix& responses, const FitConfig& config = {});

ItemScores score_items(const IrtFit& fit);

// Items to drop: the best candidate is the one with the highest raw accuracy
// (ties: higher theta, then id order); S' is the score set of items that
// candidate answered correctly; returns indices of all items with score
// strictly below the drop_percentage quantile of S'. Throws RefinementError
// when S' is empty; callers should fall back to the global score quantile.
std::vector<std::size_t> select_drop_set(const IrtFit& fit, const ResponseMatrix& responses,
                                         const RefineConfig& config);

// The drop rule applied to an explicit threshold set: indices of items whose
// score falls strictly below the drop_percentage quantile of `threshold_set`.
std::vector<std::size_t> drop_below_quantile(const std::vector<double>& scores,
                                             const std::vector<double>& threshold_set,
                                             double drop_percentage);

// Index of the best candidate under the accuracy -> theta -> id tie-break.
std::size_t best_candidate(const IrtFit& fit, const ResponseMatrix& responses);

}  // namespace tsexam::irt
