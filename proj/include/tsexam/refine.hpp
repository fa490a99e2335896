#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsexam/exam.hpp"
#include "tsexam/irt.hpp"
#include "tsexam/templates.hpp"

namespace tsexam::irt {

// Supplies one response matrix per round. Implementations must return a
// matrix whose item ids match the exam's items exactly and in order; the
// candidate roster may vary in size but must stay fit-worthy (>= 2 rows).
using PopulationResponder =
    std::function<ResponseMatrix(const exam::Exam& exam, std::size_t round)>;

struct CandidateAccuracy {
    std::string candidate;
    double overall = 0.0;
    std::map<templates::Category, double> per_category;
};

// Per-round snapshot of the fit and of the drop decision that produced the
// next round's exam. The final round carries an empty drop set.
struct RoundReport {
    std::size_t round = 0;
    std::size_t n_items = 0;
    std::size_t n_candidates = 0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    std::size_t degenerate_items = 0;
    std::string best_candidate;
    std::vector<std::string> dropped;  // item ids removed after this round
    std::map<templates::Category, std::size_t> dropped_by_category;
    bool used_global_fallback = false;
    std::vector<CandidateAccuracy> accuracy;  // responder roster order
    std::vector<double> a;  // per-item estimates, exam order
    std::vector<double> b;
};

struct RefineResult {
    exam::Exam final_exam;
    std::vector<exam::Exam> round_exams;  // round_exams[r] was evaluated in round r
    std::vector<RoundReport> rounds;      // num_iterations + 1 entries
};

// Iterative item refinement: evaluate, fit the two-parameter model, drop the
// items scoring strictly below the drop quantile of the best candidate's
// correct set, and resample each dropped slot from the same template with the
// correct option rotated forward and a freshly derived seed. When the best
// candidate's correct set is empty the quantile is taken over all item scores
// instead and the report flags the fallback. After num_iterations rounds the
// final exam is evaluated and fitted once more, so the result always holds
// num_iterations + 1 reports.
RefineResult refine(const exam::Exam& input, const PopulationResponder& respond,
                    const templates::TemplateRegistry& registry,
                    const FitConfig& fit_config = {},
                    const RefineConfig& refine_config = {});

}  // namespace tsexam::irt
