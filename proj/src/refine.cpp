#include "tsexam/refine.hpp"

#include <algorithm>
#include <numeric>

#include "tsexam/errors.hpp"
#include "tsexam/rng.hpp"

namespace tsexam::irt {

namespace {

void check_matrix(const ResponseMatrix& m, const exam::Exam& exam, std::size_t round) {
    if (m.n_items() != exam.items.size()) {
        throw RefinementError("refine: round " + std::to_string(round) + " returned " +
                              std::to_string(m.n_items()) + " item rows, exam has " +
                              std::to_string(exam.items.size()));
    }
    for (std::size_t i = 0; i < m.n_items(); ++i) {
        if (m.items[i] != exam.items[i].item_id) {
            throw RefinementError("refine: round " + std::to_string(round) +
                                  " item order mismatch at index " + std::to_string(i) +
                                  ": " + m.items[i] + " vs " + exam.items[i].item_id);
        }
    }
}

RoundReport make_report(std::size_t round, const exam::Exam& exam,
                        const ResponseMatrix& m, const IrtFit& fit) {
    RoundReport rep;
    rep.round = round;
    rep.n_items = m.n_items();
    rep.n_candidates = m.n_candidates();
    rep.a = fit.a;
    rep.b = fit.b;
    rep.mean_a = std::accumulate(fit.a.begin(), fit.a.end(), 0.0) / double(fit.a.size());
    rep.mean_b = std::accumulate(fit.b.begin(), fit.b.end(), 0.0) / double(fit.b.size());
    rep.log_likelihood = fit.log_likelihood;
    rep.converged = fit.converged;
    rep.degenerate_items = fit.degenerate_items.size();
    rep.best_candidate = m.candidates[best_candidate(fit, m)];

    std::map<templates::Category, std::size_t> category_totals;
    for (const auto& item : exam.items) ++category_totals[item.category];
    for (std::size_t c = 0; c < m.n_candidates(); ++c) {
        CandidateAccuracy acc;
        acc.candidate = m.candidates[c];
        std::size_t correct = 0;
        std::map<templates::Category, std::size_t> per_cat;
        for (std::size_t i = 0; i < m.n_items(); ++i) {
            if (m.r[i][c] == 1) {
                ++correct;
                ++per_cat[exam.items[i].category];
            }
        }
        acc.overall = double(correct) / double(m.n_items());
        for (const auto& [cat, total] : category_totals) {
            acc.per_category[cat] = double(per_cat[cat]) / double(total);
        }
        rep.accuracy.push_back(std::move(acc));
    }
    return rep;
}

templates::ExamItem resample_item(const templates::ExamItem& old,
                                  const templates::TemplateRegistry& registry,
                                  const templates::Lengths& lengths) {
    if (!registry.contains(old.template_id)) {
        throw RefinementError("refine: template " + old.template_id +
                              " for dropped item " + old.item_id +
                              " is not in the registry");
    }
    const auto& t = registry.by_id(old.template_id);
    auto options = t.generable_options();
    std::size_t old_correct = old.permutation[old.correct_index];
    std::size_t next = options.front();
    auto at = std::find(options.begin(), options.end(), old_correct);
    if (at != options.end()) {
        next = options[(std::size_t(at - options.begin()) + 1) % options.size()];
    }
    std::uint64_t seed = derive_seed(old.seed, "resample");
    return templates::instantiate(t, next, seed, lengths);
}

}  // namespace

RefineResult refine(const exam::Exam& input, const PopulationResponder& respond,
                    const templates::TemplateRegistry& registry,
                    const FitConfig& fit_config, const RefineConfig& refine_config) {
    if (!respond) throw ConfigError("refine: responder is empty");
    fit_config.validate();
    refine_config.validate();
    input.validate();

    RefineResult result;
    exam::Exam current = input;
    const auto lengths = input.distribution.lengths();

    for (std::size_t round = 0; round <= refine_config.num_iterations; ++round) {
        ResponseMatrix m = respond(current, round);
        check_matrix(m, current, round);
        IrtFit fit = fit_2pl(m, fit_config);
        RoundReport rep = make_report(round, current, m, fit);

        result.round_exams.push_back(current);
        if (round == refine_config.num_iterations) {
            result.rounds.push_back(std::move(rep));
            break;
        }

        std::vector<std::size_t> drop;
        try {
            drop = select_drop_set(fit, m, refine_config);
        } catch (const RefinementError&) {
            ItemScores scores = score_items(fit);
            drop = drop_below_quantile(scores.s, scores.s, refine_config.drop_percentage);
            rep.used_global_fallback = true;
        }

        exam::Exam next = current;
        next.round = round + 1;
        for (std::size_t i : drop) {
            const auto& old = current.items[i];
            rep.dropped.push_back(old.item_id);
            ++rep.dropped_by_category[old.category];
            next.items[i] = resample_item(old, registry, lengths);
            next.lineage[i] = old.item_id;
        }
        next.validate();
        result.rounds.push_back(std::move(rep));
        current = std::move(next);
    }

    result.final_exam = std::move(current);
    return result;
}

}  // namespace tsexam::irt
