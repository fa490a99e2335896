#include "tsexam/sim.hpp"

#include <cmath>

#include "tsexam/errors.hpp"
#include "tsexam/rng.hpp"

namespace tsexam::sim {

void PopulationConfig::validate() const {
    if (n_candidates < 2) throw ConfigError("population: need at least 2 candidates");
    if (!(a_min > 0.0) || !(a_max > a_min)) {
        throw ConfigError("population: discrimination range must satisfy 0 < a_min < a_max");
    }
    if (!(b_max > b_min) || !(theta_max > theta_min)) {
        throw ConfigError("population: difficulty and ability ranges must be non-degenerate");
    }
}

SimulatedPopulation::SimulatedPopulation(const PopulationConfig& config) : config_(config) {
    config_.validate();
    SeededRng rng(derive_seed(config_.seed, "theta"));
    ids_.reserve(config_.n_candidates);
    theta_.reserve(config_.n_candidates);
    int width = 1;
    for (std::size_t v = config_.n_candidates - 1; v >= 10; v /= 10) ++width;
    for (std::size_t c = 0; c < config_.n_candidates; ++c) {
        std::string n = std::to_string(c);
        ids_.push_back("sim-" + std::string(width - int(n.size()) > 0 ? width - n.size() : 0, '0') + n);
        theta_.push_back(rng.uniform(config_.theta_min, config_.theta_max));
    }
}

double SimulatedPopulation::true_a(std::uint64_t item_seed) const {
    SeededRng rng(derive_seed(derive_seed(config_.seed, "item"), item_seed));
    return rng.uniform(config_.a_min, config_.a_max);
}

double SimulatedPopulation::true_b(std::uint64_t item_seed) const {
    SeededRng rng(derive_seed(derive_seed(config_.seed, "item"), item_seed));
    rng.uniform(config_.a_min, config_.a_max);
    return rng.uniform(config_.b_min, config_.b_max);
}

irt::ResponseMatrix SimulatedPopulation::respond(const exam::Exam& exam, std::size_t) const {
    irt::ResponseMatrix m;
    m.candidates = ids_;
    m.items.reserve(exam.items.size());
    m.r.assign(exam.items.size(), std::vector<unsigned char>(ids_.size(), 0));
    std::uint64_t response_root = derive_seed(config_.seed, "response");
    for (std::size_t i = 0; i < exam.items.size(); ++i) {
        const auto& item = exam.items[i];
        m.items.push_back(item.item_id);
        double a = true_a(item.seed);
        double b = true_b(item.seed);
        std::uint64_t item_root = derive_seed(response_root, item.seed);
        for (std::size_t c = 0; c < ids_.size(); ++c) {
            double p = irt::p_correct(a, b, theta_[c]);
            SeededRng rng(derive_seed(item_root, c));
            m.r[i][c] = rng.uniform() < p ? 1 : 0;
        }
    }
    m.validate(false);
    return m;
}

}  // namespace tsexam::sim
