#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsexam/exam.hpp"
#include "tsexam/irt.hpp"

namespace tsexam::sim {

struct PopulationConfig {
    std::size_t n_candidates = 200;
    std::uint64_t seed = 42;
    double a_min = 0.5, a_max = 2.5;      // true discrimination range
    double b_min = -2.0, b_max = 2.0;     // true difficulty range
    double theta_min = -2.0, theta_max = 2.0;

    void validate() const;  // throws ConfigError
};

// A synthetic candidate pool with fixed abilities answering under the
// two-parameter model. True item parameters are keyed by the item's seed, so
// an item keeps its parameters for as long as it stays in the exam and a
// resampled replacement draws fresh ones. Response draws are keyed by
// (item seed, candidate index), making the matrix independent of item order
// and of the round in which an item is asked.
class SimulatedPopulation {
public:
    explicit SimulatedPopulation(const PopulationConfig& config = {});

    std::size_t size() const { return theta_.size(); }
    const std::vector<std::string>& candidates() const { return ids_; }
    const std::vector<double>& theta_star() const { return theta_; }

    double true_a(std::uint64_t item_seed) const;
    double true_b(std::uint64_t item_seed) const;

    // Usable directly as a refinement responder.
    irt::ResponseMatrix respond(const exam::Exam& exam, std::size_t round) const;

private:
    PopulationConfig config_;
    std::vector<std::string> ids_;
    std::vector<double> theta_;
};

}  // namespace tsexam::sim
