#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tsexam {

// Deterministic seed mixing (splitmix64 finalizer). Used everywhere a child
// stream has to be derived from a parent seed so that recipes are
// reproducible and components can be re-drawn independently.
std::uint64_t mix_seed(std::uint64_t x);

// Child seed for the index-th component of a recipe node.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

// Child seed for a named domain ("example", "shuffle", ...). The domain
// string is hashed with FNV-1a before mixing, so distinct names give
// independent streams.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view domain);

// The project-wide pseudo-random generator: a 64-bit Mersenne Twister seeded
// explicitly, with uniform and Gaussian draws implemented on top of the raw
// 64-bit stream (not std::*_distribution) so sequences are identical across
// standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller. Each call consumes exactly two uniform
    // draws; no spare value is cached, so the stream position is a pure
    // function of the call count.
    double normal();

    // Integer in [0, n), n >= 1. Rejection-free modulo of a 64-bit draw is
    // avoided; uses the floating uniform which is unbiased enough for n well
    // below 2^53.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace tsexam
