#include "tsexam/rng.hpp"

#include <cmath>

namespace tsexam {

std::uint64_t mix_seed(std::uint64_t x) {
    // splitmix64 finalizer (Steele, Lea, Flood 2014).
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix_seed(parent ^ mix_seed(index + 0x517CC1B727220A95ULL));
}

namespace {
std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::string_view domain) {
    return mix_seed(parent ^ fnv1a64(domain));
}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double SeededRng::normal() {
    // Box-Muller, cosine branch only. u1 is shifted into (0, 1] so the log
    // argument never hits zero.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

std::uint64_t SeededRng::below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace tsexam
