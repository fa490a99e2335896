#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsexam/time_series.hpp"

namespace tsexam::synth {

// ---------------------------------------------------------------------------
// Base patterns
// ---------------------------------------------------------------------------

enum class PatternKind {
    LinearTrend,       // y = a*t
    ExponentialTrend,  // y = exp(a*t)
    LogTrend,          // y = a*log(t), t starting at 1
    Constant,          // y = a
    GaussianWhiteNoise,// y_t = sigma * eps_t
    RandomWalk,        // y_t = y_{t-1} + sigma * eps_t
    SineWave,          // y_t = A*(1 + amplitude_slope*t) * sin(2*pi*t/period + phase)
    SawtoothWave,      // y_t = A*(2*frac(t/period) - 1)
    SquareWave,        // y_t = A if frac(t/period) < 0.5 else -A
    MovingAverage,     // y_t = eps_t + sum_i coeffs[i] * eps_{t-i-1}
    Autoregressive,    // y_t = sum_i coeffs[i] * y_{t-i-1} + sigma * eps_t
};

std::string to_string(PatternKind k);
PatternKind pattern_kind_from_string(const std::string& s);

// Parameters for one base pattern. Only the fields the declared kind uses are
// consulted; validate() checks that those are present and finite.
struct BasePatternConfig {
    PatternKind kind = PatternKind::Constant;
    double a = 1.0;                // slope (Linear/Exponential), scale (Log), level (Constant)
    double amplitude = 1.0;        // wave kinds
    double period = 0.0;           // wave kinds, must be > 0
    double phase = 0.0;            // SineWave, radians
    double amplitude_slope = 0.0;  // SineWave linear amplitude envelope
    double sigma = 1.0;            // noise scale of stochastic kinds, >= 0
    std::vector<double> coeffs;    // alpha_1..alpha_p (AR) or alpha_1..alpha_q (MA)

    // Throws ConfigError describing the offending field.
    void validate() const;

    bool operator==(const BasePatternConfig&) const = default;
};

// True when an AR process with these coefficients is stationary, i.e. all
// roots of 1 - a_1 z - ... - a_p z^p lie strictly outside the unit circle.
// Decided by the Schur-Cohn reduction on the reversed polynomial, so no
// eigenvalue solver is involved.
bool is_stationary(std::span<const double> ar_coeffs);

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

enum class CompositionMethod { Additive, Multiplicative, Concatenate };

std::string to_string(CompositionMethod m);
CompositionMethod composition_method_from_string(const std::string& s);

struct CompositionSpec;

// One leaf or nested subtree of a composition. Exactly one of `base` /
// `nested` is set. `length`/`weight` are only meaningful under Concatenate:
// explicit lengths must sum to the target length; weights split the target
// proportionally (largest-remainder rounding); absent means weight 1.
struct CompositionComponent {
    std::optional<BasePatternConfig> base;
    std::shared_ptr<const CompositionSpec> nested;
    std::optional<std::size_t> length;
    std::optional<double> weight;
};

struct CompositionSpec {
    CompositionMethod method = CompositionMethod::Additive;
    std::vector<CompositionComponent> components;

    // Convenience: a composition consisting of a single base pattern.
    static CompositionSpec single(BasePatternConfig base);

    void validate() const;
};

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

enum class TransformKind { SignFlip, AnomalyInjection };
enum class AnomalyType { Spike, LevelShift, NoiseBurst, Flip, Scale, Cutoff, TrendChange };

std::string to_string(TransformKind k);
TransformKind transform_kind_from_string(const std::string& s);
std::string to_string(AnomalyType t);
AnomalyType anomaly_type_from_string(const std::string& s);

// Anomaly parameters. With n the series length, loc the location, w the
// width, m the magnitude and s = max(robust_scale(series), 0.1) the scale
// floor, the injected effects are:
//   Spike        y[loc] += m*s
//   LevelShift   y[t]   += m*s                   for t >= loc
//   NoiseBurst   y[t]   += m*s*eps_t             for t in [loc, loc+w)
//   Flip         reverse y[loc .. loc+w)
//   Scale        y[t]   *= m                     for t in [loc, loc+w)
//   Cutoff       y[t]    = median(original y)    for t in [loc, loc+w)
//   TrendChange  y[t]   += m*s*(t - loc)/(n - loc) for t >= loc
struct AnomalySpec {
    AnomalyType type = AnomalyType::Spike;
    std::size_t location = 0;
    double magnitude = 1.0;
    std::size_t width = 1;

    void validate() const;
};

struct TransformSpec {
    TransformKind kind = TransformKind::SignFlip;
    std::optional<AnomalySpec> anomaly;  // present iff kind == AnomalyInjection

    void validate() const;
};

// A full single-series recipe: a composition tree plus transforms applied in
// order. This is the unit templates bind to answer options.
struct SeriesRecipe {
    CompositionSpec composition;
    std::vector<TransformSpec> transforms;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Paired series
// ---------------------------------------------------------------------------

enum class PairKind { LaggedPair, GrangerPair, IndependentPair };

std::string to_string(PairKind k);
PairKind pair_kind_from_string(const std::string& s);

struct PairSpec {
    PairKind kind = PairKind::IndependentPair;
    CompositionSpec base;
    // IndependentPair only: recipe for the second series when it should
    // differ from `base` (e.g. same pattern, different noise level). Absent
    // means a second independently seeded draw of `base`.
    std::shared_ptr<const CompositionSpec> base2;
    std::size_t lag = 0;        // LaggedPair / GrangerPair
    double coupling = 0.0;      // beta, GrangerPair; must be nonzero there
    double noise_sigma = 1.0;   // GrangerPair innovation scale
    double noise_ar = 0.3;      // AR(1) coefficient of y's own dynamics (GrangerPair)

    void validate() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------
// All operations are pure functions of (inputs, seed). Stochastic components
// draw child seeds via derive_seed(seed, component_index), so sub-recipes can
// be regenerated independently.

TimeSeries gen_base(const BasePatternConfig& config, std::size_t length, std::uint64_t seed);

TimeSeries compose(const CompositionSpec& spec, std::size_t length, std::uint64_t seed);

// Returns a new series; the input is not mutated. Anomaly transforms append
// an annotation covering exactly the affected range.
TimeSeries apply_transform(const TimeSeries& ts, const TransformSpec& spec, std::uint64_t seed);

// compose + transforms, with domain-separated child seeds, and provenance
// recording the full recipe.
TimeSeries gen_series(const SeriesRecipe& recipe, std::size_t length, std::uint64_t seed);

std::pair<TimeSeries, TimeSeries> make_pair(const PairSpec& spec, std::size_t length,
                                            std::uint64_t seed);

}  // namespace tsexam::synth
