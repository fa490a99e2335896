#include "tsexam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsexam/errors.hpp"
#include "tsexam/recipe_json.hpp"
#include "tsexam/rng.hpp"
#include "tsexam/stats.hpp"

namespace tsexam::synth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Warm-up steps discarded before emitting AR/MA values so the emitted window
// is close to the stationary distribution.
constexpr std::size_t kBurnIn = 200;

// Additive scale floor for anomalies on flat series.
constexpr double kScaleFloor = 0.1;

void require_finite(double v, const char* kind, const char* field) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(kind) + ": parameter '" + field + "' is not finite");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(PatternKind k) {
    switch (k) {
        case PatternKind::LinearTrend: return "LinearTrend";
        case PatternKind::ExponentialTrend: return "ExponentialTrend";
        case PatternKind::LogTrend: return "LogTrend";
        case PatternKind::Constant: return "Constant";
        case PatternKind::GaussianWhiteNoise: return "GaussianWhiteNoise";
        case PatternKind::RandomWalk: return "RandomWalk";
        case PatternKind::SineWave: return "SineWave";
        case PatternKind::SawtoothWave: return "SawtoothWave";
        case PatternKind::SquareWave: return "SquareWave";
        case PatternKind::MovingAverage: return "MovingAverage";
        case PatternKind::Autoregressive: return "Autoregressive";
    }
    return "?";
}

PatternKind pattern_kind_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(PatternKind::Autoregressive); ++i) {
        const auto k = static_cast<PatternKind>(i);
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown base pattern kind '" + s + "'");
}

std::string to_string(CompositionMethod m) {
    switch (m) {
        case CompositionMethod::Additive: return "Additive";
        case CompositionMethod::Multiplicative: return "Multiplicative";
        case CompositionMethod::Concatenate: return "Concatenate";
    }
    return "?";
}

CompositionMethod composition_method_from_string(const std::string& s) {
    if (s == "Additive") return CompositionMethod::Additive;
    if (s == "Multiplicative") return CompositionMethod::Multiplicative;
    if (s == "Concatenate") return CompositionMethod::Concatenate;
    throw ConfigError("unknown composition method '" + s + "'");
}

std::string to_string(TransformKind k) {
    return k == TransformKind::SignFlip ? "SignFlip" : "AnomalyInjection";
}

TransformKind transform_kind_from_string(const std::string& s) {
    if (s == "SignFlip") return TransformKind::SignFlip;
    if (s == "AnomalyInjection") return TransformKind::AnomalyInjection;
    throw ConfigError("unknown transform kind '" + s + "'");
}

std::string to_string(AnomalyType t) {
    switch (t) {
        case AnomalyType::Spike: return "Spike";
        case AnomalyType::LevelShift: return "LevelShift";
        case AnomalyType::NoiseBurst: return "NoiseBurst";
        case AnomalyType::Flip: return "Flip";
        case AnomalyType::Scale: return "Scale";
        case AnomalyType::Cutoff: return "Cutoff";
        case AnomalyType::TrendChange: return "TrendChange";
    }
    return "?";
}

AnomalyType anomaly_type_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(AnomalyType::TrendChange); ++i) {
        const auto t = static_cast<AnomalyType>(i);
        if (to_string(t) == s) return t;
    }
    throw ConfigError("unknown anomaly type '" + s + "'");
}

std::string to_string(PairKind k) {
    switch (k) {
        case PairKind::LaggedPair: return "LaggedPair";
        case PairKind::GrangerPair: return "GrangerPair";
        case PairKind::IndependentPair: return "IndependentPair";
    }
    return "?";
}

PairKind pair_kind_from_string(const std::string& s) {
    if (s == "LaggedPair") return PairKind::LaggedPair;
    if (s == "GrangerPair") return PairKind::GrangerPair;
    if (s == "IndependentPair") return PairKind::IndependentPair;
    throw ConfigError("unknown pair kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void BasePatternConfig::validate() const {
    const char* name = to_string(kind).c_str();
    const std::string kname = to_string(kind);
    switch (kind) {
        case PatternKind::LinearTrend:
        case PatternKind::ExponentialTrend:
        case PatternKind::LogTrend:
        case PatternKind::Constant:
            require_finite(a, kname.c_str(), "a");
            break;
        case PatternKind::GaussianWhiteNoise:
        case PatternKind::RandomWalk:
            require_finite(sigma, kname.c_str(), "sigma");
            if (sigma < 0.0) throw ConfigError(kname + ": sigma must be >= 0");
            break;
        case PatternKind::SineWave:
            require_finite(phase, kname.c_str(), "phase");
            require_finite(amplitude_slope, kname.c_str(), "amplitude_slope");
            [[fallthrough]];
        case PatternKind::SawtoothWave:
        case PatternKind::SquareWave:
            require_finite(amplitude, kname.c_str(), "amplitude");
            require_finite(period, kname.c_str(), "period");
            if (period <= 0.0) throw ConfigError(kname + ": period must be > 0");
            break;
        case PatternKind::MovingAverage:
        case PatternKind::Autoregressive:
            require_finite(sigma, kname.c_str(), "sigma");
            if (sigma < 0.0) throw ConfigError(kname + ": sigma must be >= 0");
            if (coeffs.empty()) throw ConfigError(kname + ": coefficient vector is empty");
            for (double c : coeffs) require_finite(c, kname.c_str(), "coeffs");
            break;
    }
    (void)name;
}

bool is_stationary(std::span<const double> ar_coeffs) {
    if (ar_coeffs.empty()) return true;
    // All roots of 1 - a_1 z - ... - a_p z^p outside the unit circle is
    // equivalent to all roots of z^p - a_1 z^{p-1} - ... - a_p strictly
    // inside it. Schur-Cohn reduction: stable iff |c_0| < |c_n| at every
    // stage of T[P](z)/z with T[P] = c_n P(z) - c_0 P*(z).
    const std::size_t p = ar_coeffs.size();
    std::vector<double> c(p + 1);
    for (std::size_t i = 0; i < p; ++i) c[i] = -ar_coeffs[p - 1 - i];
    c[p] = 1.0;

    std::size_t n = p;
    while (n >= 1) {
        if (!(std::abs(c[0]) < std::abs(c[n]))) return false;
        std::vector<double> d(n);
        for (std::size_t i = 1; i <= n; ++i) {
            d[i - 1] = c[n] * c[i] - c[0] * c[n - i];
        }
        c = std::move(d);
        --n;
    }
    return true;
}

void AnomalySpec::validate() const {
    if (!std::isfinite(magnitude)) throw ConfigError("anomaly: magnitude is not finite");
    if (width < 1) throw ConfigError("anomaly: width must be >= 1");
}

void TransformSpec::validate() const {
    if (kind == TransformKind::AnomalyInjection) {
        if (!anomaly) throw ConfigError("AnomalyInjection transform without anomaly spec");
        anomaly->validate();
    } else if (anomaly) {
        throw ConfigError("anomaly spec present on a non-anomaly transform");
    }
}

void SeriesRecipe::validate() const {
    composition.validate();
    for (const auto& t : transforms) t.validate();
}

void CompositionSpec::validate() const {
    if (components.empty()) throw CompositionError("composition has no components");
    bool any_length = false;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& comp = components[i];
        if (comp.base.has_value() == (comp.nested != nullptr)) {
            throw CompositionError("component " + std::to_string(i) +
                                   " must hold exactly one of a base pattern or a nested composition");
        }
        if (comp.base) comp.base->validate();
        if (comp.nested) comp.nested->validate();
        if (comp.length) any_length = true;
        if (comp.weight && *comp.weight <= 0.0) {
            throw CompositionError("component " + std::to_string(i) + " has non-positive weight");
        }
        if (method != CompositionMethod::Concatenate && (comp.length || comp.weight)) {
            throw CompositionError("component " + std::to_string(i) +
                                   " carries a length/weight outside Concatenate");
        }
    }
    if (any_length) {
        for (std::size_t i = 0; i < components.size(); ++i) {
            if (!components[i].length) {
                throw CompositionError("Concatenate mixes explicit and implicit lengths (component " +
                                       std::to_string(i) + " has none)");
            }
        }
    }
}

CompositionSpec CompositionSpec::single(BasePatternConfig base) {
    CompositionSpec spec;
    spec.method = CompositionMethod::Additive;
    CompositionComponent comp;
    comp.base = std::move(base);
    spec.components.push_back(std::move(comp));
    return spec;
}

void PairSpec::validate() const {
    base.validate();
    switch (kind) {
        case PairKind::LaggedPair:
            break;
        case PairKind::GrangerPair:
            if (coupling == 0.0 || !std::isfinite(coupling)) {
                throw ConfigError("GrangerPair: coupling must be nonzero and finite");
            }
            if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) {
                throw ConfigError("GrangerPair: noise_sigma must be >= 0");
            }
            if (!std::isfinite(noise_ar) || std::abs(noise_ar) >= 1.0) {
                throw ConfigError("GrangerPair: noise_ar must lie in (-1, 1)");
            }
            break;
        case PairKind::IndependentPair:
            if (base2) base2->validate();
            break;
    }
    if (kind != PairKind::IndependentPair && base2) {
        throw ConfigError(to_string(kind) + ": base2 is only valid for IndependentPair");
    }
}

// ---------------------------------------------------------------------------
// gen_base
// ---------------------------------------------------------------------------

TimeSeries gen_base(const BasePatternConfig& config, std::size_t length, std::uint64_t seed) {
    if (length < 1) throw ConfigError("gen_base: length must be >= 1");
    config.validate();

    std::vector<double> y(length);
    SeededRng rng(seed);

    switch (config.kind) {
        case PatternKind::LinearTrend:
            for (std::size_t t = 0; t < length; ++t) y[t] = config.a * static_cast<double>(t);
            break;
        case PatternKind::ExponentialTrend:
            for (std::size_t t = 0; t < length; ++t) y[t] = std::exp(config.a * static_cast<double>(t));
            break;
        case PatternKind::LogTrend:
            // Time index starts at 1 here so log is defined at the first step.
            for (std::size_t t = 0; t < length; ++t) y[t] = config.a * std::log(static_cast<double>(t + 1));
            break;
        case PatternKind::Constant:
            std::fill(y.begin(), y.end(), config.a);
            break;
        case PatternKind::GaussianWhiteNoise:
            for (std::size_t t = 0; t < length; ++t) y[t] = config.sigma * rng.normal();
            break;
        case PatternKind::RandomWalk: {
            double acc = 0.0;
            for (std::size_t t = 0; t < length; ++t) {
                acc += config.sigma * rng.normal();
                y[t] = acc;
            }
            break;
        }
        case PatternKind::SineWave:
            for (std::size_t t = 0; t < length; ++t) {
                const double td = static_cast<double>(t);
                // Phase is computed on t mod period so integer periods repeat
                // bit-exactly.
                const double tm = std::fmod(td, config.period);
                const double envelope = 1.0 + config.amplitude_slope * td;
                y[t] = config.amplitude * envelope * std::sin(kTwoPi * tm / config.period + config.phase);
            }
            break;
        case PatternKind::SawtoothWave:
            for (std::size_t t = 0; t < length; ++t) {
                const double frac = std::fmod(static_cast<double>(t), config.period) / config.period;
                y[t] = config.amplitude * (2.0 * frac - 1.0);
            }
            break;
        case PatternKind::SquareWave:
            for (std::size_t t = 0; t < length; ++t) {
                const double frac = std::fmod(static_cast<double>(t), config.period) / config.period;
                y[t] = frac < 0.5 ? config.amplitude : -config.amplitude;
            }
            break;
        case PatternKind::MovingAverage: {
            const std::size_t q = config.coeffs.size();
            std::vector<double> eps(kBurnIn + length);
            for (double& e : eps) e = config.sigma * rng.normal();
            for (std::size_t t = 0; t < length; ++t) {
                const std::size_t u = kBurnIn + t;
                double v = eps[u];
                for (std::size_t i = 1; i <= q; ++i) v += config.coeffs[i - 1] * eps[u - i];
                y[t] = v;
            }
            break;
        }
        case PatternKind::Autoregressive: {
            const std::size_t p = config.coeffs.size();
            std::vector<double> buf(kBurnIn + length, 0.0);
            for (std::size_t t = 0; t < buf.size(); ++t) {
                double v = config.sigma * rng.normal();
                for (std::size_t i = 1; i <= p && i <= t; ++i) {
                    v += config.coeffs[i - 1] * buf[t - i];
                }
                buf[t] = v;
            }
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(kBurnIn), buf.end(), y.begin());
            break;
        }
    }

    for (std::size_t t = 0; t < length; ++t) {
        if (!std::isfinite(y[t])) {
            throw NumericError("gen_base(" + to_string(config.kind) + "): non-finite value at t=" +
                               std::to_string(t));
        }
    }

    TimeSeries ts(std::move(y));
    Json prov;
    prov["recipe"] = to_json(config);
    prov["seed"] = seed;
    prov["length"] = length;
    ts.set_provenance(std::move(prov));
    return ts;
}

// ---------------------------------------------------------------------------
// compose
// ---------------------------------------------------------------------------

namespace {

TimeSeries generate_component(const CompositionComponent& comp, std::size_t length,
                              std::uint64_t seed) {
    if (comp.base) return gen_base(*comp.base, length, seed);
    return compose(*comp.nested, length, seed);
}

std::vector<std::size_t> concat_lengths(const CompositionSpec& spec, std::size_t target) {
    const std::size_t k = spec.components.size();
    std::vector<std::size_t> lens(k);
    if (spec.components.front().length) {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            lens[i] = *spec.components[i].length;
            sum += lens[i];
        }
        if (sum != target) {
            throw CompositionError("Concatenate lengths sum to " + std::to_string(sum) +
                                   ", target is " + std::to_string(target));
        }
        return lens;
    }
    // Weight mode: proportional split with largest-remainder rounding so the
    // segment count is independent of the target length.
    std::vector<double> w(k, 1.0);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (spec.components[i].weight) w[i] = *spec.components[i].weight;
        total += w[i];
    }
    std::size_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> rema(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double exact = static_cast<double>(target) * w[i] / total;
        lens[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += lens[i];
        rema[i] = {exact - std::floor(exact), i};
    }
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < target; ++r, ++assigned) {
        lens[rema[r % k].second] += 1;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (lens[i] == 0) {
            throw CompositionError("Concatenate component " + std::to_string(i) +
                                   " resolves to zero length at target " + std::to_string(target));
        }
    }
    return lens;
}

}  // namespace

TimeSeries compose(const CompositionSpec& spec, std::size_t length, std::uint64_t seed) {
    if (length < 1) throw ConfigError("compose: length must be >= 1");
    spec.validate();

    std::vector<double> out;
    std::vector<Annotation> annotations;

    if (spec.method == CompositionMethod::Concatenate) {
        const auto lens = concat_lengths(spec, length);
        out.reserve(length);
        std::size_t offset = 0;
        for (std::size_t i = 0; i < spec.components.size(); ++i) {
            TimeSeries part = generate_component(spec.components[i], lens[i], derive_seed(seed, i));
            out.insert(out.end(), part.values().begin(), part.values().end());
            annotations.push_back({offset, offset + lens[i], "segment"});
            offset += lens[i];
        }
    } else {
        for (std::size_t i = 0; i < spec.components.size(); ++i) {
            TimeSeries part = generate_component(spec.components[i], length, derive_seed(seed, i));
            if (part.size() != length) {
                throw CompositionError("component " + std::to_string(i) + " produced length " +
                                       std::to_string(part.size()) + ", expected " +
                                       std::to_string(length));
            }
            if (i == 0) {
                out = part.values();
            } else if (spec.method == CompositionMethod::Additive) {
                for (std::size_t t = 0; t < length; ++t) out[t] += part[t];
            } else {
                for (std::size_t t = 0; t < length; ++t) out[t] *= part[t];
            }
        }
    }

    for (std::size_t t = 0; t < out.size(); ++t) {
        if (!std::isfinite(out[t])) {
            throw NumericError("compose(" + to_string(spec.method) + "): non-finite value at t=" +
                               std::to_string(t));
        }
    }

    TimeSeries ts(std::move(out));
    for (auto& a : annotations) ts.add_annotation(std::move(a));
    Json prov;
    prov["recipe"] = to_json(spec);
    prov["seed"] = seed;
    prov["length"] = length;
    ts.set_provenance(std::move(prov));
    return ts;
}

// ---------------------------------------------------------------------------
// apply_transform
// ---------------------------------------------------------------------------

TimeSeries apply_transform(const TimeSeries& ts, const TransformSpec& spec, std::uint64_t seed) {
    spec.validate();
    ts.validate("apply_transform input");

    TimeSeries out = ts;
    auto& y = out.values();
    const std::size_t n = y.size();

    if (spec.kind == TransformKind::SignFlip) {
        for (double& v : y) v = -v;
    } else {
        const AnomalySpec& an = *spec.anomaly;
        const std::size_t loc = an.location;
        if (loc >= n) {
            throw RangeError("anomaly location " + std::to_string(loc) + " outside series of length " +
                             std::to_string(n));
        }
        const bool windowed = an.type == AnomalyType::NoiseBurst || an.type == AnomalyType::Flip ||
                              an.type == AnomalyType::Scale || an.type == AnomalyType::Cutoff;
        std::size_t end = n;
        if (an.type == AnomalyType::Spike) {
            end = loc + 1;
        } else if (windowed) {
            end = loc + an.width;
            if (end > n) {
                throw RangeError("anomaly window [" + std::to_string(loc) + ", " + std::to_string(end) +
                                 ") outside series of length " + std::to_string(n));
            }
        }

        const double s = std::max(stats::robust_scale(ts.values()), kScaleFloor);
        SeededRng rng(seed);
        switch (an.type) {
            case AnomalyType::Spike:
                y[loc] += an.magnitude * s;
                break;
            case AnomalyType::LevelShift:
                for (std::size_t t = loc; t < n; ++t) y[t] += an.magnitude * s;
                break;
            case AnomalyType::NoiseBurst:
                for (std::size_t t = loc; t < end; ++t) y[t] += an.magnitude * s * rng.normal();
                break;
            case AnomalyType::Flip:
                std::reverse(y.begin() + static_cast<std::ptrdiff_t>(loc),
                             y.begin() + static_cast<std::ptrdiff_t>(end));
                break;
            case AnomalyType::Scale:
                for (std::size_t t = loc; t < end; ++t) y[t] *= an.magnitude;
                break;
            case AnomalyType::Cutoff: {
                const double level = stats::median(ts.values());
                for (std::size_t t = loc; t < end; ++t) y[t] = level;
                break;
            }
            case AnomalyType::TrendChange: {
                const double denom = static_cast<double>(n - loc);
                for (std::size_t t = loc; t < n; ++t) {
                    y[t] += an.magnitude * s * static_cast<double>(t - loc) / denom;
                }
                break;
            }
        }
        out.add_annotation({loc, end, to_string(an.type)});
    }

    Json prov = ts.provenance();
    Json record;
    record["transform"] = to_json(spec);
    record["seed"] = seed;
    if (!prov.contains("transforms")) prov["transforms"] = Json::array();
    prov["transforms"].push_back(std::move(record));
    out.set_provenance(std::move(prov));
    out.validate("apply_transform output");
    return out;
}

TimeSeries gen_series(const SeriesRecipe& recipe, std::size_t length, std::uint64_t seed) {
    recipe.validate();
    TimeSeries ts = compose(recipe.composition, length, derive_seed(seed, "compose"));
    const std::uint64_t transform_root = derive_seed(seed, "transform");
    for (std::size_t i = 0; i < recipe.transforms.size(); ++i) {
        ts = apply_transform(ts, recipe.transforms[i], derive_seed(transform_root, i));
    }
    Json prov;
    prov["recipe"] = to_json(recipe);
    prov["seed"] = seed;
    prov["length"] = length;
    prov["annotated"] = !ts.annotations().empty();
    ts.set_provenance(std::move(prov));
    return ts;
}

// ---------------------------------------------------------------------------
// make_pair
// ---------------------------------------------------------------------------

std::pair<TimeSeries, TimeSeries> make_pair(const PairSpec& spec, std::size_t length,
                                            std::uint64_t seed) {
    if (length < 1) throw ConfigError("make_pair: length must be >= 1");
    spec.validate();

    auto stamp = [&](TimeSeries& ts, const char* role) {
        Json prov;
        prov["recipe"] = to_json(spec);
        prov["seed"] = seed;
        prov["length"] = length;
        prov["role"] = role;
        ts.set_provenance(std::move(prov));
    };

    switch (spec.kind) {
        case PairKind::LaggedPair: {
            if (spec.lag >= length) {
                throw RangeError("LaggedPair: lag " + std::to_string(spec.lag) +
                                 " must be < length " + std::to_string(length));
            }
            TimeSeries x = compose(spec.base, length, derive_seed(seed, 0));
            std::vector<double> yv(length);
            // The exposed head repeats the first observation; the true lag
            // relationship starts at t = lag.
            for (std::size_t t = 0; t < length; ++t) {
                yv[t] = t >= spec.lag ? x[t - spec.lag] : x[0];
            }
            TimeSeries y(std::move(yv));
            stamp(x, "x");
            stamp(y, "y");
            return {std::move(x), std::move(y)};
        }
        case PairKind::GrangerPair: {
            if (spec.lag >= length) {
                throw RangeError("GrangerPair: lag " + std::to_string(spec.lag) +
                                 " must be < length " + std::to_string(length));
            }
            // x is generated with `lag` extra leading points so y has a full
            // driver history from t = 0.
            TimeSeries x_ext = compose(spec.base, length + spec.lag, derive_seed(seed, 0));
            SeededRng rng(derive_seed(seed, 1));
            double u = 0.0;
            for (std::size_t t = 0; t < kBurnIn; ++t) {
                u = spec.noise_ar * u + spec.noise_sigma * rng.normal();
            }
            std::vector<double> xv(x_ext.values().begin() + static_cast<std::ptrdiff_t>(spec.lag),
                                   x_ext.values().end());
            std::vector<double> yv(length);
            for (std::size_t t = 0; t < length; ++t) {
                u = spec.noise_ar * u + spec.noise_sigma * rng.normal();
                yv[t] = spec.coupling * x_ext[t] + u;
            }
            TimeSeries x(std::move(xv));
            TimeSeries y(std::move(yv));
            x.validate("GrangerPair x");
            y.validate("GrangerPair y");
            stamp(x, "x");
            stamp(y, "y");
            return {std::move(x), std::move(y)};
        }
        case PairKind::IndependentPair: {
            TimeSeries x = compose(spec.base, length, derive_seed(seed, 0));
            const CompositionSpec& second = spec.base2 ? *spec.base2 : spec.base;
            TimeSeries y = compose(second, length, derive_seed(seed, 1));
            stamp(x, "x");
            stamp(y, "y");
            return {std::move(x), std::move(y)};
        }
    }
    throw ConfigError("make_pair: unreachable pair kind");
}

}  // namespace tsexam::synth
