#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "tsexam/errors.hpp"
#include "tsexam/rng.hpp"
#include "tsexam/stats.hpp"
#include "tsexam/synth.hpp"

using namespace tsexam;
using namespace tsexam::synth;

namespace {

BasePatternConfig base(PatternKind kind) {
    BasePatternConfig c;
    c.kind = kind;
    return c;
}

CompositionComponent leaf(BasePatternConfig c) {
    CompositionComponent comp;
    comp.base = std::move(c);
    return comp;
}

TimeSeries ramp(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    return TimeSeries(std::move(v));
}

}  // namespace

TEST_CASE("additive composition equals the elementwise left-fold of its parts") {
    auto trend = base(PatternKind::LinearTrend);
    trend.a = 0.25;
    auto noise = base(PatternKind::GaussianWhiteNoise);
    noise.sigma = 0.5;

    CompositionSpec spec;
    spec.method = CompositionMethod::Additive;
    spec.components = {leaf(trend), leaf(noise)};

    const std::uint64_t seed = 314;
    const auto combined = compose(spec, 128, seed);
    const auto part0 = gen_base(trend, 128, derive_seed(seed, 0));
    const auto part1 = gen_base(noise, 128, derive_seed(seed, 1));
    for (std::size_t t = 0; t < 128; ++t) {
        CHECK(combined[t] == part0[t] + part1[t]);
    }
}

TEST_CASE("pairwise additive composition is commutative bit-for-bit") {
    auto a = base(PatternKind::SineWave);
    a.period = 12.0;
    auto b = base(PatternKind::LinearTrend);
    b.a = 0.1;

    CompositionSpec ab;
    ab.method = CompositionMethod::Additive;
    ab.components = {leaf(a), leaf(b)};
    CompositionSpec ba;
    ba.method = CompositionMethod::Additive;
    ba.components = {leaf(b), leaf(a)};

    // Deterministic kinds ignore their seed; per-slot child seeds therefore
    // produce identical operands in swapped order.
    const auto x = compose(ab, 64, 9);
    const auto y = compose(ba, 64, 9);
    CHECK(x.values() == y.values());
}

TEST_CASE("multiplicative composition modulates amplitude") {
    auto carrier = base(PatternKind::SineWave);
    carrier.period = 8.0;
    auto envelope = base(PatternKind::Constant);
    envelope.a = 3.0;

    CompositionSpec spec;
    spec.method = CompositionMethod::Multiplicative;
    spec.components = {leaf(carrier), leaf(envelope)};
    const auto combined = compose(spec, 32, 5);
    const auto alone = gen_base(carrier, 32, derive_seed(5, 0));
    for (std::size_t t = 0; t < 32; ++t) CHECK(combined[t] == 3.0 * alone[t]);
}

TEST_CASE("concatenate with explicit lengths places segments back to back") {
    auto lo = base(PatternKind::Constant);
    lo.a = -1.0;
    auto hi = base(PatternKind::Constant);
    hi.a = 1.0;

    CompositionSpec spec;
    spec.method = CompositionMethod::Concatenate;
    auto c0 = leaf(lo);
    c0.length = 10;
    auto c1 = leaf(hi);
    c1.length = 22;
    spec.components = {c0, c1};

    const auto ts = compose(spec, 32, 3);
    for (std::size_t t = 0; t < 10; ++t) CHECK(ts[t] == -1.0);
    for (std::size_t t = 10; t < 32; ++t) CHECK(ts[t] == 1.0);
    REQUIRE(ts.annotations().size() == 2);
    CHECK(ts.annotations()[0] == Annotation{0, 10, "segment"});
    CHECK(ts.annotations()[1] == Annotation{10, 32, "segment"});
}

TEST_CASE("concatenate rejects lengths that do not sum to the target") {
    CompositionSpec spec;
    spec.method = CompositionMethod::Concatenate;
    auto c0 = leaf(base(PatternKind::Constant));
    c0.length = 10;
    auto c1 = leaf(base(PatternKind::Constant));
    c1.length = 10;
    spec.components = {c0, c1};
    CHECK_THROWS_AS(compose(spec, 32, 1), CompositionError);
}

TEST_CASE("concatenate weights split proportionally with largest remainder") {
    CompositionSpec spec;
    spec.method = CompositionMethod::Concatenate;
    auto c0 = leaf(base(PatternKind::Constant));
    c0.base->a = 1.0;
    c0.weight = 1.0;
    auto c1 = leaf(base(PatternKind::Constant));
    c1.base->a = 2.0;
    c1.weight = 3.0;
    spec.components = {c0, c1};

    // 50 * 1/4 = 12.5 and 50 * 3/4 = 37.5; equal remainders, first wins.
    const auto ts = compose(spec, 50, 1);
    REQUIRE(ts.annotations().size() == 2);
    CHECK(ts.annotations()[0].end == 13);
    CHECK(ts.annotations()[1].begin == 13);
    CHECK(ts.annotations()[1].end == 50);
}

TEST_CASE("unweighted concatenate splits evenly") {
    CompositionSpec spec;
    spec.method = CompositionMethod::Concatenate;
    spec.components = {leaf(base(PatternKind::Constant)), leaf(base(PatternKind::Constant)),
                       leaf(base(PatternKind::Constant))};
    const auto ts = compose(spec, 100, 1);
    REQUIRE(ts.annotations().size() == 3);
    CHECK(ts.annotations()[0].end == 34);
    CHECK(ts.annotations()[1].end == 67);
    CHECK(ts.annotations()[2].end == 100);
}

TEST_CASE("nested compositions generate recursively") {
    auto inner = std::make_shared<CompositionSpec>();
    inner->method = CompositionMethod::Additive;
    auto t1 = base(PatternKind::LinearTrend);
    t1.a = 1.0;
    auto t2 = base(PatternKind::Constant);
    t2.a = 10.0;
    inner->components = {leaf(t1), leaf(t2)};

    CompositionSpec outer;
    outer.method = CompositionMethod::Multiplicative;
    CompositionComponent nested;
    nested.nested = inner;
    auto half = base(PatternKind::Constant);
    half.a = 0.5;
    outer.components = {nested, leaf(half)};

    const auto ts = compose(outer, 4, 8);
    CHECK(ts.values() == std::vector<double>{5.0, 5.5, 6.0, 6.5});
}

TEST_CASE("component validation rejects malformed nodes") {
    CompositionSpec spec;
    spec.method = CompositionMethod::Additive;
    CompositionComponent neither;
    spec.components = {neither};
    CHECK_THROWS_AS(spec.validate(), CompositionError);

    CompositionSpec empty;
    CHECK_THROWS_AS(empty.validate(), CompositionError);

    CompositionSpec lengths_outside;
    lengths_outside.method = CompositionMethod::Additive;
    auto c = leaf(base(PatternKind::Constant));
    c.length = 5;
    lengths_outside.components = {c};
    CHECK_THROWS_AS(lengths_outside.validate(), CompositionError);
}

TEST_CASE("sign flip negates every value and leaves the input untouched") {
    const auto original = ramp(16);
    TransformSpec spec;
    spec.kind = TransformKind::SignFlip;
    const auto flipped = apply_transform(original, spec, 1);
    for (std::size_t t = 0; t < 16; ++t) {
        CHECK(flipped[t] == -original[t]);
        CHECK(original[t] == static_cast<double>(t));
    }
}

TEST_CASE("spike raises exactly one point by magnitude times scale") {
    TimeSeries flat(std::vector<double>(32, 0.0));
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::Spike, 7, 5.0, 1};
    const auto out = apply_transform(flat, spec, 1);
    // robust scale of a constant series is 0, so the 0.1 floor applies.
    CHECK(out[7] == doctest::Approx(0.5));
    for (std::size_t t = 0; t < 32; ++t) {
        if (t != 7) CHECK(out[t] == 0.0);
    }
    REQUIRE(out.annotations().size() == 1);
    CHECK(out.annotations()[0] == Annotation{7, 8, "Spike"});
}

TEST_CASE("level shift offsets the tail only") {
    const auto original = ramp(20);
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::LevelShift, 12, 2.0, 1};
    const auto out = apply_transform(original, spec, 1);
    const double s = std::max(stats::robust_scale(original.values()), 0.1);
    for (std::size_t t = 0; t < 12; ++t) CHECK(out[t] == original[t]);
    for (std::size_t t = 12; t < 20; ++t) CHECK(out[t] == doctest::Approx(original[t] + 2.0 * s));
    CHECK(out.annotations()[0] == Annotation{12, 20, "LevelShift"});
}

TEST_CASE("noise burst perturbs only its window and is seed-deterministic") {
    TimeSeries flat(std::vector<double>(40, 1.0));
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::NoiseBurst, 10, 3.0, 8};
    const auto a = apply_transform(flat, spec, 77);
    const auto b = apply_transform(flat, spec, 77);
    CHECK(a.values() == b.values());
    int changed = 0;
    for (std::size_t t = 0; t < 40; ++t) {
        if (t < 10 || t >= 18) {
            CHECK(a[t] == 1.0);
        } else {
            changed += a[t] != 1.0;
        }
    }
    CHECK(changed == 8);
    CHECK(a.annotations()[0] == Annotation{10, 18, "NoiseBurst"});
}

TEST_CASE("flip reverses the window in place") {
    const auto original = ramp(10);
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::Flip, 2, 1.0, 5};
    const auto out = apply_transform(original, spec, 1);
    CHECK(out.values() == std::vector<double>{0, 1, 6, 5, 4, 3, 2, 7, 8, 9});
}

TEST_CASE("scale multiplies the window by the magnitude") {
    const auto original = ramp(8);
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::Scale, 3, -2.0, 3};
    const auto out = apply_transform(original, spec, 1);
    CHECK(out.values() == std::vector<double>{0, 1, 2, -6, -8, -10, 6, 7});
}

TEST_CASE("cutoff replaces the window with the pre-transform median") {
    const auto original = ramp(9);  // median 4
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::Cutoff, 1, 1.0, 4};
    const auto out = apply_transform(original, spec, 1);
    CHECK(out.values() == std::vector<double>{0, 4, 4, 4, 4, 5, 6, 7, 8});
}

TEST_CASE("trend change adds a ramp from the location onward") {
    TimeSeries flat(std::vector<double>(11, 0.0));
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::TrendChange, 6, 10.0, 1};
    const auto out = apply_transform(flat, spec, 1);
    // s = 0.1 floor; ramp (t-6)/5 scaled by 1.0 total.
    for (std::size_t t = 0; t < 6; ++t) CHECK(out[t] == 0.0);
    CHECK(out[6] == doctest::Approx(0.0));
    CHECK(out[8] == doctest::Approx(10.0 * 0.1 * 2.0 / 5.0));
    CHECK(out[10] == doctest::Approx(10.0 * 0.1 * 4.0 / 5.0));
    CHECK(out.annotations()[0] == Annotation{6, 11, "TrendChange"});
}

TEST_CASE("anomaly bounds are enforced") {
    const auto original = ramp(16);
    TransformSpec spec;
    spec.kind = TransformKind::AnomalyInjection;
    spec.anomaly = AnomalySpec{AnomalyType::Spike, 16, 1.0, 1};
    CHECK_THROWS_AS(apply_transform(original, spec, 1), RangeError);
    spec.anomaly = AnomalySpec{AnomalyType::Scale, 12, 1.0, 8};
    CHECK_THROWS_AS(apply_transform(original, spec, 1), RangeError);
    spec.anomaly.reset();
    CHECK_THROWS_AS(apply_transform(original, spec, 1), ConfigError);
}

TEST_CASE("gen_series is deterministic and applies transforms in order") {
    SeriesRecipe recipe;
    auto walk = base(PatternKind::RandomWalk);
    recipe.composition = CompositionSpec::single(walk);
    TransformSpec shift;
    shift.kind = TransformKind::AnomalyInjection;
    shift.anomaly = AnomalySpec{AnomalyType::LevelShift, 64, 4.0, 1};
    TransformSpec flip;
    flip.kind = TransformKind::SignFlip;
    recipe.transforms = {shift, flip};

    const auto a = gen_series(recipe, 128, 2025);
    const auto b = gen_series(recipe, 128, 2025);
    CHECK(a.values() == b.values());
    REQUIRE(a.annotations().size() == 1);
    CHECK(a.annotations()[0].label == "LevelShift");

    // Flip after shift: the tail is (x + 4s) negated, so the level drops.
    const double head = stats::mean(std::span(a.values()).subspan(0, 64));
    const double tail = stats::mean(std::span(a.values()).subspan(64));
    const auto plain = gen_series([&] {
        SeriesRecipe r;
        r.composition = recipe.composition;
        return r;
    }(), 128, 2025);
    const double shift_amount = std::max(stats::robust_scale(plain.values()), 0.1) * 4.0;
    CHECK(head - tail == doctest::Approx(-(stats::mean(std::span(plain.values()).subspan(0, 64)) -
                                           stats::mean(std::span(plain.values()).subspan(64))) +
                                         shift_amount));
}
