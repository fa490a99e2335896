#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "tsexam/digest.hpp"
#include "tsexam/errors.hpp"
#include "tsexam/plot.hpp"
#include "tsexam/text_format.hpp"
#include "tsexam/time_series.hpp"

using namespace tsexam;
using harness::format_value;
using harness::render_plot;
using harness::serialize_text;

TEST_CASE("format_value truncates to one decimal place") {
    CHECK(format_value(1.0) == "1.0");
    CHECK(format_value(2.0) == "2.0");
    CHECK(format_value(1.27) == "1.2");
    CHECK(format_value(-1.27) == "-1.2");
    CHECK(format_value(0.04) == "0.0");
    CHECK(format_value(-0.04) == "-0.0");
    CHECK(format_value(0.0) == "0.0");
    CHECK(format_value(12.0) == "12.0");
    CHECK(format_value(-125.0) == "-125.0");
    CHECK(format_value(3.999999) == "3.9");
    CHECK(format_value(-3.999999) == "-3.9");
}

TEST_CASE("format_value acts on the shortest decimal form") {
    // double(0.3) is slightly below 0.3, but its decimal form is "0.3".
    CHECK(format_value(0.3) == "0.3");
    CHECK(format_value(0.1 + 0.2) == "0.3");
    CHECK(format_value(2.675) == "2.6");
}

TEST_CASE("format_value keeps large magnitudes unscaled") {
    CHECK(format_value(1234.5678) == "1234.5");
    CHECK(format_value(-98765.4321) == "-98765.4");
    CHECK(format_value(1e6) == "1000000.0");
    CHECK(format_value(1e-7) == "0.0");
}

TEST_CASE("format_value rejects non-finite input") {
    CHECK_THROWS_AS(format_value(std::nan("")), NumericError);
    CHECK_THROWS_AS(format_value(INFINITY), NumericError);
}

TEST_CASE("reparsing a token recovers the value to within 0.1") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-4.0, 4.0);
    std::uniform_real_distribution<double> sign_mix(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = sign_mix(rng) * std::pow(10.0, mag(rng));
        const double back = std::stod(format_value(v));
        CHECK(std::abs(back - v) < 0.1);
        // Truncation moves toward zero, never away.
        CHECK(std::abs(back) <= std::abs(v) + 1e-9);
    }
}

TEST_CASE("serialize_text joins with commas and no spaces") {
    CHECK(serialize_text(std::vector<double>{1.0, 2.0, 3.0}) == "1.0,2.0,3.0");
    CHECK(serialize_text(std::vector<double>{1.27, -1.27}) == "1.2,-1.2");
    CHECK(serialize_text(std::vector<double>{0.04}) == "0.0");
    CHECK_THROWS_AS(serialize_text(std::vector<double>{}), ConfigError);
}

namespace {

std::uint32_t be32(const std::vector<std::uint8_t>& png, std::size_t at) {
    return (std::uint32_t(png[at]) << 24) | (std::uint32_t(png[at + 1]) << 16) |
           (std::uint32_t(png[at + 2]) << 8) | std::uint32_t(png[at + 3]);
}

TimeSeries ramp(std::size_t n, double slope) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = slope * double(t);
    return TimeSeries(std::move(v));
}

}  // namespace

TEST_CASE("render_plot emits a PNG with the pinned panel geometry") {
    const auto png = render_plot({ramp(128, 0.5)});
    REQUIRE(png.size() > 8);
    const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    for (int i = 0; i < 8; ++i) CHECK(png[i] == magic[i]);
    // IHDR: length(4) type(4) width(4) height(4) at offset 8.
    CHECK(be32(png, 16) == 800);
    CHECK(be32(png, 20) == 400);
}

TEST_CASE("two series stack into a double-height image") {
    const auto png = render_plot({ramp(64, 1.0), ramp(64, -1.0)});
    CHECK(be32(png, 16) == 800);
    CHECK(be32(png, 20) == 800);
}

TEST_CASE("render_plot is deterministic") {
    const auto a = render_plot({ramp(128, 0.25), ramp(128, 2.0)});
    const auto b = render_plot({ramp(128, 0.25), ramp(128, 2.0)});
    CHECK(a == b);
}

TEST_CASE("render_plot handles a flat series") {
    const auto png = render_plot({ramp(32, 0.0)});
    CHECK(be32(png, 16) == 800);
    CHECK(be32(png, 20) == 400);
}

TEST_CASE("render_plot rejects zero or more than two series") {
    CHECK_THROWS_AS(render_plot({}), ConfigError);
    CHECK_THROWS_AS(render_plot({ramp(8, 1.0), ramp(8, 1.0), ramp(8, 1.0)}), ConfigError);
}

TEST_CASE("fnv1a64 matches known vectors") {
    CHECK(harness::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(harness::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(harness::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("digest_label is fixed-width hex") {
    CHECK(harness::digest_label(0x100000001b3ULL) == "fnv1a64:00000100000001b3");
    CHECK(harness::digest_label(0) == "fnv1a64:0000000000000000");
}
