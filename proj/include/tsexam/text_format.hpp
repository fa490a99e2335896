#pragma once

#include <span>
#include <string>

#include "tsexam/time_series.hpp"

namespace tsexam::harness {

// One value truncated toward zero to exactly one decimal place, acting on
// the shortest round-trip decimal form of the double (so a value that prints
// as "0.3" serializes as "0.3", and 1.27 as "1.2"). "-0.0" is produced for
// negative values above -0.1.
std::string format_value(double v);

// Comma-joined format_value over the series, no spaces.
std::string serialize_text(std::span<const double> values);
std::string serialize_text(const TimeSeries& ts);

}  // namespace tsexam::harness
