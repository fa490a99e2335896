#include "tsexam/text_format.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>

#include "tsexam/errors.hpp"

namespace tsexam::harness {

namespace {

// Truncates a plain (non-exponent) decimal digit string to one decimal digit.
std::string cut_plain(const std::string& digits) {
    const std::size_t point = digits.find('.');
    if (point == std::string::npos) return digits + ".0";
    return digits.substr(0, point + 2);
}

// Expands "<mantissa>e<exp>" and truncates, keeping only what the single
// decimal digit needs.
std::string cut_scientific(const std::string& repr, std::size_t epos) {
    const std::string mantissa = repr.substr(0, epos);
    const int exp = std::stoi(repr.substr(epos + 1));

    std::string m = mantissa;
    int before_point = static_cast<int>(m.size());
    const std::size_t point = m.find('.');
    if (point != std::string::npos) {
        before_point = static_cast<int>(point);
        m.erase(point, 1);
    }
    const int new_point = before_point + exp;

    if (new_point <= 0) {
        // |v| < 1: integer part 0; the first decimal digit is a leading zero
        // unless the point lands directly before the digits.
        const char first_decimal = new_point == 0 ? m[0] : '0';
        return std::string("0.") + first_decimal;
    }
    std::string integer;
    for (int i = 0; i < new_point; ++i) {
        integer += i < static_cast<int>(m.size()) ? m[static_cast<std::size_t>(i)] : '0';
    }
    const char decimal =
        new_point < static_cast<int>(m.size()) ? m[static_cast<std::size_t>(new_point)] : '0';
    return integer + "." + decimal;
}

}  // namespace

std::string format_value(double v) {
    if (!std::isfinite(v)) throw NumericError("format_value: non-finite value");

    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string repr(buf, res.ptr);

    std::string sign;
    if (!repr.empty() && repr.front() == '-') {
        sign = "-";
        repr.erase(repr.begin());
    }
    const std::size_t epos = repr.find_first_of("eE");
    const std::string cut =
        epos == std::string::npos ? cut_plain(repr) : cut_scientific(repr, epos);
    return sign + cut;
}

std::string serialize_text(std::span<const double> values) {
    if (values.empty()) throw ConfigError("serialize_text: empty series");
    std::string out;
    out.reserve(values.size() * 6);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_value(values[i]);
    }
    return out;
}

std::string serialize_text(const TimeSeries& ts) { return serialize_text(ts.values()); }

}  // namespace tsexam::harness
