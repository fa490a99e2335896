#include "tsexam/time_series.hpp"

#include <cmath>

#include "tsexam/errors.hpp"

namespace tsexam {

void TimeSeries::validate(const std::string& context) const {
    if (values_.empty()) {
        throw RangeError(context + ": series is empty");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NumericError(context + ": non-finite value at index " + std::to_string(i));
        }
    }
    for (const auto& a : annotations_) {
        if (a.begin >= a.end || a.end > values_.size()) {
            throw RangeError(context + ": annotation [" + std::to_string(a.begin) + ", " +
                             std::to_string(a.end) + ") outside series of length " +
                             std::to_string(values_.size()));
        }
    }
}

}  // namespace tsexam
