#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace tsexam {

using Json = nlohmann::ordered_json;

// A labeled half-open index range [begin, end) inside a series, used to mark
// injected anomalies and regime boundaries.
struct Annotation {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string label;

    bool operator==(const Annotation&) const = default;
};

// A finite real-valued sequence plus the recipe/seed that produced it.
// Invariants (enforced by validate()): nonempty, all values finite, all
// annotation ranges within [0, size()).
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {}

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    // Recipe tree and seed that generated this series. Opaque JSON; the
    // generator that produced the series fills it in.
    const Json& provenance() const { return provenance_; }
    void set_provenance(Json p) { provenance_ = std::move(p); }

    const std::vector<Annotation>& annotations() const { return annotations_; }
    void add_annotation(Annotation a) { annotations_.push_back(std::move(a)); }
    void clear_annotations() { annotations_.clear(); }

    // Throws NumericError / RangeError on invariant violation. `context`
    // names the producing stage in the message.
    void validate(const std::string& context) const;

private:
    std::vector<double> values_;
    Json provenance_ = Json::object();
    std::vector<Annotation> annotations_;
};

}  // namespace tsexam
