#pragma once

#include <variant>

#include "tsexam/synth.hpp"
#include "tsexam/time_series.hpp"

// JSON (de)serialization of generator recipes. This is the wire format
// templates use to bind answer options to generators; docs/recipe_schema.md
// describes it field by field.

namespace tsexam::synth {

// A template option binds to either a single-series recipe or a pair spec.
using OptionRecipe = std::variant<SeriesRecipe, PairSpec>;

Json to_json(const BasePatternConfig& config);
Json to_json(const CompositionSpec& spec);
Json to_json(const AnomalySpec& spec);
Json to_json(const TransformSpec& spec);
Json to_json(const SeriesRecipe& recipe);
Json to_json(const PairSpec& spec);
Json to_json(const OptionRecipe& recipe);

BasePatternConfig base_pattern_from_json(const Json& j);
CompositionSpec composition_from_json(const Json& j);
AnomalySpec anomaly_from_json(const Json& j);
TransformSpec transform_from_json(const Json& j);
SeriesRecipe series_recipe_from_json(const Json& j);
PairSpec pair_from_json(const Json& j);
OptionRecipe option_recipe_from_json(const Json& j);

// Number of series the recipe produces (1 or 2).
int series_count(const OptionRecipe& recipe);

// Generates the recipe at the given length. Pair recipes return two series,
// single recipes one.
std::vector<TimeSeries> generate_option(const OptionRecipe& recipe, std::size_t length,
                                        std::uint64_t seed);

}  // namespace tsexam::synth
