#include "tsexam/recipe_json.hpp"

#include <set>
#include <string>

#include "tsexam/errors.hpp"

namespace tsexam::synth {

namespace {

const Json& require_object(const Json& j, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
    return j;
}

std::string require_string(const Json& j, const char* key, const char* what) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw ConfigError(std::string(what) + ": missing string field '" + key + "'");
    }
    return j[key].get<std::string>();
}

double number_or(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j[key].get<double>();
}

std::size_t index_or(const Json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) {
        throw ConfigError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return j[key].get<std::size_t>();
}

}  // namespace

// ---------------------------------------------------------------------------
// to_json
// ---------------------------------------------------------------------------

Json to_json(const BasePatternConfig& config) {
    Json params = Json::object();
    switch (config.kind) {
        case PatternKind::LinearTrend:
        case PatternKind::ExponentialTrend:
        case PatternKind::LogTrend:
        case PatternKind::Constant:
            params["a"] = config.a;
            break;
        case PatternKind::GaussianWhiteNoise:
        case PatternKind::RandomWalk:
            params["sigma"] = config.sigma;
            break;
        case PatternKind::SineWave:
            params["amplitude"] = config.amplitude;
            params["period"] = config.period;
            if (config.phase != 0.0) params["phase"] = config.phase;
            if (config.amplitude_slope != 0.0) params["amplitude_slope"] = config.amplitude_slope;
            break;
        case PatternKind::SawtoothWave:
        case PatternKind::SquareWave:
            params["amplitude"] = config.amplitude;
            params["period"] = config.period;
            break;
        case PatternKind::MovingAverage:
        case PatternKind::Autoregressive:
            params["coeffs"] = config.coeffs;
            params["sigma"] = config.sigma;
            break;
    }
    Json j;
    j["type"] = "base";
    j["kind"] = to_string(config.kind);
    j["params"] = std::move(params);
    return j;
}

Json to_json(const CompositionSpec& spec) {
    Json j;
    j["type"] = "compose";
    j["method"] = to_string(spec.method);
    Json comps = Json::array();
    for (const auto& comp : spec.components) {
        Json node = comp.base ? to_json(*comp.base) : to_json(*comp.nested);
        if (comp.length) node["length"] = *comp.length;
        if (comp.weight) node["weight"] = *comp.weight;
        comps.push_back(std::move(node));
    }
    j["components"] = std::move(comps);
    return j;
}

Json to_json(const AnomalySpec& spec) {
    Json j;
    j["type"] = to_string(spec.type);
    j["location"] = spec.location;
    j["magnitude"] = spec.magnitude;
    j["width"] = spec.width;
    return j;
}

Json to_json(const TransformSpec& spec) {
    Json j;
    j["kind"] = to_string(spec.kind);
    if (spec.anomaly) j["anomaly"] = to_json(*spec.anomaly);
    return j;
}

Json to_json(const SeriesRecipe& recipe) {
    Json j;
    j["type"] = "series";
    j["composition"] = to_json(recipe.composition);
    Json transforms = Json::array();
    for (const auto& t : recipe.transforms) transforms.push_back(to_json(t));
    j["transforms"] = std::move(transforms);
    return j;
}

Json to_json(const PairSpec& spec) {
    Json j;
    j["type"] = "pair";
    j["kind"] = to_string(spec.kind);
    j["base"] = to_json(spec.base);
    if (spec.base2) j["base2"] = to_json(*spec.base2);
    switch (spec.kind) {
        case PairKind::LaggedPair:
            j["lag"] = spec.lag;
            break;
        case PairKind::GrangerPair:
            j["lag"] = spec.lag;
            j["coupling"] = spec.coupling;
            j["noise_sigma"] = spec.noise_sigma;
            j["noise_ar"] = spec.noise_ar;
            break;
        case PairKind::IndependentPair:
            break;
    }
    return j;
}

Json to_json(const OptionRecipe& recipe) {
    return std::visit([](const auto& r) { return to_json(r); }, recipe);
}

// ---------------------------------------------------------------------------
// from_json
// ---------------------------------------------------------------------------

BasePatternConfig base_pattern_from_json(const Json& j) {
    require_object(j, "base pattern");
    BasePatternConfig config;
    config.kind = pattern_kind_from_string(require_string(j, "kind", "base pattern"));

    const Json params = j.value("params", Json::object());
    require_object(params, "base pattern params");
    static const std::set<std::string> known = {
        "a", "amplitude", "period", "phase", "amplitude_slope", "sigma", "coeffs"};
    for (const auto& [key, _] : params.items()) {
        if (!known.count(key)) {
            throw ConfigError("base pattern params: unknown field '" + key + "'");
        }
    }
    config.a = number_or(params, "a", config.a);
    config.amplitude = number_or(params, "amplitude", config.amplitude);
    config.period = number_or(params, "period", config.period);
    config.phase = number_or(params, "phase", config.phase);
    config.amplitude_slope = number_or(params, "amplitude_slope", config.amplitude_slope);
    config.sigma = number_or(params, "sigma", config.sigma);
    if (params.contains("coeffs")) {
        if (!params["coeffs"].is_array()) {
            throw ConfigError("base pattern params: 'coeffs' must be an array");
        }
        config.coeffs = params["coeffs"].get<std::vector<double>>();
    }
    config.validate();
    return config;
}

namespace {

CompositionComponent component_from_json(const Json& j) {
    require_object(j, "composition component");
    CompositionComponent comp;
    const std::string type = require_string(j, "type", "composition component");
    if (type == "base") {
        comp.base = base_pattern_from_json(j);
    } else if (type == "compose") {
        comp.nested = std::make_shared<const CompositionSpec>(composition_from_json(j));
    } else {
        throw ConfigError("composition component: unexpected node type '" + type + "'");
    }
    if (j.contains("length")) comp.length = index_or(j, "length", 0);
    if (j.contains("weight")) comp.weight = number_or(j, "weight", 1.0);
    return comp;
}

}  // namespace

CompositionSpec composition_from_json(const Json& j) {
    require_object(j, "composition");
    const std::string type = require_string(j, "type", "composition");
    if (type == "base") {
        // A bare base node is shorthand for a one-component composition.
        return CompositionSpec::single(base_pattern_from_json(j));
    }
    if (type != "compose") throw ConfigError("composition: unexpected node type '" + type + "'");

    CompositionSpec spec;
    spec.method = composition_method_from_string(require_string(j, "method", "composition"));
    if (!j.contains("components") || !j["components"].is_array()) {
        throw ConfigError("composition: missing 'components' array");
    }
    for (const auto& node : j["components"]) spec.components.push_back(component_from_json(node));
    spec.validate();
    return spec;
}

AnomalySpec anomaly_from_json(const Json& j) {
    require_object(j, "anomaly");
    AnomalySpec spec;
    spec.type = anomaly_type_from_string(require_string(j, "type", "anomaly"));
    spec.location = index_or(j, "location", 0);
    spec.magnitude = number_or(j, "magnitude", spec.magnitude);
    spec.width = index_or(j, "width", spec.width);
    spec.validate();
    return spec;
}

TransformSpec transform_from_json(const Json& j) {
    require_object(j, "transform");
    TransformSpec spec;
    spec.kind = transform_kind_from_string(require_string(j, "kind", "transform"));
    if (j.contains("anomaly")) spec.anomaly = anomaly_from_json(j["anomaly"]);
    spec.validate();
    return spec;
}

SeriesRecipe series_recipe_from_json(const Json& j) {
    require_object(j, "series recipe");
    const std::string type = require_string(j, "type", "series recipe");
    SeriesRecipe recipe;
    if (type == "base" || type == "compose") {
        // Shorthand: a bare generator node is a recipe with no transforms.
        recipe.composition = composition_from_json(j);
        return recipe;
    }
    if (type != "series") throw ConfigError("series recipe: unexpected node type '" + type + "'");
    if (!j.contains("composition")) throw ConfigError("series recipe: missing 'composition'");
    recipe.composition = composition_from_json(j["composition"]);
    if (j.contains("transforms")) {
        if (!j["transforms"].is_array()) throw ConfigError("series recipe: 'transforms' must be an array");
        for (const auto& node : j["transforms"]) {
            recipe.transforms.push_back(transform_from_json(node));
        }
    }
    recipe.validate();
    return recipe;
}

PairSpec pair_from_json(const Json& j) {
    require_object(j, "pair spec");
    PairSpec spec;
    spec.kind = pair_kind_from_string(require_string(j, "kind", "pair spec"));
    if (!j.contains("base")) throw ConfigError("pair spec: missing 'base'");
    spec.base = composition_from_json(j["base"]);
    if (j.contains("base2")) {
        spec.base2 = std::make_shared<const CompositionSpec>(composition_from_json(j["base2"]));
    }
    spec.lag = index_or(j, "lag", spec.lag);
    spec.coupling = number_or(j, "coupling", spec.coupling);
    spec.noise_sigma = number_or(j, "noise_sigma", spec.noise_sigma);
    spec.noise_ar = number_or(j, "noise_ar", spec.noise_ar);
    spec.validate();
    return spec;
}

OptionRecipe option_recipe_from_json(const Json& j) {
    require_object(j, "option recipe");
    const std::string type = require_string(j, "type", "option recipe");
    if (type == "pair") return pair_from_json(j);
    return series_recipe_from_json(j);
}

// ---------------------------------------------------------------------------
// Generation entry points
// ---------------------------------------------------------------------------

int series_count(const OptionRecipe& recipe) {
    return std::holds_alternative<PairSpec>(recipe) ? 2 : 1;
}

std::vector<TimeSeries> generate_option(const OptionRecipe& recipe, std::size_t length,
                                        std::uint64_t seed) {
    if (const auto* single = std::get_if<SeriesRecipe>(&recipe)) {
        std::vector<TimeSeries> out;
        out.push_back(gen_series(*single, length, seed));
        return out;
    }
    auto [x, y] = make_pair(std::get<PairSpec>(recipe), length, seed);
    std::vector<TimeSeries> out;
    out.push_back(std::move(x));
    out.push_back(std::move(y));
    return out;
}

}  // namespace tsexam::synth
