#include "tsexam/templates.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include "tsexam/errors.hpp"
#include "tsexam/rng.hpp"
#include "tsexam/synth.hpp"

namespace tsexam::templates {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kProbeSeed = 0xA11CE5EEDULL;

const std::map<Category, std::vector<std::string>>& taxonomy() {
    static const std::map<Category, std::vector<std::string>> tax = {
        {Category::PatternRecognition,
         {"Trend", "Cyclic", "Stationarity", "Regime Switching", "Statistical properties",
          "Random processes"}},
        {Category::NoiseUnderstanding, {"White Noise", "Random Walk", "Signal / Noise Ratio"}},
        {Category::AnomalyDetection, {"Anomaly Detection"}},
        {Category::ComparativeAnalysis, {"Shape", "Distributional"}},
        {Category::CausalityAnalysis, {"Granger Causality"}},
    };
    return tax;
}

void collect_ar_leaves(const synth::CompositionSpec& spec,
                       std::vector<const synth::BasePatternConfig*>& out) {
    for (const auto& comp : spec.components) {
        if (comp.base) {
            if (comp.base->kind == synth::PatternKind::Autoregressive) out.push_back(&*comp.base);
        } else if (comp.nested) {
            collect_ar_leaves(*comp.nested, out);
        }
    }
}

std::vector<const synth::BasePatternConfig*> ar_leaves(const synth::OptionRecipe& recipe) {
    std::vector<const synth::BasePatternConfig*> out;
    if (const auto* single = std::get_if<synth::SeriesRecipe>(&recipe)) {
        collect_ar_leaves(single->composition, out);
    } else {
        const auto& pair = std::get<synth::PairSpec>(recipe);
        collect_ar_leaves(pair.base, out);
        if (pair.base2) collect_ar_leaves(*pair.base2, out);
    }
    return out;
}

bool has_unresolved_placeholder(const std::string& text) {
    static const std::regex pattern(R"(\{[A-Za-z0-9_]+\})");
    return std::regex_search(text, pattern);
}

std::string hex_seed(std::uint64_t seed) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << seed;
    return os.str();
}

}  // namespace

std::string to_string(Category c) {
    switch (c) {
        case Category::PatternRecognition: return "PatternRecognition";
        case Category::NoiseUnderstanding: return "NoiseUnderstanding";
        case Category::AnomalyDetection: return "AnomalyDetection";
        case Category::ComparativeAnalysis: return "ComparativeAnalysis";
        case Category::CausalityAnalysis: return "CausalityAnalysis";
    }
    return "?";
}

Category category_from_string(const std::string& s) {
    for (Category c : all_categories()) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("unknown category '" + s + "'");
}

const std::vector<Category>& all_categories() {
    static const std::vector<Category> cats = {
        Category::PatternRecognition, Category::NoiseUnderstanding, Category::AnomalyDetection,
        Category::ComparativeAnalysis, Category::CausalityAnalysis};
    return cats;
}

const std::vector<std::string>& subcategories_of(Category c) { return taxonomy().at(c); }

bool valid_subcategory(Category c, const std::string& subcategory) {
    const auto& subs = subcategories_of(c);
    return std::find(subs.begin(), subs.end(), subcategory) != subs.end();
}

std::vector<std::size_t> Template::generable_options() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < option_recipes.size(); ++i) {
        if (option_recipes[i]) out.push_back(i);
    }
    return out;
}

std::string resolve_placeholders(const std::string& text,
                                 const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t open = text.find('{', pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        const std::size_t close = text.find('}', open + 1);
        if (close == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const std::string name = text.substr(open + 1, close - open - 1);
        const auto it = values.find(name);
        if (it != values.end()) {
            out += it->second;
        } else {
            out.append(text, open, close - open + 1);
        }
        pos = close + 1;
    }
    return out;
}

std::vector<std::string> validate_template(const Template& t, const Lengths& lengths) {
    std::vector<std::string> violations;
    auto flag = [&](const std::string& v) { violations.push_back(v); };

    if (t.id.empty()) flag("id is empty");
    if (t.options.size() < 2) flag("fewer than 2 options");
    if (t.option_recipes.size() != t.options.size()) {
        flag("option_recipes count " + std::to_string(t.option_recipes.size()) +
             " does not match options count " + std::to_string(t.options.size()));
    }
    if (!valid_subcategory(t.category, t.subcategory)) {
        flag("subcategory '" + t.subcategory + "' is not in the " + to_string(t.category) +
             " taxonomy");
    }
    if (t.series_count != 1 && t.series_count != 2) flag("series_count must be 1 or 2");
    if (t.question_text.empty()) flag("question_text is empty");
    if (t.generable_options().empty()) flag("no option carries a recipe");
    if (t.example.correct_option >= t.options.size()) {
        flag("example correct_option " + std::to_string(t.example.correct_option) +
             " outside option range");
    }

    std::map<std::string, std::string> values = t.params;
    values["question_length"] = std::to_string(lengths.question);
    values["example_length"] = std::to_string(lengths.example);
    for (const auto& [label, text] :
         std::initializer_list<std::pair<std::string, const std::string&>>{
             {"question_text", t.question_text},
             {"hint", t.hint},
             {"example answer_text", t.example.answer_text}}) {
        if (has_unresolved_placeholder(resolve_placeholders(text, values))) {
            flag("unresolved placeholder in " + label);
        }
    }
    for (const auto& opt : t.options) {
        if (has_unresolved_placeholder(resolve_placeholders(opt, values))) {
            flag("unresolved placeholder in option '" + opt + "'");
        }
    }

    auto check_recipe = [&](const synth::OptionRecipe& recipe, const std::string& where,
                            std::size_t probe_length) {
        if (synth::series_count(recipe) != t.series_count) {
            flag(where + ": recipe produces " + std::to_string(synth::series_count(recipe)) +
                 " series, template declares " + std::to_string(t.series_count));
        }
        for (const auto* ar : ar_leaves(recipe)) {
            if (!synth::is_stationary(ar->coeffs)) {
                flag(where + ": autoregressive coefficients are not stationary");
            }
        }
        try {
            (void)synth::generate_option(recipe, probe_length, kProbeSeed);
        } catch (const Error& e) {
            flag(where + ": generation probe failed: " + e.what());
        }
    };
    const std::size_t n = std::min(t.options.size(), t.option_recipes.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (t.option_recipes[i]) {
            check_recipe(*t.option_recipes[i], "option " + std::to_string(i), lengths.question);
        }
    }
    // The exemplar is generated at the (shorter) example length, so probe it
    // there: a windowed anomaly can be in range at question length yet out of
    // range at example length.
    check_recipe(t.example.recipe, "example", lengths.example);
    return violations;
}

void TemplateRegistry::add(Template t) {
    if (t.id.empty()) throw LoadError("template with empty id");
    if (by_id_.count(t.id)) throw LoadError("duplicate template id '" + t.id + "'");
    order_.push_back(t.id);
    by_id_.emplace(t.id, std::move(t));
}

bool TemplateRegistry::contains(const std::string& id) const { return by_id_.count(id) > 0; }

const Template& TemplateRegistry::by_id(const std::string& id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) throw LoadError("no template with id '" + id + "'");
    return it->second;
}

std::vector<std::string> TemplateRegistry::ids_in_category(Category c) const {
    std::vector<std::string> out;
    for (const auto& id : order_) {
        if (by_id_.at(id).category == c) out.push_back(id);
    }
    return out;
}

std::vector<std::string> TemplateRegistry::ids_in_subcategory(Category c,
                                                              const std::string& subcategory) const {
    std::vector<std::string> out;
    for (const auto& id : order_) {
        const auto& t = by_id_.at(id);
        if (t.category == c && t.subcategory == subcategory) out.push_back(id);
    }
    return out;
}

std::vector<std::string> TemplateRegistry::missing_subcategories() const {
    std::vector<std::string> missing;
    for (Category c : all_categories()) {
        for (const auto& sub : subcategories_of(c)) {
            if (ids_in_subcategory(c, sub).empty()) {
                missing.push_back(to_string(c) + "/" + sub);
            }
        }
    }
    return missing;
}

Json template_to_json(const Template& t) {
    Json j;
    j["id"] = t.id;
    j["category"] = to_string(t.category);
    j["subcategory"] = t.subcategory;
    j["series_count"] = t.series_count;
    j["question_text"] = t.question_text;
    j["options"] = t.options;
    Json recipes = Json::array();
    for (const auto& r : t.option_recipes) {
        recipes.push_back(r ? synth::to_json(*r) : Json(nullptr));
    }
    j["option_recipes"] = std::move(recipes);
    if (!t.hint.empty()) j["hint"] = t.hint;
    if (!t.relevant_concepts.empty()) {
        Json concepts = Json::array();
        for (const auto& c : t.relevant_concepts) {
            concepts.push_back(Json{{"term", c.term}, {"description", c.description}});
        }
        j["relevant_concepts"] = std::move(concepts);
    }
    Json example;
    example["recipe"] = synth::to_json(t.example.recipe);
    example["correct_option"] = t.example.correct_option;
    example["answer_text"] = t.example.answer_text;
    j["example"] = std::move(example);
    if (!t.params.empty()) j["params"] = t.params;
    return j;
}

Template template_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("template: expected a JSON object");
    static const std::set<std::string> known = {
        "id",   "category",          "subcategory", "series_count", "question_text",
        "options", "option_recipes", "hint",        "relevant_concepts", "example", "params"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("template: unknown field '" + key + "'");
    }
    auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ConfigError(std::string("template: missing string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };

    Template t;
    t.id = str("id");
    t.category = category_from_string(str("category"));
    t.subcategory = str("subcategory");
    t.question_text = str("question_text");
    if (!j.contains("series_count") || !j["series_count"].is_number_integer()) {
        throw ConfigError("template '" + t.id + "': missing integer field 'series_count'");
    }
    t.series_count = j["series_count"].get<int>();
    if (!j.contains("options") || !j["options"].is_array()) {
        throw ConfigError("template '" + t.id + "': missing 'options' array");
    }
    t.options = j["options"].get<std::vector<std::string>>();
    if (!j.contains("option_recipes") || !j["option_recipes"].is_array()) {
        throw ConfigError("template '" + t.id + "': missing 'option_recipes' array");
    }
    for (const auto& node : j["option_recipes"]) {
        if (node.is_null()) {
            t.option_recipes.push_back(std::nullopt);
        } else {
            t.option_recipes.push_back(synth::option_recipe_from_json(node));
        }
    }
    if (j.contains("hint")) t.hint = j["hint"].get<std::string>();
    if (j.contains("relevant_concepts")) {
        for (const auto& node : j["relevant_concepts"]) {
            t.relevant_concepts.push_back(
                {node.at("term").get<std::string>(), node.at("description").get<std::string>()});
        }
    }
    if (!j.contains("example") || !j["example"].is_object()) {
        throw ConfigError("template '" + t.id + "': missing 'example' object");
    }
    const Json& ex = j["example"];
    if (!ex.contains("recipe")) {
        throw ConfigError("template '" + t.id + "': example lacks a recipe");
    }
    t.example.recipe = synth::option_recipe_from_json(ex["recipe"]);
    t.example.correct_option = ex.value("correct_option", std::size_t{0});
    t.example.answer_text = ex.value("answer_text", std::string{});
    if (j.contains("params")) {
        t.params = j["params"].get<std::map<std::string, std::string>>();
    }
    return t;
}

TemplateRegistry load_templates(const std::string& source) {
    const fs::path path(source);
    if (!fs::exists(path)) throw IoError("load_templates: no such path: " + source);

    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw LoadError("load_templates: no .json files in " + source);
    } else {
        files.push_back(path);
    }

    TemplateRegistry registry;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw IoError("load_templates: cannot open " + file.string());
        Json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw LoadError("load_templates: " + file.string() + ": invalid JSON: " + e.what());
        }
        std::vector<Json> entries;
        if (doc.is_array()) {
            entries.assign(doc.begin(), doc.end());
        } else {
            entries.push_back(doc);
        }
        for (const auto& entry : entries) {
            Template t;
            try {
                t = template_from_json(entry);
            } catch (const Error& e) {
                throw LoadError("load_templates: " + file.string() + ": " + e.what());
            }
            const auto violations = validate_template(t);
            if (!violations.empty()) {
                std::string msg = "load_templates: " + file.string() + ": template '" + t.id + "':";
                for (const auto& v : violations) msg += "\n  - " + v;
                throw LoadError(msg);
            }
            try {
                registry.add(std::move(t));
            } catch (const Error& e) {
                throw LoadError("load_templates: " + file.string() + ": " + e.what());
            }
        }
    }
    return registry;
}

ExamItem instantiate(const Template& t, std::size_t correct_option, std::uint64_t seed,
                     const Lengths& lengths) {
    if (correct_option >= t.options.size()) {
        throw ConfigError("instantiate: template '" + t.id + "': correct option " +
                          std::to_string(correct_option) + " outside range");
    }
    if (correct_option >= t.option_recipes.size() || !t.option_recipes[correct_option]) {
        throw ConfigError("instantiate: template '" + t.id + "': option " +
                          std::to_string(correct_option) + " carries no recipe");
    }

    std::map<std::string, std::string> values = t.params;
    values["question_length"] = std::to_string(lengths.question);
    values["example_length"] = std::to_string(lengths.example);

    ExamItem item;
    item.template_id = t.id;
    item.item_id = t.id + "-" + hex_seed(seed);
    item.category = t.category;
    item.subcategory = t.subcategory;
    item.seed = seed;
    item.question_text = resolve_placeholders(t.question_text, values);
    item.hint = resolve_placeholders(t.hint, values);
    item.relevant_concepts = t.relevant_concepts;

    try {
        item.series = synth::generate_option(*t.option_recipes[correct_option], lengths.question,
                                             derive_seed(seed, "question"));
        item.example_series =
            synth::generate_option(t.example.recipe, lengths.example, derive_seed(seed, "example"));
    } catch (const Error& e) {
        throw Error("instantiate: template '" + t.id + "' option " +
                    std::to_string(correct_option) + ": " + e.what());
    }

    const std::size_t n = t.options.size();
    item.permutation.resize(n);
    std::iota(item.permutation.begin(), item.permutation.end(), 0);
    SeededRng shuffle_rng(derive_seed(seed, "shuffle"));
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t k = shuffle_rng.below(i + 1);
        std::swap(item.permutation[i], item.permutation[k]);
    }
    item.options.resize(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        item.options[pos] = resolve_placeholders(t.options[item.permutation[pos]], values);
        if (item.permutation[pos] == correct_option) item.correct_index = pos;
    }

    item.example_options.reserve(n);
    for (const auto& opt : t.options) {
        item.example_options.push_back(resolve_placeholders(opt, values));
    }
    item.example_correct = t.example.correct_option;
    item.example_answer_text = resolve_placeholders(t.example.answer_text, values);
    return item;
}

}  // namespace tsexam::templates
