#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsexam/recipe_json.hpp"
#include "tsexam/time_series.hpp"

namespace tsexam::templates {

enum class Category {
    PatternRecognition,
    NoiseUnderstanding,
    AnomalyDetection,
    ComparativeAnalysis,
    CausalityAnalysis,
};

std::string to_string(Category c);
Category category_from_string(const std::string& s);
const std::vector<Category>& all_categories();

// Canonical subcategory names per category. Anomaly Detection has a single
// subcategory named after the category itself.
const std::vector<std::string>& subcategories_of(Category c);
bool valid_subcategory(Category c, const std::string& subcategory);

// A technical term plus its plain-language description, shown when a run is
// configured to include concept explanations.
struct Concept {
    std::string term;
    std::string description;

    bool operator==(const Concept&) const = default;
};

// One-shot exemplar: its own generator recipe, the option it makes correct,
// and the worked answer text shown after the answer letter.
struct ExampleSpec {
    synth::OptionRecipe recipe;
    std::size_t correct_option = 0;
    std::string answer_text;
};

// A question template. Each option may carry a generator recipe; the series
// shown to the candidate is produced by the recipe of whichever option is
// chosen as correct ("as if that option were true"). Options without a
// recipe are plain-text distractors and can never be the correct option.
struct Template {
    std::string id;
    Category category = Category::PatternRecognition;
    std::string subcategory;
    std::string question_text;
    std::vector<std::string> options;
    std::vector<std::optional<synth::OptionRecipe>> option_recipes;
    std::string hint;  // empty = none
    std::vector<Concept> relevant_concepts;
    ExampleSpec example;
    int series_count = 1;
    // Placeholder values substituted into question_text / hint / answer
    // texts as {name}; {question_length} and {example_length} are built in.
    std::map<std::string, std::string> params;

    // Indices of options that carry a recipe (the valid correct options).
    std::vector<std::size_t> generable_options() const;
};

// Question/example series lengths used at instantiation.
struct Lengths {
    std::size_t question = 128;
    std::size_t example = 64;
};

// A fully materialized exam question.
struct ExamItem {
    std::string item_id;
    std::string template_id;
    Category category = Category::PatternRecognition;
    std::string subcategory;
    std::vector<TimeSeries> series;
    std::vector<TimeSeries> example_series;
    std::string question_text;
    std::vector<std::string> options;  // shuffled presentation order
    std::string hint;
    std::vector<Concept> relevant_concepts;
    // The exemplar block keeps the template's original option order.
    std::vector<std::string> example_options;
    std::size_t example_correct = 0;
    std::string example_answer_text;
    std::size_t correct_index = 0;            // into the shuffled options
    std::vector<std::size_t> permutation;     // permutation[pos] = original index
    std::uint64_t seed = 0;
};

class TemplateRegistry {
public:
    void add(Template t);  // throws LoadError on duplicate or invalid template
    bool contains(const std::string& id) const;
    const Template& by_id(const std::string& id) const;  // throws LoadError
    const std::vector<std::string>& ids() const { return order_; }
    std::size_t size() const { return order_.size(); }
    std::vector<std::string> ids_in_category(Category c) const;
    std::vector<std::string> ids_in_subcategory(Category c, const std::string& subcategory) const;
    // Subcategories of the canonical taxonomy with no template, as
    // "Category/Subcategory" strings. Empty means full coverage.
    std::vector<std::string> missing_subcategories() const;

private:
    std::map<std::string, Template> by_id_;
    std::vector<std::string> order_;
};

// All invariant violations of the template, empty if valid. Includes a
// generability probe (every recipe generated once at the given lengths) and
// a stationarity check on every autoregressive leaf.
std::vector<std::string> validate_template(const Template& t, const Lengths& lengths = {});

// Loads one JSON file (single template object or array of them) or every
// *.json file in a directory, in filename order. Any invalid template fails
// the whole load with the file, template id and violated rule in the message.
TemplateRegistry load_templates(const std::string& source);

// Materializes the template with the given correct option. Deterministic:
// question series use seed domain "question", exemplar series "example",
// option shuffling "shuffle".
ExamItem instantiate(const Template& t, std::size_t correct_option, std::uint64_t seed,
                     const Lengths& lengths = {});

Json template_to_json(const Template& t);
Template template_from_json(const Json& j);

// {name} placeholder substitution from the given values; unknown
// placeholders are left verbatim.
std::string resolve_placeholders(const std::string& text,
                                 const std::map<std::string, std::string>& values);

}  // namespace tsexam::templates
