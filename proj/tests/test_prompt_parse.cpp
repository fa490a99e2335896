#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "tsexam/errors.hpp"
#include "tsexam/prompt.hpp"
#include "tsexam/templates.hpp"

using namespace tsexam;
using namespace tsexam::harness;

namespace {

templates::ExamItem fixture_item() {
    templates::ExamItem item;
    item.item_id = "fix-pp-0000000000000001";
    item.template_id = "fix-pp";
    item.category = templates::Category::NoiseUnderstanding;
    item.subcategory = "White Noise";
    item.series = {TimeSeries({1.25, -0.5, 0.75, 2.0})};
    item.example_series = {TimeSeries({0.5, 1.5})};
    item.question_text = "Which description fits the series?";
    item.options = {"uncorrelated noise", "a steady climb", "periodic cycles"};
    item.hint = "Check whether neighboring values move together.";
    item.relevant_concepts = {{"white noise", "independent draws with constant variance"}};
    item.example_options = {"flat around zero", "rising"};
    item.example_correct = 1;
    item.example_answer_text = "The level increases from start to end.";
    item.correct_index = 0;
    item.permutation = {0, 1, 2};
    item.seed = 1;
    return item;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::size_t count_parts(const Prompt& p, PromptPart::Kind kind) {
    return std::size_t(std::count_if(p.parts.begin(), p.parts.end(),
                                     [&](const PromptPart& part) { return part.kind == kind; }));
}

}  // namespace

TEST_CASE("guidance variants contain exactly the requested blocks") {
    auto item = fixture_item();
    PromptConfig base;

    struct Variant {
        std::set<Guidance> guidance;
        bool want_hint;
        bool want_concepts;
    };
    const std::vector<Variant> variants = {
        {{}, false, false},
        {{Guidance::Hint}, true, false},
        {{Guidance::RelevantConcepts}, false, true},
        {{Guidance::Hint, Guidance::RelevantConcepts}, true, true},
    };

    std::set<std::string> digests;
    for (const auto& v : variants) {
        PromptConfig config = base;
        config.guidance = v.guidance;
        Prompt p = build_prompt(item, config);
        std::string text = p.flatten_text();

        CHECK(contains(text, "multiple-choice question"));
        CHECK(contains(text, "Example question:"));
        CHECK(contains(text, "Question:\nWhich description fits the series?"));
        CHECK(contains(text, "Time series:"));
        CHECK(contains(text, "Options:\nA. uncorrelated noise\nB. a steady climb\nC. periodic cycles"));
        CHECK(contains(text, "Reply with the letter"));
        CHECK(contains(text, "Hint: Check whether neighboring values move together.") == v.want_hint);
        CHECK(contains(text, "Relevant concepts:\n- white noise: independent draws") ==
              v.want_concepts);

        std::size_t expected = 9;
        if (v.want_hint) ++expected;
        if (v.want_concepts) ++expected;
        CHECK(p.parts.size() == expected);
        digests.insert(p.digest());
    }
    CHECK(digests.size() == 4);
}

TEST_CASE("one-shot block carries the worked example in original option order") {
    auto item = fixture_item();
    PromptConfig config;
    Prompt p = build_prompt(item, config);
    std::string text = p.flatten_text();

    CHECK(contains(text, "Example question:\nWhich description fits the series?"));
    CHECK(contains(text, "Example time series:\n0.5,1.5"));
    CHECK(contains(text, "Options:\nA. flat around zero\nB. rising"));
    CHECK(contains(text, "Answer: B. The level increases from start to end."));

    config.one_shot = false;
    Prompt bare = build_prompt(item, config);
    std::string bare_text = bare.flatten_text();
    CHECK(!contains(bare_text, "Example question:"));
    CHECK(!contains(bare_text, "Answer: B."));
    CHECK(bare.parts.size() == 5);
    CHECK(bare.digest() != p.digest());
}

TEST_CASE("guidance blocks are skipped when the item has nothing to show") {
    auto item = fixture_item();
    item.hint.clear();
    item.relevant_concepts.clear();
    PromptConfig config;
    config.guidance = {Guidance::Hint, Guidance::RelevantConcepts};
    Prompt p = build_prompt(item, config);
    CHECK(!contains(p.flatten_text(), "Hint:"));
    CHECK(!contains(p.flatten_text(), "Relevant concepts:"));
    CHECK(p.parts.size() == 9);
}

TEST_CASE("image modality attaches plots instead of inline values") {
    auto item = fixture_item();
    PromptConfig config;
    config.modality = Modality::Image;
    Prompt p = build_prompt(item, config);

    CHECK(p.has_image());
    CHECK(count_parts(p, PromptPart::Kind::Image) == 2);  // example plus question
    std::string text = p.flatten_text();
    CHECK(contains(text, "Time series (see attached plot):"));
    CHECK(contains(text, "Example time series (see attached plot):"));
    CHECK(!contains(text, "1.25"));
    CHECK(!contains(text, "0.5,1.5"));

    for (const auto& part : p.parts) {
        if (part.kind != PromptPart::Kind::Image) continue;
        REQUIRE(part.png.size() > 8);
        CHECK(part.png[0] == 0x89);
        CHECK(part.png[1] == 'P');
        CHECK(part.png[2] == 'N');
        CHECK(part.png[3] == 'G');
    }

    PromptConfig text_config;
    Prompt t = build_prompt(item, text_config);
    CHECK(!t.has_image());
    CHECK(count_parts(t, PromptPart::Kind::Image) == 0);
    CHECK(t.digest() != p.digest());

    // The option block is modality-independent.
    auto find_options = [](const Prompt& pr) {
        for (const auto& part : pr.parts) {
            if (part.kind == PromptPart::Kind::Text && part.text.rfind("Options:\nA. unc", 0) == 0) {
                return part.text;
            }
        }
        return std::string();
    };
    CHECK(find_options(p) == find_options(t));
    CHECK(!find_options(p).empty());
}

TEST_CASE("paired series are numbered in the text block") {
    auto item = fixture_item();
    item.series = {TimeSeries({1.0, 2.0}), TimeSeries({3.0, 4.0})};
    PromptConfig config;
    config.one_shot = false;
    Prompt p = build_prompt(item, config);
    std::string text = p.flatten_text();
    CHECK(contains(text, "Time series 1:\n1.0,2.0"));
    CHECK(contains(text, "Time series 2:\n3.0,4.0"));
}

TEST_CASE("prompt digests are deterministic") {
    auto item = fixture_item();
    PromptConfig config;
    config.guidance = {Guidance::Hint};
    CHECK(build_prompt(item, config).digest() == build_prompt(item, config).digest());
    CHECK(build_prompt(item, config).digest().rfind("fnv1a64:", 0) == 0);

    auto other = fixture_item();
    other.question_text += "?";
    CHECK(build_prompt(other, config).digest() != build_prompt(item, config).digest());
}

TEST_CASE("prompt construction rejects bad configs and items") {
    auto item = fixture_item();
    PromptConfig config;
    config.max_tokens = 0;
    CHECK_THROWS_AS(build_prompt(item, config), ConfigError);

    config = PromptConfig{};
    config.temperature = -0.5;
    CHECK_THROWS_AS(build_prompt(item, config), ConfigError);

    config = PromptConfig{};
    item.options.clear();
    CHECK_THROWS_AS(build_prompt(item, config), ConfigError);
}

TEST_CASE("modality and guidance names round-trip") {
    CHECK(to_string(Modality::Text) == "text");
    CHECK(to_string(Modality::Image) == "image");
    CHECK(modality_from_string("image") == Modality::Image);
    CHECK_THROWS_AS(modality_from_string("audio"), ConfigError);
    CHECK(to_string(Guidance::Hint) == "hint");
    CHECK(guidance_from_string("relevant_concepts") == Guidance::RelevantConcepts);
    CHECK_THROWS_AS(guidance_from_string("hints"), ConfigError);
}

TEST_CASE("option letters") {
    CHECK(option_letter(0) == "A");
    CHECK(option_letter(3) == "D");
    CHECK(option_letter(25) == "Z");
    CHECK_THROWS_AS(option_letter(26), RangeError);
}

TEST_CASE("answer parsing: standalone letters") {
    const std::vector<std::string> options = {"first choice", "second choice", "third choice",
                                              "fourth choice"};
    CHECK(parse_answer("B", options) == 1);
    CHECK(parse_answer("  b \n", options) == 1);
    CHECK(parse_answer("The answer is (B).", options) == 1);
    CHECK(parse_answer("[C]", options) == 2);
    CHECK(parse_answer("A.", options) == 0);
    CHECK(parse_answer("c: the third one", options) == 2);
    CHECK(parse_answer("D) final answer", options) == 3);
    CHECK(parse_answer("I would pick C here.", options) == 2);
    CHECK(parse_answer("Answer: D", options) == 3);
}

TEST_CASE("answer parsing: ambiguity and misses") {
    const std::vector<std::string> options = {"first choice", "second choice", "third choice",
                                              "fourth choice"};
    CHECK(parse_answer("B or C", options) == std::nullopt);
    CHECK(parse_answer("maybe (A) but also D.", options) == std::nullopt);
    CHECK(parse_answer("", options) == std::nullopt);
    CHECK(parse_answer("   \n\t", options) == std::nullopt);
    CHECK(parse_answer("no idea", options) == std::nullopt);
    // A bare lowercase letter in running text is not an answer.
    CHECK(parse_answer("i lean toward b somewhat", options) == std::nullopt);
    // Letters beyond the option count are ignored.
    const std::vector<std::string> three = {"first choice", "second choice", "third choice"};
    CHECK(parse_answer("D.", three) == std::nullopt);
    // Letters glued to word characters do not count.
    CHECK(parse_answer("A5 is my seat", options) == std::nullopt);
    CHECK_THROWS_AS(parse_answer("B", std::vector<std::string>{}), ConfigError);
}

TEST_CASE("answer parsing: option text fallbacks") {
    const std::vector<std::string> options = {"uncorrelated noise", "a steady climb",
                                              "periodic cycles"};
    CHECK(parse_answer("uncorrelated noise", options) == 0);
    CHECK(parse_answer("  Periodic Cycles  ", options) == 2);
    CHECK(parse_answer("it looks like a steady climb to me", options) == 1);
    CHECK(parse_answer("the series shows PERIODIC CYCLES overall", options) == 2);

    const std::vector<std::string> overlapping = {"noise", "white noise"};
    // "white noise" contains both option texts: ambiguous.
    CHECK(parse_answer("this is white noise", overlapping) == std::nullopt);

    // The letter rule has priority over option text.
    CHECK(parse_answer("B. uncorrelated noise", options) == 1);
}
