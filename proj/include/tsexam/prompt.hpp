#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsexam/templates.hpp"

namespace tsexam::harness {

enum class Modality { Text, Image };

enum class Guidance { Hint, RelevantConcepts };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);
std::string to_string(Guidance g);
Guidance guidance_from_string(const std::string& s);

struct PromptConfig {
    Modality modality = Modality::Text;
    std::set<Guidance> guidance;
    bool one_shot = true;
    int max_tokens = 1024;
    double temperature = 0.0;
    std::uint64_t seed = 42;

    void validate() const;  // max_tokens > 0, temperature >= 0
};

// One ordered piece of a prompt: a text block or an attached PNG.
struct PromptPart {
    enum class Kind { Text, Image };
    Kind kind = Kind::Text;
    std::string text;
    std::vector<std::uint8_t> png;
};

struct Prompt {
    std::vector<PromptPart> parts;

    bool has_image() const;
    // All text parts joined by blank lines (the single-message flattening).
    std::string flatten_text() const;
    // Content digest over part kinds, lengths, and bytes.
    std::string digest() const;
};

// Assembles the ordered prompt blocks for an item:
//   instructions; worked example (when one_shot); hint block (when requested
//   and present); concept block (when requested and present); question;
//   series (inline text or attached plot); lettered options; answer
//   directive. Image mode never embeds raw values; text mode never attaches
//   images. Either way the option order shown is the item's presentation
//   order.
Prompt build_prompt(const templates::ExamItem& item, const PromptConfig& config);

// Answer extraction, applied in priority order:
//   1. a standalone option letter, case-insensitive when wrapped in
//      parentheses/brackets or followed by '.'/':'/')' (or the whole reply);
//      a bare mid-text letter counts only in uppercase;
//   2. the full reply equal to one option's text (case-insensitive, trimmed);
//   3. exactly one option's text contained in the reply (case-insensitive).
// Two distinct letter candidates, or several matching options, are ambiguous:
// parse failure (nullopt).
std::optional<std::size_t> parse_answer(const std::string& raw,
                                        const std::vector<std::string>& options);

// Presentation letter for an option position: 0 -> "A", 1 -> "B", ...
std::string option_letter(std::size_t index);

}  // namespace tsexam::harness
