#include "tsexam/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "tsexam/digest.hpp"
#include "tsexam/errors.hpp"
#include "tsexam/plot.hpp"
#include "tsexam/text_format.hpp"

namespace tsexam::harness {

namespace {

constexpr const char* kInstructions =
    "You are answering a multiple-choice question about a time series.\n"
    "Study the series, then choose the single best option.";

constexpr const char* kDirective =
    "Reply with the letter of the correct option and nothing else.";

std::string lettered_options(const std::vector<std::string>& options) {
    std::ostringstream os;
    os << "Options:";
    for (std::size_t i = 0; i < options.size(); ++i) {
        os << "\n" << option_letter(i) << ". " << options[i];
    }
    return os.str();
}

std::string series_text(const std::vector<TimeSeries>& series, const std::string& label) {
    std::ostringstream os;
    if (series.size() == 1) {
        os << label << ":\n" << serialize_text(series[0]);
    } else {
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (i > 0) os << "\n";
            os << label << " " << (i + 1) << ":\n" << serialize_text(series[i]);
        }
    }
    return os.str();
}

PromptPart text_part(std::string text) {
    PromptPart part;
    part.kind = PromptPart::Kind::Text;
    part.text = std::move(text);
    return part;
}

PromptPart image_part(std::vector<std::uint8_t> png) {
    PromptPart part;
    part.kind = PromptPart::Kind::Image;
    part.png = std::move(png);
    return part;
}

void append_series(Prompt& prompt, const std::vector<TimeSeries>& series, const std::string& label,
                   Modality modality) {
    if (modality == Modality::Text) {
        prompt.parts.push_back(text_part(series_text(series, label)));
    } else {
        prompt.parts.push_back(text_part(label + " (see attached plot):"));
        prompt.parts.push_back(image_part(render_plot(series)));
    }
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_string(Modality m) { return m == Modality::Text ? "text" : "image"; }

Modality modality_from_string(const std::string& s) {
    if (s == "text") return Modality::Text;
    if (s == "image") return Modality::Image;
    throw ConfigError("unknown modality '" + s + "' (expected text or image)");
}

std::string to_string(Guidance g) { return g == Guidance::Hint ? "hint" : "relevant_concepts"; }

Guidance guidance_from_string(const std::string& s) {
    if (s == "hint") return Guidance::Hint;
    if (s == "relevant_concepts") return Guidance::RelevantConcepts;
    throw ConfigError("unknown guidance '" + s + "' (expected hint or relevant_concepts)");
}

void PromptConfig::validate() const {
    if (max_tokens <= 0) throw ConfigError("prompt config: max_tokens must be > 0");
    if (!(temperature >= 0.0)) throw ConfigError("prompt config: temperature must be >= 0");
}

bool Prompt::has_image() const {
    return std::any_of(parts.begin(), parts.end(),
                       [](const PromptPart& p) { return p.kind == PromptPart::Kind::Image; });
}

std::string Prompt::flatten_text() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& part : parts) {
        if (part.kind != PromptPart::Kind::Text) continue;
        if (!first) os << "\n\n";
        os << part.text;
        first = false;
    }
    return os.str();
}

std::string Prompt::digest() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& part : parts) {
        const bool image = part.kind == PromptPart::Kind::Image;
        const unsigned char tag = image ? 2 : 1;
        h = fnv1a64(std::span(&tag, 1), h);
        const std::uint64_t size = image ? part.png.size() : part.text.size();
        unsigned char len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>((size >> (8 * i)) & 0xff);
        h = fnv1a64(std::span(len, 8), h);
        if (image) {
            h = fnv1a64(std::span<const unsigned char>(part.png.data(), part.png.size()), h);
        } else {
            h = fnv1a64(part.text, h);
        }
    }
    return digest_label(h);
}

std::string option_letter(std::size_t index) {
    if (index >= 26) throw RangeError("option index " + std::to_string(index) + " has no letter");
    return std::string(1, static_cast<char>('A' + index));
}

Prompt build_prompt(const templates::ExamItem& item, const PromptConfig& config) {
    config.validate();
    if (item.options.empty() || item.options.size() > 26) {
        throw ConfigError("build_prompt: item '" + item.item_id + "' has " +
                          std::to_string(item.options.size()) + " options");
    }

    Prompt prompt;
    prompt.parts.push_back(text_part(kInstructions));

    if (config.one_shot) {
        prompt.parts.push_back(text_part("Example question:\n" + item.question_text));
        append_series(prompt, item.example_series, "Example time series", config.modality);
        prompt.parts.push_back(text_part(lettered_options(item.example_options)));
        std::string answer = "Answer: " + option_letter(item.example_correct);
        if (!item.example_answer_text.empty()) answer += ". " + item.example_answer_text;
        prompt.parts.push_back(text_part(answer));
    }

    if (config.guidance.count(Guidance::Hint) && !item.hint.empty()) {
        prompt.parts.push_back(text_part("Hint: " + item.hint));
    }
    if (config.guidance.count(Guidance::RelevantConcepts) && !item.relevant_concepts.empty()) {
        std::ostringstream os;
        os << "Relevant concepts:";
        for (const auto& c : item.relevant_concepts) {
            os << "\n- " << c.term << ": " << c.description;
        }
        prompt.parts.push_back(text_part(os.str()));
    }

    prompt.parts.push_back(text_part("Question:\n" + item.question_text));
    append_series(prompt, item.series, "Time series", config.modality);
    prompt.parts.push_back(text_part(lettered_options(item.options)));
    prompt.parts.push_back(text_part(kDirective));
    return prompt;
}

std::optional<std::size_t> parse_answer(const std::string& raw,
                                        const std::vector<std::string>& options) {
    if (options.empty()) throw ConfigError("parse_answer: empty option list");
    const std::size_t k = std::min<std::size_t>(options.size(), 26);

    auto trim = [](const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    };
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };

    const std::string trimmed = trim(raw);
    if (trimmed.empty()) return std::nullopt;

    // Rule 1: standalone option letters.
    std::set<std::size_t> letters;
    const std::string whole = trimmed.size() == 1 ? trimmed : "";
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (!std::isalpha(static_cast<unsigned char>(c))) continue;
        const bool left_ok = i == 0 || !is_word_char(raw[i - 1]);
        const bool right_ok = i + 1 == raw.size() || !is_word_char(raw[i + 1]);
        if (!left_ok || !right_ok) continue;

        const char next = i + 1 < raw.size() ? raw[i + 1] : '\0';
        const char prev = i > 0 ? raw[i - 1] : '\0';
        const bool wrapped = (prev == '(' && next == ')') || (prev == '[' && next == ']');
        const bool punctuated = next == '.' || next == ':' || next == ')';
        const bool whole_reply = !whole.empty() && whole[0] == c;
        const bool uppercase = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (!(wrapped || punctuated || whole_reply || uppercase)) continue;

        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const std::size_t index = static_cast<std::size_t>(up - 'A');
        if (index < k) letters.insert(index);
    }
    if (letters.size() == 1) return *letters.begin();
    if (letters.size() > 1) return std::nullopt;

    // Rule 2: the whole reply is one option's text.
    const std::string low = lower(trimmed);
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (low == lower(trim(options[i]))) return i;
    }

    // Rule 3: exactly one option's text appears inside the reply.
    std::optional<std::size_t> found;
    const std::string raw_low = lower(raw);
    for (std::size_t i = 0; i < options.size(); ++i) {
        const std::string needle = lower(trim(options[i]));
        if (needle.empty() || raw_low.find(needle) == std::string::npos) continue;
        if (found) return std::nullopt;
        found = i;
    }
    return found;
}

}  // namespace tsexam::harness
