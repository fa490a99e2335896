#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsexam/irt.hpp"
#include "tsexam/templates.hpp"

namespace tsexam::exam {

inline constexpr const char* kToolVersion = "0.1.0";

// Target composition of an exam. Defaults reproduce the reference dataset:
// 371 pattern recognition, 87 noise understanding, 129 anomaly detection,
// 113 comparative analysis, 63 causality analysis; series lengths 128/64.
struct DistributionSpec {
    std::map<templates::Category, std::size_t> counts = {
        {templates::Category::PatternRecognition, 371},
        {templates::Category::NoiseUnderstanding, 87},
        {templates::Category::AnomalyDetection, 129},
        {templates::Category::ComparativeAnalysis, 113},
        {templates::Category::CausalityAnalysis, 63},
    };
    std::size_t question_length = 128;
    std::size_t example_length = 64;
    std::uint64_t master_seed = 42;

    std::size_t total() const;
    templates::Lengths lengths() const { return {question_length, example_length}; }
    void validate() const;  // lengths >= 8, total >= 1
};

struct Exam {
    std::vector<templates::ExamItem> items;
    // Parallel to items: id of the dropped item this one replaced, or empty.
    std::vector<std::string> lineage;
    DistributionSpec distribution;
    std::size_t round = 0;

    // Unique item ids, realized per-category counts equal the spec, lineage
    // aligned. Throws AssemblyError.
    void validate() const;
};

struct KeyEntry {
    std::size_t correct_index = 0;
    std::vector<std::size_t> permutation;
    std::string template_id;
};

// Correct answers, keyed by item id but preserving exam item order so graded
// matrices align row-for-row with the exam.
struct AnswerKey {
    std::vector<std::string> item_order;
    std::map<std::string, KeyEntry> entries;
};

AnswerKey answer_key(const Exam& exam);

// Deterministic assembly: per category (fixed order), cycles the registry's
// templates in load order, rotates the correct option round-robin over each
// template's recipe-bearing options, and derives item seeds from the master
// seed. Throws AssemblyError when a requested category has no templates.
Exam assemble_exam(const templates::TemplateRegistry& registry, const DistributionSpec& spec);

struct ManifestEntry {
    std::string path;  // relative to the export directory
    std::string digest;
    std::uint64_t bytes = 0;
};

struct ExportManifest {
    std::vector<ManifestEntry> files;
};

// Writes exam.json (key-blind: no correct_index anywhere), keys.json,
// manifest.json, and optionally plots/<item_id>.png per item. Returns the
// manifest that was written.
ExportManifest export_exam(const Exam& exam, const std::string& directory, bool include_plots);

Exam import_exam(const std::string& exam_path, const std::string& keys_path);
AnswerKey load_keys(const std::string& keys_path);

struct ImportedResponses {
    irt::ResponseMatrix matrix;
    std::size_t parse_failures = 0;
};

// Grades a responses.json file against the key: cell = 1 iff the recorded
// answer index equals the keyed correct index. Parse failures grade 0 and
// are counted. Unknown item ids, duplicate (candidate, item) pairs, and
// missing cells are import errors.
ImportedResponses import_responses(const std::string& path, const AnswerKey& key);

// Key-blind exam document (items without answers).
Json exam_to_json(const Exam& exam);
Json keys_to_json(const Exam& exam);

}  // namespace tsexam::exam
