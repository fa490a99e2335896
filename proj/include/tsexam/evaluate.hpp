#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsexam/client.hpp"
#include "tsexam/exam.hpp"
#include "tsexam/prompt.hpp"

namespace tsexam::harness {

struct EvaluateOptions {
    std::size_t parallelism = 4;
    // When set, evaluate persists transcript.jsonl (one record per item) and
    // responses.json (gradeable via exam::import_responses) in this directory.
    std::string output_dir;
};

struct ItemOutcome {
    std::string item_id;
    std::optional<std::size_t> answer;  // presentation index; nullopt = parse failure
    bool correct = false;
    std::string prompt_digest;
    std::string raw_text;
    std::string error;  // transport/protocol cause when the item failed
    int retries = 0;
    double latency_seconds = 0.0;
};

struct ScoredRun {
    std::string candidate;
    std::vector<ItemOutcome> outcomes;            // exam item order
    std::vector<std::uint8_t> row;                // graded 0/1, exam item order
    std::map<templates::Category, double> category_accuracy;
    double overall_accuracy = 0.0;
    std::size_t parse_failures = 0;

    Json to_json(const exam::Exam& exam) const;
};

// Produces the model reply for one item; may throw, which is recorded as a
// per-item failure without aborting the run.
using Responder = std::function<RawResponse(const templates::ExamItem&, const Prompt&)>;

// Core scoring loop: builds every prompt, obtains replies through the
// responder (concurrently, up to options.parallelism), parses and grades
// them, and persists artifacts when requested. Item order in the outputs is
// exam order regardless of completion order.
ScoredRun evaluate_with(const exam::Exam& exam, const Responder& respond,
                        const std::string& candidate, const PromptConfig& prompt_config,
                        const EvaluateOptions& options = {});

// evaluate_with wired to a live endpoint through query_model. Capability and
// credential problems surface before any request is sent.
ScoredRun evaluate(const exam::Exam& exam, const ModelEndpoint& endpoint,
                   const PromptConfig& prompt_config, const EvaluateOptions& options = {});

}  // namespace tsexam::harness
