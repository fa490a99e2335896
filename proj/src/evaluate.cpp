#include "tsexam/evaluate.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "tsexam/errors.hpp"

namespace tsexam::harness {

namespace fs = std::filesystem;

namespace {

void write_artifacts(const exam::Exam& exam, const ScoredRun& run, const std::string& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError("evaluate: cannot create " + directory + ": " + ec.message());

    {
        std::ofstream out(fs::path(directory) / "transcript.jsonl", std::ios::binary);
        if (!out) throw IoError("evaluate: cannot open transcript.jsonl in " + directory);
        Json header;
        header["format"] = "tsexam-transcript";
        header["version"] = exam::kToolVersion;
        header["master_seed"] = exam.distribution.master_seed;
        header["candidate"] = run.candidate;
        out << header.dump() << "\n";
        for (const auto& o : run.outcomes) {
            Json rec;
            rec["item"] = o.item_id;
            rec["candidate"] = run.candidate;
            rec["prompt_digest"] = o.prompt_digest;
            rec["raw_text"] = o.raw_text;
            if (o.answer) {
                rec["answer_index"] = *o.answer;
            } else {
                rec["answer_index"] = nullptr;
            }
            rec["parse_failure"] = !o.answer.has_value();
            if (!o.error.empty()) rec["error"] = o.error;
            rec["retries"] = o.retries;
            rec["latency_seconds"] = o.latency_seconds;
            out << rec.dump() << "\n";
        }
    }

    Json doc;
    doc["format"] = "tsexam-responses";
    doc["version"] = exam::kToolVersion;
    doc["master_seed"] = exam.distribution.master_seed;
    doc["candidate"] = run.candidate;
    Json rows = Json::array();
    for (const auto& o : run.outcomes) {
        Json rec;
        rec["candidate"] = run.candidate;
        rec["item"] = o.item_id;
        if (o.answer) {
            rec["answer_index"] = *o.answer;
        } else {
            rec["answer_index"] = nullptr;
        }
        rec["parse_failure"] = !o.answer.has_value();
        rows.push_back(std::move(rec));
    }
    doc["responses"] = std::move(rows);
    std::ofstream out(fs::path(directory) / "responses.json", std::ios::binary);
    if (!out) throw IoError("evaluate: cannot open responses.json in " + directory);
    out << doc.dump(2) << "\n";
}

}  // namespace

Json ScoredRun::to_json(const exam::Exam& exam) const {
    Json j;
    j["format"] = "tsexam-scored-run";
    j["version"] = exam::kToolVersion;
    j["master_seed"] = exam.distribution.master_seed;
    j["candidate"] = candidate;
    j["overall_accuracy"] = overall_accuracy;
    Json per_category;
    for (const auto& [category, accuracy] : category_accuracy) {
        per_category[templates::to_string(category)] = accuracy;
    }
    j["category_accuracy"] = std::move(per_category);
    j["parse_failures"] = parse_failures;
    j["row"] = row;
    return j;
}

ScoredRun evaluate_with(const exam::Exam& exam, const Responder& respond,
                        const std::string& candidate, const PromptConfig& prompt_config,
                        const EvaluateOptions& options) {
    if (exam.items.empty()) throw ConfigError("evaluate: exam has no items");
    if (candidate.empty()) throw ConfigError("evaluate: candidate name is empty");
    prompt_config.validate();

    ScoredRun run;
    run.candidate = candidate;
    run.outcomes.resize(exam.items.size());

    const std::size_t workers =
        std::max<std::size_t>(1, std::min(options.parallelism, exam.items.size()));
    std::atomic<std::size_t> cursor{0};

    auto work = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= exam.items.size()) return;
            const auto& item = exam.items[i];
            ItemOutcome outcome;
            outcome.item_id = item.item_id;
            try {
                const Prompt prompt = build_prompt(item, prompt_config);
                outcome.prompt_digest = prompt.digest();
                const RawResponse reply = respond(item, prompt);
                outcome.raw_text = reply.text;
                outcome.retries = reply.retries;
                outcome.latency_seconds = reply.latency_seconds;
                outcome.answer = parse_answer(reply.text, item.options);
            } catch (const std::exception& e) {
                outcome.answer.reset();
                outcome.error = e.what();
            }
            outcome.correct = outcome.answer && *outcome.answer == item.correct_index;
            run.outcomes[i] = std::move(outcome);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    run.row.resize(exam.items.size(), 0);
    std::map<templates::Category, std::pair<std::size_t, std::size_t>> tally;  // correct, total
    std::size_t correct_total = 0;
    for (std::size_t i = 0; i < exam.items.size(); ++i) {
        const auto& outcome = run.outcomes[i];
        if (!outcome.answer) ++run.parse_failures;
        run.row[i] = outcome.correct ? 1 : 0;
        auto& [correct, total] = tally[exam.items[i].category];
        correct += outcome.correct ? 1 : 0;
        total += 1;
        correct_total += outcome.correct ? 1 : 0;
    }
    run.overall_accuracy = static_cast<double>(correct_total) / double(exam.items.size());
    for (const auto& [category, counts] : tally) {
        run.category_accuracy[category] =
            static_cast<double>(counts.first) / double(counts.second);
    }

    if (!options.output_dir.empty()) write_artifacts(exam, run, options.output_dir);
    return run;
}

ScoredRun evaluate(const exam::Exam& exam, const ModelEndpoint& endpoint,
                   const PromptConfig& prompt_config, const EvaluateOptions& options) {
    endpoint.validate();
    if (prompt_config.modality == Modality::Image && !endpoint.supports_images) {
        throw CapabilityError("endpoint '" + endpoint.name +
                              "' is text-only but the run requests image prompts");
    }
    if (!endpoint.credential_env.empty()) {
        const char* value = std::getenv(endpoint.credential_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw CredentialError("environment variable '" + endpoint.credential_env +
                                  "' (credential for endpoint '" + endpoint.name +
                                  "') is not set");
        }
    }
    return evaluate_with(
        exam,
        [&endpoint, &prompt_config](const templates::ExamItem&, const Prompt& prompt) {
            return query_model(endpoint, prompt, prompt_config);
        },
        endpoint.name, prompt_config, options);
}

}  // namespace tsexam::harness
