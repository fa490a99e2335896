#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tsexam/evaluate.hpp"
#include "tsexam/exam.hpp"
#include "tsexam/refine.hpp"

namespace tsexam::cli {

// One JSON config file drives every command. Relative paths inside the file
// resolve against the file's own directory. Secrets never appear in the
// config: endpoints name an environment variable and the value is read at
// request time.
struct RunConfig {
    std::uint64_t master_seed = 42;
    std::string template_dir = "data/templates";
    std::string output_dir = "out";
    exam::DistributionSpec distribution;
    harness::PromptConfig prompt;
    std::vector<harness::ModelEndpoint> endpoints;
    irt::FitConfig fit;
    irt::RefineConfig refine;
    bool plots = false;
    std::size_t parallelism = 4;

    const harness::ModelEndpoint& endpoint(const std::string& name) const;  // ConfigError
    void validate() const;
};

// Parses a config document; `base_dir` anchors relative paths. Unknown keys
// are rejected so typos fail loudly.
RunConfig parse_run_config(const Json& j, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

// Flags shared by every subcommand.
struct CommonOptions {
    std::optional<std::uint64_t> seed;  // overrides the config master seed
    std::string out;                    // overrides the config output directory
    bool dry_run = false;
};

// Applies --seed/--out to a loaded config.
RunConfig with_overrides(RunConfig config, const CommonOptions& options);

// A plain-text table plus its JSON form. Numeric cells are preformatted
// strings so the printed and serialized values are identical.
struct TextTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};
std::string format_table(const TextTable& t);
Json table_to_json(const TextTable& t);

// Commands. Each prints its tables to `out`, writes artifacts under the
// config's output directory (unless dry-run), and throws on failure; the
// binary maps exception types to exit codes.
void cmd_generate(const RunConfig& config, const CommonOptions& options, std::ostream& out);

void cmd_evaluate(const RunConfig& config, const CommonOptions& options,
                  const std::string& exam_path, const std::vector<std::string>& endpoint_names,
                  const std::optional<harness::Modality>& modality, std::ostream& out);

void cmd_refine(const RunConfig& config, const CommonOptions& options,
                const std::string& exam_path, std::size_t simulate, std::ostream& out);

void cmd_report(const std::vector<std::string>& report_paths, const CommonOptions& options,
                std::ostream& out);

// Round-report (de)serialization used by cmd_refine and cmd_report.
Json round_report_to_json(const irt::RoundReport& report);
irt::RoundReport round_report_from_json(const Json& j);  // throws ImportError

// Loads an exam from a directory holding exam.json/keys.json, or from the
// path of the exam file itself (keys expected alongside).
exam::Exam load_exam(const std::string& path);

// Stable exit codes: 0 ok, 1 runtime failure, 2 config/input, 3 credentials,
// 4 capability, 5 unmet preconditions.
int exit_code_for(const std::exception& e);

// Single-line machine-parsable rendering: error kind=<Type> exit=<N> msg="...".
std::string format_error(const std::exception& e);

}  // namespace tsexam::cli
