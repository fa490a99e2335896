#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsexam/cli.hpp"
#include "tsexam/errors.hpp"

namespace {

struct SubArgs {
    std::string config;
    tsexam::cli::CommonOptions common;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config, "JSON run config (defaults apply when omitted)");
    sub->add_option("--seed", args.common.seed, "master seed override");
    sub->add_option("--out", args.common.out, "output directory override");
    sub->add_flag("--dry-run", args.common.dry_run, "validate inputs and write nothing");
}

tsexam::cli::RunConfig config_for(const SubArgs& args) {
    if (args.config.empty()) {
        tsexam::cli::RunConfig config;
        config.validate();
        return config;
    }
    return tsexam::cli::load_run_config(args.config);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"procedural time-series exam engine"};
    app.set_version_flag("--version", tsexam::exam::kToolVersion);
    app.require_subcommand(1);

    SubArgs gen_args;
    bool gen_plots = false;
    auto* gen = app.add_subcommand("generate", "assemble an exam and export items/keys/plots");
    add_common(gen, gen_args);
    gen->add_flag("--plots", gen_plots, "also render one PNG per item");

    SubArgs eval_args;
    std::string eval_exam;
    std::vector<std::string> eval_endpoints;
    std::string eval_modality;
    auto* eval = app.add_subcommand("evaluate", "run configured model endpoints over an exam");
    add_common(eval, eval_args);
    eval->add_option("exam", eval_exam, "exam directory or exam.json path")->required();
    eval->add_option("endpoint", eval_endpoints, "endpoint name(s) from the config")->required();
    eval->add_option("--modality", eval_modality, "text or image (overrides the config)");

    SubArgs refine_args;
    std::string refine_exam;
    std::size_t refine_simulate = 0;
    auto* refine = app.add_subcommand("refine", "iteratively drop and resample uninformative items");
    add_common(refine, refine_args);
    refine->add_option("exam", refine_exam, "exam directory or exam.json path")->required();
    refine->add_option("--simulate", refine_simulate,
                       "respond with a simulated candidate population of this size");

    SubArgs report_args;
    std::vector<std::string> report_paths;
    auto* report = app.add_subcommand("report", "summarize one or more fit reports");
    add_common(report, report_args);
    report->add_option("reports", report_paths, "round or aggregate report JSON file(s)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (char& c : msg) {
            if (c == '\n' || c == '\r') c = ' ';
            if (c == '"') c = '\'';
        }
        std::cerr << "error kind=UsageError exit=2 msg=\"" << msg << "\"\n";
        return 2;
    }

    try {
        if (gen->parsed()) {
            auto config = config_for(gen_args);
            if (gen_plots) config.plots = true;
            tsexam::cli::cmd_generate(config, gen_args.common, std::cout);
        } else if (eval->parsed()) {
            std::optional<tsexam::harness::Modality> modality;
            if (!eval_modality.empty()) {
                modality = tsexam::harness::modality_from_string(eval_modality);
            }
            tsexam::cli::cmd_evaluate(config_for(eval_args), eval_args.common, eval_exam,
                                      eval_endpoints, modality, std::cout);
        } else if (refine->parsed()) {
            tsexam::cli::cmd_refine(config_for(refine_args), refine_args.common, refine_exam,
                                    refine_simulate, std::cout);
        } else if (report->parsed()) {
            tsexam::cli::cmd_report(report_paths, report_args.common, std::cout);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << tsexam::cli::format_error(e) << "\n";
        return tsexam::cli::exit_code_for(e);
    }
}
