#include "tsexam/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tsexam/errors.hpp"
#include "tsexam/sim.hpp"
#include "tsexam/templates.hpp"

namespace tsexam::cli {

namespace fs = std::filesystem;

namespace {

void expect_keys(const Json& j, const std::string& what,
                 std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; })) {
            throw ConfigError(what + ": unknown key '" + it.key() + "'");
        }
    }
}

template <typename T>
T read_field(const Json& j, const std::string& what, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError(what + ": field '" + std::string(key) + "' has the wrong type");
    }
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    if (p.empty() || base_dir.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return p;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

harness::ModelEndpoint parse_endpoint(const Json& j) {
    if (!j.is_object()) throw ConfigError("run config: endpoint entries must be objects");
    const std::string what = "endpoint '" + read_field<std::string>(j, "endpoint", "name", "") + "'";
    expect_keys(j, what,
                {"name", "base_url", "path", "model", "credential_env", "timeout_seconds",
                 "requests_per_minute", "supports_images", "retry"});
    harness::ModelEndpoint e;
    e.name = read_field<std::string>(j, what, "name", "");
    e.base_url = read_field<std::string>(j, what, "base_url", "");
    e.path = read_field<std::string>(j, what, "path", e.path);
    e.model = read_field<std::string>(j, what, "model", "");
    e.credential_env = read_field<std::string>(j, what, "credential_env", "");
    e.timeout_seconds = read_field<int>(j, what, "timeout_seconds", e.timeout_seconds);
    e.requests_per_minute =
        read_field<double>(j, what, "requests_per_minute", e.requests_per_minute);
    e.supports_images = read_field<bool>(j, what, "supports_images", e.supports_images);
    if (j.contains("retry")) {
        const Json& r = j.at("retry");
        expect_keys(r, what + ".retry", {"max_retries", "initial_backoff_ms", "backoff_multiplier"});
        e.retry.max_retries = read_field<int>(r, what, "max_retries", e.retry.max_retries);
        e.retry.initial_backoff_ms =
            read_field<int>(r, what, "initial_backoff_ms", e.retry.initial_backoff_ms);
        e.retry.backoff_multiplier =
            read_field<double>(r, what, "backoff_multiplier", e.retry.backoff_multiplier);
    }
    return e;
}

void write_json_file(const fs::path& path, const Json& doc) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("short write to " + path.string());
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        throw ImportError(path + ": invalid JSON: " + e.what());
    }
}

std::string fixed(double v, int places) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", places, v);
    return buffer;
}

bool numeric_cell(const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

Json table_artifact(const TextTable& t, const std::vector<std::uint64_t>& master_seeds) {
    Json j;
    j["format"] = "tsexam-table";
    j["version"] = exam::kToolVersion;
    if (master_seeds.size() == 1) {
        j["master_seed"] = master_seeds.front();
    } else {
        j["master_seeds"] = master_seeds;
    }
    j.update(table_to_json(t));
    return j;
}

// Trend between two printed means: the sign of the difference of the values
// as printed, so the column can never contradict the table next to it.
std::string trend_of(const std::string& prev, const std::string& cur) {
    const double d = std::strtod(cur.c_str(), nullptr) - std::strtod(prev.c_str(), nullptr);
    if (d > 0) return "+";
    if (d < 0) return "-";
    return "=";
}

void check_env_credential(const harness::ModelEndpoint& e) {
    if (e.credential_env.empty()) return;
    const char* value = std::getenv(e.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
        throw CredentialError("environment variable '" + e.credential_env +
                              "' (credential for endpoint '" + e.name + "') is not set");
    }
}

std::vector<std::string> accuracy_columns() {
    std::vector<std::string> cols{"candidate"};
    for (auto c : templates::all_categories()) cols.push_back(templates::to_string(c));
    cols.push_back("overall");
    return cols;
}

}  // namespace

const harness::ModelEndpoint& RunConfig::endpoint(const std::string& name) const {
    for (const auto& e : endpoints) {
        if (e.name == name) return e;
    }
    throw ConfigError("run config: no endpoint named '" + name + "'");
}

void RunConfig::validate() const {
    distribution.validate();
    prompt.validate();
    fit.validate();
    refine.validate();
    std::set<std::string> names;
    for (const auto& e : endpoints) {
        e.validate();
        if (!names.insert(e.name).second) {
            throw ConfigError("run config: duplicate endpoint name '" + e.name + "'");
        }
    }
    if (parallelism == 0) throw ConfigError("run config: parallelism must be >= 1");
    if (template_dir.empty()) throw ConfigError("run config: template_dir is empty");
    if (output_dir.empty()) throw ConfigError("run config: output_dir is empty");
}

RunConfig parse_run_config(const Json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("run config: document must be a JSON object");
    expect_keys(j, "run config",
                {"master_seed", "template_dir", "output_dir", "distribution", "prompt",
                 "endpoints", "fit", "refine", "plots", "parallelism"});

    RunConfig c;
    c.master_seed = read_field<std::uint64_t>(j, "run config", "master_seed", c.master_seed);
    c.template_dir = read_field<std::string>(j, "run config", "template_dir", c.template_dir);
    c.output_dir = read_field<std::string>(j, "run config", "output_dir", c.output_dir);
    c.plots = read_field<bool>(j, "run config", "plots", c.plots);
    c.parallelism = read_field<std::size_t>(j, "run config", "parallelism", c.parallelism);

    if (j.contains("distribution")) {
        const Json& d = j.at("distribution");
        expect_keys(d, "distribution", {"counts", "question_length", "example_length"});
        if (d.contains("counts")) {
            if (!d.at("counts").is_object()) {
                throw ConfigError("distribution: counts must map category names to sizes");
            }
            c.distribution.counts.clear();
            for (auto it = d.at("counts").begin(); it != d.at("counts").end(); ++it) {
                const auto category = templates::category_from_string(it.key());
                c.distribution.counts[category] =
                    read_field<std::size_t>(d.at("counts"), "distribution counts", it.key().c_str(), 0);
            }
        }
        c.distribution.question_length =
            read_field<std::size_t>(d, "distribution", "question_length",
                                    c.distribution.question_length);
        c.distribution.example_length = read_field<std::size_t>(
            d, "distribution", "example_length", c.distribution.example_length);
    }

    if (j.contains("prompt")) {
        const Json& p = j.at("prompt");
        expect_keys(p, "prompt",
                    {"modality", "guidance", "one_shot", "max_tokens", "temperature", "seed"});
        if (p.contains("modality")) {
            c.prompt.modality =
                harness::modality_from_string(read_field<std::string>(p, "prompt", "modality", ""));
        }
        if (p.contains("guidance")) {
            if (!p.at("guidance").is_array()) throw ConfigError("prompt: guidance must be a list");
            for (const auto& g : p.at("guidance")) {
                if (!g.is_string()) throw ConfigError("prompt: guidance entries must be strings");
                c.prompt.guidance.insert(harness::guidance_from_string(g.get<std::string>()));
            }
        }
        c.prompt.one_shot = read_field<bool>(p, "prompt", "one_shot", c.prompt.one_shot);
        c.prompt.max_tokens = read_field<int>(p, "prompt", "max_tokens", c.prompt.max_tokens);
        c.prompt.temperature = read_field<double>(p, "prompt", "temperature", c.prompt.temperature);
        c.prompt.seed = read_field<std::uint64_t>(p, "prompt", "seed", c.prompt.seed);
    }

    if (j.contains("endpoints")) {
        if (!j.at("endpoints").is_array()) throw ConfigError("run config: endpoints must be a list");
        for (const auto& e : j.at("endpoints")) c.endpoints.push_back(parse_endpoint(e));
    }

    if (j.contains("fit")) {
        const Json& f = j.at("fit");
        expect_keys(f, "fit", {"epochs", "learning_rate", "lr_decay", "a_clamp", "convergence_tol"});
        c.fit.epochs = read_field<std::size_t>(f, "fit", "epochs", c.fit.epochs);
        c.fit.learning_rate = read_field<double>(f, "fit", "learning_rate", c.fit.learning_rate);
        c.fit.lr_decay = read_field<double>(f, "fit", "lr_decay", c.fit.lr_decay);
        c.fit.a_clamp = read_field<double>(f, "fit", "a_clamp", c.fit.a_clamp);
        c.fit.convergence_tol =
            read_field<double>(f, "fit", "convergence_tol", c.fit.convergence_tol);
    }

    if (j.contains("refine")) {
        const Json& r = j.at("refine");
        expect_keys(r, "refine", {"num_iterations", "drop_percentage"});
        c.refine.num_iterations =
            read_field<std::size_t>(r, "refine", "num_iterations", c.refine.num_iterations);
        c.refine.drop_percentage =
            read_field<double>(r, "refine", "drop_percentage", c.refine.drop_percentage);
    }

    c.distribution.master_seed = c.master_seed;
    c.template_dir = resolve_path(base_dir, c.template_dir);
    c.output_dir = resolve_path(base_dir, c.output_dir);
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError("config " + path + ": invalid JSON: " + e.what());
    }
    return parse_run_config(j, fs::path(path).parent_path().string());
}

RunConfig with_overrides(RunConfig config, const CommonOptions& options) {
    if (options.seed) {
        config.master_seed = *options.seed;
        config.distribution.master_seed = *options.seed;
    }
    if (!options.out.empty()) config.output_dir = options.out;
    config.validate();
    return config;
}

std::string format_table(const TextTable& t) {
    std::vector<std::size_t> widths(t.columns.size());
    for (std::size_t c = 0; c < t.columns.size(); ++c) widths[c] = t.columns[c].size();
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& cells, bool align_numbers) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) os << "  ";
            const bool right = align_numbers && numeric_cell(cells[c]);
            const std::size_t pad = widths[c] - cells[c].size();
            if (right) os << std::string(pad, ' ');
            os << cells[c];
            if (!right && c + 1 < cells.size()) os << std::string(pad, ' ');
        }
        os << "\n";
    };
    emit(t.columns, false);
    for (const auto& row : t.rows) emit(row, true);
    return os.str();
}

Json table_to_json(const TextTable& t) {
    Json j;
    j["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) rows.push_back(row);
    j["rows"] = std::move(rows);
    return j;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const CredentialError*>(&e) != nullptr) return 3;
    if (dynamic_cast<const CapabilityError*>(&e) != nullptr) return 4;
    if (dynamic_cast<const PreconditionError*>(&e) != nullptr) return 5;
    if (dynamic_cast<const TransportError*>(&e) != nullptr) return 1;
    if (dynamic_cast<const ProtocolError*>(&e) != nullptr) return 1;
    if (dynamic_cast<const Error*>(&e) != nullptr) return 2;
    return 1;
}

std::string format_error(const std::exception& e) {
    auto kind = [&]() -> std::string {
        if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
        if (dynamic_cast<const NumericError*>(&e)) return "NumericError";
        if (dynamic_cast<const CompositionError*>(&e)) return "CompositionError";
        if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
        if (dynamic_cast<const DegenerateInputError*>(&e)) return "DegenerateInputError";
        if (dynamic_cast<const LoadError*>(&e)) return "LoadError";
        if (dynamic_cast<const AssemblyError*>(&e)) return "AssemblyError";
        if (dynamic_cast<const ImportError*>(&e)) return "ImportError";
        if (dynamic_cast<const RefinementError*>(&e)) return "RefinementError";
        if (dynamic_cast<const CapabilityError*>(&e)) return "CapabilityError";
        if (dynamic_cast<const CredentialError*>(&e)) return "CredentialError";
        if (dynamic_cast<const IoError*>(&e)) return "IoError";
        if (dynamic_cast<const TransportError*>(&e)) return "TransportError";
        if (dynamic_cast<const ProtocolError*>(&e)) return "ProtocolError";
        if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
        if (dynamic_cast<const Error*>(&e)) return "Error";
        return "Exception";
    }();
    std::string msg = e.what();
    for (char& c : msg) {
        if (c == '\n' || c == '\r') c = ' ';
        if (c == '"') c = '\'';
    }
    return "error kind=" + kind + " exit=" + std::to_string(exit_code_for(e)) + " msg=\"" + msg +
           "\"";
}

exam::Exam load_exam(const std::string& path) {
    fs::path p(path);
    if (fs::is_directory(p)) {
        return exam::import_exam((p / "exam.json").string(), (p / "keys.json").string());
    }
    return exam::import_exam(p.string(), (p.parent_path() / "keys.json").string());
}

Json round_report_to_json(const irt::RoundReport& report) {
    Json j;
    j["round"] = report.round;
    j["n_items"] = report.n_items;
    j["n_candidates"] = report.n_candidates;
    j["mean_a"] = report.mean_a;
    j["mean_b"] = report.mean_b;
    j["log_likelihood"] = report.log_likelihood;
    j["converged"] = report.converged;
    j["degenerate_items"] = report.degenerate_items;
    j["best_candidate"] = report.best_candidate;
    j["used_global_fallback"] = report.used_global_fallback;
    j["dropped"] = report.dropped;
    Json by_cat = Json::object();
    for (const auto& [category, n] : report.dropped_by_category) {
        by_cat[templates::to_string(category)] = n;
    }
    j["dropped_by_category"] = std::move(by_cat);
    Json accuracy = Json::array();
    for (const auto& acc : report.accuracy) {
        Json a;
        a["candidate"] = acc.candidate;
        a["overall"] = acc.overall;
        Json per = Json::object();
        for (const auto& [category, value] : acc.per_category) {
            per[templates::to_string(category)] = value;
        }
        a["per_category"] = std::move(per);
        accuracy.push_back(std::move(a));
    }
    j["accuracy"] = std::move(accuracy);
    j["a"] = report.a;
    j["b"] = report.b;
    return j;
}

irt::RoundReport round_report_from_json(const Json& j) {
    if (!j.is_object()) throw ImportError("round report: not a JSON object");
    try {
        irt::RoundReport r;
        r.round = j.at("round").get<std::size_t>();
        r.n_items = j.at("n_items").get<std::size_t>();
        r.n_candidates = j.at("n_candidates").get<std::size_t>();
        r.mean_a = j.at("mean_a").get<double>();
        r.mean_b = j.at("mean_b").get<double>();
        r.log_likelihood = j.at("log_likelihood").get<double>();
        r.converged = j.at("converged").get<bool>();
        r.degenerate_items = j.at("degenerate_items").get<std::size_t>();
        r.best_candidate = j.at("best_candidate").get<std::string>();
        r.used_global_fallback = j.at("used_global_fallback").get<bool>();
        r.dropped = j.at("dropped").get<std::vector<std::string>>();
        for (auto it = j.at("dropped_by_category").begin(); it != j.at("dropped_by_category").end();
             ++it) {
            r.dropped_by_category[templates::category_from_string(it.key())] =
                it.value().get<std::size_t>();
        }
        for (const auto& a : j.at("accuracy")) {
            irt::CandidateAccuracy acc;
            acc.candidate = a.at("candidate").get<std::string>();
            acc.overall = a.at("overall").get<double>();
            for (auto it = a.at("per_category").begin(); it != a.at("per_category").end(); ++it) {
                acc.per_category[templates::category_from_string(it.key())] =
                    it.value().get<double>();
            }
            r.accuracy.push_back(std::move(acc));
        }
        r.a = j.at("a").get<std::vector<double>>();
        r.b = j.at("b").get<std::vector<double>>();
        return r;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ImportError(std::string("round report: ") + e.what());
    }
}

void cmd_generate(const RunConfig& config, const CommonOptions& options, std::ostream& out) {
    const RunConfig cfg = with_overrides(config, options);
    const auto registry = templates::load_templates(cfg.template_dir);
    const auto exam = exam::assemble_exam(registry, cfg.distribution);

    TextTable table;
    table.columns = {"category", "items"};
    for (auto category : templates::all_categories()) {
        auto at = cfg.distribution.counts.find(category);
        const std::size_t n = at == cfg.distribution.counts.end() ? 0 : at->second;
        table.rows.push_back({templates::to_string(category), std::to_string(n)});
    }
    table.rows.push_back({"total", std::to_string(exam.items.size())});
    out << format_table(table);

    if (options.dry_run) {
        out << "dry run: validated " << exam.items.size() << " items from "
            << registry.size() << " templates; nothing written\n";
        return;
    }
    const auto manifest = exam::export_exam(exam, cfg.output_dir, cfg.plots);
    write_json_file(fs::path(cfg.output_dir) / "generate_table.json",
                    table_artifact(table, {cfg.master_seed}));
    out << "manifest: " << (fs::path(cfg.output_dir) / "manifest.json").string() << "\n";
}

void cmd_evaluate(const RunConfig& config, const CommonOptions& options,
                  const std::string& exam_path, const std::vector<std::string>& endpoint_names,
                  const std::optional<harness::Modality>& modality, std::ostream& out) {
    const RunConfig cfg = with_overrides(config, options);
    if (endpoint_names.empty()) throw ConfigError("evaluate: no endpoint names given");

    const auto exam = load_exam(exam_path);
    harness::PromptConfig prompt = cfg.prompt;
    if (modality) prompt.modality = *modality;
    prompt.validate();

    std::vector<const harness::ModelEndpoint*> selected;
    for (const auto& name : endpoint_names) selected.push_back(&cfg.endpoint(name));

    // Fail before the first request if any selected endpoint cannot serve the
    // modality or resolve its credential.
    for (const auto* e : selected) {
        if (prompt.modality == harness::Modality::Image && !e->supports_images) {
            throw CapabilityError("endpoint '" + e->name +
                                  "' is text-only but modality 'image' was requested");
        }
        check_env_credential(*e);
    }

    if (options.dry_run) {
        out << "dry run: exam " << exam_path << " (" << exam.items.size() << " items), endpoints";
        for (const auto* e : selected) out << " " << e->name;
        out << "; nothing written\n";
        return;
    }

    TextTable table;
    table.columns = accuracy_columns();
    for (const auto* e : selected) {
        harness::EvaluateOptions eo;
        eo.parallelism = cfg.parallelism;
        eo.output_dir = (fs::path(cfg.output_dir) / e->name).string();
        const auto run = harness::evaluate(exam, *e, prompt, eo);
        write_json_file(fs::path(eo.output_dir) / "scored_run.json", run.to_json(exam));

        std::vector<std::string> row{e->name};
        for (auto category : templates::all_categories()) {
            auto at = run.category_accuracy.find(category);
            row.push_back(at == run.category_accuracy.end() ? "-" : fixed(at->second, 3));
        }
        row.push_back(fixed(run.overall_accuracy, 3));
        table.rows.push_back(std::move(row));
    }

    out << format_table(table);
    write_json_file(fs::path(cfg.output_dir) / "accuracy_table.json",
                    table_artifact(table, {exam.distribution.master_seed}));
}

void cmd_refine(const RunConfig& config, const CommonOptions& options,
                const std::string& exam_path, std::size_t simulate, std::ostream& out) {
    const RunConfig cfg = with_overrides(config, options);
    const auto exam0 = load_exam(exam_path);
    const auto registry = templates::load_templates(cfg.template_dir);

    if (simulate == 1) {
        throw PreconditionError("refine: a simulated population needs at least 2 candidates");
    }
    if (simulate == 0 && cfg.endpoints.size() < 2) {
        throw PreconditionError(
            "refine: fitting needs at least 2 candidates; configure >= 2 endpoints or pass "
            "--simulate N (got " +
            std::to_string(cfg.endpoints.size()) + " endpoint(s))");
    }

    irt::PopulationResponder respond;
    std::optional<sim::SimulatedPopulation> population;
    if (simulate > 0) {
        sim::PopulationConfig pc;
        pc.n_candidates = simulate;
        pc.seed = cfg.master_seed;
        population.emplace(pc);
        respond = [&population](const exam::Exam& e, std::size_t round) {
            return population->respond(e, round);
        };
    } else {
        for (const auto& e : cfg.endpoints) check_env_credential(e);
        const harness::PromptConfig prompt = cfg.prompt;
        const RunConfig& c = cfg;
        respond = [&c, prompt](const exam::Exam& e, std::size_t) {
            irt::ResponseMatrix m;
            for (const auto& item : e.items) m.items.push_back(item.item_id);
            m.r.assign(e.items.size(), std::vector<std::uint8_t>(c.endpoints.size(), 0));
            for (std::size_t k = 0; k < c.endpoints.size(); ++k) {
                m.candidates.push_back(c.endpoints[k].name);
                harness::EvaluateOptions eo;
                eo.parallelism = c.parallelism;
                const auto run = harness::evaluate(e, c.endpoints[k], prompt, eo);
                for (std::size_t i = 0; i < run.row.size(); ++i) m.r[i][k] = run.row[i];
            }
            return m;
        };
    }

    if (options.dry_run) {
        out << "dry run: exam " << exam_path << " (" << exam0.items.size() << " items), "
            << cfg.refine.num_iterations << " iterations, "
            << (simulate > 0 ? "simulated population of " + std::to_string(simulate)
                             : std::to_string(cfg.endpoints.size()) + " endpoints")
            << "; nothing written\n";
        return;
    }

    const auto result = irt::refine(exam0, respond, registry, cfg.fit, cfg.refine);

    Json aggregate;
    aggregate["format"] = "tsexam-refine-report";
    aggregate["version"] = exam::kToolVersion;
    aggregate["master_seed"] = exam0.distribution.master_seed;
    aggregate["rounds"] = Json::array();

    TextTable table;
    table.columns = {"round", "items", "mean_a", "mean_b", "best", "dropped"};
    for (std::size_t r = 0; r < result.rounds.size(); ++r) {
        const auto& rep = result.rounds[r];
        const fs::path round_dir = fs::path(cfg.output_dir) / ("round-" + std::to_string(r));
        exam::export_exam(result.round_exams[r], round_dir.string(), cfg.plots);

        Json report = round_report_to_json(rep);
        aggregate["rounds"].push_back(report);
        Json wrapped;
        wrapped["format"] = "tsexam-round-report";
        wrapped["version"] = exam::kToolVersion;
        wrapped["master_seed"] = exam0.distribution.master_seed;
        wrapped.update(report);
        write_json_file(round_dir / "report.json", wrapped);

        table.rows.push_back({std::to_string(rep.round), std::to_string(rep.n_items),
                              fixed(rep.mean_a, 4), fixed(rep.mean_b, 4), rep.best_candidate,
                              std::to_string(rep.dropped.size())});
    }

    write_json_file(fs::path(cfg.output_dir) / "report.json", aggregate);
    out << format_table(table);
    write_json_file(fs::path(cfg.output_dir) / "refine_table.json",
                    table_artifact(table, {exam0.distribution.master_seed}));
    out << "report: " << (fs::path(cfg.output_dir) / "report.json").string() << "\n";
}

void cmd_report(const std::vector<std::string>& report_paths, const CommonOptions& options,
                std::ostream& out) {
    if (report_paths.empty()) throw ConfigError("report: no input files");

    std::vector<irt::RoundReport> reports;
    std::vector<std::uint64_t> master_seeds;
    for (const auto& path : report_paths) {
        const Json j = read_json_file(path);
        if (j.is_object() && j.contains("master_seed")) {
            const auto seed = j.at("master_seed").get<std::uint64_t>();
            if (std::find(master_seeds.begin(), master_seeds.end(), seed) == master_seeds.end()) {
                master_seeds.push_back(seed);
            }
        }
        if (j.is_object() && j.contains("rounds")) {
            if (!j.at("rounds").is_array()) throw ImportError(path + ": rounds must be a list");
            for (const auto& r : j.at("rounds")) reports.push_back(round_report_from_json(r));
        } else {
            reports.push_back(round_report_from_json(j));
        }
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const auto& x, const auto& y) { return x.round < y.round; });

    const bool with_trend = reports.size() > 1;
    TextTable rounds;
    rounds.columns = {"round", "items", "candidates", "mean_a", "mean_b"};
    if (with_trend) rounds.columns.push_back("trend");
    std::string previous_mean;
    for (const auto& rep : reports) {
        std::vector<std::string> row{std::to_string(rep.round), std::to_string(rep.n_items),
                                     std::to_string(rep.n_candidates), fixed(rep.mean_a, 4),
                                     fixed(rep.mean_b, 4)};
        if (with_trend) {
            row.push_back(previous_mean.empty() ? "." : trend_of(previous_mean, row[3]));
        }
        previous_mean = row[3];
        rounds.rows.push_back(std::move(row));
    }

    TextTable accuracy;
    accuracy.columns = accuracy_columns();
    accuracy.columns.insert(accuracy.columns.begin(), "round");
    for (const auto& rep : reports) {
        for (const auto& acc : rep.accuracy) {
            std::vector<std::string> row{std::to_string(rep.round), acc.candidate};
            for (auto category : templates::all_categories()) {
                auto at = acc.per_category.find(category);
                row.push_back(at == acc.per_category.end() ? "-" : fixed(at->second, 3));
            }
            row.push_back(fixed(acc.overall, 3));
            accuracy.rows.push_back(std::move(row));
        }
    }

    TextTable dropped;
    dropped.columns = {"round"};
    for (auto c : templates::all_categories()) dropped.columns.push_back(templates::to_string(c));
    dropped.columns.push_back("total");
    for (const auto& rep : reports) {
        std::vector<std::string> row{std::to_string(rep.round)};
        for (auto category : templates::all_categories()) {
            auto at = rep.dropped_by_category.find(category);
            row.push_back(std::to_string(at == rep.dropped_by_category.end() ? 0 : at->second));
        }
        row.push_back(std::to_string(rep.dropped.size()));
        dropped.rows.push_back(std::move(row));
    }

    out << format_table(rounds) << "\n" << format_table(accuracy) << "\n" << format_table(dropped);

    if (!options.dry_run) {
        const fs::path out_dir = options.out.empty()
                                     ? fs::path(report_paths.front()).parent_path()
                                     : fs::path(options.out);
        Json doc;
        doc["format"] = "tsexam-report-tables";
        doc["version"] = exam::kToolVersion;
        if (master_seeds.size() == 1) {
            doc["master_seed"] = master_seeds.front();
        } else {
            doc["master_seeds"] = master_seeds;
        }
        doc["rounds"] = table_to_json(rounds);
        doc["accuracy"] = table_to_json(accuracy);
        doc["dropped"] = table_to_json(dropped);
        write_json_file(out_dir / "report_table.json", doc);
        out << "table: " << (out_dir / "report_table.json").string() << "\n";
    }
}

}  // namespace tsexam::cli
