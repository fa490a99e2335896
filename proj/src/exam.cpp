#include "tsexam/exam.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "tsexam/digest.hpp"
#include "tsexam/errors.hpp"
#include "tsexam/plot.hpp"
#include "tsexam/rng.hpp"

namespace tsexam::exam {

namespace fs = std::filesystem;
using templates::Category;

namespace {

Json series_to_json(const std::vector<TimeSeries>& series) {
    Json arr = Json::array();
    for (const auto& ts : series) arr.push_back(ts.values());
    return arr;
}

std::vector<TimeSeries> series_from_json(const Json& arr) {
    std::vector<TimeSeries> out;
    for (const auto& node : arr) out.emplace_back(node.get<std::vector<double>>());
    return out;
}

Json item_to_json(const templates::ExamItem& item, const std::string& lineage) {
    Json j;
    j["item_id"] = item.item_id;
    j["template_id"] = item.template_id;
    j["category"] = templates::to_string(item.category);
    j["subcategory"] = item.subcategory;
    j["seed"] = item.seed;
    j["question_text"] = item.question_text;
    j["options"] = item.options;
    if (!item.hint.empty()) j["hint"] = item.hint;
    if (!item.relevant_concepts.empty()) {
        Json concepts = Json::array();
        for (const auto& c : item.relevant_concepts) {
            concepts.push_back(Json{{"term", c.term}, {"description", c.description}});
        }
        j["relevant_concepts"] = std::move(concepts);
    }
    Json example;
    example["options"] = item.example_options;
    example["correct"] = item.example_correct;
    example["answer_text"] = item.example_answer_text;
    example["series"] = series_to_json(item.example_series);
    j["example"] = std::move(example);
    j["series"] = series_to_json(item.series);
    if (!lineage.empty()) j["replaced"] = lineage;
    return j;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("export_exam: cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("export_exam: write failed for " + path.string());
}

ManifestEntry manifest_entry(const fs::path& root, const std::string& rel) {
    ManifestEntry entry;
    entry.path = rel;
    entry.digest = harness::digest_file((root / rel).string());
    entry.bytes = static_cast<std::uint64_t>(fs::file_size(root / rel));
    return entry;
}

}  // namespace

std::size_t DistributionSpec::total() const {
    std::size_t sum = 0;
    for (const auto& [_, count] : counts) sum += count;
    return sum;
}

void DistributionSpec::validate() const {
    if (question_length < 8 || example_length < 8) {
        throw ConfigError("distribution: series lengths must be >= 8");
    }
    if (total() < 1) throw ConfigError("distribution: at least one item must be requested");
}

void Exam::validate() const {
    if (lineage.size() != items.size()) {
        throw AssemblyError("exam: lineage entries (" + std::to_string(lineage.size()) +
                            ") do not match items (" + std::to_string(items.size()) + ")");
    }
    std::set<std::string> ids;
    std::map<Category, std::size_t> realized;
    for (const auto& item : items) {
        if (!ids.insert(item.item_id).second) {
            throw AssemblyError("exam: duplicate item id '" + item.item_id + "'");
        }
        realized[item.category] += 1;
    }
    for (const auto& [category, want] : distribution.counts) {
        const std::size_t have = realized.count(category) ? realized.at(category) : 0;
        if (have != want) {
            throw AssemblyError("exam: category " + templates::to_string(category) + " has " +
                                std::to_string(have) + " items, spec wants " +
                                std::to_string(want));
        }
    }
}

AnswerKey answer_key(const Exam& exam) {
    AnswerKey key;
    for (const auto& item : exam.items) {
        key.item_order.push_back(item.item_id);
        key.entries[item.item_id] =
            KeyEntry{item.correct_index, item.permutation, item.template_id};
    }
    return key;
}

Exam assemble_exam(const templates::TemplateRegistry& registry, const DistributionSpec& spec) {
    spec.validate();
    Exam exam;
    exam.distribution = spec;
    exam.round = 0;

    std::size_t category_index = 0;
    for (Category category : templates::all_categories()) {
        const std::size_t want = spec.counts.count(category) ? spec.counts.at(category) : 0;
        const std::uint64_t category_seed = derive_seed(spec.master_seed, category_index);
        ++category_index;
        if (want == 0) continue;

        const auto template_ids = registry.ids_in_category(category);
        if (template_ids.empty()) {
            throw AssemblyError("assemble_exam: no templates for category " +
                                templates::to_string(category));
        }
        std::map<std::string, std::size_t> rotation;
        for (std::size_t n = 0; n < want; ++n) {
            const auto& tid = template_ids[n % template_ids.size()];
            const auto& tmpl = registry.by_id(tid);
            const auto generable = tmpl.generable_options();
            const std::size_t correct = generable[rotation[tid]++ % generable.size()];
            const std::uint64_t item_seed = derive_seed(category_seed, n);
            exam.items.push_back(
                templates::instantiate(tmpl, correct, item_seed, spec.lengths()));
            exam.lineage.emplace_back();
        }
    }
    exam.validate();
    return exam;
}

Json exam_to_json(const Exam& exam) {
    Json j;
    j["format"] = "tsexam-exam";
    j["version"] = kToolVersion;
    j["master_seed"] = exam.distribution.master_seed;
    j["round"] = exam.round;
    j["question_length"] = exam.distribution.question_length;
    j["example_length"] = exam.distribution.example_length;
    Json counts;
    for (const auto& [category, count] : exam.distribution.counts) {
        counts[templates::to_string(category)] = count;
    }
    j["counts"] = std::move(counts);
    Json items = Json::array();
    for (std::size_t i = 0; i < exam.items.size(); ++i) {
        items.push_back(item_to_json(exam.items[i], exam.lineage[i]));
    }
    j["items"] = std::move(items);
    return j;
}

Json keys_to_json(const Exam& exam) {
    Json j;
    j["format"] = "tsexam-keys";
    j["version"] = kToolVersion;
    j["master_seed"] = exam.distribution.master_seed;
    j["round"] = exam.round;
    Json keys = Json::array();
    for (const auto& item : exam.items) {
        Json entry;
        entry["item"] = item.item_id;
        entry["template"] = item.template_id;
        entry["correct_index"] = item.correct_index;
        entry["permutation"] = item.permutation;
        keys.push_back(std::move(entry));
    }
    j["keys"] = std::move(keys);
    return j;
}

ExportManifest export_exam(const Exam& exam, const std::string& directory, bool include_plots) {
    exam.validate();
    const fs::path root(directory);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("export_exam: cannot create " + root.string() + ": " + ec.message());

    write_file(root / "exam.json", exam_to_json(exam).dump(2) + "\n");
    write_file(root / "keys.json", keys_to_json(exam).dump(2) + "\n");

    ExportManifest manifest;
    manifest.files.push_back(manifest_entry(root, "exam.json"));
    manifest.files.push_back(manifest_entry(root, "keys.json"));

    if (include_plots) {
        fs::create_directories(root / "plots", ec);
        if (ec) {
            throw IoError("export_exam: cannot create " + (root / "plots").string() + ": " +
                          ec.message());
        }
        for (const auto& item : exam.items) {
            const auto png = harness::render_plot(item.series);
            const std::string rel = "plots/" + item.item_id + ".png";
            std::ofstream out(root / rel, std::ios::binary);
            if (!out) throw IoError("export_exam: cannot open " + (root / rel).string());
            out.write(reinterpret_cast<const char*>(png.data()),
                      static_cast<std::streamsize>(png.size()));
            if (!out) throw IoError("export_exam: write failed for " + (root / rel).string());
            out.close();
            manifest.files.push_back(manifest_entry(root, rel));
        }
    }

    Json mj;
    mj["format"] = "tsexam-manifest";
    mj["version"] = kToolVersion;
    mj["master_seed"] = exam.distribution.master_seed;
    Json files = Json::array();
    for (const auto& entry : manifest.files) {
        files.push_back(Json{{"path", entry.path}, {"digest", entry.digest}, {"bytes", entry.bytes}});
    }
    mj["files"] = std::move(files);
    write_file(root / "manifest.json", mj.dump(2) + "\n");
    return manifest;
}

AnswerKey load_keys(const std::string& keys_path) {
    std::ifstream in(keys_path);
    if (!in) throw IoError("load_keys: cannot open " + keys_path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ImportError("load_keys: " + keys_path + ": invalid JSON: " + e.what());
    }
    if (j.value("format", std::string{}) != "tsexam-keys") {
        throw ImportError("load_keys: " + keys_path + " is not a keys file");
    }
    AnswerKey key;
    for (const auto& node : j.at("keys")) {
        const std::string id = node.at("item").get<std::string>();
        if (key.entries.count(id)) throw ImportError("load_keys: duplicate key for item " + id);
        key.item_order.push_back(id);
        KeyEntry entry;
        entry.correct_index = node.at("correct_index").get<std::size_t>();
        entry.permutation = node.at("permutation").get<std::vector<std::size_t>>();
        entry.template_id = node.value("template", std::string{});
        key.entries[id] = std::move(entry);
    }
    return key;
}

Exam import_exam(const std::string& exam_path, const std::string& keys_path) {
    std::ifstream in(exam_path);
    if (!in) throw IoError("import_exam: cannot open " + exam_path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ImportError("import_exam: " + exam_path + ": invalid JSON: " + e.what());
    }
    if (j.value("format", std::string{}) != "tsexam-exam") {
        throw ImportError("import_exam: " + exam_path + " is not an exam file");
    }
    const AnswerKey key = load_keys(keys_path);

    Exam exam;
    exam.round = j.at("round").get<std::size_t>();
    exam.distribution.master_seed = j.at("master_seed").get<std::uint64_t>();
    exam.distribution.question_length = j.at("question_length").get<std::size_t>();
    exam.distribution.example_length = j.at("example_length").get<std::size_t>();
    exam.distribution.counts.clear();
    for (const auto& [name, count] : j.at("counts").items()) {
        exam.distribution.counts[templates::category_from_string(name)] =
            count.get<std::size_t>();
    }

    for (const auto& node : j.at("items")) {
        templates::ExamItem item;
        item.item_id = node.at("item_id").get<std::string>();
        item.template_id = node.at("template_id").get<std::string>();
        item.category = templates::category_from_string(node.at("category").get<std::string>());
        item.subcategory = node.at("subcategory").get<std::string>();
        item.seed = node.at("seed").get<std::uint64_t>();
        item.question_text = node.at("question_text").get<std::string>();
        item.options = node.at("options").get<std::vector<std::string>>();
        item.hint = node.value("hint", std::string{});
        if (node.contains("relevant_concepts")) {
            for (const auto& c : node.at("relevant_concepts")) {
                item.relevant_concepts.push_back({c.at("term").get<std::string>(),
                                                  c.at("description").get<std::string>()});
            }
        }
        const Json& example = node.at("example");
        item.example_options = example.at("options").get<std::vector<std::string>>();
        item.example_correct = example.at("correct").get<std::size_t>();
        item.example_answer_text = example.at("answer_text").get<std::string>();
        item.example_series = series_from_json(example.at("series"));
        item.series = series_from_json(node.at("series"));

        const auto it = key.entries.find(item.item_id);
        if (it == key.entries.end()) {
            throw ImportError("import_exam: no key entry for item " + item.item_id);
        }
        item.correct_index = it->second.correct_index;
        item.permutation = it->second.permutation;

        exam.items.push_back(std::move(item));
        exam.lineage.push_back(node.value("replaced", std::string{}));
    }
    exam.validate();
    return exam;
}

ImportedResponses import_responses(const std::string& path, const AnswerKey& key) {
    std::ifstream in(path);
    if (!in) throw IoError("import_responses: cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ImportError("import_responses: " + path + ": invalid JSON: " + e.what());
    }
    if (!j.contains("responses") || !j["responses"].is_array()) {
        throw ImportError("import_responses: " + path + ": missing 'responses' array");
    }

    ImportedResponses out;
    out.matrix.items = key.item_order;
    std::map<std::string, std::size_t> item_row;
    for (std::size_t i = 0; i < key.item_order.size(); ++i) item_row[key.item_order[i]] = i;

    std::map<std::string, std::size_t> candidate_col;
    std::set<std::pair<std::string, std::string>> seen;
    struct Cell {
        std::size_t row, col;
        std::uint8_t value;
    };
    std::vector<Cell> cells;

    for (const auto& node : j["responses"]) {
        const std::string candidate = node.at("candidate").get<std::string>();
        const std::string item = node.at("item").get<std::string>();
        const auto row = item_row.find(item);
        if (row == item_row.end()) {
            throw ImportError("import_responses: unknown item id '" + item + "'");
        }
        if (!seen.insert({candidate, item}).second) {
            throw ImportError("import_responses: duplicate response for (" + candidate + ", " +
                              item + ")");
        }
        if (!candidate_col.count(candidate)) {
            candidate_col[candidate] = out.matrix.candidates.size();
            out.matrix.candidates.push_back(candidate);
        }
        const bool failed = node.value("parse_failure", false) || node.at("answer_index").is_null();
        std::uint8_t value = 0;
        if (failed) {
            ++out.parse_failures;
        } else {
            const auto answer = node.at("answer_index").get<std::size_t>();
            value = answer == key.entries.at(item).correct_index ? 1 : 0;
        }
        cells.push_back({row->second, candidate_col.at(candidate), value});
    }

    out.matrix.r.assign(out.matrix.items.size(),
                        std::vector<std::uint8_t>(out.matrix.candidates.size(), 0));
    std::vector<std::vector<bool>> filled(out.matrix.items.size(),
                                          std::vector<bool>(out.matrix.candidates.size(), false));
    for (const auto& cell : cells) {
        out.matrix.r[cell.row][cell.col] = cell.value;
        filled[cell.row][cell.col] = true;
    }
    for (std::size_t i = 0; i < filled.size(); ++i) {
        for (std::size_t c = 0; c < filled[i].size(); ++c) {
            if (!filled[i][c]) {
                throw ImportError("import_responses: missing response for (" +
                                  out.matrix.candidates[c] + ", " + out.matrix.items[i] + ")");
            }
        }
    }
    out.matrix.validate(false);
    return out;
}

}  // namespace tsexam::exam
