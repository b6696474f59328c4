#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ilp/search.hpp"
#include "ilp/task_io.hpp"

namespace ilp::bench {

inline constexpr int kSchemaVersion = 1;

/// ½(tp/(tp+fn) + tn/(tn+fp)); a rate with a zero denominator counts as 1.
inline double balanced_accuracy(const Coverage& c) {
    const double tpr = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double tnr = c.tn + c.fp == 0 ? 1.0 : static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return 0.5 * (tpr + tnr);
}

/// Balanced accuracy of h on the held-out examples, or on the training
/// examples when the task has none.
inline double evaluate(const Task& t, const Hypothesis& h) {
    if (t.has_test) return balanced_accuracy(coverage(t.bk_model, h, t.test_pos, t.test_neg));
    return balanced_accuracy(coverage(t.bk_model, h, t.pos, t.neg));
}

struct BenchRecord {
    std::string task;
    std::string config;
    std::size_t repeat = 0;
    std::string termination;
    bool found = false;
    long long best_errors = -1;  // -1 when no hypothesis was returned
    long long best_size = -1;
    double balanced_accuracy = 0;
    std::string hypothesis;
    Stats stats;
    std::string error;  // nonempty when the run failed
};

inline BenchRecord make_record(const Task& t, const std::string& config, std::size_t repeat, const LearnResult& r) {
    BenchRecord rec;
    rec.task = t.name;
    rec.config = config;
    rec.repeat = repeat;
    rec.termination = to_string(r.termination);
    rec.stats = r.stats;
    if (r.best) {
        rec.found = true;
        rec.best_errors = static_cast<long long>(r.best_score.errors);
        rec.best_size = static_cast<long long>(r.best_score.size);
        rec.balanced_accuracy = evaluate(t, *r.best);
        rec.hypothesis = render_hypothesis(*r.best);
    }
    return rec;
}

inline nlohmann::json to_json(const BenchRecord& r) {
    const Stats& s = r.stats;
    return {
        {"schema_version", kSchemaVersion},
        {"task", r.task},
        {"config", r.config},
        {"repeat", r.repeat},
        {"termination", r.termination},
        {"found", r.found},
        {"best_score", {{"errors", r.best_errors}, {"size", r.best_size}}},
        {"balanced_accuracy", r.balanced_accuracy},
        {"candidates_generated", s.candidates_generated},
        {"candidates_tested", s.candidates_tested},
        {"constraints",
         {{"specialisation", s.constraints_of(ConstraintKind::Specialisation)},
          {"generalisation", s.constraints_of(ConstraintKind::Generalisation)},
          {"pointless", s.constraints_of(ConstraintKind::PointlessSuperRule)},
          {"banish", s.constraints_of(ConstraintKind::Banish)}}},
        {"evidence",
         {{"reducible", s.evidence_of(PointlessKind::Reducible)},
          {"indiscriminate", s.evidence_of(PointlessKind::Indiscriminate)}}},
        {"time_total_s", s.time_total_s},
        {"time_detection_s", s.time_detection_s},
        {"time_testing_s", s.time_testing_s},
        {"time_generation_s", s.time_generation_s},
        {"detection_overhead", s.detection_overhead()},
        {"detection_calls", s.detection_calls},
        {"explored_nodes", s.explored_nodes},
        {"hypothesis", r.hypothesis},
        {"error", r.error},
    };
}

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{
        "task", "config", "repeat", "termination", "found", "best_errors", "best_size", "balanced_accuracy",
        "candidates_generated", "candidates_tested", "constraints_specialisation", "constraints_generalisation",
        "constraints_pointless", "constraints_banish", "evidence_reducible", "evidence_indiscriminate",
        "time_total_s", "time_detection_s", "time_testing_s", "time_generation_s", "detection_overhead",
        "detection_calls", "explored_nodes", "error"};
    return cols;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string to_csv(const std::vector<BenchRecord>& records) {
    std::string out;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += "\n";
    for (const BenchRecord& r : records) {
        const auto j = to_json(r);
        auto field = [&](const std::string& c) -> std::string {
            nlohmann::json v;
            if (c == "best_errors") v = j["best_score"]["errors"];
            else if (c == "best_size") v = j["best_score"]["size"];
            else if (c.rfind("constraints_", 0) == 0) v = j["constraints"][c.substr(12)];
            else if (c.rfind("evidence_", 0) == 0) v = j["evidence"][c.substr(9)];
            else v = j[c];
            return v.is_string() ? csv_escape(v.get<std::string>()) : v.dump();
        };
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + field(cols[i]);
        out += "\n";
    }
    return out;
}

struct SuiteOptions {
    std::size_t repeats = 1;
    double timeout_s = 60;
    std::size_t max_size = 0;
};

inline const std::vector<std::pair<std::string, PointlessMode>>& configurations() {
    static const std::vector<std::pair<std::string, PointlessMode>> cfgs{
        {"both", PointlessMode::Both},
        {"reducible-only", PointlessMode::ReducibleOnly},
        {"indiscriminate-only", PointlessMode::IndiscriminateOnly},
        {"off", PointlessMode::Off}};
    return cfgs;
}

/// Task directories of a suite: the directory itself if it is a task,
/// otherwise its immediate subdirectories holding a bias file, sorted.
inline std::vector<std::filesystem::path> suite_tasks(const std::filesystem::path& dir) {
    if (std::filesystem::exists(dir / "bias.pl")) return {dir};
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory() && std::filesystem::exists(e.path() / "bias.pl")) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

/// Every (task, configuration, repeat) cell. Failures are recorded and the suite continues.
inline std::vector<BenchRecord> run_suite(const std::filesystem::path& dir, const SuiteOptions& opt) {
    std::vector<BenchRecord> out;
    for (const auto& path : suite_tasks(dir)) {
        Task task;
        try {
            task = parse_task(path);
        } catch (const std::exception& e) {
            for (const auto& [name, mode] : configurations())
                for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
                    BenchRecord rec;
                    rec.task = path.filename().string();
                    rec.config = name;
                    rec.repeat = rep;
                    rec.termination = "error";
                    rec.error = e.what();
                    out.push_back(std::move(rec));
                }
            continue;
        }
        for (const auto& [name, mode] : configurations())
            for (std::size_t rep = 0; rep < opt.repeats; ++rep) {
                LearnConfig cfg;
                cfg.pointless = mode;
                cfg.timeout_s = opt.timeout_s;
                cfg.max_size = opt.max_size;
                try {
                    out.push_back(make_record(task, name, rep, learn(task, cfg)));
                } catch (const std::exception& e) {
                    BenchRecord rec;
                    rec.task = task.name;
                    rec.config = name;
                    rec.repeat = rep;
                    rec.termination = "error";
                    rec.error = e.what();
                    out.push_back(std::move(rec));
                }
            }
    }
    return out;
}

}  // namespace ilp::bench
