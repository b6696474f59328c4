// ilp: learn, check, oracle and bench front-ends.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ilp/bench.hpp"
#include "ilp/exit_codes.hpp"
#include "ilp/oracle.hpp"
#include "ilp/pointless.hpp"
#include "ilp/search.hpp"
#include "ilp/task_io.hpp"

namespace {

using namespace ilp::cli;

ilp::PointlessMode parse_mode(const std::string& s) {
    if (s == "on" || s == "both") return ilp::PointlessMode::Both;
    if (s == "off") return ilp::PointlessMode::Off;
    if (s == "reducible-only") return ilp::PointlessMode::ReducibleOnly;
    return ilp::PointlessMode::IndiscriminateOnly;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

int cmd_learn(const std::string& task_dir, ilp::LearnConfig cfg, const std::string& mode, const std::string& stats_path,
              std::uint64_t seed) {
    const ilp::Task task = ilp::parse_task(task_dir);
    const ilp::LearnResult r = ilp::learn(task, cfg);

    if (!stats_path.empty()) {
        auto j = ilp::bench::to_json(ilp::bench::make_record(task, mode, 0, r));
        j["seed"] = seed;
        j["audit_blocked"] = r.audit.records.size();
        j["audit_violations"] = r.audit.violations.size();
        const std::string text = stats_path.ends_with(".csv")
                                     ? ilp::bench::to_csv({ilp::bench::make_record(task, mode, 0, r)})
                                     : j.dump(2) + "\n";
        if (!write_file(stats_path, text)) {
            std::cerr << "error: cannot write " << stats_path << "\n";
            return kUsage;
        }
    }

    if (cfg.audit) {
        std::cout << "% audit: " << r.audit.records.size() << " blocked hypotheses force-tested, "
                  << r.audit.violations.size() << " violations\n";
        for (const auto& v : r.audit.violations) std::cerr << "audit violation: " << v << "\n";
        if (!r.audit.violations.empty()) return kBreach;
    }
    if (!r.best) {
        std::cerr << "timeout: no hypothesis tested within " << cfg.timeout_s << " s\n";
        return kTimeout;
    }
    std::cout << ilp::render_hypothesis(*r.best);
    std::cout << "% score " << ilp::to_string(r.best_score) << " termination " << ilp::to_string(r.termination)
              << " generated " << r.stats.candidates_generated << " tested " << r.stats.candidates_tested << "\n";
    return kOk;
}

int cmd_check(const std::string& task_dir, const std::string& rules_path) {
    const ilp::Task task = ilp::parse_task(task_dir);
    const auto rules = ilp::parse_rules(ilp::detail::read_file(rules_path), rules_path);
    for (const ilp::Rule& r : rules)
        if (auto v = ilp::unsafe_variable(r))
            throw ilp::ParseError(rules_path, 0, 0,
                                  "unsafe rule `" + ilp::to_string(r) + "`: head variable " + std::string(v->str()) +
                                      " does not occur in the body");
    const auto found = ilp::find_pointless(ilp::Hypothesis(rules), ilp::DetectionContext::of(task),
                                           ilp::PointlessMode::Both, true);
    for (const auto& ev : found) std::cout << ilp::render_evidence(ev) << "\n";
    if (found.empty()) {
        std::cout << "no pointless rules\n";
        return kOk;
    }
    return kFindings;
}

int cmd_oracle(const std::string& task_dir, std::size_t max_size, double ceiling) {
    const ilp::Task task = ilp::parse_task(task_dir);
    try {
        const auto r = ilp::oracle::oracle_optimal(task, max_size, ceiling);
        std::cout << "% optimum " << ilp::to_string(r.best) << " over " << r.enumerated << " hypotheses, "
                  << r.witnesses.size() << " witnesses\n";
        for (const auto& h : r.witnesses) std::cout << "% witness\n" << ilp::render_hypothesis(h);
        return kOk;
    } catch (const ilp::CeilingExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

int cmd_bench(const std::string& suite, const std::string& format, const std::string& out_path,
              const ilp::bench::SuiteOptions& opt) {
    if (ilp::bench::suite_tasks(suite).empty()) {
        std::cerr << "error: no task directories under " << suite << "\n";
        return kUsage;
    }
    const auto records = ilp::bench::run_suite(suite, opt);
    std::string text;
    if (format == "csv") {
        text = ilp::bench::to_csv(records);
    } else {
        nlohmann::json j = {{"schema_version", ilp::bench::kSchemaVersion}, {"records", nlohmann::json::array()}};
        for (const auto& r : records) j["records"].push_back(ilp::bench::to_json(r));
        text = j.dump(2) + "\n";
    }
    if (out_path.empty()) {
        std::cout << text;
    } else if (!write_file(out_path, text)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kUsage;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal rule learning with pointless-rule pruning"};
    app.require_subcommand(1);

    std::string task_dir, rules_path, suite, mode = "on", stats_path, format = "json", out_path;
    std::size_t max_size = 0, repeats = 1;
    double timeout = 60, ceiling = ilp::oracle::kDefaultCeiling;
    bool noisy = false, audit = false, exhaustive = false;
    std::uint64_t seed = 0;

    auto* learn = app.add_subcommand("learn", "learn an optimal hypothesis for a task directory");
    learn->add_option("task", task_dir, "task directory (bk.pl, exs.pl, bias.pl)")->required();
    learn->add_option("--max-size", max_size, "largest hypothesis size in literals (default: bias maximum)");
    learn->add_option("--timeout", timeout, "wall-clock limit in seconds");
    learn->add_option("--pointless", mode, "pointless-rule pruning")
        ->check(CLI::IsMember({"on", "off", "both", "reducible-only", "indiscriminate-only"}));
    learn->add_flag("--noisy", noisy, "keep only banish and pointless constraints");
    learn->add_flag("--audit", audit, "force-test every hypothesis blocked by a pointless constraint");
    learn->add_flag("--exhaustive-evidence", exhaustive, "collect every pointless literal per hypothesis");
    learn->add_option("--stats", stats_path, "write run statistics (JSON, or CSV for a .csv path)");
    learn->add_option("--seed", seed, "recorded in the statistics; the search itself is deterministic");

    auto* check = app.add_subcommand("check", "report pointless rules in a rule file");
    check->add_option("task", task_dir, "task directory")->required();
    check->add_option("rules", rules_path, "file of rules")->required();

    auto* oracle = app.add_subcommand("oracle", "exhaustively certify the optimum");
    oracle->add_option("task", task_dir, "task directory")->required();
    oracle->add_option("--max-size", max_size, "largest hypothesis size in literals");
    oracle->add_option("--ceiling", ceiling, "refuse when the estimated candidate count exceeds this");

    auto* bench = app.add_subcommand("bench", "run the four pruning configurations over a suite");
    bench->add_option("suite", suite, "directory of task directories")->required();
    bench->add_option("--out", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    bench->add_option("--output", out_path, "write to a file instead of stdout");
    bench->add_option("--repeats", repeats, "runs per (task, configuration)");
    bench->add_option("--timeout", timeout, "per-run limit in seconds");
    bench->add_option("--max-size", max_size, "largest hypothesis size in literals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*learn) {
            ilp::LearnConfig cfg;
            cfg.max_size = max_size;
            cfg.timeout_s = timeout;
            cfg.pointless = parse_mode(mode);
            cfg.noisy = noisy;
            cfg.audit = audit;
            cfg.exhaustive_evidence = exhaustive;
            return cmd_learn(task_dir, cfg, ilp::to_string(cfg.pointless), stats_path, seed);
        }
        if (*check) return cmd_check(task_dir, rules_path);
        if (*oracle) return cmd_oracle(task_dir, max_size, ceiling);
        if (*bench) return cmd_bench(suite, format, out_path, {repeats, timeout, max_size});
    } catch (...) {
        const auto [code, message] = describe_failure(std::current_exception());
        std::cerr << message << "\n";
        return code;
    }
    return kUsage;
}
