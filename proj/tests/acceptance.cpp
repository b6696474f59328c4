// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "ilp/bench.hpp"
#include "ilp/datalog.hpp"
#include "ilp/generator.hpp"
#include "ilp/oracle.hpp"
#include "ilp/pointless.hpp"
#include "ilp/search.hpp"
#include "ilp/synth.hpp"
#include "support/reference.hpp"

using namespace ilp;

namespace {

constexpr std::uint64_t kMicroTasks = 60;
const char* const kFixtures[] = {"intro", "transitive-gt", "eight-puzzle-mini", "trains-mini"};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (pass) detail << why;
        pass = false;
    }
};

const Task& fixture(const std::string& name) {
    static std::map<std::string, Task> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, parse_task(std::string(ILP_FIXTURE_DIR) + "/" + name)).first;
    return it->second;
}

const std::vector<synth::MicroTask>& micro_tasks() {
    static const auto tasks = [] {
        std::vector<synth::MicroTask> out;
        for (std::uint64_t seed = 0; seed < kMicroTasks; ++seed) out.push_back(synth::micro_task(seed));
        return out;
    }();
    return tasks;
}

LearnConfig config(PointlessMode mode, std::size_t max_size = 0, bool audit = false) {
    LearnConfig c;
    c.pointless = mode;
    c.max_size = max_size;
    c.audit = audit;
    c.timeout_s = 600;
    return c;
}

std::pair<int, std::string> run_cli(const std::string& args) {
    const std::string cmd = std::string(ILP_CLI_PATH) + " " + args + " 2>&1";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, ""};
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    const int raw = pclose(p);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

// 1
Outcome intro_optimality() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    const Task& t = fixture("intro");
    const LearnResult r = learn(t);
    const auto cert = oracle::oracle_optimal(t, 4);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Hypothesis witness = canonicalize(parse_hypothesis("f(A) :- odd(A), gt(A,3), lt(A,8)."));
    if (!r.best || r.best_score != CostScore{0, 4}) o.fail("learn did not return a (0, 4) hypothesis");
    if (cert.best != CostScore{0, 4}) o.fail("oracle optimum is " + to_string(cert.best));
    if (!std::binary_search(cert.witnesses.begin(), cert.witnesses.end(), witness)) o.fail("witness missing");
    if (secs >= 5) o.fail("took " + std::to_string(secs) + " s");
    if (o.pass) o.detail << "learned " << to_string(*r.best) << ", " << cert.witnesses.size() << " witnesses, " << secs
                         << " s";
    return o;
}

// 2
Outcome learner_matches_oracle() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::size_t agree = 0, nontrivial = 0, inexact = 0;
    for (std::size_t i = 0; i < micro_tasks().size(); ++i) {
        const auto& mt = micro_tasks()[i];
        const LearnResult r = learn(mt.task, config(PointlessMode::Both, mt.max_size));
        const auto cert = oracle::oracle_optimal(mt.task, mt.max_size);
        nontrivial += cert.best.size > 2;
        inexact += cert.best.errors > 0;
        if (r.best && r.best_score == cert.best) ++agree;
        else o.fail("seed " + std::to_string(i) + ": learned " + to_string(r.best_score) + ", oracle " +
                    to_string(cert.best) + "; ");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 600) o.fail("took " + std::to_string(secs) + " s");
    o.detail << agree << "/" << micro_tasks().size() << " micro-tasks agree (" << nontrivial << " optima above size 2, "
             << inexact << " with errors), " << secs << " s";
    return o;
}

// 3
Outcome audit_soundness() {
    Outcome o;
    std::size_t blocked = 0, runs = 0;
    auto check = [&](const Task& t, std::size_t max_size, const std::string& name) {
        const LearnResult r = learn(t, config(PointlessMode::Both, max_size, true));
        ++runs;
        blocked += r.audit.records.size();
        for (const auto& v : r.audit.violations) o.fail(name + ": " + v + "; ");
        for (const auto& rec : r.audit.records)
            if (!rec.has_reduction || !(rec.reduced_score < rec.blocked_score))
                o.fail(name + ": blocked " + to_string(rec.blocked) + " lacks a strictly better reduction; ");
    };
    for (const char* name : kFixtures) check(fixture(name), 0, name);
    for (std::size_t i = 0; i < micro_tasks().size(); ++i)
        check(micro_tasks()[i].task, micro_tasks()[i].max_size, "seed " + std::to_string(i));
    o.detail << blocked << " blocked hypotheses force-tested over " << runs << " runs";
    return o;
}

// 4
Outcome closure_under_specialisation() {
    Outcome o;
    ref::Rng rng(4);
    std::size_t evidence = 0, supers = 0;
    for (const auto& mt : micro_tasks()) {
        const Task& t = mt.task;
        const auto ctx = DetectionContext::of(t);
        for (std::size_t k = 1; k <= 2; ++k)
            for (const Rule& r : oracle::all_rules(t.bias, k))
                for (const auto& ev : find_pointless(Hypothesis({r}), ctx, PointlessMode::Both, true)) {
                    ++evidence;
                    for (const Rule& s : ref::super_rules(rng, r, t.bias, 20)) {
                        ++supers;
                        const bool still = ev.kind == PointlessKind::Reducible
                                               ? is_reducible(t.bk_model, s, ev.literal, t.constant_domain)
                                               : is_indiscriminate(t.bk_model, t.neg, s, ev.literal, t.constant_domain);
                        if (!still || find_pointless(Hypothesis({s}), ctx).empty())
                            o.fail(to_string(ev.kind) + " " + to_string(r) + " -> " + to_string(s) + "; ");
                    }
                }
    }
    if (evidence == 0) o.fail("no evidence sampled");
    o.detail << evidence << " evidence items, " << supers << " super-rules re-detected";
    return o;
}

// 5
Outcome coverage_equality_agrees() {
    Outcome o;
    std::size_t pairs = 0, disagree = 0;
    std::string example;
    for (const auto& mt : micro_tasks()) {
        const Task& t = mt.task;
        for (std::size_t k = 1; k <= 3; ++k)
            for (const Rule& r : oracle::all_rules(t.bias, k))
                for (const Literal& l : r.body()) {
                    if (!captured(r, l)) continue;
                    ++pairs;
                    const bool def = is_indiscriminate(t.bk_model, t.neg, r, l, t.constant_domain);
                    const bool eq = negatives_covered_equal(t.bk_model, t.neg, r, l);
                    if (def != eq && disagree++ == 0)
                        example = to_string(r) + " / " + to_string(l) + " (per-negative " + (def ? "yes" : "no") +
                                  ", coverage equality " + (eq ? "yes" : "no") + ")";
                }
    }
    if (disagree) o.fail(std::to_string(disagree) + "/" + std::to_string(pairs) + " pairs disagree, e.g. " + example);
    else o.detail << pairs << " pairs agree";
    return o;
}

// 6
Outcome check_detections() {
    Outcome o;
    struct Case {
        const char* task;
        const char* rules;
        int status;
        std::vector<std::string> expected;
    };
    const std::vector<Case> cases = {
        {"intro", "odd_int.pl", 3, {"reducible literal int(A) in f(A) :- int(A), odd(A)."}},
        {"intro", "gt_transitive.pl", 3, {"reducible literal gt(A,C) in h :- gt(A,B), gt(A,C), gt(B,C)."}},
        {"intro", "lt10.pl", 3, {"indiscriminate literal lt(A,10) in f(A) :- lt(A,10)."}},
        {"eight-puzzle-mini", "role_index.pl", 3, {"indiscriminate literal index(C)", "indiscriminate literal role(B)"}},
        {"intro", "optimal.pl", 0, {"no pointless rules"}},
        {"intro", "member.pl", 0, {"no pointless rules"}},
    };
    for (const auto& c : cases) {
        const std::string dir = std::string(ILP_FIXTURE_DIR) + "/" + c.task;
        const auto [status, out] = run_cli("check " + dir + " " + dir + "/rules/" + c.rules);
        if (status != c.status) o.fail(std::string(c.rules) + " exited " + std::to_string(status) + "; ");
        for (const auto& line : c.expected)
            if (!has(out, line)) o.fail(std::string(c.rules) + " missing `" + line + "`; ");
        const auto lines = std::count(out.begin(), out.end(), '\n');
        if (lines != static_cast<long>(c.expected.size()))
            o.fail(std::string(c.rules) + " printed " + std::to_string(lines) + " lines; ");
    }
    if (o.pass) o.detail << cases.size() << " rule files";
    return o;
}

std::map<std::string, std::map<PointlessMode, LearnResult>>& ablation() {
    static std::map<std::string, std::map<PointlessMode, LearnResult>> runs;
    if (runs.empty())
        for (const char* name : kFixtures)
            for (PointlessMode m : {PointlessMode::Both, PointlessMode::ReducibleOnly, PointlessMode::IndiscriminateOnly,
                                    PointlessMode::Off})
                runs[name][m] = learn(fixture(name), config(m));
    return runs;
}

// 7
Outcome ablation_direction() {
    Outcome o;
    for (auto& [name, runs] : ablation()) {
        auto gen = [&](PointlessMode m) { return runs[m].stats.candidates_generated; };
        const auto both = gen(PointlessMode::Both), red = gen(PointlessMode::ReducibleOnly),
                   ind = gen(PointlessMode::IndiscriminateOnly), off = gen(PointlessMode::Off);
        if (!(both <= red && both <= ind && red <= off && ind <= off)) o.fail(name + ": ordering broken; ");
        for (auto& [m, r] : runs)
            if (r.best_score != runs[PointlessMode::Off].best_score || !r.best) o.fail(name + ": scores differ; ");
        o.detail << name << " " << both << "/" << red << "/" << ind << "/" << off << "; ";
    }
    auto& tg = ablation()["transitive-gt"];
    const double ratio = static_cast<double>(tg[PointlessMode::Off].stats.candidates_generated) /
                         static_cast<double>(tg[PointlessMode::Both].stats.candidates_generated);
    if (ratio < 2.0) o.fail("transitive-gt reduction only " + std::to_string(ratio) + "x; ");
    o.detail << "transitive-gt reduction " << ratio << "x";
    return o;
}

// 8
Outcome overhead_metric() {
    Outcome o;
    double worst = 0;
    for (auto& [name, runs] : ablation())
        for (auto& [m, r] : runs) {
            const Stats& s = r.stats;
            const double f = s.detection_overhead();
            if (s.time_total_s > 0 && f != s.time_detection_s / s.time_total_s) o.fail(name + ": metric mismatch; ");
            const auto j = bench::to_json(bench::make_record(fixture(name), to_string(m), 0, r));
            if (j["detection_overhead"].get<double>() != f) o.fail(name + ": record mismatch; ");
            if (m != PointlessMode::Off) worst = std::max(worst, f);
            if (f >= 0.5) o.fail(name + " " + to_string(m) + ": overhead " + std::to_string(f) + "; ");
        }
    o.detail << "max overhead " << worst;
    return o;
}

// 9
Outcome engine_correctness() {
    Outcome o;
    ref::Rng rng(9);
    std::size_t bad_models = 0, bad_strata = 0, bad_round = 0;
    for (int i = 0; i < 100; ++i) {
        const auto rules = ref::random_program(rng);
        const auto atoms = least_model(Program{rules}).atoms();
        if (ref::Model(atoms.begin(), atoms.end()) != ref::naive_model(rules)) ++bad_models;
    }
    for (int i = 0; i < 20; ++i) {
        const Bias b = ref::random_bias(rng);
        ConstraintStore store;
        Generator g(b, store);
        for (std::size_t size = 2; size <= std::min<std::size_t>(5, default_max_size(b)); ++size) {
            std::vector<Hypothesis> got;
            while (auto h = g.next(size)) got.push_back(*h);
            const std::set<Hypothesis> got_set(got.begin(), got.end());
            if (got_set.size() != got.size() || got_set != oracle::enumerate_all(b, size)) ++bad_strata;
        }
    }
    for (int i = 0; i < 100; ++i) {
        const Hypothesis h = ref::random_hypothesis(rng);
        if (parse_hypothesis(render_hypothesis(h)) != canonicalize(h)) ++bad_round;
    }
    if (bad_models || bad_strata || bad_round)
        o.fail(std::to_string(bad_models) + " model, " + std::to_string(bad_strata) + " stratum, " +
               std::to_string(bad_round) + " round-trip discrepancies");
    else o.detail << "100 programs, 20 biases, 100 round-trips";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"intro optimality", intro_optimality},
        {"learner equals oracle on micro-tasks", learner_matches_oracle},
        {"pruning audit", audit_soundness},
        {"closure under specialisation", closure_under_specialisation},
        {"per-negative and coverage-equality tests agree", coverage_equality_agrees},
        {"check detections", check_detections},
        {"ablation direction", ablation_direction},
        {"detection overhead", overhead_metric},
        {"engine correctness", engine_correctness},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << o.detail.str()
                  << std::endl;
    }
    return failures ? 1 : 0;
}
