#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "ilp/constraints.hpp"
#include "ilp/datalog.hpp"
#include "ilp/generator.hpp"
#include "ilp/pointless.hpp"
#include "ilp/task_io.hpp"

namespace ilp {

/// (misclassified examples, literal count), ordered lexicographically.
struct CostScore {
    std::size_t errors = 0;
    std::size_t size = 0;

    friend auto operator<=>(const CostScore&, const CostScore&) = default;
};

inline std::string to_string(const CostScore& s) {
    return "(" + std::to_string(s.errors) + ", " + std::to_string(s.size) + ")";
}

inline CostScore score(const Hypothesis& h, const Coverage& c) { return {c.fp + c.fn, h.size()}; }

inline CostScore score(const Hypothesis& h, const Task& t) {
    return score(h, coverage(t.bk_model, h, t.pos, t.neg));
}

enum class Termination { Exhausted, Timeout, PerfectAtSize };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::Exhausted: return "exhausted";
        case Termination::Timeout: return "timeout";
        default: return "perfect-at-size";
    }
}

struct LearnConfig {
    std::size_t max_size = 0;  // 0: the largest size the bias allows
    double timeout_s = 60;
    PointlessMode pointless = PointlessMode::Both;
    bool exhaustive_evidence = false;
    bool audit = false;
    bool noisy = false;
    bool prune_subtrees = true;
};

struct Stats {
    std::size_t candidates_generated = 0;
    std::size_t candidates_tested = 0;
    std::array<std::size_t, kConstraintKinds> constraints{};
    std::array<std::size_t, 2> evidence{};
    double time_total_s = 0;
    double time_detection_s = 0;
    double time_testing_s = 0;
    double time_generation_s = 0;
    std::size_t detection_calls = 0;
    std::size_t explored_nodes = 0;

    std::size_t constraints_of(ConstraintKind k) const { return constraints[static_cast<std::size_t>(k)]; }
    std::size_t evidence_of(PointlessKind k) const { return evidence[static_cast<std::size_t>(k)]; }

    double detection_overhead() const { return time_total_s > 0 ? time_detection_s / time_total_s : 0.0; }
};

struct AuditRecord {
    Hypothesis blocked;
    CostScore blocked_score;
    bool has_reduction = false;
    Hypothesis reduced;
    CostScore reduced_score;
    std::size_t constraint = 0;
};

struct AuditReport {
    std::vector<AuditRecord> records;
    std::vector<std::string> violations;
};

struct LearnResult {
    std::optional<Hypothesis> best;
    CostScore best_score;
    Termination termination = Termination::Exhausted;
    Stats stats;
    AuditReport audit;
};

inline std::size_t default_max_size(const Bias& b) { return b.max_rules * (b.max_body + 1); }

/// Failure-driven constraints for a tested hypothesis. Noisy mode keeps only Banish.
inline std::vector<Constraint> build_cons(const Hypothesis& h, const Coverage& cov, bool noisy = false) {
    std::vector<Constraint> out{Constraint::banish(h)};
    if (noisy) return out;
    if (cov.fn > 0) out.push_back(Constraint::specialisation(h));
    if (cov.fp > 0) out.push_back(Constraint::generalisation(h));
    return out;
}

namespace detail {

/// h with the rule that triggers the pointless constraint replaced by its reduction.
inline std::optional<Hypothesis> reduced_variant(const Hypothesis& h, const Constraint& c) {
    auto w = pointless_witness(h, c.rule, c.literal);
    if (!w) return std::nullopt;
    std::vector<Rule> rules = h.rules();
    rules[w->first] = canonicalize(rules[w->first].without(w->second));
    return Hypothesis(std::move(rules));
}

}  // namespace detail

/// Generate, test, constrain: sizes ascend from 2; the best hypothesis is
/// replaced only on strict improvement. Noiseless runs stop at the first
/// zero-error hypothesis.
inline LearnResult learn(const Task& task, const LearnConfig& cfg = {}) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto deadline = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(cfg.timeout_s));
    auto seconds_since = [](clock::time_point t) { return std::chrono::duration<double>(clock::now() - t).count(); };

    LearnResult res;
    ConstraintStore store;
    GeneratorOptions gopts;
    gopts.audit = cfg.audit;
    gopts.prune_subtrees = cfg.prune_subtrees;
    gopts.deadline = deadline;
    Generator gen(task.bias, store, gopts);
    const DetectionContext ctx = DetectionContext::of(task);
    DetectionTimer timer;

    Hypothesis best;
    CostScore best_score{task.pos.size(), 0};  // the empty hypothesis
    bool timed_out = false;
    bool perfect = false;

    auto test = [&](const Hypothesis& h, Coverage& cov) {
        const auto t0 = clock::now();
        cov = coverage(task.bk_model, h, task.pos, task.neg);
        res.stats.time_testing_s += seconds_since(t0);
        return score(h, cov);
    };

    auto audit_blocked = [&] {
        for (auto& b : gen.take_blocked()) {
            AuditRecord rec;
            rec.blocked = b.hypothesis;
            rec.constraint = b.constraint;
            rec.blocked_score = score(b.hypothesis, coverage(task.bk_model, b.hypothesis, task.pos, task.neg));
            if (auto red = detail::reduced_variant(b.hypothesis, store[b.constraint])) {
                rec.has_reduction = true;
                rec.reduced = *red;
                rec.reduced_score = score(*red, coverage(task.bk_model, *red, task.pos, task.neg));
            } else {
                res.audit.violations.push_back("no reduced variant for blocked hypothesis " + to_string(b.hypothesis));
            }
            res.audit.records.push_back(std::move(rec));
        }
    };

    const std::size_t max_size = cfg.max_size ? cfg.max_size : default_max_size(task.bias);
    for (std::size_t size = 2; size <= max_size && !timed_out && !perfect; ++size) {
        for (;;) {
            if (clock::now() > deadline) {
                timed_out = true;
                break;
            }
            const auto g0 = clock::now();
            std::optional<Hypothesis> h = gen.next(size);
            res.stats.time_generation_s += seconds_since(g0);
            if (cfg.audit) audit_blocked();
            if (!h) {
                timed_out = gen.timed_out();
                break;
            }
            ++res.stats.candidates_generated;

            Coverage cov;
            const CostScore s = test(*h, cov);
            ++res.stats.candidates_tested;
            if (s < best_score) {
                best = *h;
                best_score = s;
            }
            if (!cfg.noisy && s.errors == 0) {
                perfect = true;
                break;
            }
            for (Constraint& c : build_cons(*h, cov, cfg.noisy)) store.add(std::move(c));
            if (cfg.pointless != PointlessMode::Off) {
                for (const PointlessEvidence& ev : find_pointless(*h, ctx, cfg.pointless, cfg.exhaustive_evidence, &timer)) {
                    ++res.stats.evidence[static_cast<std::size_t>(ev.kind)];
                    store.add(Constraint::pointless(ev.rule, ev.literal, *h));
                }
            }
        }
    }

    res.termination = perfect ? Termination::PerfectAtSize : timed_out ? Termination::Timeout : Termination::Exhausted;
    if (!(timed_out && res.stats.candidates_tested == 0)) {
        res.best = best;
        res.best_score = best_score;
    }
    for (std::size_t k = 0; k < kConstraintKinds; ++k) res.stats.constraints[k] = store.count(static_cast<ConstraintKind>(k));
    res.stats.time_detection_s = timer.seconds;
    res.stats.detection_calls = timer.calls;
    res.stats.explored_nodes = gen.explored_nodes();

    if (cfg.audit) {
        const bool optimum_known = perfect || (cfg.noisy && res.termination == Termination::Exhausted);
        for (const AuditRecord& r : res.audit.records) {
            if (r.has_reduction && !(r.reduced_score < r.blocked_score))
                res.audit.violations.push_back("blocked " + to_string(r.blocked) + " " + to_string(r.blocked_score) +
                                               " is not worse than its reduction " + to_string(r.reduced) + " " +
                                               to_string(r.reduced_score));
            if (optimum_known && r.blocked_score < best_score)
                res.audit.violations.push_back("blocked " + to_string(r.blocked) + " " + to_string(r.blocked_score) +
                                               " beats the returned optimum " + to_string(best_score));
        }
    }
    res.stats.time_total_s = seconds_since(start);
    return res;
}

}  // namespace ilp
