#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilp/datalog.hpp"
#include "ilp/logic.hpp"
#include "ilp/task_io.hpp"

namespace ilp {

enum class PointlessKind { Reducible, Indiscriminate };

enum class PointlessMode { Off, ReducibleOnly, IndiscriminateOnly, Both };

inline std::string to_string(PointlessKind k) { return k == PointlessKind::Reducible ? "reducible" : "indiscriminate"; }

inline std::string to_string(PointlessMode m) {
    switch (m) {
        case PointlessMode::Off: return "off";
        case PointlessMode::ReducibleOnly: return "reducible-only";
        case PointlessMode::IndiscriminateOnly: return "indiscriminate-only";
        default: return "both";
    }
}

struct PointlessEvidence {
    Rule rule;  // canonical
    Literal literal;
    PointlessKind kind = PointlessKind::Reducible;
    Rule reduced_rule;

    friend bool operator==(const PointlessEvidence&, const PointlessEvidence&) = default;
};

inline std::string render_evidence(const PointlessEvidence& ev) {
    return to_string(ev.kind) + " literal " + to_string(ev.literal) + " in " + render_rule(ev.rule);
}

/// What detection reads from a task. `target` scopes the indiscriminate test
/// to rules defining the predicate the negatives belong to.
struct DetectionContext {
    const FactStore* model = nullptr;
    std::span<const Literal> neg;
    std::span<const Symbol> domain;
    PredicateDecl target;

    static DetectionContext of(const Task& t) {
        return DetectionContext{&t.bk_model, t.neg, t.constant_domain, t.bias.head};
    }
};

/// B ⊨ (body(r) \ {l}) → l, with l's free variables ranging over `domain`.
inline bool is_reducible(const FactStore& model, const Rule& r, const Literal& l, std::span<const Symbol> domain) {
    const Rule rest = r.without(l);
    return implies(model, rest.body(), l, domain);
}

/// For every negative e and every substitution extending theta_e that
/// satisfies body(r) \ {l}, l also holds. Vacuously true for empty `neg`.
inline bool is_indiscriminate(const FactStore& model, std::span<const Literal> neg, const Rule& r, const Literal& l,
                              std::span<const Symbol> domain) {
    const Rule rest = r.without(l);
    for (const Literal& e : neg) {
        if (e.predicate() != r.head().predicate() || e.arity() != r.head().arity()) continue;
        auto theta = head_binding(r, e);
        if (!theta) continue;
        if (!implies(model, rest.body(), l, domain, *theta)) return false;
    }
    return true;
}

/// The coverage-equality form: r and r \ {l} cover the same negatives.
/// Implied by is_indiscriminate; the converse fails when l has variables
/// outside the head.
inline bool negatives_covered_equal(const FactStore& model, std::span<const Literal> neg, const Rule& r,
                                    const Literal& l) {
    const Rule rest = r.without(l);
    for (const Literal& e : neg) {
        if (e.predicate() != r.head().predicate() || e.arity() != r.head().arity()) continue;
        if (covers_rule(model, r, e) != covers_rule(model, rest, e)) return false;
    }
    return true;
}

struct DetectionTimer {
    double seconds = 0;
    std::size_t calls = 0;
};

namespace detail {

struct ScopedTimer {
    explicit ScopedTimer(DetectionTimer* t) : t_(t), start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        if (!t_) return;
        t_->seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        ++t_->calls;
    }
    DetectionTimer* t_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Pointless evidence in the basic rules of h, scanning canonical rules and
/// literals in order and testing reducible before indiscriminate. Returns the
/// first finding, or every finding when `exhaustive`.
inline std::vector<PointlessEvidence> find_pointless(const Hypothesis& h, const DetectionContext& ctx,
                                                     PointlessMode mode = PointlessMode::Both, bool exhaustive = false,
                                                     DetectionTimer* timer = nullptr) {
    detail::ScopedTimer scope(timer);
    std::vector<PointlessEvidence> out;
    if (mode == PointlessMode::Off) return out;
    const bool want_reducible = mode == PointlessMode::Both || mode == PointlessMode::ReducibleOnly;
    const bool want_indiscriminate = mode == PointlessMode::Both || mode == PointlessMode::IndiscriminateOnly;

    const Hypothesis ch = canonicalize(h);
    for (const Rule& r : ch.rules()) {
        if (!is_basic(r, ch)) continue;
        const bool on_target = r.head().predicate() == ctx.target.name && r.head().arity() == ctx.target.arity;
        for (const Literal& l : r.body()) {
            if (!captured(r, l)) continue;
            std::optional<PointlessKind> kind;
            if (want_reducible && is_reducible(*ctx.model, r, l, ctx.domain))
                kind = PointlessKind::Reducible;
            else if (want_indiscriminate && on_target && is_indiscriminate(*ctx.model, ctx.neg, r, l, ctx.domain))
                kind = PointlessKind::Indiscriminate;
            if (!kind) continue;
            out.push_back(PointlessEvidence{r, l, *kind, r.without(l)});
            if (!exhaustive) return out;
        }
    }
    return out;
}

inline std::optional<PointlessEvidence> find_first_pointless(const Hypothesis& h, const DetectionContext& ctx,
                                                             PointlessMode mode = PointlessMode::Both,
                                                             DetectionTimer* timer = nullptr) {
    auto all = find_pointless(h, ctx, mode, false, timer);
    if (all.empty()) return std::nullopt;
    return all.front();
}

}  // namespace ilp
