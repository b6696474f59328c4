#pragma once

#include <array>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ilp/logic.hpp"

namespace ilp {

enum class ConstraintKind { Specialisation, Generalisation, PointlessSuperRule, Banish };

inline constexpr std::size_t kConstraintKinds = 4;

inline std::string to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Specialisation: return "specialisation";
        case ConstraintKind::Generalisation: return "generalisation";
        case ConstraintKind::PointlessSuperRule: return "pointless";
        default: return "banish";
    }
}

/// A pruning obligation. Specialisation, Generalisation and Banish carry a
/// hypothesis; PointlessSuperRule carries the pointless rule and its redundant literal.
struct Constraint {
    ConstraintKind kind = ConstraintKind::Banish;
    Hypothesis hypothesis;
    Rule rule;
    Literal literal;
    Hypothesis provenance;

    static Constraint specialisation(const Hypothesis& h) {
        return {ConstraintKind::Specialisation, canonicalize(h), {}, {}, h};
    }
    static Constraint generalisation(const Hypothesis& h) {
        return {ConstraintKind::Generalisation, canonicalize(h), {}, {}, h};
    }
    static Constraint banish(const Hypothesis& h) { return {ConstraintKind::Banish, canonicalize(h), {}, {}, h}; }
    static Constraint pointless(const Rule& p, const Literal& l, const Hypothesis& from = {}) {
        Canonical c = canonicalize_with_renaming(p);
        return {ConstraintKind::PointlessSuperRule, {}, c.rule, c.renaming.apply(l), from};
    }
};

/// Some embedding theta of p into r leaves r \ {l theta} with a nonempty,
/// safe and connected body, i.e. the reduced rule is itself a legal rule.
/// Returns the literal to drop, if any.
inline std::optional<Literal> pointless_match(const Rule& p, const Literal& l, const Rule& r) {
    std::optional<Literal> hit;
    for_each_embedding(p, r, [&](const Renaming& theta) {
        Literal lt = apply(theta, l);
        Rule reduced = r.without(lt);
        if (!reduced.body().empty() && is_safe(reduced) && connected(reduced)) {
            hit = std::move(lt);
            return true;
        }
        return false;
    });
    return hit;
}

/// The index of a rule in h that triggers the pointless constraint (p, l).
inline std::optional<std::pair<std::size_t, Literal>> pointless_witness(const Hypothesis& h, const Rule& p,
                                                                        const Literal& l) {
    for (std::size_t i = 0; i < h.rules().size(); ++i) {
        const Rule& r = h.rules()[i];
        if (!is_basic(r, h)) continue;
        if (auto lt = pointless_match(p, l, r)) return std::pair{i, *lt};
    }
    return std::nullopt;
}

inline bool specialises(const Hypothesis& h, const Hypothesis& h0) {
    return std::all_of(h.rules().begin(), h.rules().end(), [&](const Rule& r) {
        return std::any_of(h0.rules().begin(), h0.rules().end(), [&](const Rule& r0) { return renamed_subrule(r0, r); });
    });
}

inline bool generalises(const Hypothesis& h, const Hypothesis& h0) {
    return std::all_of(h0.rules().begin(), h0.rules().end(), [&](const Rule& r0) {
        return std::any_of(h.rules().begin(), h.rules().end(), [&](const Rule& r) { return renamed_subrule(r, r0); });
    });
}

/// `h` must be canonical.
inline bool violates(const Hypothesis& h, const Constraint& c) {
    switch (c.kind) {
        case ConstraintKind::Specialisation: return specialises(h, c.hypothesis);
        case ConstraintKind::Generalisation: return generalises(h, c.hypothesis);
        case ConstraintKind::PointlessSuperRule: return pointless_witness(h, c.rule, c.literal).has_value();
        default: return h == c.hypothesis;
    }
}

/// Deduplicating constraint collection. Constraints are append-only and
/// addressed by insertion index so consumers can catch up incrementally.
class ConstraintStore {
public:
    bool add(Constraint c) {
        if (c.kind == ConstraintKind::Banish) {
            if (!banished_.insert(c.hypothesis).second) return false;
        } else {
            Key k{c.kind, c.hypothesis, c.rule, c.literal};
            if (!keys_.insert(std::move(k)).second) return false;
        }
        by_kind_[static_cast<std::size_t>(c.kind)].push_back(all_.size());
        all_.push_back(std::move(c));
        return true;
    }

    std::size_t size() const { return all_.size(); }
    const std::vector<Constraint>& all() const { return all_; }
    const Constraint& operator[](std::size_t i) const { return all_[i]; }

    /// Insertion indices of the constraints of one kind, in order.
    const std::vector<std::size_t>& of_kind(ConstraintKind k) const { return by_kind_[static_cast<std::size_t>(k)]; }
    std::size_t count(ConstraintKind k) const { return of_kind(k).size(); }

    bool banished(const Hypothesis& h) const { return banished_.count(h) > 0; }

    /// First violated constraint (by insertion order), if any. `h` must be canonical.
    std::optional<std::size_t> first_violated(const Hypothesis& h) const {
        if (banished(h))
            for (std::size_t i : of_kind(ConstraintKind::Banish))
                if (all_[i].hypothesis == h) return i;
        for (std::size_t i = 0; i < all_.size(); ++i)
            if (all_[i].kind != ConstraintKind::Banish && violates(h, all_[i])) return i;
        return std::nullopt;
    }

private:
    struct Key {
        ConstraintKind kind;
        Hypothesis hypothesis;
        Rule rule;
        Literal literal;

        friend bool operator<(const Key& a, const Key& b) {
            if (a.kind != b.kind) return a.kind < b.kind;
            if (auto c = a.hypothesis <=> b.hypothesis; c != 0) return c < 0;
            if (auto c = a.rule <=> b.rule; c != 0) return c < 0;
            return (a.literal <=> b.literal) < 0;
        }
    };

    std::vector<Constraint> all_;
    std::array<std::vector<std::size_t>, kConstraintKinds> by_kind_;
    std::set<Key> keys_;
    std::unordered_set<Hypothesis> banished_;
};

}  // namespace ilp
