#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "ilp/constraints.hpp"
#include "ilp/logic.hpp"
#include "ilp/task_io.hpp"

namespace ilp {

/// f(A, B, ...) with distinct variables.
inline Literal head_literal(const Bias& b) {
    std::vector<Term> args;
    for (std::size_t i = 0; i < b.head.arity; ++i) args.push_back(Term::variable(canonical_variable(i)));
    return Literal(b.head.name, std::move(args));
}

/// Every body literal the bias allows: each argument is one of the first
/// max_vars variables or an allowed constant for that position. Sorted.
inline std::vector<Literal> literal_catalog(const Bias& b) {
    std::vector<PredicateDecl> preds = b.body_preds;
    if (b.recursion && std::find(preds.begin(), preds.end(), b.head) == preds.end()) preds.push_back(b.head);
    std::vector<Literal> out;
    for (const PredicateDecl& p : preds) {
        std::vector<std::vector<Term>> options(p.arity);
        for (std::size_t i = 0; i < p.arity; ++i) {
            for (std::size_t v = 0; v < b.max_vars; ++v) options[i].push_back(Term::variable(canonical_variable(v)));
            for (Symbol c : b.allowed_constants(p.name, i)) options[i].push_back(Term::constant(c));
        }
        std::vector<std::size_t> pick(p.arity, 0);
        for (;;) {
            std::vector<Term> args;
            for (std::size_t i = 0; i < p.arity; ++i) args.push_back(options[i][pick[i]]);
            out.emplace_back(p.name, std::move(args));
            std::size_t i = 0;
            while (i < p.arity && ++pick[i] == options[i].size()) pick[i++] = 0;
            if (i == p.arity) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace detail {

inline std::size_t variable_index(Symbol v, std::size_t max_vars) {
    for (std::size_t i = 0; i < max_vars; ++i)
        if (canonical_variable(i) == v) return i;
    return max_vars;
}

/// Safe, connected, and body-only variables numbered contiguously after the head's.
inline bool legal_body(const Literal& head, std::span<const Literal> body, const Bias& b) {
    if (body.empty() || body.size() > b.max_body) return false;
    std::vector<bool> used(b.max_vars, false);
    for (const Literal& l : body)
        for (const Term& t : l.args())
            if (t.is_variable()) used[variable_index(t.name(), b.max_vars)] = true;
    for (std::size_t i = 0; i < head.arity(); ++i)
        if (!used[i]) return false;
    bool gap = false;
    for (std::size_t i = head.arity(); i < b.max_vars; ++i) {
        if (!used[i]) gap = true;
        else if (gap) return false;
    }
    return connected(head, body);
}

/// Resumable enumeration of index subsets of size k over [0, n) in
/// lexicographic order, with pruning of partial subsets.
class SubsetWalk {
public:
    SubsetWalk(std::size_t n, std::size_t k) : n_(n), k_(k) {}

    /// Next complete subset, or nullptr when exhausted. `prune(partial)`
    /// is consulted for proper prefixes; returning true skips the subtree.
    template <class Prune, class Tick>
    const std::vector<std::uint32_t>* next(Prune&& prune, Tick&& tick) {
        if (done_ || k_ == 0 || k_ > n_) return nullptr;
        for (;;) {
            if (!tick()) return nullptr;
            if (chosen_.size() == k_) pop();
            if (next_ + (k_ - chosen_.size()) > n_) {
                if (chosen_.empty()) {
                    done_ = true;
                    return nullptr;
                }
                pop();
                continue;
            }
            chosen_.push_back(next_);
            ++explored_;
            next_ = chosen_.back() + 1;
            if (chosen_.size() == k_) return &chosen_;
            if (prune(chosen_)) pop();
        }
    }

    std::size_t explored() const { return explored_; }
    bool done() const { return done_; }

private:
    void pop() {
        next_ = chosen_.back() + 1;
        chosen_.pop_back();
    }

    std::size_t n_, k_;
    std::vector<std::uint32_t> chosen_;
    std::uint32_t next_ = 0;
    std::size_t explored_ = 0;
    bool done_ = false;
};

}  // namespace detail

/// All canonical rules with `body_size` body literals allowed by the bias, sorted.
inline std::vector<Rule> canonical_rules(const Bias& b, std::size_t body_size) {
    const auto catalog = literal_catalog(b);
    const Literal head = head_literal(b);
    detail::SubsetWalk walk(catalog.size(), body_size);
    std::set<Rule> out;
    std::vector<Literal> body;
    while (auto* idx = walk.next([](const auto&) { return false; }, [] { return true; })) {
        body.clear();
        for (auto i : *idx) body.push_back(catalog[i]);
        if (detail::legal_body(head, body, b)) out.insert(canonicalize(Rule(head, body)));
    }
    return {out.begin(), out.end()};
}

struct GeneratorOptions {
    bool prune_subtrees = true;  // fail fast on specialisation/pointless matches during rule assembly
    bool audit = false;          // surface pointless-blocked hypotheses instead of skipping them silently
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct BlockedHypothesis {
    Hypothesis hypothesis;
    std::size_t constraint;  // index of the pointless constraint in the store
};

/// Streams canonical hypotheses of a given total size that satisfy the bias
/// and every constraint in the store. Single-rule hypotheses come first, then
/// m-rule hypotheses for m = 2..max_rules.
class Generator {
public:
    Generator(const Bias& bias, const ConstraintStore& store, GeneratorOptions opts = {})
        : bias_(bias), store_(store), opts_(opts), catalog_(literal_catalog(bias)), head_(head_literal(bias)) {
        for (const auto& l : catalog_) max_arity_ = std::max(max_arity_, l.arity());
    }

    std::optional<Hypothesis> next(std::size_t size) {
        Stratum& s = stratum(size);
        if (s.phase == Phase::Single) {
            if (auto h = next_single(s)) return h;
            if (timed_out_) return std::nullopt;
            s.phase = Phase::Multi;
        }
        if (s.phase == Phase::Multi) {
            if (auto h = next_multi(s)) return h;
            if (timed_out_) return std::nullopt;
            s.phase = Phase::Done;
        }
        return std::nullopt;
    }

    bool timed_out() const { return timed_out_; }
    std::size_t explored_nodes() const { return explored_; }

    std::vector<BlockedHypothesis> take_blocked() { return std::exchange(blocked_, {}); }

private:
    enum class Phase { Single, Multi, Done };

    struct Stratum {
        std::size_t size = 0;
        Phase phase = Phase::Single;
        std::unique_ptr<detail::SubsetWalk> walk;
        std::unordered_set<Rule> seen;
        // multi-rule cursor
        std::vector<std::vector<std::size_t>> partitions;
        std::size_t part = 0;
        std::vector<std::size_t> idx;
        bool fresh = true;
    };

    struct RuleState {
        std::size_t seen = 0;
        bool fatal = false;
        bool recursive = false;
        std::optional<std::size_t> pointless;
        std::vector<std::uint32_t> spec;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> gen;
    };

    struct Catalog {
        std::vector<Rule> rules;
        std::vector<RuleState> state;
    };

    bool tick() {
        ++explored_;
        if (opts_.deadline && (explored_ & 255) == 0 && std::chrono::steady_clock::now() > *opts_.deadline) {
            timed_out_ = true;
            return false;
        }
        return !timed_out_;
    }

    Stratum& stratum(std::size_t size) {
        auto it = strata_.find(size);
        if (it != strata_.end()) return it->second;
        Stratum& s = strata_[size];
        s.size = size;
        if (size >= 2 && size - 1 <= bias_.max_body) s.walk = std::make_unique<detail::SubsetWalk>(catalog_.size(), size - 1);
        for (std::size_t m = 2; m <= bias_.max_rules; ++m) partitions(size, m, 2, {}, s.partitions);
        return s;
    }

    void partitions(std::size_t remaining, std::size_t parts, std::size_t min_part, std::vector<std::size_t> prefix,
                    std::vector<std::vector<std::size_t>>& out) const {
        if (parts == 0) {
            if (remaining == 0) out.push_back(prefix);
            return;
        }
        for (std::size_t p = min_part; p <= bias_.max_body + 1 && p * parts <= remaining; ++p) {
            prefix.push_back(p - 1);  // stored as body size
            partitions(remaining - p, parts - 1, p, prefix, out);
            prefix.pop_back();
        }
    }

    // -- single-rule stratum ------------------------------------------------

    bool prune_partial(const std::vector<std::uint32_t>& chosen, std::size_t body_size) {
        std::vector<Literal> body;
        for (auto i : chosen) body.push_back(catalog_[i]);
        // Head variables still missing must fit in the remaining slots.
        std::size_t missing = 0;
        for (const Term& t : head_.args())
            if (std::none_of(body.begin(), body.end(), [&](const Literal& l) { return l.mentions(t.name()); })) ++missing;
        if (missing > (body_size - chosen.size()) * max_arity_) return true;
        if (!opts_.prune_subtrees) return false;

        const Rule partial(head_, body);
        for (std::size_t i : store_.of_kind(ConstraintKind::Specialisation))
            for (const Rule& r0 : store_[i].hypothesis.rules())
                if (renamed_subrule(r0, partial)) return true;
        // A match whose reduced rule is already legal stays legal in every
        // extension, so the whole subtree is blocked. Recursion could make
        // the rule non-basic later; audit needs the leaves.
        if (!bias_.recursion && !opts_.audit)
            for (std::size_t i : store_.of_kind(ConstraintKind::PointlessSuperRule))
                if (pointless_match(store_[i].rule, store_[i].literal, partial)) return true;
        return false;
    }

    std::optional<Hypothesis> next_single(Stratum& s) {
        if (!s.walk) return std::nullopt;
        const std::size_t body_size = s.size - 1;
        std::vector<Literal> body;
        for (;;) {
            const auto* idx = s.walk->next([&](const auto& chosen) { return prune_partial(chosen, body_size); },
                                           [&] { return tick(); });
            if (!idx) return std::nullopt;
            body.clear();
            for (auto i : *idx) body.push_back(catalog_[i]);
            if (!detail::legal_body(head_, body, bias_)) continue;
            Rule r = canonicalize(Rule(head_, body));
            if (!s.seen.insert(r).second) continue;
            Hypothesis h({std::move(r)});
            if (admit(h)) return h;
        }
    }

    /// Full constraint check for an assembled hypothesis; records audit blocks.
    bool admit(const Hypothesis& h) {
        if (opts_.audit)
            for (std::size_t i : store_.of_kind(ConstraintKind::PointlessSuperRule))
                if (violates(h, store_[i])) {
                    blocked_.push_back({h, i});
                    return false;
                }
        return !store_.first_violated(h).has_value();
    }

    // -- multi-rule strata -------------------------------------------------

    Catalog& catalog(std::size_t body_size) {
        auto it = catalogs_.find(body_size);
        if (it != catalogs_.end()) return it->second;
        Catalog& c = catalogs_[body_size];
        c.rules = canonical_rules(bias_, body_size);
        c.state.resize(c.rules.size());
        for (std::size_t i = 0; i < c.rules.size(); ++i) c.state[i].recursive = is_recursive(c.rules[i]);
        return c;
    }

    void refresh(RuleState& st, const Rule& r) {
        for (; st.seen < store_.size(); ++st.seen) {
            const Constraint& c = store_[st.seen];
            const auto id = static_cast<std::uint32_t>(st.seen);
            switch (c.kind) {
                case ConstraintKind::Specialisation:
                    for (const Rule& r0 : c.hypothesis.rules())
                        if (renamed_subrule(r0, r)) {
                            st.spec.push_back(id);
                            break;
                        }
                    break;
                case ConstraintKind::Generalisation: {
                    std::uint32_t mask = 0;
                    const auto& rs = c.hypothesis.rules();
                    for (std::size_t j = 0; j < rs.size() && j < 32; ++j)
                        if (renamed_subrule(r, rs[j])) mask |= 1u << j;
                    if (mask == 0) break;
                    if (mask == (rs.size() >= 32 ? ~0u : (1u << rs.size()) - 1)) st.fatal = true;
                    else st.gen.emplace_back(id, mask);
                    break;
                }
                case ConstraintKind::PointlessSuperRule:
                    if (!st.pointless && pointless_match(c.rule, c.literal, r)) {
                        st.pointless = st.seen;
                        if (!bias_.recursion && !opts_.audit) st.fatal = true;
                    }
                    break;
                default: break;
            }
        }
    }

    std::size_t next_live(std::size_t body_size, std::size_t from) {
        Catalog& c = catalog(body_size);
        for (std::size_t i = from; i < c.rules.size(); ++i) {
            refresh(c.state[i], c.rules[i]);
            if (!c.state[i].fatal) return i;
        }
        return c.rules.size();
    }

    bool advance(Stratum& s) {
        const auto& parts = s.partitions[s.part];
        const std::size_t m = parts.size();
        auto lower = [&](std::size_t p) { return p > 0 && parts[p] == parts[p - 1] ? s.idx[p - 1] + 1 : 0; };
        std::size_t pos;
        if (s.fresh) {
            s.fresh = false;
            s.idx.assign(m, 0);
            pos = 0;
            s.idx[0] = next_live(parts[0], 0);
        } else {
            pos = m - 1;
            s.idx[pos] = next_live(parts[pos], s.idx[pos] + 1);
        }
        for (;;) {
            if (!tick()) return false;
            if (s.idx[pos] >= catalog(parts[pos]).rules.size()) {
                if (pos == 0) return false;
                --pos;
                s.idx[pos] = next_live(parts[pos], s.idx[pos] + 1);
                continue;
            }
            if (pos == m - 1) return true;
            ++pos;
            s.idx[pos] = next_live(parts[pos], lower(pos));
        }
    }

    std::optional<Hypothesis> next_multi(Stratum& s) {
        while (s.part < s.partitions.size()) {
            if (!advance(s)) {
                if (timed_out_) return std::nullopt;
                ++s.part;
                s.fresh = true;
                continue;
            }
            const auto& parts = s.partitions[s.part];
            std::vector<Rule> rules;
            std::vector<const RuleState*> states;
            bool fatal = false;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                Catalog& c = catalog(parts[p]);
                refresh(c.state[s.idx[p]], c.rules[s.idx[p]]);
                fatal = fatal || c.state[s.idx[p]].fatal;
                rules.push_back(c.rules[s.idx[p]]);
                states.push_back(&c.state[s.idx[p]]);
            }
            if (fatal) continue;
            Hypothesis h(std::move(rules));
            if (admit_multi(h, states)) return h;
        }
        return std::nullopt;
    }

    bool admit_multi(const Hypothesis& h, const std::vector<const RuleState*>& states) {
        const bool recursive = std::any_of(states.begin(), states.end(), [](const RuleState* s) { return s->recursive; });
        if (!recursive)
            for (const RuleState* s : states)
                if (s->pointless) {
                    if (opts_.audit) blocked_.push_back({h, *s->pointless});
                    return false;
                }
        // Specialisation: every rule specialises some rule of the same constraint.
        std::vector<std::uint32_t> common = states[0]->spec;
        for (std::size_t i = 1; i < states.size() && !common.empty(); ++i) {
            std::vector<std::uint32_t> next;
            std::set_intersection(common.begin(), common.end(), states[i]->spec.begin(), states[i]->spec.end(),
                                  std::back_inserter(next));
            common = std::move(next);
        }
        if (!common.empty()) return false;
        // Generalisation: together the rules generalise every rule of the constraint.
        std::map<std::uint32_t, std::uint32_t> cover;
        for (const RuleState* s : states)
            for (auto [id, mask] : s->gen) {
                const std::uint32_t acc = cover[id] |= mask;
                const auto n = store_[id].hypothesis.rules().size();
                if (acc == (n >= 32 ? ~0u : (1u << n) - 1)) return false;
            }
        return !store_.banished(h);
    }

    const Bias& bias_;
    const ConstraintStore& store_;
    GeneratorOptions opts_;
    std::vector<Literal> catalog_;
    Literal head_;
    std::size_t max_arity_ = 0;
    std::map<std::size_t, Stratum> strata_;
    std::map<std::size_t, Catalog> catalogs_;
    std::vector<BlockedHypothesis> blocked_;
    std::size_t explored_ = 0;
    bool timed_out_ = false;
};

}  // namespace ilp
