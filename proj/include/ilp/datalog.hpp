#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "ilp/errors.hpp"
#include "ilp/logic.hpp"

namespace ilp {

// ---------------------------------------------------------------------------
// Fact storage
// ---------------------------------------------------------------------------

/// Ground tuples of one predicate/arity. Rows live in a flat array; membership
/// uses an open-addressing table of row ids, lookups by value use one hash
/// index per argument position.
class Relation {
public:
    explicit Relation(std::size_t arity) : arity_(arity), index_(arity) {}

    std::size_t arity() const { return arity_; }
    std::size_t size() const { return rows_; }

    std::span<const Symbol> row(std::size_t i) const { return {data_.data() + i * arity_, arity_}; }

    bool contains(std::span<const Symbol> t) const {
        if (arity_ == 0) return rows_ > 0;
        if (slots_.empty()) return false;
        const std::size_t mask = slots_.size() - 1;
        for (std::size_t s = hash(t) & mask;; s = (s + 1) & mask) {
            const std::uint32_t id = slots_[s];
            if (id == 0) return false;
            if (equal(row(id - 1), t)) return true;
        }
    }

    bool insert(std::span<const Symbol> t) {
        if (t.size() != arity_) throw Error("arity mismatch inserting into relation");
        if (arity_ == 0) {
            if (rows_ > 0) return false;
            rows_ = 1;
            return true;
        }
        if ((rows_ + 1) * 2 > slots_.size()) grow();
        const std::size_t mask = slots_.size() - 1;
        std::size_t s = hash(t) & mask;
        for (;; s = (s + 1) & mask) {
            const std::uint32_t id = slots_[s];
            if (id == 0) break;
            if (equal(row(id - 1), t)) return false;
        }
        const auto id = static_cast<std::uint32_t>(rows_);
        data_.insert(data_.end(), t.begin(), t.end());
        ++rows_;
        slots_[s] = id + 1;
        for (std::size_t p = 0; p < arity_; ++p) index_[p][t[p]].push_back(id);
        return true;
    }

    /// Row ids whose argument at `position` equals `value` (nullptr when none).
    const std::vector<std::uint32_t>* lookup(std::size_t position, Symbol value) const {
        auto it = index_[position].find(value);
        return it == index_[position].end() ? nullptr : &it->second;
    }

private:
    static std::size_t hash(std::span<const Symbol> t) {
        std::size_t h = t.size();
        for (Symbol s : t) detail::hash_combine(h, std::hash<Symbol>{}(s));
        return h;
    }

    static bool equal(std::span<const Symbol> a, std::span<const Symbol> b) {
        return std::equal(a.begin(), a.end(), b.begin(), b.end());
    }

    void grow() {
        std::vector<std::uint32_t> next(std::max<std::size_t>(16, slots_.size() * 2), 0);
        const std::size_t mask = next.size() - 1;
        for (std::size_t i = 0; i < rows_; ++i) {
            std::size_t s = hash(row(i)) & mask;
            while (next[s] != 0) s = (s + 1) & mask;
            next[s] = static_cast<std::uint32_t>(i + 1);
        }
        slots_ = std::move(next);
    }

    std::size_t arity_;
    std::size_t rows_ = 0;
    std::vector<Symbol> data_;
    std::vector<std::uint32_t> slots_;
    std::vector<std::unordered_map<Symbol, std::vector<std::uint32_t>>> index_;
};

/// A set of ground atoms indexed by predicate and argument position.
class FactStore {
public:
    bool insert(Symbol pred, std::span<const Symbol> args) {
        return relations_.try_emplace(Key{pred, args.size()}, args.size()).first->second.insert(args);
    }

    bool insert(const Literal& atom) {
        std::vector<Symbol> args;
        args.reserve(atom.arity());
        for (const Term& t : atom.args()) {
            if (t.is_variable()) throw Error("cannot store non-ground atom " + to_string(atom));
            args.push_back(t.name());
        }
        return insert(atom.predicate(), args);
    }

    bool contains(Symbol pred, std::span<const Symbol> args) const {
        const Relation* r = relation(pred, args.size());
        return r && r->contains(args);
    }

    bool contains(const Literal& atom) const {
        std::array<Symbol, 16> buf;
        if (atom.arity() > buf.size()) {
            std::vector<Symbol> v;
            for (const Term& t : atom.args()) {
                if (t.is_variable()) return false;
                v.push_back(t.name());
            }
            return contains(atom.predicate(), v);
        }
        for (std::size_t i = 0; i < atom.arity(); ++i) {
            if (atom.args()[i].is_variable()) return false;
            buf[i] = atom.args()[i].name();
        }
        return contains(atom.predicate(), std::span<const Symbol>(buf.data(), atom.arity()));
    }

    const Relation* relation(Symbol pred, std::size_t arity) const {
        auto it = relations_.find(Key{pred, arity});
        return it == relations_.end() ? nullptr : &it->second;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [k, r] : relations_) n += r.size();
        return n;
    }

    bool empty() const { return size() == 0; }

    /// All atoms, sorted.
    std::vector<Literal> atoms() const {
        std::vector<Literal> out;
        for (const auto& [k, r] : relations_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                std::vector<Term> args;
                for (Symbol s : r.row(i)) args.push_back(Term::constant(s));
                out.emplace_back(k.pred, std::move(args));
            }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<Literal> atoms_of(Symbol pred) const {
        std::vector<Literal> all = atoms();
        std::erase_if(all, [pred](const Literal& l) { return l.predicate() != pred; });
        return all;
    }

    friend bool operator==(const FactStore& a, const FactStore& b) { return a.atoms() == b.atoms(); }

private:
    struct Key {
        Symbol pred;
        std::size_t arity;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept { return std::hash<Symbol>{}(k.pred) * 31 + k.arity; }
    };

    std::unordered_map<Key, Relation, KeyHash> relations_;
};

/// A definite program; facts are rules with an empty body and a ground head.
struct Program {
    std::vector<Rule> rules;
};

// ---------------------------------------------------------------------------
// Conjunctive query evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// Up to two stores read as one (e.g. a materialized model plus new facts).
struct Layer {
    const FactStore* first = nullptr;
    const FactStore* second = nullptr;
};

struct QueryArg {
    bool is_var = false;
    std::uint32_t slot = 0;
    Symbol constant;
};

struct QueryLiteral {
    Symbol pred;
    std::vector<QueryArg> args;
    std::uint8_t layer = 0;
};

/// A compiled conjunction. Variables map to binding slots; the solver picks
/// the most-bound remaining literal at each step and probes the smallest index bucket.
class Conjunction {
public:
    Conjunction() = default;

    /// `extra_vars` get slots too (e.g. head variables absent from the body).
    explicit Conjunction(std::span<const Literal> body, std::span<const Symbol> extra_vars = {}) {
        for (Symbol v : extra_vars) slot_of(v);
        for (const Literal& l : body) {
            QueryLiteral q;
            q.pred = l.predicate();
            for (const Term& t : l.args()) {
                if (t.is_variable())
                    q.args.push_back({true, slot_of(t.name()), Symbol()});
                else
                    q.args.push_back({false, 0, t.name()});
            }
            lits_.push_back(std::move(q));
        }
        if (lits_.size() > 63) throw Error("conjunction too long");
    }

    std::size_t slots() const { return vars_.size(); }
    const std::vector<Symbol>& variables() const { return vars_; }
    std::vector<QueryLiteral>& literals() { return lits_; }
    const std::vector<QueryLiteral>& literals() const { return lits_; }

    std::uint32_t slot_of(Symbol v) {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it != vars_.end()) return static_cast<std::uint32_t>(it - vars_.begin());
        vars_.push_back(v);
        return static_cast<std::uint32_t>(vars_.size() - 1);
    }

    std::optional<std::uint32_t> find_slot(Symbol v) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) return std::nullopt;
        return static_cast<std::uint32_t>(it - vars_.begin());
    }

    /// Enumerates extensions of `binding` (unbound slots hold Symbol{}) that
    /// satisfy every literal. `fn(binding)` returns true to stop early.
    template <class Fn>
    bool solve(std::span<const Layer> layers, std::vector<Symbol>& binding, Fn&& fn) const {
        return step(layers, binding, 0, fn);
    }

private:
    template <class Fn>
    bool step(std::span<const Layer> layers, std::vector<Symbol>& binding, std::uint64_t used, Fn& fn) const {
        if (used == (lits_.size() == 64 ? ~0ull : ((std::uint64_t{1} << lits_.size()) - 1))) return fn(binding);

        std::size_t pick = lits_.size();
        std::size_t best_bound = 0;
        for (std::size_t i = 0; i < lits_.size(); ++i) {
            if (used >> i & 1) continue;
            std::size_t bound = 0;
            for (const QueryArg& a : lits_[i].args)
                if (!a.is_var || binding[a.slot].valid()) ++bound;
            if (pick == lits_.size() || bound > best_bound) {
                pick = i;
                best_bound = bound;
                if (bound == lits_[i].args.size()) break;
            }
        }

        const QueryLiteral& q = lits_[pick];
        const Layer& layer = layers[q.layer];
        for (const FactStore* store : {layer.first, layer.second}) {
            if (!store) continue;
            const Relation* rel = store->relation(q.pred, q.args.size());
            if (!rel || rel->size() == 0) continue;
            if (match_relation(*rel, q, layers, binding, used | (std::uint64_t{1} << pick), fn)) return true;
        }
        return false;
    }

    template <class Fn>
    bool match_relation(const Relation& rel, const QueryLiteral& q, std::span<const Layer> layers,
                        std::vector<Symbol>& binding, std::uint64_t used, Fn& fn) const {
        const std::size_t n = q.args.size();
        // Fully bound: a membership probe.
        std::array<Symbol, 16> probe;
        bool all_bound = n <= probe.size();
        for (std::size_t i = 0; i < n && all_bound; ++i) {
            const QueryArg& a = q.args[i];
            probe[i] = a.is_var ? binding[a.slot] : a.constant;
            if (!probe[i].valid()) all_bound = false;
        }
        if (all_bound) {
            if (!rel.contains(std::span<const Symbol>(probe.data(), n))) return false;
            return step(layers, binding, used, fn);
        }

        const std::vector<std::uint32_t>* candidates = nullptr;
        for (std::size_t i = 0; i < n; ++i) {
            const QueryArg& a = q.args[i];
            Symbol v = a.is_var ? binding[a.slot] : a.constant;
            if (!v.valid()) continue;
            const auto* bucket = rel.lookup(i, v);
            if (!bucket) return false;
            if (!candidates || bucket->size() < candidates->size()) candidates = bucket;
        }

        std::array<std::uint32_t, 16> assigned;
        auto try_row = [&](std::size_t row_id) {
            auto row = rel.row(row_id);
            std::size_t n_assigned = 0;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                const QueryArg& a = q.args[i];
                if (!a.is_var) {
                    ok = row[i] == a.constant;
                } else if (binding[a.slot].valid()) {
                    ok = binding[a.slot] == row[i];
                } else {
                    binding[a.slot] = row[i];
                    assigned[n_assigned++] = a.slot;
                }
            }
            bool stop = ok && step(layers, binding, used, fn);
            for (std::size_t k = 0; k < n_assigned; ++k) binding[assigned[k]] = Symbol();
            return stop;
        };

        if (candidates) {
            for (std::uint32_t id : *candidates)
                if (try_row(id)) return true;
        } else {
            for (std::size_t id = 0; id < rel.size(); ++id)
                if (try_row(id)) return true;
        }
        return false;
    }

    std::vector<Symbol> vars_;
    std::vector<QueryLiteral> lits_;
};

struct CompiledRule {
    Conjunction body;
    std::vector<QueryArg> head;
    Symbol head_pred;
};

inline CompiledRule compile(const Rule& r) {
    CompiledRule c{Conjunction(r.body()), {}, r.head().predicate()};
    for (const Term& t : r.head().args()) {
        if (t.is_variable()) {
            auto slot = c.body.find_slot(t.name());
            if (!slot) throw UnsafeRuleError(to_string(r), std::string(t.name().str()));
            c.head.push_back({true, *slot, Symbol()});
        } else {
            c.head.push_back({false, 0, t.name()});
        }
    }
    return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Least model
// ---------------------------------------------------------------------------

/// Atoms derivable from `rules` on top of `base` that are not already in
/// `base` (semi-naive bottom-up). Every rule must be safe.
inline FactStore derive(const FactStore& base, std::span<const Rule> rules) {
    FactStore derived;
    std::vector<detail::CompiledRule> compiled;
    for (const Rule& r : rules) {
        if (auto v = unsafe_variable(r)) throw UnsafeRuleError(to_string(r), std::string(v->str()));
        if (r.body().empty()) {
            if (!base.contains(r.head())) derived.insert(r.head());
        } else {
            compiled.push_back(detail::compile(r));
        }
    }
    if (compiled.empty()) return derived;

    std::vector<Symbol> head_buf;
    auto fire = [&](const detail::CompiledRule& c, std::span<const detail::Layer> layers, FactStore& next) {
        std::vector<Symbol> binding(c.body.slots());
        c.body.solve(layers, binding, [&](const std::vector<Symbol>& b) {
            head_buf.clear();
            for (const auto& a : c.head) head_buf.push_back(a.is_var ? b[a.slot] : a.constant);
            if (!base.contains(c.head_pred, head_buf) && !derived.contains(c.head_pred, head_buf))
                next.insert(c.head_pred, head_buf);
            return false;
        });
    };
    auto merge = [&](const FactStore& from) {
        for (const Literal& a : from.atoms()) derived.insert(a);
    };

    FactStore delta;
    {
        const std::array<detail::Layer, 1> full{detail::Layer{&base, &derived}};
        for (auto& c : compiled) fire(c, full, delta);
        merge(delta);
    }
    while (!delta.empty()) {
        FactStore next;
        const std::array<detail::Layer, 2> layers{detail::Layer{&base, &derived}, detail::Layer{&delta, nullptr}};
        for (auto& c : compiled) {
            auto& lits = const_cast<std::vector<detail::QueryLiteral>&>(c.body.literals());
            for (std::size_t i = 0; i < lits.size(); ++i) {
                const std::size_t arity = lits[i].args.size();
                const Relation* d = delta.relation(lits[i].pred, arity);
                if (!d || d->size() == 0) continue;
                lits[i].layer = 1;
                fire(c, layers, next);
                lits[i].layer = 0;
            }
        }
        merge(next);
        delta = std::move(next);
    }
    return derived;
}

/// The least Herbrand model of `p`. Throws UnsafeRuleError naming the
/// offending head variable when a rule is unsafe.
inline FactStore least_model(const Program& p) {
    const FactStore empty;
    return derive(empty, p.rules);
}

// ---------------------------------------------------------------------------
// Queries against a materialized model
// ---------------------------------------------------------------------------

namespace detail {

inline bool seed_binding(const Conjunction& q, const Substitution& seed, std::vector<Symbol>& binding) {
    binding.assign(q.slots(), Symbol());
    for (const auto& [var, value] : seed.entries()) {
        auto slot = q.find_slot(var);
        if (!slot) continue;
        if (!value.is_constant()) return false;
        binding[*slot] = value.name();
    }
    return true;
}

inline std::vector<Symbol> seed_variables(const Substitution& seed) {
    std::vector<Symbol> v;
    for (const auto& e : seed.entries()) v.push_back(e.first);
    return v;
}

}  // namespace detail

/// All substitutions extending `seed` that ground the body into `m`, sorted.
/// An empty body yields exactly {seed}.
inline std::vector<Substitution> satisfying_substitutions(const FactStore& m, std::span<const Literal> body,
                                                          const Substitution& seed = {}) {
    const auto extra = detail::seed_variables(seed);
    detail::Conjunction q(body, extra);
    std::vector<Symbol> binding;
    std::vector<Substitution> out;
    if (!detail::seed_binding(q, seed, binding)) return out;
    const std::array<detail::Layer, 1> layers{detail::Layer{&m, nullptr}};
    q.solve(layers, binding, [&](const std::vector<Symbol>& b) {
        Substitution s = seed;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (b[i].valid()) s.bind(q.variables()[i], Term::constant(b[i]));
        out.push_back(std::move(s));
        return false;
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool satisfiable(const FactStore& m, std::span<const Literal> body, const Substitution& seed = {}) {
    const auto extra = detail::seed_variables(seed);
    detail::Conjunction q(body, extra);
    std::vector<Symbol> binding;
    if (!detail::seed_binding(q, seed, binding)) return false;
    const std::array<detail::Layer, 1> layers{detail::Layer{&m, nullptr}};
    return q.solve(layers, binding, [](const std::vector<Symbol>&) { return true; });
}

/// The substitution theta_e with head(r)theta_e = e, or nullopt when the
/// constants or repeated variables of the head disagree with e.
/// Throws when predicate or arity differ.
inline std::optional<Substitution> head_binding(const Rule& r, const Literal& e) {
    if (r.head().predicate() != e.predicate() || r.head().arity() != e.arity())
        throw Error("example " + to_string(e) + " does not match rule head " + to_string(r.head()));
    Substitution s;
    for (std::size_t i = 0; i < e.arity(); ++i) {
        const Term& h = r.head().args()[i];
        const Term& v = e.args()[i];
        if (h.is_variable()) {
            if (!s.bind(h.name(), v)) return std::nullopt;
        } else if (h != v) {
            return std::nullopt;
        }
    }
    return s;
}

/// True iff the body of `r` is satisfiable in `m` once its head is bound to `e`.
/// Head variables missing from the body are simply bound by the example.
inline bool covers_rule(const FactStore& m, const Rule& r, const Literal& e) {
    auto theta = head_binding(r, e);
    if (!theta) return false;
    return satisfiable(m, r.body(), *theta);
}

inline bool covers_rule(const Program& bk, const Rule& r, const Literal& e) {
    return covers_rule(least_model(bk), r, e);
}

struct Coverage {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    std::vector<bool> pos_covered;
    std::vector<bool> neg_covered;

    std::size_t errors() const { return fp + fn; }
};

namespace detail {
inline bool needs_fixpoint(const Hypothesis& h) {
    for (const Rule& r : h.rules())
        for (const Literal& l : r.body())
            for (const Rule& other : h.rules())
                if (l.predicate() == other.head().predicate()) return true;
    return false;
}
}  // namespace detail

/// Classifies every example against the least model of bk ∪ h, where
/// `bk_model` is the least model of bk.
inline Coverage coverage(const FactStore& bk_model, const Hypothesis& h, std::span<const Literal> pos,
                         std::span<const Literal> neg) {
    Coverage c;
    std::function<bool(const Literal&)> covered;
    FactStore derived;
    if (detail::needs_fixpoint(h)) {
        derived = derive(bk_model, h.rules());
        covered = [&](const Literal& e) { return bk_model.contains(e) || derived.contains(e); };
    } else {
        covered = [&](const Literal& e) {
            if (bk_model.contains(e)) return true;
            for (const Rule& r : h.rules())
                if (r.head().predicate() == e.predicate() && r.head().arity() == e.arity() && covers_rule(bk_model, r, e))
                    return true;
            return false;
        };
    }
    c.pos_covered.reserve(pos.size());
    for (const Literal& e : pos) {
        const bool v = covered(e);
        c.pos_covered.push_back(v);
        v ? ++c.tp : ++c.fn;
    }
    c.neg_covered.reserve(neg.size());
    for (const Literal& e : neg) {
        const bool v = covered(e);
        c.neg_covered.push_back(v);
        v ? ++c.fp : ++c.tn;
    }
    return c;
}

/// No grounding satisfies `body` in `m` while falsifying `l`. Variables of `l`
/// absent from `body` range over `domain`. Vacuously true for an unsatisfiable body.
inline bool implies(const FactStore& m, std::span<const Literal> body, const Literal& l,
                    std::span<const Symbol> domain, const Substitution& seed = {}) {
    const auto extra = detail::seed_variables(seed);
    detail::Conjunction q(body, extra);
    std::vector<std::uint32_t> residual;  // slots of l's variables not fixed by body or seed
    std::vector<Symbol> residual_vars;
    for (const Term& t : l.args()) {
        if (!t.is_variable()) continue;
        const bool in_body = std::any_of(body.begin(), body.end(), [&](const Literal& b) { return b.mentions(t.name()); });
        const bool in_seed = seed.find(t.name()) != nullptr;
        if (!in_body && !in_seed && std::find(residual_vars.begin(), residual_vars.end(), t.name()) == residual_vars.end())
            residual_vars.push_back(t.name());
    }
    for (Symbol v : residual_vars) residual.push_back(q.slot_of(v));

    std::vector<Symbol> binding;
    if (!detail::seed_binding(q, seed, binding)) return true;
    binding.resize(q.slots());

    std::vector<std::uint32_t> lslots;
    std::vector<Symbol> lconst;
    for (const Term& t : l.args()) {
        lslots.push_back(t.is_variable() ? *q.find_slot(t.name()) : ~0u);
        lconst.push_back(t.is_variable() ? Symbol() : t.name());
    }
    std::vector<Symbol> ground(l.arity());
    auto holds = [&](const std::vector<Symbol>& b) {
        for (std::size_t i = 0; i < l.arity(); ++i) ground[i] = lslots[i] == ~0u ? lconst[i] : b[lslots[i]];
        return m.contains(l.predicate(), ground);
    };

    const std::array<detail::Layer, 1> layers{detail::Layer{&m, nullptr}};
    const bool counterexample = q.solve(layers, binding, [&](const std::vector<Symbol>& b) {
        if (residual.empty()) return !holds(b);
        auto& bb = const_cast<std::vector<Symbol>&>(b);
        std::vector<std::size_t> idx(residual.size(), 0);
        if (domain.empty()) return false;
        for (;;) {
            for (std::size_t k = 0; k < residual.size(); ++k) bb[residual[k]] = domain[idx[k]];
            const bool ok = holds(bb);
            if (!ok) {
                for (auto s : residual) bb[s] = Symbol();
                return true;
            }
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == domain.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }
        for (auto s : residual) bb[s] = Symbol();
        return false;
    });
    return !counterexample;
}

}  // namespace ilp
