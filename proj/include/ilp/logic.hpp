#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ilp/symbol.hpp"

namespace ilp {

// ---------------------------------------------------------------------------
// Terms and literals
// ---------------------------------------------------------------------------

/// A function-free term: a variable or a constant, each identified by name.
class Term {
public:
    enum class Kind : std::uint8_t { Variable, Constant };

    Term() = default;

    static Term variable(Symbol name) { return Term(Kind::Variable, name); }
    static Term variable(std::string_view name) { return Term(Kind::Variable, Symbol(name)); }
    static Term constant(Symbol name) { return Term(Kind::Constant, name); }
    static Term constant(std::string_view name) { return Term(Kind::Constant, Symbol(name)); }

    Kind kind() const { return kind_; }
    Symbol name() const { return name_; }
    bool is_variable() const { return kind_ == Kind::Variable; }
    bool is_constant() const { return kind_ == Kind::Constant; }

    friend bool operator==(const Term&, const Term&) = default;

    // Variables sort before constants.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
        if (a.kind_ != b.kind_)
            return a.kind_ == Kind::Variable ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.name_ <=> b.name_;
    }

private:
    Term(Kind k, Symbol n) : kind_(k), name_(n) {}

    Kind kind_ = Kind::Constant;
    Symbol name_;
};

class Literal {
public:
    Literal() = default;
    Literal(Symbol predicate, std::vector<Term> args) : pred_(predicate), args_(std::move(args)) {}
    Literal(std::string_view predicate, std::vector<Term> args) : Literal(Symbol(predicate), std::move(args)) {}

    Symbol predicate() const { return pred_; }
    const std::vector<Term>& args() const { return args_; }
    std::size_t arity() const { return args_.size(); }

    bool is_ground() const {
        return std::none_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_variable(); });
    }

    bool mentions(Symbol var) const {
        return std::any_of(args_.begin(), args_.end(),
                           [var](const Term& t) { return t.is_variable() && t.name() == var; });
    }

    friend bool operator==(const Literal&, const Literal&) = default;

    friend std::strong_ordering operator<=>(const Literal& a, const Literal& b) {
        if (auto c = a.pred_ <=> b.pred_; c != 0) return c;
        if (auto c = a.args_.size() <=> b.args_.size(); c != 0) return c;
        for (std::size_t i = 0; i < a.args_.size(); ++i)
            if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    Symbol pred_;
    std::vector<Term> args_;
};

/// Appends the variables of `l` not already in `out`, in order of occurrence.
inline void append_variables(const Literal& l, std::vector<Symbol>& out) {
    for (const Term& t : l.args())
        if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end())
            out.push_back(t.name());
}

// ---------------------------------------------------------------------------
// Substitutions
// ---------------------------------------------------------------------------

/// Finite map from variables to terms, kept sorted by variable name.
class Substitution {
public:
    using Entry = std::pair<Symbol, Term>;

    Substitution() = default;

    /// Binds `var` to `value`. Returns false (and leaves the map unchanged) when
    /// `var` is already bound to something else.
    bool bind(Symbol var, Term value) {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                                   [](const Entry& e, Symbol v) { return e.first < v; });
        if (it != entries_.end() && it->first == var) return it->second == value;
        entries_.insert(it, {var, value});
        return true;
    }

    const Term* find(Symbol var) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), var,
                                   [](const Entry& e, Symbol v) { return e.first < v; });
        return (it != entries_.end() && it->first == var) ? &it->second : nullptr;
    }

    Term apply(const Term& t) const {
        if (!t.is_variable()) return t;
        const Term* v = find(t.name());
        return v ? *v : t;
    }

    Literal apply(const Literal& l) const {
        std::vector<Term> args;
        args.reserve(l.arity());
        for (const Term& t : l.args()) args.push_back(apply(t));
        return Literal(l.predicate(), std::move(args));
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    friend bool operator==(const Substitution&, const Substitution&) = default;
    friend auto operator<=>(const Substitution& a, const Substitution& b) { return a.entries_ <=> b.entries_; }

private:
    std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Rules and hypotheses
// ---------------------------------------------------------------------------

namespace detail {
inline std::uint64_t predicate_bit(Symbol p) {
    return std::uint64_t{1} << (std::hash<Symbol>{}(p) * 0x9E3779B97F4A7C15ull >> 58);
}
}  // namespace detail

/// A definite clause. The body is a set: stored sorted and duplicate-free.
class Rule {
public:
    Rule() = default;

    Rule(Literal head, std::vector<Literal> body) : head_(std::move(head)), body_(std::move(body)) {
        std::sort(body_.begin(), body_.end());
        body_.erase(std::unique(body_.begin(), body_.end()), body_.end());
        for (const Literal& l : body_) signature_ |= detail::predicate_bit(l.predicate());
    }

    const Literal& head() const { return head_; }
    const std::vector<Literal>& body() const { return body_; }

    /// Number of literals, head included.
    std::size_t size() const { return 1 + body_.size(); }

    /// Bloom-style mask over body predicates; a necessary condition for body inclusion.
    std::uint64_t body_signature() const { return signature_; }

    std::vector<Symbol> variables() const {
        std::vector<Symbol> out;
        append_variables(head_, out);
        for (const Literal& l : body_) append_variables(l, out);
        return out;
    }

    Rule without(const Literal& l) const {
        std::vector<Literal> rest;
        rest.reserve(body_.size());
        for (const Literal& b : body_)
            if (b != l) rest.push_back(b);
        return Rule(head_, std::move(rest));
    }

    Rule with(const Literal& l) const {
        std::vector<Literal> more = body_;
        more.push_back(l);
        return Rule(head_, std::move(more));
    }

    friend bool operator==(const Rule& a, const Rule& b) { return a.head_ == b.head_ && a.body_ == b.body_; }

    friend std::strong_ordering operator<=>(const Rule& a, const Rule& b) {
        if (auto c = a.head_ <=> b.head_; c != 0) return c;
        if (auto c = a.body_.size() <=> b.body_.size(); c != 0) return c;
        return a.body_ <=> b.body_;
    }

private:
    Literal head_;
    std::vector<Literal> body_;
    std::uint64_t signature_ = 0;
};

/// A definite program; rules stored sorted and duplicate-free.
class Hypothesis {
public:
    Hypothesis() = default;

    explicit Hypothesis(std::vector<Rule> rules) : rules_(std::move(rules)) {
        std::sort(rules_.begin(), rules_.end());
        rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
    }

    const std::vector<Rule>& rules() const { return rules_; }
    bool empty() const { return rules_.empty(); }

    /// Total literal count.
    std::size_t size() const {
        return std::accumulate(rules_.begin(), rules_.end(), std::size_t{0},
                               [](std::size_t n, const Rule& r) { return n + r.size(); });
    }

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
    friend std::strong_ordering operator<=>(const Hypothesis& a, const Hypothesis& b) {
        if (auto c = a.rules_.size() <=> b.rules_.size(); c != 0) return c;
        return a.rules_ <=> b.rules_;
    }

private:
    std::vector<Rule> rules_;
};

}  // namespace ilp

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

namespace ilp::detail {
inline void hash_combine(std::size_t& seed, std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2); }
}  // namespace ilp::detail

template <>
struct std::hash<ilp::Term> {
    std::size_t operator()(const ilp::Term& t) const noexcept {
        return std::hash<ilp::Symbol>{}(t.name()) * 2 + (t.is_variable() ? 1 : 0);
    }
};

template <>
struct std::hash<ilp::Literal> {
    std::size_t operator()(const ilp::Literal& l) const noexcept {
        std::size_t h = std::hash<ilp::Symbol>{}(l.predicate());
        for (const auto& t : l.args()) ilp::detail::hash_combine(h, std::hash<ilp::Term>{}(t));
        return h;
    }
};

template <>
struct std::hash<ilp::Rule> {
    std::size_t operator()(const ilp::Rule& r) const noexcept {
        std::size_t h = std::hash<ilp::Literal>{}(r.head());
        for (const auto& l : r.body()) ilp::detail::hash_combine(h, std::hash<ilp::Literal>{}(l));
        return h;
    }
};

template <>
struct std::hash<ilp::Hypothesis> {
    std::size_t operator()(const ilp::Hypothesis& h) const noexcept {
        std::size_t s = h.rules().size();
        for (const auto& r : h.rules()) ilp::detail::hash_combine(s, std::hash<ilp::Rule>{}(r));
        return s;
    }
};

namespace ilp {

// ---------------------------------------------------------------------------
// Structural relations
// ---------------------------------------------------------------------------

/// Same head (variable names included) and body(r1) ⊆ body(r2).
inline bool subrule(const Rule& r1, const Rule& r2) {
    if (r1.head() != r2.head() || r1.body().size() > r2.body().size()) return false;
    return std::includes(r2.body().begin(), r2.body().end(), r1.body().begin(), r1.body().end());
}

inline bool sub_hypothesis(const Hypothesis& h1, const Hypothesis& h2) {
    return std::all_of(h1.rules().begin(), h1.rules().end(), [&](const Rule& r1) {
        return std::any_of(h2.rules().begin(), h2.rules().end(), [&](const Rule& r2) { return subrule(r1, r2); });
    });
}

/// True iff `r`'s head predicate occurs in its own body.
inline bool is_recursive(const Rule& r) {
    const Symbol p = r.head().predicate();
    return std::any_of(r.body().begin(), r.body().end(), [p](const Literal& l) { return l.predicate() == p; });
}

/// No rule of `h` (r included) uses r's head predicate in its body.
inline bool is_basic(const Rule& r, const Hypothesis& h) {
    const Symbol p = r.head().predicate();
    for (const Rule& other : h.rules())
        for (const Literal& l : other.body())
            if (l.predicate() == p) return false;
    return true;
}

/// Every variable of `l` occurs in the head or in another body literal of `r`.
inline bool captured(const Rule& r, const Literal& l) {
    for (const Term& t : l.args()) {
        if (!t.is_variable()) continue;
        if (r.head().mentions(t.name())) continue;
        bool elsewhere = false;
        for (const Literal& b : r.body())
            if (b != l && b.mentions(t.name())) {
                elsewhere = true;
                break;
            }
        if (!elsewhere) return false;
    }
    return true;
}

/// Every head variable occurs in the body.
inline bool is_safe(const Rule& r) {
    for (const Term& t : r.head().args())
        if (t.is_variable() &&
            std::none_of(r.body().begin(), r.body().end(), [&](const Literal& l) { return l.mentions(t.name()); }))
            return false;
    return true;
}

/// First head variable missing from the body, if any.
inline std::optional<Symbol> unsafe_variable(const Rule& r) {
    for (const Term& t : r.head().args())
        if (t.is_variable() &&
            std::none_of(r.body().begin(), r.body().end(), [&](const Literal& l) { return l.mentions(t.name()); }))
            return t.name();
    return std::nullopt;
}

/// The literals cannot be split into two nonempty groups with disjoint
/// variables. A variable-free head is exempt and only the body must be connected.
inline bool connected(const Literal& head, std::span<const Literal> body) {
    std::vector<const Literal*> lits;
    if (!head.is_ground() || body.empty()) lits.push_back(&head);
    for (const Literal& l : body) lits.push_back(&l);
    if (lits.size() <= 1) return true;

    std::vector<std::size_t> parent(lits.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::pair<Symbol, std::size_t>> first_seen;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        for (const Term& t : lits[i]->args()) {
            if (!t.is_variable()) continue;
            auto it = std::find_if(first_seen.begin(), first_seen.end(),
                                   [&](const auto& e) { return e.first == t.name(); });
            if (it == first_seen.end())
                first_seen.emplace_back(t.name(), i);
            else
                parent[find(i)] = find(it->second);
        }
    }
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < lits.size(); ++i)
        if (find(i) != root) return false;
    return true;
}

inline bool connected(const Rule& r) { return connected(r.head(), r.body()); }

// ---------------------------------------------------------------------------
// Renaming-aware matching
// ---------------------------------------------------------------------------

/// Injective variable-to-variable map, pattern variable -> target variable.
using Renaming = std::vector<std::pair<Symbol, Symbol>>;

inline Literal apply(const Renaming& theta, const Literal& l) {
    std::vector<Term> args;
    args.reserve(l.arity());
    for (const Term& t : l.args()) {
        if (t.is_variable()) {
            auto it = std::find_if(theta.begin(), theta.end(), [&](const auto& e) { return e.first == t.name(); });
            args.push_back(it == theta.end() ? t : Term::variable(it->second));
        } else {
            args.push_back(t);
        }
    }
    return Literal(l.predicate(), std::move(args));
}

namespace detail {

class Embedder {
public:
    explicit Embedder(std::span<const Literal> target) : target_(target) {}

    bool match(const Literal& pat, const Literal& tgt) {
        if (pat.predicate() != tgt.predicate() || pat.arity() != tgt.arity()) return false;
        const std::size_t mark = map_.size();
        for (std::size_t i = 0; i < pat.arity(); ++i) {
            const Term& a = pat.args()[i];
            const Term& b = tgt.args()[i];
            if (a.is_constant()) {
                if (a != b) return undo(mark);
                continue;
            }
            if (!b.is_variable()) return undo(mark);
            auto it = std::find_if(map_.begin(), map_.end(), [&](const auto& e) { return e.first == a.name(); });
            if (it != map_.end()) {
                if (it->second != b.name()) return undo(mark);
                continue;
            }
            if (std::any_of(map_.begin(), map_.end(), [&](const auto& e) { return e.second == b.name(); }))
                return undo(mark);
            map_.emplace_back(a.name(), b.name());
        }
        return true;
    }

    template <class Fn>
    bool search(std::span<const Literal> pattern, std::size_t i, Fn& fn) {
        if (i == pattern.size()) return fn(static_cast<const Renaming&>(map_));
        const std::size_t mark = map_.size();
        for (const Literal& t : target_) {
            if (!match(pattern[i], t)) continue;
            if (search(pattern, i + 1, fn)) return true;
            map_.resize(mark);
        }
        return false;
    }

    Renaming& map() { return map_; }

private:
    bool undo(std::size_t mark) {
        map_.resize(mark);
        return false;
    }

    std::span<const Literal> target_;
    Renaming map_;
};

}  // namespace detail

/// Calls `fn(theta)` for every injective renaming theta with
/// head(p)theta = target_head and body(p)theta ⊆ target_body.
/// `fn` returns true to stop; the function returns true iff stopped.
template <class Fn>
bool for_each_embedding(const Rule& p, const Literal& target_head, std::span<const Literal> target_body, Fn&& fn) {
    if (p.body().size() > target_body.size()) return false;
    detail::Embedder e(target_body);
    if (!e.match(p.head(), target_head)) return false;
    return e.search(std::span<const Literal>(p.body()), 0, fn);
}

template <class Fn>
bool for_each_embedding(const Rule& p, const Rule& r, Fn&& fn) {
    if ((p.body_signature() & ~r.body_signature()) != 0) return false;
    return for_each_embedding(p, r.head(), std::span<const Literal>(r.body()), std::forward<Fn>(fn));
}

/// Exists an injective renaming theta of p's variables with
/// head(p)theta = head(r) and body(p)theta ⊆ body(r).
inline bool renamed_subrule(const Rule& p, const Rule& r) {
    return for_each_embedding(p, r, [](const Renaming&) { return true; });
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

/// Fixed variable alphabet: A..Z, then A1..Z1, A2.. and so on.
inline Symbol canonical_variable(std::size_t i) {
    static const std::vector<Symbol> table = [] {
        std::vector<Symbol> t;
        for (std::size_t k = 0; k < 26 * 4; ++k) {
            std::string s(1, static_cast<char>('A' + k % 26));
            if (k >= 26) s += std::to_string(k / 26);
            t.emplace_back(s);
        }
        return t;
    }();
    if (i < table.size()) return table[i];
    return Symbol(std::string(1, static_cast<char>('A' + i % 26)) + std::to_string(i / 26));
}

struct Canonical {
    Rule rule;
    Substitution renaming;  // original variable -> canonical variable
};

/// Renames variables to the fixed alphabet. Head variables take the first
/// names in order of occurrence; body-only variables are assigned the
/// permutation of the remaining names that yields the least sorted body.
/// Exact up to 8 body-only variables; beyond that, first-occurrence order.
inline Canonical canonicalize_with_renaming(const Rule& r) {
    std::vector<Symbol> head_vars;
    append_variables(r.head(), head_vars);
    std::vector<Symbol> body_only;
    for (const Literal& l : r.body())
        for (const Term& t : l.args())
            if (t.is_variable() && std::find(head_vars.begin(), head_vars.end(), t.name()) == head_vars.end() &&
                std::find(body_only.begin(), body_only.end(), t.name()) == body_only.end())
                body_only.push_back(t.name());

    Substitution head_map;
    for (std::size_t i = 0; i < head_vars.size(); ++i)
        head_map.bind(head_vars[i], Term::variable(canonical_variable(i)));
    const Literal head = head_map.apply(r.head());

    std::vector<std::size_t> perm(body_only.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto build = [&](const std::vector<std::size_t>& pm) {
        Substitution s = head_map;
        for (std::size_t j = 0; j < body_only.size(); ++j)
            s.bind(body_only[j], Term::variable(canonical_variable(head_vars.size() + pm[j])));
        std::vector<Literal> body;
        body.reserve(r.body().size());
        for (const Literal& l : r.body()) body.push_back(s.apply(l));
        std::sort(body.begin(), body.end());
        return std::pair{std::move(body), std::move(s)};
    };

    auto best = build(perm);
    if (body_only.size() > 1 && body_only.size() <= 8) {
        while (std::next_permutation(perm.begin(), perm.end())) {
            auto cand = build(perm);
            if (cand.first < best.first) best = std::move(cand);
        }
    }
    return Canonical{Rule(head, std::move(best.first)), std::move(best.second)};
}

inline Rule canonicalize(const Rule& r) { return canonicalize_with_renaming(r).rule; }

inline Hypothesis canonicalize(const Hypothesis& h) {
    std::vector<Rule> rules;
    rules.reserve(h.rules().size());
    for (const Rule& r : h.rules()) rules.push_back(canonicalize(r));
    return Hypothesis(std::move(rules));
}

// ---------------------------------------------------------------------------
// Text
// ---------------------------------------------------------------------------

namespace detail {
inline bool bare_constant(std::string_view s) {
    if (s.empty()) return false;
    long long v = 0;
    if (parse_integer(s, v)) return true;
    if (!(s[0] >= 'a' && s[0] <= 'z')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}
}  // namespace detail

inline std::string to_string(const Term& t) {
    if (t.is_variable() || detail::bare_constant(t.name().str())) return std::string(t.name().str());
    std::string out = "'";
    for (char c : t.name().str()) {
        if (c == '\'' || c == '\\') out += '\\';
        out += c;
    }
    return out + "'";
}

inline std::string to_string(const Literal& l) {
    std::string out(l.predicate().str());
    if (l.arity() == 0) return out;
    out += '(';
    for (std::size_t i = 0; i < l.arity(); ++i) {
        if (i) out += ',';
        out += to_string(l.args()[i]);
    }
    return out + ')';
}

/// `head :- b1, b2` (no terminating period); facts render as the head alone.
inline std::string to_string(const Rule& r) {
    std::string out = to_string(r.head());
    if (r.body().empty()) return out;
    out += " :- ";
    for (std::size_t i = 0; i < r.body().size(); ++i) {
        if (i) out += ", ";
        out += to_string(r.body()[i]);
    }
    return out;
}

/// `{r1; r2}` on one line.
inline std::string to_string(const Hypothesis& h) {
    std::string out = "{";
    for (std::size_t i = 0; i < h.rules().size(); ++i) out += (i ? "; " : "") + to_string(h.rules()[i]);
    return out + "}";
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }
inline std::ostream& operator<<(std::ostream& os, const Literal& l) { return os << to_string(l); }
inline std::ostream& operator<<(std::ostream& os, const Rule& r) { return os << to_string(r); }
inline std::ostream& operator<<(std::ostream& os, const Hypothesis& h) { return os << to_string(h); }

}  // namespace ilp
