#pragma once

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "ilp/datalog.hpp"
#include "ilp/errors.hpp"
#include "ilp/logic.hpp"
#include "ilp/search.hpp"
#include "ilp/task_io.hpp"

// Brute-force ground truth. Shares only the logic-core relations with the
// learner; the literal universe, enumeration and filtering are separate code.

namespace ilp::oracle {

inline constexpr double kDefaultCeiling = 1e6;

namespace detail {

inline void argument_tuples(const std::vector<std::vector<Term>>& options, std::size_t i, std::vector<Term>& cur,
                            std::vector<std::vector<Term>>& out) {
    if (i == options.size()) {
        out.push_back(cur);
        return;
    }
    for (const Term& t : options[i]) {
        cur.push_back(t);
        argument_tuples(options, i + 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<Literal> universe(const Bias& b) {
    std::set<Literal> lits;
    std::vector<PredicateDecl> preds = b.body_preds;
    if (b.recursion) preds.push_back(b.head);
    for (const PredicateDecl& p : preds) {
        std::vector<std::vector<Term>> options;
        for (std::size_t i = 0; i < p.arity; ++i) {
            std::vector<Term> o;
            for (std::size_t v = 0; v < b.max_vars; ++v) o.push_back(Term::variable(canonical_variable(v)));
            for (Symbol c : b.allowed_constants(p.name, i)) o.push_back(Term::constant(c));
            options.push_back(std::move(o));
        }
        std::vector<std::vector<Term>> tuples;
        std::vector<Term> cur;
        argument_tuples(options, 0, cur, tuples);
        for (auto& t : tuples) lits.insert(Literal(p.name, std::move(t)));
    }
    return {lits.begin(), lits.end()};
}

inline double choose(double n, double k) {
    if (k < 0 || k > n) return 0;
    return std::round(std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)));
}

inline void subsets(const std::vector<Literal>& u, std::size_t k, std::size_t from, std::vector<Literal>& cur,
                    const std::function<void(const std::vector<Literal>&)>& fn) {
    if (cur.size() == k) {
        fn(cur);
        return;
    }
    for (std::size_t i = from; i + (k - cur.size()) <= u.size(); ++i) {
        cur.push_back(u[i]);
        subsets(u, k, i + 1, cur, fn);
        cur.pop_back();
    }
}

/// Number of sets of 2..max_rules distinct rules whose sizes sum to `size`.
inline double combination_count(const std::map<std::size_t, std::size_t>& rules_by_size, std::size_t size,
                                std::size_t max_rules) {
    // ways[s][m]: m rules from the sizes seen so far summing to s
    std::vector<std::vector<double>> ways(size + 1, std::vector<double>(max_rules + 1, 0));
    ways[0][0] = 1;
    for (const auto& [rs, count] : rules_by_size) {
        auto next = ways;
        for (std::size_t s = 0; s <= size; ++s)
            for (std::size_t m = 0; m <= max_rules; ++m) {
                if (ways[s][m] == 0) continue;
                for (std::size_t j = 1; m + j <= max_rules && s + j * rs <= size; ++j)
                    next[s + j * rs][m + j] += ways[s][m] * choose(static_cast<double>(count), static_cast<double>(j));
            }
        ways = std::move(next);
    }
    double total = 0;
    for (std::size_t m = 2; m <= max_rules; ++m) total += ways[size][m];
    return total;
}

}  // namespace detail

/// Every safe, connected canonical rule with `body_size` literals.
inline std::set<Rule> all_rules(const Bias& b, std::size_t body_size, double ceiling = kDefaultCeiling) {
    const auto u = detail::universe(b);
    const double estimate = detail::choose(static_cast<double>(u.size()), static_cast<double>(body_size));
    if (estimate > ceiling) throw CeilingExceeded(estimate, ceiling);
    std::vector<Term> head_args;
    for (std::size_t i = 0; i < b.head.arity; ++i) head_args.push_back(Term::variable(canonical_variable(i)));
    const Literal head(b.head.name, head_args);

    std::set<Rule> out;
    std::vector<Literal> cur;
    detail::subsets(u, body_size, 0, cur, [&](const std::vector<Literal>& body) {
        Rule r(head, body);
        if (r.variables().size() > b.max_vars) return;
        if (!is_safe(r) || !connected(r)) return;
        out.insert(canonicalize(r));
    });
    return out;
}

/// The complete canonical stratum of hypotheses with `size` literals.
inline std::set<Hypothesis> enumerate_all(const Bias& b, std::size_t size, double ceiling = kDefaultCeiling) {
    std::set<Hypothesis> out;
    if (size < 2) return out;
    std::map<std::size_t, std::vector<Rule>> by_size;
    for (std::size_t k = 1; k <= b.max_body && k + 1 <= size; ++k) {
        auto rs = all_rules(b, k, ceiling);
        by_size[k + 1].assign(rs.begin(), rs.end());
    }
    std::map<std::size_t, std::size_t> counts;
    for (const auto& [s, rs] : by_size) counts[s] = rs.size();
    const double combos = detail::combination_count(counts, size, b.max_rules);
    if (combos > ceiling) throw CeilingExceeded(combos, ceiling);

    std::vector<Rule> pool;
    for (const auto& [s, rs] : by_size) pool.insert(pool.end(), rs.begin(), rs.end());
    std::vector<Rule> cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t from, std::size_t remaining) {
        if (remaining == 0) {
            out.insert(Hypothesis(cur));
            return;
        }
        if (cur.size() == b.max_rules) return;
        for (std::size_t i = from; i < pool.size(); ++i) {
            if (pool[i].size() > remaining) continue;
            cur.push_back(pool[i]);
            rec(i + 1, remaining - pool[i].size());
            cur.pop_back();
        }
    };
    rec(0, size);
    return out;
}

struct OracleResult {
    CostScore best;
    std::vector<Hypothesis> witnesses;  // sorted
    std::size_t enumerated = 0;
};

/// Exact lexicographic optimum over the empty hypothesis and every canonical
/// hypothesis up to `max_size` literals, with all hypotheses achieving it.
inline OracleResult oracle_optimal(const Task& task, std::size_t max_size = 0, double ceiling = kDefaultCeiling) {
    if (max_size == 0) max_size = default_max_size(task.bias);
    // Refuse up front rather than after a partial run.
    double estimate = 0;
    {
        const double u = static_cast<double>(detail::universe(task.bias).size());
        for (std::size_t k = 1; k <= task.bias.max_body && k + 1 <= max_size; ++k) estimate += detail::choose(u, static_cast<double>(k));
        if (estimate > ceiling) throw CeilingExceeded(estimate, ceiling);
    }
    OracleResult res;
    res.best = CostScore{task.pos.size(), 0};
    res.witnesses.push_back(Hypothesis{});
    res.enumerated = 1;
    for (std::size_t size = 2; size <= max_size; ++size) {
        for (const Hypothesis& h : enumerate_all(task.bias, size, ceiling)) {
            ++res.enumerated;
            const CostScore s = score(h, task);
            if (s < res.best) {
                res.best = s;
                res.witnesses.clear();
            }
            if (s == res.best) res.witnesses.push_back(h);
        }
    }
    std::sort(res.witnesses.begin(), res.witnesses.end());
    return res;
}

}  // namespace ilp::oracle
