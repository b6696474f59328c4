#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ilp/datalog.hpp"
#include "ilp/logic.hpp"
#include "ilp/oracle.hpp"
#include "ilp/task_io.hpp"

// Seeded random micro-tasks small enough for the oracle.

namespace ilp::synth {

struct MicroTask {
    std::string bk, exs, bias;
    Task task;
    Hypothesis planted;  // empty when labels are random
    std::size_t max_size = 5;
};

struct MicroOptions {
    bool planted = true;
    std::size_t max_size = 5;
    std::size_t max_domain = 8;
    std::size_t max_body_preds = 4;
    std::size_t max_vars = 3;
    std::size_t max_rules = 2;
};

namespace detail {

inline std::string bias_text(const Bias& b) {
    std::string s = "head_pred(" + std::string(b.head.name.str()) + "," + std::to_string(b.head.arity) + ").\n";
    for (const auto& p : b.body_preds)
        s += "body_pred(" + std::string(p.name.str()) + "," + std::to_string(p.arity) + ").\n";
    s += "max_vars(" + std::to_string(b.max_vars) + ").\nmax_body(" + std::to_string(b.max_body) +
         ").\nmax_rules(" + std::to_string(b.max_rules) + ").\n";
    for (const auto& [key, vs] : b.constants) {
        s += "constant(" + std::string(key.first.str()) + "," + std::to_string(key.second + 1) + ",[";
        for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + std::string(vs[i].str());
        s += "]).\n";
    }
    return s;
}

}  // namespace detail

/// A random task. With `planted`, labels come from a random in-bias
/// hypothesis of at most `max_size` literals, so a zero-error answer exists.
/// Background facts include a subset relation and a transitive relation so
/// redundant literals occur.
inline MicroTask micro_task(std::uint64_t seed, const MicroOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    for (;;) {
        const std::size_t n = uniform(4, opt.max_domain);
        std::vector<Symbol> dom;
        for (std::size_t i = 1; i <= n; ++i) dom.emplace_back(std::to_string(i));

        Bias b;
        b.head = {Symbol("f"), coin(0.75) ? 1u : 2u};
        const std::size_t npreds = uniform(2, opt.max_body_preds);
        const char* names[] = {"p", "q", "r", "s", "t", "u"};
        for (std::size_t i = 0; i < npreds; ++i) b.body_preds.push_back({Symbol(names[i]), coin(0.5) ? 1u : 2u});
        b.max_vars = std::min<std::size_t>(opt.max_vars, std::max<std::size_t>(b.head.arity, uniform(2, 3)));
        b.max_vars = std::max(b.max_vars, b.head.arity);
        b.max_body = uniform(2, 3);
        b.max_rules = uniform(1, opt.max_rules);
        if (coin(0.3)) {
            const auto& p = b.body_preds[uniform(0, npreds - 1)];
            std::vector<Symbol> vs{dom[uniform(0, n - 1)], dom[uniform(0, n - 1)]};
            std::sort(vs.begin(), vs.end());
            vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
            b.constants[{p.name, p.arity - 1}] = vs;
        }

        // Background facts
        std::set<Literal> facts;
        auto fact = [&](Symbol p, std::vector<Symbol> args) {
            std::vector<Term> ts;
            for (Symbol a : args) ts.push_back(Term::constant(a));
            facts.insert(Literal(p, ts));
        };
        for (const auto& p : b.body_preds) {
            if (p.arity == 1) {
                for (Symbol c : dom)
                    if (coin(0.45)) fact(p.name, {c});
            } else {
                for (Symbol x : dom)
                    for (Symbol y : dom)
                        if (coin(0.2)) fact(p.name, {x, y});
            }
        }
        // q ⊇ p for the first two unary predicates; first binary predicate transitive.
        std::vector<PredicateDecl> unary, binary;
        for (const auto& p : b.body_preds) (p.arity == 1 ? unary : binary).push_back(p);
        if (unary.size() >= 2 && coin(0.7))
            for (Symbol c : dom)
                if (facts.count(Literal(unary[0].name, {Term::constant(c)}))) fact(unary[1].name, {c});
        if (!binary.empty() && coin(0.7)) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (Symbol x : dom)
                    for (Symbol y : dom)
                        for (Symbol z : dom) {
                            auto has = [&](Symbol a, Symbol c) {
                                return facts.count(Literal(binary[0].name, {Term::constant(a), Term::constant(c)})) > 0;
                            };
                            if (has(x, y) && has(y, z) && !has(x, z)) {
                                fact(binary[0].name, {x, z});
                                changed = true;
                            }
                        }
            }
        }

        Program bk;
        for (const Literal& l : facts) bk.rules.emplace_back(l, std::vector<Literal>{});
        const FactStore model = least_model(bk);

        // Candidate head atoms
        std::vector<Literal> atoms;
        if (b.head.arity == 1) {
            for (Symbol c : dom) atoms.push_back(Literal(b.head.name, {Term::constant(c)}));
        } else {
            for (Symbol x : dom)
                for (Symbol y : dom) atoms.push_back(Literal(b.head.name, {Term::constant(x), Term::constant(y)}));
        }
        std::shuffle(atoms.begin(), atoms.end(), rng);

        Hypothesis planted;
        std::vector<Literal> pos, neg;
        if (opt.planted) {
            std::vector<Rule> pool;
            for (std::size_t k = 1; k <= b.max_body && k + 1 <= opt.max_size; ++k) {
                auto rs = oracle::all_rules(b, k);
                pool.insert(pool.end(), rs.begin(), rs.end());
            }
            if (pool.empty()) continue;
            std::vector<Rule> chosen{pool[uniform(0, pool.size() - 1)]};
            if (b.max_rules >= 2 && coin(0.4)) {
                const Rule& extra = pool[uniform(0, pool.size() - 1)];
                if (extra != chosen[0] && chosen[0].size() + extra.size() <= opt.max_size) chosen.push_back(extra);
            }
            planted = Hypothesis(chosen);
            auto cov = coverage(model, planted, atoms, {});
            for (std::size_t i = 0; i < atoms.size(); ++i) (cov.pos_covered[i] ? pos : neg).push_back(atoms[i]);
        } else {
            for (const Literal& a : atoms) (coin(0.4) ? pos : neg).push_back(a);
        }
        if (pos.empty() || neg.empty()) continue;
        if (pos.size() > 8) pos.resize(8);
        if (neg.size() > 10) neg.resize(10);

        MicroTask mt;
        for (const Literal& l : facts) mt.bk += to_string(l) + ".\n";
        for (const Literal& e : pos) mt.exs += "pos(" + to_string(e) + ").\n";
        for (const Literal& e : neg) mt.exs += "neg(" + to_string(e) + ").\n";
        mt.bias = detail::bias_text(b);
        mt.task = parse_task_text(mt.bk, mt.exs, mt.bias);
        mt.task.name = "micro-" + std::to_string(seed);
        mt.planted = planted;
        mt.max_size = opt.max_size;
        return mt;
    }
}

}  // namespace ilp::synth
