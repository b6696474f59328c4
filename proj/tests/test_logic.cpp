#include <gtest/gtest.h>

#include "ilp/logic.hpp"
#include "ilp/task_io.hpp"
#include "support/reference.hpp"

using namespace ilp;

namespace {

Rule rule(std::string_view text) { return parse_rules(text).at(0); }
Hypothesis hyp(std::string_view text) { return parse_hypothesis(text); }
Literal lit(std::string_view text) { return parse_rules(std::string(text) + ".").at(0).head(); }

}  // namespace

TEST(Term, VariablesAndConstantsAreDistinctNamespaces) {
    EXPECT_NE(Term::variable("a"), Term::constant("a"));
    EXPECT_EQ(Term::constant("a"), Term::constant("a"));
    EXPECT_LT(Term::variable("Z"), Term::constant("a"));
}

TEST(Literal, GroundIffNoVariables) {
    EXPECT_TRUE(lit("odd(3)").is_ground());
    EXPECT_FALSE(lit("gt(A,3)").is_ground());
    EXPECT_TRUE(lit("h").is_ground());
}

TEST(Rule, BodyIsASetAndSizeCountsTheHead) {
    const Rule r = rule("f(A) :- odd(A), int(A), odd(A).");
    EXPECT_EQ(r.body().size(), 2u);
    EXPECT_EQ(r.size(), 3u);
    const auto vars = rule("f(A) :- succ(A,B), lt(B,C).").variables();
    EXPECT_EQ(vars.size(), 3u);
}

TEST(Hypothesis, SizeSumsRules) {
    const Hypothesis h = hyp("f(A) :- odd(A). f(A) :- even(A), gt(A,3). f(A) :- odd(A).");
    EXPECT_EQ(h.rules().size(), 2u);
    EXPECT_EQ(h.size(), 5u);
}

TEST(Substitution, SimultaneousAndIdentityOnGround) {
    Substitution s;
    ASSERT_TRUE(s.bind(Symbol("A"), Term::variable("B")));
    ASSERT_TRUE(s.bind(Symbol("B"), Term::variable("A")));
    EXPECT_EQ(s.apply(lit("q(A,B)")), lit("q(B,A)"));
    EXPECT_EQ(s.apply(lit("q(1,2)")), lit("q(1,2)"));
    EXPECT_FALSE(s.bind(Symbol("A"), Term::constant("1")));
}

TEST(Subrule, Examples) {
    EXPECT_TRUE(subrule(rule("f(A) :- odd(A)."), rule("f(A) :- odd(A), int(A).")));
    const Rule r = rule("f(A) :- odd(A), gt(A,3).");
    EXPECT_TRUE(subrule(r, r));
    EXPECT_FALSE(subrule(rule("f(A) :- odd(A)."), rule("f(B) :- odd(B).")));
}

TEST(SubHypothesis, Examples) {
    EXPECT_TRUE(sub_hypothesis(Hypothesis{}, hyp("f(A) :- odd(A).")));
    EXPECT_TRUE(sub_hypothesis(hyp("f(A) :- odd(A)."), hyp("f(A) :- odd(A), int(A). f(A) :- even(A).")));
    EXPECT_FALSE(sub_hypothesis(hyp("f(A) :- even(A)."), hyp("f(A) :- odd(A).")));
}

TEST(IsBasic, Examples) {
    const Hypothesis h1 = hyp("f(A) :- odd(A).");
    EXPECT_TRUE(is_basic(h1.rules()[0], h1));
    const Hypothesis h2 = hyp("f(A) :- succ(A,B), f(B).");
    EXPECT_FALSE(is_basic(h2.rules()[0], h2));
    const Hypothesis h3 = hyp("f(A) :- g(A). g(A) :- odd(A).");
    const Rule g = rule("g(A) :- odd(A).");
    EXPECT_FALSE(is_basic(g, h3));
    EXPECT_TRUE(is_basic(rule("f(A) :- g(A)."), h3));
}

TEST(Captured, Examples) {
    const Rule r = rule("h :- succ(A,B), succ(B,C), gt(C,A), gt(C,D).");
    EXPECT_TRUE(captured(r, lit("gt(C,A)")));
    EXPECT_FALSE(captured(r, lit("gt(C,D)")));
    EXPECT_TRUE(captured(rule("f(A) :- lt(A,10)."), lit("lt(A,10)")));
}

TEST(Connected, Examples) {
    EXPECT_TRUE(connected(rule("f(A) :- odd(A), gt(A,3).")));
    EXPECT_FALSE(connected(rule("f(A) :- odd(B).")));
    EXPECT_FALSE(connected(rule("f(A) :- succ(A,B), lt(B,C), odd(D).")));
}

TEST(Connected, VariableFreeHeadNeedsOnlyAConnectedBody) {
    EXPECT_TRUE(connected(rule("h :- gt(A,B), gt(B,C), gt(A,C).")));
    EXPECT_FALSE(connected(rule("h :- gt(A,B), odd(C).")));
}

TEST(Safety, UnsafeVariableIsNamed) {
    const Rule r = rule("p(A,B) :- q(A).");
    EXPECT_FALSE(is_safe(r));
    ASSERT_TRUE(unsafe_variable(r).has_value());
    EXPECT_EQ(unsafe_variable(r)->str(), "B");
    EXPECT_TRUE(is_safe(rule("p(A,B) :- q(A), r(B).")));
}

TEST(Canonicalize, Examples) {
    EXPECT_EQ(canonicalize(rule("f(X) :- odd(X).")), rule("f(A) :- odd(A)."));
    EXPECT_EQ(canonicalize(rule("f(P) :- succ(P,Q), lt(Q,R).")), canonicalize(rule("f(A) :- succ(A,B), lt(B,C).")));
    const Rule g = rule("f(1) :- odd(1).");
    EXPECT_EQ(canonicalize(g), g);
}

TEST(RenamedSubrule, Examples) {
    EXPECT_TRUE(renamed_subrule(rule("f(A) :- odd(A), int(A)."), rule("f(A) :- odd(A), int(A), gt(A,3).")));
    EXPECT_TRUE(renamed_subrule(rule("f(A) :- lt(A,B)."), rule("f(A) :- lt(A,C), odd(C).")));
    EXPECT_FALSE(renamed_subrule(rule("f(A) :- lt(A,B)."), rule("f(A) :- lt(B,A).")));
}

TEST(RenamedSubrule, IsInjective) {
    // B would have to map onto the head variable A.
    EXPECT_FALSE(renamed_subrule(rule("f(A) :- q(A,B), p(B)."), rule("f(A) :- q(A,A), p(A), p(C).")));
    EXPECT_TRUE(renamed_subrule(rule("f(A) :- q(A,B), p(B)."), rule("f(A) :- q(A,C), p(C), p(A).")));
}

TEST(RenderAndParse, Rules) {
    EXPECT_EQ(to_string(rule("f(A) <- odd(A), gt(A,3), lt(A,8).")), "f(A) :- gt(A,3), lt(A,8), odd(A)");
    EXPECT_EQ(rule("f(A) ← odd(A)."), rule("f(A) :- odd(A)."));
}

// ---------------------------------------------------------------------------
// Properties over random rules
// ---------------------------------------------------------------------------

TEST(LogicProperties, SubruleReflexiveAndTransitive) {
    ref::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const Rule r3 = ref::random_rule(rng, 5);
        std::vector<Literal> b2, b1;
        for (const Literal& l : r3.body())
            if (rng.coin(0.7)) b2.push_back(l);
        for (const Literal& l : b2)
            if (rng.coin(0.7)) b1.push_back(l);
        const Rule r2(r3.head(), b2), r1(r3.head(), b1);
        EXPECT_TRUE(subrule(r3, r3));
        ASSERT_TRUE(subrule(r1, r2) && subrule(r2, r3));
        EXPECT_TRUE(subrule(r1, r3));
        const Hypothesis h1({r1}), h2({r2, ref::random_rule(rng)}), h3({r3, ref::random_rule(rng)});
        EXPECT_TRUE(sub_hypothesis(h1, h1));
        EXPECT_TRUE(sub_hypothesis(h1, h2));
        EXPECT_TRUE(sub_hypothesis(h1, h3));
    }
}

TEST(LogicProperties, CaptureTransfersToSuperRules) {
    ref::Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        const Rule r2 = ref::random_rule(rng, 3);
        Rule r1 = r2;
        for (std::size_t k = rng.below(3); k > 0; --k) r1 = r1.with(ref::random_rule(rng, 1).body()[0]);
        ASSERT_TRUE(subrule(r2, r1));
        for (const Literal& l : r2.body())
            if (captured(r2, l)) { EXPECT_TRUE(captured(r1, l)) << r2 << " / " << r1 << " / " << l; }
    }
}

TEST(LogicProperties, CanonicalizeIdempotentAndRenamingInvariant) {
    ref::Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const Rule r = ref::random_rule(rng, 5);
        const Rule c = canonicalize(r);
        EXPECT_EQ(canonicalize(c), c);
        EXPECT_EQ(canonicalize(ref::random_renaming(rng, r)), c) << r;
    }
}

TEST(LogicProperties, RenamedSubruleGeneralisesSubrule) {
    ref::Rng rng(14);
    for (int i = 0; i < 500; ++i) {
        const Rule a = ref::random_rule(rng, 2);
        const Rule b = rng.coin() ? a.with(ref::random_rule(rng, 1).body()[0]) : ref::random_rule(rng, 3);
        if (subrule(a, b)) { EXPECT_TRUE(renamed_subrule(a, b)); }
        if (renamed_subrule(a, b)) { EXPECT_TRUE(renamed_subrule(ref::random_renaming(rng, a), b)); }
    }
}
