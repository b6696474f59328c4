#include <gtest/gtest.h>

#include "ilp/oracle.hpp"
#include "ilp/search.hpp"
#include "ilp/synth.hpp"

using namespace ilp;

namespace {

Hypothesis hyp(std::string_view text) { return parse_hypothesis(text); }

const Task& fixture(const std::string& name) {
    static std::map<std::string, Task> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, parse_task(std::string(ILP_FIXTURE_DIR) + "/" + name)).first;
    return it->second;
}

LearnConfig with_mode(PointlessMode m) {
    LearnConfig c;
    c.pointless = m;
    return c;
}

std::string read(const std::string& path) { return detail::read_file(path); }

Task intro_with_examples(std::string_view exs) {
    const std::string dir = std::string(ILP_FIXTURE_DIR) + "/intro/";
    return parse_task_text(read(dir + "bk.pl"), exs, read(dir + "bias.pl"));
}

}  // namespace

TEST(CostScore, LexicographicOrder) {
    EXPECT_LT((CostScore{0, 9}), (CostScore{1, 2}));
    EXPECT_LT((CostScore{1, 2}), (CostScore{1, 3}));
    EXPECT_EQ(to_string(CostScore{2, 3}), "(2, 3)");
}

TEST(Score, Examples) {
    const Task& t = fixture("intro");
    EXPECT_EQ(score(hyp("f(A) :- odd(A), int(A)."), t), (CostScore{2, 3}));
    EXPECT_EQ(score(Hypothesis{}, t), (CostScore{2, 0}));
    EXPECT_EQ(score(hyp("f(A) :- odd(A), gt(A,3), lt(A,8)."), t), (CostScore{0, 4}));
}

TEST(BuildCons, Examples) {
    const Task& t = fixture("intro");
    auto kinds = [&](const Hypothesis& h, bool noisy = false) {
        std::set<ConstraintKind> out;
        for (const auto& c : build_cons(h, coverage(t.bk_model, h, t.pos, t.neg), noisy)) out.insert(c.kind);
        return out;
    };
    EXPECT_EQ(kinds(hyp("f(A) :- gt(A,4), lt(A,6).")), (std::set{ConstraintKind::Banish, ConstraintKind::Specialisation}));
    EXPECT_EQ(kinds(hyp("f(A) :- odd(A), int(A).")), (std::set{ConstraintKind::Banish, ConstraintKind::Generalisation}));
    EXPECT_EQ(kinds(hyp("f(A) :- odd(A), gt(A,3), lt(A,8).")), (std::set{ConstraintKind::Banish}));
    EXPECT_EQ(kinds(hyp("f(A) :- even(A)."), true), (std::set{ConstraintKind::Banish}));
}

TEST(Learn, IntroFindsAZeroErrorSizeFourHypothesis) {
    const Task& t = fixture("intro");
    const LearnResult r = learn(t);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.best_score, (CostScore{0, 4}));
    EXPECT_EQ(score(*r.best, t), r.best_score);
    EXPECT_EQ(r.termination, Termination::PerfectAtSize);
}

TEST(Learn, PruningKeepsTheScoreAndGeneratesFewerCandidates) {
    const Task& t = fixture("intro");
    const LearnResult on = learn(t, with_mode(PointlessMode::Both));
    const LearnResult off = learn(t, with_mode(PointlessMode::Off));
    EXPECT_EQ(on.best_score, off.best_score);
    EXPECT_LT(on.stats.candidates_generated, off.stats.candidates_generated);
    EXPECT_GT(on.stats.constraints_of(ConstraintKind::PointlessSuperRule), 0u);
    EXPECT_EQ(off.stats.constraints_of(ConstraintKind::PointlessSuperRule), 0u);
}

TEST(Learn, SizeBoundBelowTheOptimumExhausts) {
    const Task& t = fixture("intro");
    LearnConfig cfg;
    cfg.max_size = 3;
    const LearnResult r = learn(t, cfg);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.termination, Termination::Exhausted);
    EXPECT_GT(r.best_score.errors, 0u);
    EXPECT_EQ(r.best_score, oracle::oracle_optimal(t, 3).best);
}

TEST(Learn, ExpiredDeadlineReturnsNoResult) {
    LearnConfig cfg;
    cfg.timeout_s = 0;
    const LearnResult r = learn(fixture("intro"), cfg);
    EXPECT_FALSE(r.best);
    EXPECT_EQ(r.termination, Termination::Timeout);
    EXPECT_EQ(r.stats.candidates_tested, 0u);
}

TEST(Learn, Deterministic) {
    const Task& t = fixture("trains-mini");
    const LearnResult a = learn(t), b = learn(t);
    ASSERT_TRUE(a.best && b.best);
    EXPECT_EQ(*a.best, *b.best);
    EXPECT_EQ(a.best_score, b.best_score);
    EXPECT_EQ(a.stats.candidates_generated, b.stats.candidates_generated);
    EXPECT_EQ(a.stats.constraints, b.stats.constraints);
    EXPECT_EQ(a.stats.evidence, b.stats.evidence);
    EXPECT_EQ(a.stats.explored_nodes, b.stats.explored_nodes);
}

TEST(Learn, AuditFindsNoViolationsOnFixtures) {
    for (const char* name : {"intro", "transitive-gt", "eight-puzzle-mini", "trains-mini"}) {
        LearnConfig cfg;
        cfg.audit = true;
        const LearnResult r = learn(fixture(name), cfg);
        EXPECT_TRUE(r.audit.violations.empty()) << name << ": " << r.audit.violations.front();
        for (const auto& rec : r.audit.records) {
            ASSERT_TRUE(rec.has_reduction);
            EXPECT_LT(rec.reduced_score, rec.blocked_score);
            EXPECT_GE(rec.blocked_score, r.best_score);
        }
        if (std::string(name) == "intro") { EXPECT_GT(r.audit.records.size(), 0u); }
    }
}

TEST(Learn, AuditDoesNotChangeTheResult) {
    const Task& t = fixture("intro");
    LearnConfig cfg;
    cfg.audit = true;
    const LearnResult a = learn(t, cfg), b = learn(t);
    EXPECT_EQ(a.best_score, b.best_score);
    EXPECT_EQ(a.stats.candidates_tested, b.stats.candidates_tested);
}

TEST(Learn, StatsAreConsistent) {
    for (const char* name : {"intro", "trains-mini", "eight-puzzle-mini"}) {
        const LearnResult r = learn(fixture(name));
        const Stats& s = r.stats;
        EXPECT_LE(s.candidates_tested, s.candidates_generated);
        EXPECT_LE(s.evidence[0] + s.evidence[1], s.candidates_tested);
        EXPECT_LE(s.time_detection_s, s.time_total_s);
        EXPECT_EQ(s.detection_calls, s.candidates_tested - (r.termination == Termination::PerfectAtSize ? 1 : 0));
        EXPECT_DOUBLE_EQ(s.detection_overhead(), s.time_detection_s / s.time_total_s);
    }
}

TEST(Learn, AblationMonotonicityOnFixtures) {
    for (const char* name : {"intro", "transitive-gt", "eight-puzzle-mini", "trains-mini"}) {
        const Task& t = fixture(name);
        const auto both = learn(t, with_mode(PointlessMode::Both));
        const auto red = learn(t, with_mode(PointlessMode::ReducibleOnly));
        const auto ind = learn(t, with_mode(PointlessMode::IndiscriminateOnly));
        const auto off = learn(t, with_mode(PointlessMode::Off));
        EXPECT_LE(both.stats.candidates_generated, red.stats.candidates_generated) << name;
        EXPECT_LE(both.stats.candidates_generated, ind.stats.candidates_generated) << name;
        EXPECT_LE(red.stats.candidates_generated, off.stats.candidates_generated) << name;
        EXPECT_LE(ind.stats.candidates_generated, off.stats.candidates_generated) << name;
        EXPECT_EQ(both.best_score, off.best_score) << name;
        EXPECT_EQ(red.best_score, off.best_score) << name;
        EXPECT_EQ(ind.best_score, off.best_score) << name;
    }
}

TEST(Learn, NoisyModeFindsTheLexicographicOptimum) {
    const Task t = intro_with_examples("pos(f(5)). pos(f(7)). pos(f(4)). neg(f(2)). neg(f(3)). neg(f(6)). "
                                       "neg(f(8)). neg(f(9)).");
    LearnConfig cfg;
    cfg.noisy = true;
    cfg.max_size = 3;
    cfg.audit = true;
    const LearnResult r = learn(t, cfg);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.termination, Termination::Exhausted);
    EXPECT_EQ(r.best_score, oracle::oracle_optimal(t, 3).best);
    EXPECT_TRUE(r.audit.violations.empty());
    EXPECT_EQ(r.stats.constraints_of(ConstraintKind::Specialisation), 0u);
    EXPECT_EQ(r.stats.constraints_of(ConstraintKind::Generalisation), 0u);
}

TEST(Learn, RecursiveTarget) {
    const Task t = parse_task_text(
        "edge(1,2). edge(2,3). edge(3,4). edge(4,5).",
        "pos(path(1,2)). pos(path(1,3)). pos(path(2,5)). pos(path(1,5)). neg(path(2,1)). neg(path(5,1)). "
        "neg(path(3,3)). neg(path(4,2)).",
        "head_pred(path,2). body_pred(edge,2). enable_recursion. max_vars(3). max_body(2). max_rules(2).");
    const LearnResult r = learn(t);
    ASSERT_TRUE(r.best);
    EXPECT_EQ(r.best_score, (CostScore{0, 5}));
    EXPECT_EQ(r.best_score, oracle::oracle_optimal(t, 5).best);
}

TEST(LearnProperties, MatchesOracleOnMicroTasks) {
    for (std::uint64_t seed = 100; seed < 115; ++seed) {
        const auto mt = synth::micro_task(seed);
        LearnConfig cfg;
        cfg.max_size = mt.max_size;
        cfg.audit = true;
        const LearnResult r = learn(mt.task, cfg);
        const auto o = oracle::oracle_optimal(mt.task, mt.max_size);
        ASSERT_TRUE(r.best) << "seed " << seed;
        EXPECT_EQ(r.best_score, o.best) << "seed " << seed << "\n" << mt.bias << mt.exs;
        EXPECT_TRUE(r.audit.violations.empty()) << "seed " << seed;
    }
}
