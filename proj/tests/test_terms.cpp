#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/terms.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

Trs owl() { return parse_trs(fixture("owl.trs")); }

TEST(Terms, HashConsingIsStructural) {
  Trs t = owl();
  Term a = parse_term(t.signature, "@(@(O,x),O)");
  Term b = parse_term(t.signature, "@(@(O,x),O)");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(a.depth(), 2u);
  EXPECT_FALSE(a.ground());
  EXPECT_NE(a, parse_term(t.signature, "@(@(O,y),O)"));
}

TEST(Terms, PositionsAndReplacement) {
  Trs t = owl();
  Term s = parse_term(t.signature, "@(@(O,O),x)");
  auto ps = positions(s);
  ASSERT_EQ(ps.size(), 5u);
  EXPECT_TRUE(ps[0].is_root());
  EXPECT_EQ(to_string(ps[2]), "1.1");
  Term r = replace_at(s, ps[4], parse_term(t.signature, "O"));
  EXPECT_EQ(to_string(t.signature, r), "@(@(O,O),O)");
  EXPECT_EQ(subterm_at(r, ps[1]), parse_term(t.signature, "@(O,O)"));
}

TEST(Terms, MatchAndApply) {
  Trs t = owl();
  const Rule& rule = t.rules[0];
  Term subject = parse_term(t.signature, "@(@(O,@(O,O)),O)");
  auto sigma = match(rule.lhs, subject);
  ASSERT_TRUE(sigma);
  EXPECT_EQ(to_string(t.signature, localterm::apply(*sigma, rule.rhs)), "@(O,@(@(O,O),O))");
  EXPECT_FALSE(match(rule.lhs, parse_term(t.signature, "@(O,O)")));
}

TEST(Terms, NonLinearMatchNeedsEqualBindings) {
  Trs u = parse_trs("(VAR x)\n(RULES f(x,x) -> x\n g(x) -> x\n a -> a)");
  EXPECT_TRUE(match(u.rules[0].lhs, parse_term(u.signature, "f(a,a)")));
  EXPECT_FALSE(match(u.rules[0].lhs, parse_term(u.signature, "f(a,g(a))")));
}

TEST(Rewriting, OwlStepAndNormalForm) {
  Trs t = owl();
  Term s = parse_term(t.signature, "@(@(O,O),O)");
  auto r = reduce(t, s, Strategy::kLeftmostOutermost, 10);
  EXPECT_TRUE(r.reached_nf);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_EQ(to_string(t.signature, r.final), "@(O,@(O,O))");
}

TEST(Rewriting, OwlSelfApplicationDiverges) {
  // O O (O O) reduces to a term containing itself.
  Trs t = owl();
  Term s = parse_term(t.signature, "@(@(O,@(O,O)),@(O,@(O,O)))");
  auto r = reduce(t, s, Strategy::kLeftmostOutermost, 50);
  EXPECT_FALSE(r.reached_nf);
  EXPECT_EQ(r.steps, 50u);
}

TEST(Rewriting, StrategiesPickDifferentRedexes) {
  Trs t = parse_trs(fixture("sflat.trs"));
  Term s = parse_term(t.signature, "@(@(@(S,S),S),@(@(@(S,S),S),S))");
  auto lo = reduction_trace(t, s, Strategy::kLeftmostOutermost, 1);
  auto li = reduction_trace(t, s, Strategy::kLeftmostInnermost, 1);
  ASSERT_EQ(lo.size(), 1u);
  ASSERT_EQ(li.size(), 1u);
  EXPECT_TRUE(lo[0].position.is_root());
  EXPECT_EQ(to_string(li[0].position), "2");
}

TEST(Rewriting, SuccessorsCoverEveryRedex) {
  Trs t = parse_trs(fixture("sflat.trs"));
  Term s = parse_term(t.signature, "@(@(@(S,S),S),@(@(@(S,S),S),S))");
  EXPECT_EQ(one_step_successors(t, s).size(), 2u);
  EXPECT_TRUE(is_normal_form(t, parse_term(t.signature, "@(@(S,S),S)")));
}

TEST(Rewriting, InnermostNormalizerAgreesWithRewriter) {
  Trs t = parse_trs(fixture("cls.trs"));
  const char* samples[] = {"@(@(@(S,S),S),S)", "@(@(@(S,S),S),@(S,S))", "@(@(@(@(S,S),S),S),S)",
                           "@(@(@(S,@(S,S)),S),@(S,S))", "@(@(S,@(S,S)),@(@(S,S),@(S,S)))"};
  for (const char* text : samples) {
    Term s = parse_term(t.signature, text);
    auto ref = reduce(t, s, Strategy::kLeftmostInnermost, 200);
    InnermostNormalizer nz(t, 200);
    auto got = nz.steps(s);
    ASSERT_EQ(got.has_value(), ref.reached_nf) << text;
    if (got) EXPECT_EQ(*got, ref.steps) << text;
  }
}

TEST(Rewriting, InnermostNormalizerReportsBudget) {
  Trs t = owl();
  InnermostNormalizer nz(t, 30);
  EXPECT_FALSE(nz.steps(parse_term(t.signature, "@(@(O,@(O,O)),@(O,@(O,O)))")));
  EXPECT_EQ(nz.steps(parse_term(t.signature, "@(@(O,O),O)")), 1u);
}

TEST(Rewriting, FactorialOfNegativeGrows) {
  Trs t = parse_trs(fixture("fac.trs"));
  auto trace = reduction_trace(t, parse_term(t.signature, "fac(-(0))"), Strategy::kLeftmostOutermost, 60);
  ASSERT_EQ(trace.size(), 60u);
  EXPECT_GT(trace.back().result.size(), trace[5].result.size());
}

TEST(Rewriting, FactorialOfTwo) {
  Trs t = parse_trs(fixture("fac.trs"));
  auto r = reduce(t, parse_term(t.signature, "fac(s(s(0)))"), Strategy::kLeftmostInnermost, 1000);
  ASSERT_TRUE(r.reached_nf);
  EXPECT_EQ(to_string(t.signature, r.final), "s(s(0))");
}

TEST(Transforms, CollapsingEliminationKeepsRulesNonCollapsing) {
  Trs t = parse_trs("(VAR x y)\n(RULES f(x,y) -> x\n g(x) -> f(x,x)\n a -> g(a))");
  EXPECT_TRUE(is_collapsing(t.rules[0]));
  Trs e = eliminate_collapsing(t);
  for (const Rule& r : e.rules) EXPECT_FALSE(is_collapsing(r));
  EXPECT_GT(e.rules.size(), t.rules.size() - 1);
}

TEST(Transforms, MirrorReversesWords) {
  Trs srs = parse_srs(fixture("rfc.srs"));
  Trs m = mirror(srs);
  ASSERT_EQ(m.rules.size(), srs.rules.size());
  EXPECT_EQ(write_srs(mirror(m)), write_srs(srs));
  auto w = word_of(m.rules[3].rhs);
  auto v = word_of(srs.rules[3].rhs);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(w, v);
}

TEST(Family, BoundedFamilyContainsReductsAndSubterms) {
  Trs t = owl();
  Term seed = parse_term(t.signature, "@(@(O,O),O)");
  auto fam = family_bounded(t, std::span<const Term>(&seed, 1), 100, 100);
  EXPECT_FALSE(fam.truncated);
  auto has = [&](const char* s) {
    Term x = parse_term(t.signature, s);
    return std::find(fam.terms.begin(), fam.terms.end(), x) != fam.terms.end();
  };
  EXPECT_TRUE(has("@(O,@(O,O))"));
  EXPECT_TRUE(has("@(O,O)"));
  EXPECT_TRUE(has("O"));
}

TEST(Checks, IllFormedRulesAreRejected) {
  EXPECT_THROW(parse_trs("(VAR x y)\n(RULES f(x) -> y)"), std::exception);
  EXPECT_THROW(parse_trs("(VAR x)\n(RULES x -> f(x))"), std::exception);
}

}  // namespace
