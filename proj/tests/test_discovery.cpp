#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/discovery.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

TEST(Contexts, EnumerationCountsAndPlugging) {
  Trs owl = parse_trs(fixture("owl.trs"));
  Term o = parse_term(owl.signature, "O");
  auto cs = enumerate_contexts(owl.signature, {o}, 3);
  EXPECT_EQ(cs.size(), 15u);
  EXPECT_EQ(cs[0].depth(), 0u);
  const Context& c = cs[1];
  EXPECT_EQ(to_string(owl.signature, c), "@([],O)");
  EXPECT_EQ(to_string(owl.signature, c.plug(o)), "@(O,O)");
  EXPECT_EQ(enumerate_contexts(owl.signature, {}, 2).size(), 1u);
}

TEST(Guessing, BoundedNormalization) {
  Trs owl = parse_trs(fixture("owl.trs"));
  EXPECT_TRUE(guess_normalizing(owl, parse_term(owl.signature, "@(@(O,O),O)"), Strategy::kLeftmostOutermost, 10));
  EXPECT_FALSE(guess_normalizing(owl, parse_term(owl.signature, "@(@(O,O),O)"), Strategy::kLeftmostOutermost, 1));
  EXPECT_FALSE(guess_normalizing(owl, parse_term(owl.signature, "@(@(O,@(O,O)),@(O,@(O,O)))"),
                                 Strategy::kLeftmostOutermost, 100));
}

TEST(Guessing, ContextsSeparateTerms) {
  Trs owl = parse_trs(fixture("owl.trs"));
  Term o = parse_term(owl.signature, "O");
  Term oo = parse_term(owl.signature, "@(O,O)");
  auto cs = enumerate_contexts(owl.signature, {o, oo}, 1);
  EXPECT_TRUE(behavior_distinct(owl, o, oo, cs, Strategy::kLeftmostOutermost, 50));
  EXPECT_FALSE(behavior_distinct(owl, oo, parse_term(owl.signature, "@(O,@(O,O))"), cs,
                                 Strategy::kLeftmostOutermost, 50));
}

TEST(Isomorphism, RenumberedTablesMatch) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  FiniteAlgebra b = parse_algebra("(CARRIER 2)\n(FUN O -> 1)\n(FUN @ 1 1 -> 0)\n(FUN @ 1 0 -> 0)\n(FUN @ 0 1 -> 0)",
                                  owl.signature);
  auto iso = models_isomorphic(a, b);
  ASSERT_TRUE(iso);
  EXPECT_EQ(*iso, (std::vector<Element>{1, 0}));
  std::vector<Element> t{0, 1};
  b.undefine(*owl.signature.find("@"), t);
  EXPECT_FALSE(models_isomorphic(a, b));
  EXPECT_EQ(canonical_numbering(a).size(), 2u);
}

TEST(Validation, OwlTableValidates) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  Validation v = validate_model(a, owl);
  EXPECT_TRUE(v.passed());
  EXPECT_TRUE(v.nf_coverage_checked);
}

TEST(Discovery, OwlTwoStates) {
  Trs owl = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;
  p.c = 2;
  p.d = 50;
  DiscoveryResult r = discover_model(owl, p);
  ASSERT_EQ(r.algebra.size(), 2);
  EXPECT_TRUE(r.validated.passed());
  EXPECT_FALSE(r.aborted);
  FiniteAlgebra want = parse_algebra(fixture("owl.alg"), owl.signature);
  EXPECT_TRUE(models_isomorphic(r.algebra, want));
  EXPECT_EQ(r.representatives.size(), 2u);
  DiscoveryResult s = serial::discover_model(owl, p);
  EXPECT_EQ(s.algebra, r.algebra);
}

TEST(Discovery, InnermostAgreesOnOwl) {
  Trs owl = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;
  p.c = 3;
  p.d = 100;
  p.strategy = Strategy::kLeftmostInnermost;
  DiscoveryResult r = discover_model(owl, p);
  EXPECT_TRUE(models_isomorphic(r.algebra, parse_algebra(fixture("owl.alg"), owl.signature)));
}

TEST(Discovery, EscalationStopsAtFirstValidatedModel) {
  Trs owl = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;
  p.c = 1;
  p.d = 25;
  auto attempts = discover_with_escalation(owl, p, EscalationLimits{3, 100});
  ASSERT_FALSE(attempts.empty());
  EXPECT_TRUE(attempts.back().validated.passed());
  for (std::size_t i = 0; i + 1 < attempts.size(); ++i) EXPECT_FALSE(attempts[i].validated.passed());
}

TEST(Discovery, EmptyLanguage) {
  Trs t = parse_trs("(RULES a -> a)");
  DiscoveryResult r = discover_model(t, DiscoveryParams{});
  EXPECT_TRUE(r.empty_language);
}

TEST(Discovery, StateLimitAborts) {
  Trs t = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;
  p.c = 2;
  p.d = 50;
  p.max_states = 1;
  DiscoveryResult r = discover_model(t, p);
  EXPECT_TRUE(r.aborted);
}

TEST(Discovery, InvalidParameters) {
  Trs owl = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;
  p.d = 0;
  EXPECT_THROW(discover_model(owl, p), std::invalid_argument);
  EXPECT_THROW(discover_model(parse_trs("(VAR x)\n(RULES f(x) -> f(x))"), DiscoveryParams{}), std::invalid_argument);
}

}  // namespace
