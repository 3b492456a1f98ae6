#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/interpretations.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

LinearInterpretation interp(const Signature& sig, const std::string& polys) {
  return to_interpretation(parse_algebra_file("(CARRIER 1)\n" + polys), sig);
}

TEST(LinearPolys, SymbolicEvaluation) {
  Trs t = parse_trs("(VAR x y)\n(RULES f(x,g(y)) -> g(f(x,y)))");
  auto i = interp(t.signature, "(POLY f 1 2 1)\n(POLY g 3 1)");
  auto p = eval_symbolic(i, t.rules[0].lhs);
  ASSERT_TRUE(p);
  EXPECT_EQ(to_string(*p, {"x", "y"}), "2*x + y + 4");
  EXPECT_EQ(evaluate(i, t.rules[0].rhs, {{"x", 1}, {"y", 5}}), 11u);
  EXPECT_EQ(to_string(LinearPoly{}), "0");
}

TEST(LinearPolys, AbsolutePositiveness) {
  LinearPoly p{3, {{"x", 2}}}, q{2, {{"x", 2}}}, r{0, {{"x", 1}, {"y", 1}}};
  EXPECT_TRUE(poly_ge(p, q, true));
  EXPECT_FALSE(poly_ge(q, p, false));
  EXPECT_TRUE(poly_ge(p, p, false));
  EXPECT_FALSE(poly_ge(p, p, true));
  EXPECT_FALSE(poly_ge(p, r, false));  // y is missing on the left
}

TEST(LinearPolys, UndefinedSymbolsMakeTermsUndefined) {
  Trs t = parse_trs("(VAR x)\n(RULES f(x) -> g(x))");
  auto i = interp(t.signature, "(POLY f 1 1)\n(POLY g undefined)");
  EXPECT_FALSE(eval_symbolic(i, t.rules[0].rhs));
}

TEST(RuleChecks, StrictAndWeak) {
  Trs t = parse_trs("(VAR x)\n(RULES a(b(x)) -> b(a(x)))");
  auto i = interp(t.signature, "(POLY a 0 2)\n(POLY b 1 1)");
  EXPECT_TRUE(check_rule(i, t.rules[0], true));
  auto j = interp(t.signature, "(POLY a 0 1)\n(POLY b 1 1)");
  EXPECT_FALSE(check_rule(j, t.rules[0], true));
  EXPECT_TRUE(check_rule(j, t.rules[0], false));
}

TEST(Monotonicity, FullAndReplacementMap) {
  Trs t = parse_trs("(VAR x y)\n(RULES f(x,y) -> x)");
  auto i = interp(t.signature, "(POLY f 0 1 0)");
  EXPECT_FALSE(check_fully_monotone(i));
  ReplacementMap mu;
  mu.positions = {{1}};
  EXPECT_TRUE(check_mu_monotone(i, mu));
  mu.positions = {{1, 2}};
  EXPECT_FALSE(check_mu_monotone(i, mu));
}

TEST(Search, FindsStrictInterpretation) {
  Trs t = parse_trs("(VAR x)\n(RULES a(b(x)) -> b(a(x)))");
  auto found = search_linear(t, {0}, 3);
  ASSERT_TRUE(found);
  EXPECT_TRUE(check_rule(*found, t.rules[0], true));
  EXPECT_TRUE(check_fully_monotone(*found));
  auto ser = serial::search_linear(t, {0}, 3);
  ASSERT_TRUE(ser);
  EXPECT_TRUE(check_rule(*ser, t.rules[0], true));
}

TEST(Search, NoLinearProofForDuplication) {
  Trs t = parse_trs("(VAR x)\n(RULES f(s(x)) -> f(x)\n d(s(x)) -> s(s(d(x))))");
  EXPECT_TRUE(search_linear(t, {0}, 3));
  Trs loop = parse_trs("(VAR x)\n(RULES f(x) -> f(f(x)))");
  EXPECT_FALSE(search_linear(loop, {0}, 3));
  EXPECT_FALSE(serial::search_linear(loop, {0}, 3));
}

TEST(Search, AllRulesStrictWithoutMonotonicity) {
  Trs t = parse_trs("(VAR x)\n(RULES b(a(x)) -> c(a(x))\n c(x) -> x)");
  auto found = search_linear(t, {0, 1}, 3, SearchConstraints{SearchConstraints::Monotonicity::kNone});
  ASSERT_TRUE(found);
  EXPECT_TRUE(check_rule(*found, t.rules[0], true));
  EXPECT_TRUE(check_rule(*found, t.rules[1], true));
}

}  // namespace
