#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/prover.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

TEST(TrsFormat, ParsesVariablesAndSkipsUnknownSections) {
  Trs t = parse_trs("(VAR x y)\n(COMMENT anything (nested) goes)\n(RULES\n  f(x,g(y)) -> g(f(x,y))\n  a -> g(a)\n)");
  ASSERT_EQ(t.rules.size(), 2u);
  EXPECT_EQ(t.signature.size(), 3u);
  EXPECT_EQ(t.signature.arity(*t.signature.find("f")), 2);
  EXPECT_TRUE(t.rules[0].lhs.arg(0).is_var());
  EXPECT_EQ(to_string(t.signature, t.rules[1]), "a -> g(a)");
}

TEST(TrsFormat, ErrorsCarryLineAndColumn) {
  try {
    parse_trs("(VAR x)\n(RULES\n  f(x) -> f(x,x)\n)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 1);
  }
  try {
    parse_trs("(VAR x)\n(RULES f(x) g(x))");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("->"), std::string::npos);
  }
  EXPECT_THROW(parse_trs("(VAR x)\n(RULES x(a) -> a)"), ParseError);
  EXPECT_THROW(parse_trs("(RULES f(a) -> a"), ParseError);
}

TEST(TrsFormat, WriteParseRoundTrip) {
  for (const char* name : {"owl.trs", "sflat.trs", "fac.trs", "tm.trs", "parity.trs"}) {
    Trs t = parse_trs(fixture(name));
    Trs u = parse_trs(write_trs(t));
    EXPECT_EQ(t.rules, u.rules) << name;
    EXPECT_EQ(t.signature, u.signature) << name;
  }
}

TEST(SrsFormat, WordsBecomeUnaryTerms) {
  Trs s = parse_srs(fixture("rfc.srs"));
  ASSERT_EQ(s.rules.size(), 4u);
  EXPECT_TRUE(is_string_shaped(s.signature));
  EXPECT_EQ(word_of(s.rules[3].rhs).size(), 5u);
  EXPECT_TRUE(word_of(s.rules[0].rhs).empty());
  Trs again = parse_srs(write_srs(s));
  EXPECT_EQ(again.rules, s.rules);
}

TEST(AlgebraFormat, FixtureRoundTrip) {
  for (const char* name : {"owl.alg", "sflat.alg", "sk.alg", "rfc.alg", "cls.alg"}) {
    AlgebraFile f = parse_algebra_file(fixture(name));
    EXPECT_EQ(parse_algebra_file(write_algebra_file(f)), f) << name;
  }
}

TEST(AlgebraFormat, TablesAndRelations) {
  AlgebraFile f = parse_algebra_file(fixture("sk.alg"));
  EXPECT_EQ(f.carrier_size, 3);
  FiniteAlgebra a = to_algebra(f);
  SymbolId app = *a.signature().find("@");
  std::vector<Element> args{1, 2};
  EXPECT_EQ(a.lookup(app, args), 2);
  args = {2, 2};
  EXPECT_EQ(a.lookup(app, args), kUndefined);
  CarrierRelation ge = ge_relation(f);
  EXPECT_TRUE(ge.contains(2, 0));
  EXPECT_FALSE(ge.contains(0, 2));
}

TEST(AlgebraFormat, Diagnostics) {
  EXPECT_THROW(parse_algebra_file("(FUN a -> 0)"), ParseError);
  EXPECT_THROW(parse_algebra_file("(CARRIER 2)\n(FUN a -> 2)"), ParseError);
  EXPECT_THROW(parse_algebra_file("(CARRIER 2)\n(FUN a -> 0)\n(FUN a -> 1)"), ParseError);
  EXPECT_THROW(parse_algebra_file("(CARRIER 2)\n(BOGUS)"), ParseError);
  try {
    parse_algebra_file("(CARRIER 2)\n\n  (FUN a -> x)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(AlgebraFormat, PolyLines) {
  AlgebraFile f = parse_algebra_file("(CARRIER 1)\n(POLY f 2 0 3)\n(POLY g undefined)\n(POLY a 1)");
  ASSERT_EQ(f.polys.size(), 3u);
  ASSERT_TRUE(f.polys[0].form);
  EXPECT_EQ(f.polys[0].form->constant, 2u);
  EXPECT_EQ(f.polys[0].form->coefs, (std::vector<Coef>{0, 3}));
  EXPECT_FALSE(f.polys[1].form);
  EXPECT_EQ(parse_algebra_file(write_algebra_file(f)), f);
}

TEST(SExpressions, QuotedAtomsAndPositions) {
  auto xs = parse_sexprs("; comment\n(SEED \"f(s(0))\" plain)\n(A (B c))");
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_EQ(xs[0].head(), "SEED");
  EXPECT_TRUE(xs[0].items[1].quoted);
  EXPECT_EQ(xs[0].items[1].atom, "f(s(0))");
  EXPECT_EQ(xs[1].line, 3);
  EXPECT_EQ(quote("a\"b"), "\"a\\\"b\"");
  EXPECT_THROW(parse_sexprs("(A (B)"), ParseError);
}

TEST(TraceFormat, ScriptRoundTrip) {
  Trs tm = parse_trs(fixture("tm.trs"));
  ProofTrace t = parse_script(tm, fixture("tm.script"));
  ASSERT_EQ(t.steps.size(), 3u);
  ProofTrace u = parse_trace(write_trace(t));
  EXPECT_EQ(u.steps, t.steps);
  EXPECT_EQ(u.system.rules, t.system.rules);
  EXPECT_EQ(u.goal, t.goal);
  EXPECT_EQ(u.language, t.language);
}

}  // namespace
