#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/labeling.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

std::vector<std::string> shown(const LabeledTrs& l) {
  std::vector<std::string> out;
  for (const Rule& r : l.trs.rules) out.push_back(to_string(l.trs.signature, r));
  return out;
}

TEST(Mangling, RoundTrip) {
  std::vector<Element> label{1, 0};
  EXPECT_EQ(mangle("@", label), "@^1_0");
  EXPECT_EQ(mangle("O", {}), "O");
  auto d = demangle("@^12_3");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->first, "@");
  EXPECT_EQ(d->second, (std::vector<Element>{12, 3}));
  EXPECT_FALSE(demangle("plain"));
  EXPECT_FALSE(demangle("f^x"));
}

TEST(LabeledSignature, OnlyDefinedTuplesGetSymbols) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  LabeledSignature ls(a);
  EXPECT_EQ(ls.signature().size(), 4u);
  SymbolId app = *owl.signature.find("@");
  std::vector<Element> ok{1, 0}, missing{1, 1};
  ASSERT_TRUE(ls.find(app, ok));
  EXPECT_EQ(ls.signature().name(*ls.find(app, ok)), "@^1_0");
  EXPECT_FALSE(ls.find(app, missing));
  EXPECT_EQ(ls.origin(*ls.find(app, ok)).label, ok);
}

TEST(Labeling, OwlGivesTwoRules) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  LabeledTrs l = label_trs(a, owl);
  EXPECT_EQ(shown(l), (std::vector<std::string>{"@^1_0(@^0_0(O,x),y) -> @^0_1(y,@^0_0(x,y))",
                                                "@^1_0(@^0_1(O,x),y) -> @^0_1(y,@^1_0(x,y))"}));
  EXPECT_EQ(l.source_rule, (std::vector<std::size_t>{0, 0}));
  EXPECT_TRUE(l.warnings.empty());
}

TEST(Labeling, SflatGivesThreeRules) {
  Trs t = parse_trs(fixture("sflat.trs"));
  FiniteAlgebra a = parse_algebra(fixture("sflat.alg"), t.signature);
  LabeledTrs l = label_trs(a, t);
  EXPECT_EQ(shown(l), (std::vector<std::string>{
                          "@^2_0(@^1_0(@^0_0(S,x),y),z) -> @^1_1(@^0_0(x,z),@^0_0(y,z))",
                          "@^2_0(@^1_1(@^0_0(S,x),y),z) -> @^1_2(@^0_0(x,z),@^1_0(y,z))",
                          "@^2_0(@^1_2(@^0_0(S,x),y),z) -> @^1_2(@^0_0(x,z),@^2_0(y,z))"}));
}

// The transcribed 38-state table yields 1881 labeled rules.
TEST(Labeling, ClsRuleCount) {
  Trs t = parse_trs(fixture("cls.trs"));
  FiniteAlgebra a = parse_algebra(fixture("cls.alg"), t.signature);
  LabeledTrs l = label_trs(a, t);
  EXPECT_EQ(l.trs.rules.size(), 1881u);
  LabeledTrs s = serial::label_trs(a, t);
  EXPECT_EQ(s.trs.rules, l.trs.rules);
}

TEST(Labeling, RejectsCollapsingRules) {
  Trs t = parse_trs("(VAR x)\n(RULES f(x) -> x)\n(RULES a -> a)");
  FiniteAlgebra a(t.signature, 1);
  std::vector<Element> z{0}, none;
  a.define(*t.signature.find("f"), z, 0);
  a.define(*t.signature.find("a"), none, 0);
  EXPECT_THROW(label_trs(a, t), AlgebraError);
  EXPECT_EQ(label_trs(a, t, LabelOptions{true, false}).trs.rules.size(), 2u);
}

TEST(Labeling, NonModelIsReported) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  std::vector<Element> t{0, 1};
  a.undefine(*owl.signature.find("@"), t);
  EXPECT_THROW(label_trs(a, owl), AlgebraError);
}

TEST(Labeling, LabelTermFollowsValues) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  LabeledSignature ls(a);
  Term t = parse_term(owl.signature, "@(@(O,O),O)");
  EXPECT_EQ(to_string(ls.signature(), label_term(ls, a, t, {})), "@^1_0(@^0_0(O,O),O)");
  EXPECT_THROW(label_term(ls, a, parse_term(owl.signature, "@(@(O,O),@(O,O))"), {}), AlgebraError);
}

TEST(Labeling, NonCoreAlgebraWarnsOrRestricts) {
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra("(CARRIER 3)\n(FUN O -> 0)\n(FUN @ 0 0 -> 1)\n(FUN @ 0 1 -> 1)\n(FUN @ 1 0 -> 1)\n(FUN @ 2 2 -> 2)",
                                  owl.signature);
  LabeledTrs warned = label_trs(a, owl);
  EXPECT_FALSE(warned.warnings.empty());
  LabeledTrs restricted = label_trs(a, owl, LabelOptions{false, true});
  EXPECT_EQ(restricted.algebra.size(), 2);
  EXPECT_EQ(restricted.trs.rules.size(), 2u);
}

TEST(ReplacementMap, NfPositionsAreExempt) {
  Trs t = parse_trs(fixture("sflat.trs"));
  FiniteAlgebra a = parse_algebra(fixture("sflat.alg"), t.signature);
  LabeledSignature ls(a);
  ReplacementMap mu = nf_replacement_map(ls, a, t);
  SymbolId app = *t.signature.find("@");
  std::vector<Element> l20{2, 0}, l12{1, 2}, l00{0, 0};
  EXPECT_EQ(mu.positions[*ls.find(app, l20)], (std::vector<int>{1}));
  EXPECT_EQ(mu.positions[*ls.find(app, l12)], (std::vector<int>{2}));
  EXPECT_TRUE(mu.positions[*ls.find(app, l00)].empty());
  auto filter = nf_position_filter(a, t);
  EXPECT_TRUE(filter(app, l20, 1));
  EXPECT_FALSE(filter(app, l20, 2));
}

}  // namespace
