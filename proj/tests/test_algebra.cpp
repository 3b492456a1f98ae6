#include <gtest/gtest.h>

#include "fixture_path.hpp"
#include "localterm/algebra.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

struct Loaded {
  Trs trs;
  FiniteAlgebra a;
};

Loaded load(const char* trs, const char* alg) {
  Loaded l{parse_trs(fixture(trs)), {}};
  l.a = parse_algebra(fixture(alg), l.trs.signature);
  return l;
}

TEST(Algebra, DefineLookupUndefine) {
  Signature sig;
  SymbolId a = sig.add("a", 0), f = sig.add("f", 2);
  FiniteAlgebra alg(sig, 3);
  std::vector<Element> none, t{1, 2};
  alg.define(a, none, 0);
  alg.define(f, t, 2);
  EXPECT_EQ(alg.lookup(f, t), 2);
  EXPECT_EQ(alg.entry_count(), 2u);
  EXPECT_EQ(alg.tuple_of(f, alg.index_of(f, t)), t);
  EXPECT_THROW(alg.define(f, t, 1), AlgebraError);
  alg.undefine(f, t);
  EXPECT_FALSE(alg.apply(f, t));
  EXPECT_FALSE(alg.total());
}

TEST(Algebra, InterpretationIsStrict) {
  auto [trs, a] = load("owl.trs", "owl.alg");
  EXPECT_EQ(interpret(a, parse_term(trs.signature, "@(@(O,O),O)")), 1);
  EXPECT_FALSE(interpret(a, parse_term(trs.signature, "@(@(O,O),@(O,O))")));
  EXPECT_FALSE(interpret(a, parse_term(trs.signature, "@(x,O)")));
  EXPECT_EQ(interpret(a, parse_term(trs.signature, "@(x,O)"), {{"x", 0}}), 1);
  EXPECT_TRUE(language_member(a, parse_term(trs.signature, "@(O,@(O,O))")));
}

TEST(PartialModel, OwlTableIsAModel) {
  auto [trs, a] = load("owl.trs", "owl.alg");
  EXPECT_TRUE(check_partial_model(a, trs).verdict);
  EXPECT_TRUE(serial::check_partial_model(a, trs).verdict);
}

TEST(PartialModel, RemovingAnEntryYieldsCounterexample) {
  auto [trs, a] = load("owl.trs", "owl.alg");
  std::vector<Element> t{0, 1};
  a.undefine(*a.signature().find("@"), t);
  ModelReport rep = check_partial_model(a, trs);
  ASSERT_FALSE(rep.verdict);
  ASSERT_FALSE(rep.counterexamples.empty());
  const Counterexample& c = rep.counterexamples[0];
  EXPECT_EQ(c.rule_index, 0u);
  EXPECT_NE(c.lhs_value, kUndefined);
  EXPECT_FALSE(c.rhs_value);
  EXPECT_FALSE(describe(trs.signature, trs.rules, c).empty());
  EXPECT_EQ(serial::check_partial_model(a, trs).counterexamples, rep.counterexamples);
}

TEST(PartialModel, ClsTableIsAModel) {
  auto [trs, a] = load("cls.trs", "cls.alg");
  EXPECT_EQ(a.size(), 38);
  EXPECT_TRUE(check_partial_model(a, trs).verdict);
  EXPECT_TRUE(check_undefined_implies_redex(a, trs));
}

TEST(Core, UnreachableElementsAreDropped) {
  Signature sig;
  SymbolId a = sig.add("a", 0), g = sig.add("g", 1);
  FiniteAlgebra alg(sig, 3);
  std::vector<Element> none, zero{0}, two{2};
  alg.define(a, none, 0);
  alg.define(g, zero, 1);
  alg.define(g, two, 0);
  EXPECT_EQ(core(alg), (std::vector<Element>{0, 1}));
  EXPECT_FALSE(is_core(alg));
  auto [r, mapping] = restrict_to_core_mapped(alg);
  EXPECT_EQ(r.size(), 2);
  EXPECT_EQ(mapping[2], kUndefined);
  EXPECT_EQ(r.entry_count(), 2u);
  EXPECT_TRUE(is_core(r));
}

TEST(NfStates, OwlAndSflat) {
  auto owl = load("owl.trs", "owl.alg");
  EXPECT_EQ(nf_states(owl.a, owl.trs), (std::vector<Element>{0}));
  auto sf = load("sflat.trs", "sflat.alg");
  EXPECT_EQ(nf_states(sf.a, sf.trs), (std::vector<Element>{0, 1}));
}

TEST(RelativeWf, StrictCycleIsRejected) {
  std::pair<Element, Element> s[] = {{1, 0}};
  std::pair<Element, Element> w[] = {{0, 0}, {1, 1}};
  auto strict = CarrierRelation::from_pairs(2, s);
  auto weak = CarrierRelation::from_pairs(2, w);
  EXPECT_TRUE(check_relative_wf(strict, weak));
  weak.insert(0, 1);
  EXPECT_FALSE(check_relative_wf(strict, weak));
  EXPECT_FALSE(check_relative_wf(CarrierRelation::identity(2), CarrierRelation(2)));
}

TEST(RelationalModel, SkWithExtraPairs) {
  Trs trs = parse_trs(fixture("sk.trs"));
  AlgebraFile f = parse_algebra_file(fixture("sk.alg"));
  FiniteAlgebra a = to_algebra(f, trs.signature);
  CarrierRelation ge = ge_relation(f);
  EXPECT_TRUE(check_relational_model(a, ge, trs).verdict);
  EXPECT_TRUE(check_closed_monotone(a, ge).verdict);
  EXPECT_FALSE(check_partial_model(a, trs).verdict);
}

TEST(RelationalModel, MissingPairBreaksMonotonicity) {
  Trs trs = parse_trs(fixture("sk.trs"));
  AlgebraFile f = parse_algebra_file(fixture("sk.alg"));
  FiniteAlgebra a = to_algebra(f, trs.signature);
  std::erase(f.ge_pairs, std::pair<Element, Element>{2, 1});
  CarrierRelation ge = ge_relation(f);
  EXPECT_FALSE(check_relational_model(a, ge, trs).verdict && check_closed_monotone(a, ge).verdict);
}

TEST(LanguageInclusion, WitnessForStrictSuperset) {
  auto [trs, a] = load("owl.trs", "owl.alg");
  FiniteAlgebra total(trs.signature, 1);
  std::vector<Element> none, zz{0, 0};
  total.define(*trs.signature.find("O"), none, 0);
  total.define(*trs.signature.find("@"), zz, 0);
  EXPECT_TRUE(language_included(a, total).verdict);
  Inclusion inc = language_included(total, a);
  ASSERT_FALSE(inc.verdict);
  ASSERT_TRUE(inc.witness);
  EXPECT_FALSE(interpret(a, *inc.witness));
}

TEST(UndefinedImpliesRedex, OwlModelCovers) {
  auto owl = load("owl.trs", "owl.alg");
  auto cov = check_undefined_implies_redex_witness(owl.a, owl.trs);
  EXPECT_TRUE(cov.verdict);
  EXPECT_FALSE(cov.witness);
}

TEST(UndefinedImpliesRedex, SflatModelMissesNormalForms) {
  auto sf = load("sflat.trs", "sflat.alg");
  auto cov = check_undefined_implies_redex_witness(sf.a, sf.trs);
  ASSERT_FALSE(cov.verdict);
  EXPECT_TRUE(is_normal_form(sf.trs, *cov.witness));
  EXPECT_FALSE(interpret(sf.a, *cov.witness));
}

TEST(UndefinedImpliesRedex, WitnessWhenTooSmall) {
  auto owl = load("owl.trs", "owl.alg");
  std::vector<Element> t{0, 1};
  owl.a.undefine(*owl.a.signature().find("@"), t);
  auto cov = check_undefined_implies_redex_witness(owl.a, owl.trs);
  ASSERT_FALSE(cov.verdict);
  ASSERT_TRUE(cov.witness);
  EXPECT_TRUE(is_normal_form(owl.trs, *cov.witness));
}

}  // namespace
