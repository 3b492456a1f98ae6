#include <gtest/gtest.h>

#include <set>

#include "fixture_path.hpp"
#include "localterm/discovery.hpp"
#include "localterm/labeling.hpp"
#include "localterm/rfc.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

struct Example {
  Trs srs = parse_srs(fixture("rfc.srs"));
  MarkedSrs m = build_marked(srs);
  FiniteAlgebra a = parse_algebra(fixture("rfc.alg"), m.marked.signature);
};

TEST(Rfc, MarkedSystemShape) {
  Example s;
  EXPECT_EQ(s.m.base.rules.size(), 4u);
  EXPECT_EQ(s.m.marked.rules.size(), 6u);
  EXPECT_EQ(s.m.marked.signature.arity(s.m.marker), 1);
  EXPECT_EQ(s.m.marked.signature.arity(s.m.constant), 0);
  EXPECT_EQ(s.m.seeds.size(), 3u);  // the two empty right-hand sides coincide
}

TEST(Rfc, ExampleAlgebraIsClosed) {
  Example s;
  EXPECT_TRUE(check_rfc_closure(s.m, s.a).verdict);
  auto ex = excluded_factors(s.m, s.a);
  EXPECT_NE(std::find(ex.begin(), ex.end(), "b c b"), ex.end());
}

TEST(Rfc, BrokenAlgebraIsNotClosed) {
  Example s;
  std::vector<Element> one{1};
  s.a.undefine(*s.m.marked.signature.find("c"), one);
  EXPECT_FALSE(check_rfc_closure(s.m, s.a).verdict);
}

TEST(Rfc, LabeledSystemHasSixRules) {
  Example s;
  FiniteAlgebra core = restrict_to_core(s.a);
  LabeledTrs l = label_trs(core, s.m.base, LabelOptions{true, false});
  std::set<std::string> got;
  for (const Rule& r : l.trs.rules) got.insert(to_string(l.trs.signature, r));
  std::set<std::string> want{"a^0(x) -> x",
                             "a^1(x) -> x",
                             "b^0(x) -> x",
                             "c^1(c^0(x)) -> a^0(x)",
                             "c^0(c^1(x)) -> a^1(x)",
                             "a^0(b^0(x)) -> b^0(b^0(c^1(a^1(c^0(x)))))"};
  EXPECT_EQ(got, want);
}

TEST(Rfc, PipelineProves) {
  Example s;
  ProofTrace t = rfc_pipeline(s.srs, s.a);
  ASSERT_EQ(t.outcome, Outcome::kProved);
  EXPECT_EQ(t.steps[0].tag, "rfc");
  EXPECT_TRUE(replay(parse_trace(write_trace(t))).proved);
}

TEST(Rfc, SearchRediscoversThreeStates) {
  Example s;
  ClosingSearch cs = search_closing_algebra(s.srs, 3);
  ASSERT_TRUE(cs.algebra);
  EXPECT_EQ(cs.trace.outcome, Outcome::kProved);
  EXPECT_EQ(cs.algebra->size(), 3);
  EXPECT_TRUE(models_isomorphic(*cs.algebra, restrict_to_core(s.a)));
}

}  // namespace
