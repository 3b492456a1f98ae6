// Acceptance run: one PASS/FAIL line per criterion. Arguments select
// criteria by number; without arguments all of them run.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "fixture_path.hpp"
#include "localterm/discovery.hpp"
#include "localterm/labeling.hpp"
#include "localterm/prover.hpp"
#include "localterm/rfc.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> shown(const Trs& t) {
  std::vector<std::string> out;
  for (const Rule& r : t.rules) out.push_back(to_string(t.signature, r));
  return out;
}

void owl_discovery(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  Trs owl = parse_trs(fixture("owl.trs"));
  DiscoveryParams p;  // c = 3, d = 100, leftmost-outermost
  auto attempts = discover_with_escalation(owl, p, EscalationLimits{3, 400});
  const DiscoveryResult& r = attempts.back();
  double s = seconds_since(t0);
  v.detail << r.algebra.size() << " states, " << attempts.size() << " attempt(s), " << s << " s";
  v.require(r.algebra.size() == 2, "2 states");
  v.require(models_isomorphic(r.algebra, parse_algebra(fixture("owl.alg"), owl.signature)).has_value(),
            "isomorphic to the Owl table");
  v.require(r.validated.passed(), "validation");
  v.require(s < 10, "under 10 s");
}

void owl_end_to_end(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  Trs owl = parse_trs(fixture("owl.trs"));
  FiniteAlgebra a = parse_algebra(fixture("owl.alg"), owl.signature);
  LabeledTrs l = label_trs(a, owl);
  v.require(shown(l.trs) == std::vector<std::string>{"@^1_0(@^0_0(O,x),y) -> @^0_1(y,@^0_0(x,y))",
                                                     "@^1_0(@^0_1(O,x),y) -> @^0_1(y,@^1_0(x,y))"},
            "the two displayed rules");
  ProofTrace p = prove_local(owl, a);
  double s = seconds_since(t0);
  v.detail << l.trs.rules.size() << " labeled rules, outcome " << to_string(p.outcome) << ", " << s << " s";
  v.require(p.outcome == Outcome::kProved && p.steps.back().tag == "lpo-finish", "LPO proof");
  v.require(replay(p).proved, "replay");
  v.require(s < 10, "under 10 s");
}

void sflat(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  Trs t = parse_trs(fixture("sflat.trs"));
  FiniteAlgebra a = parse_algebra(fixture("sflat.alg"), t.signature);
  LabeledTrs l = label_trs(a, t);
  v.require(shown(l.trs) == std::vector<std::string>{"@^2_0(@^1_0(@^0_0(S,x),y),z) -> @^1_1(@^0_0(x,z),@^0_0(y,z))",
                                                     "@^2_0(@^1_1(@^0_0(S,x),y),z) -> @^1_2(@^0_0(x,z),@^1_0(y,z))",
                                                     "@^2_0(@^1_2(@^0_0(S,x),y),z) -> @^1_2(@^0_0(x,z),@^2_0(y,z))"},
            "the three displayed rules");
  bool lpo = prove_lpo(l.trs).has_value();
  double s = seconds_since(t0);
  v.detail << l.trs.rules.size() << " labeled rules, LPO " << (lpo ? "found" : "not found") << ", " << s << " s";
  v.require(lpo, "LPO proof");
  v.require(s < 5, "under 5 s");
}

void cls(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  Trs t = parse_trs(fixture("cls.trs"));
  DiscoveryParams p;
  p.c = 3;
  p.d = 100;
  p.strategy = Strategy::kLeftmostInnermost;
  auto attempts = discover_with_escalation(t, p, EscalationLimits{4, 400});
  const DiscoveryResult& r = attempts.back();
  double s = seconds_since(t0);
  v.detail << r.algebra.size() << " states after " << attempts.size() << " attempt(s) (c=" << r.params.c
           << ", d=" << r.params.d << "), " << s << " s";
  v.require(r.algebra.size() == 38, "38 states");
  v.require(models_isomorphic(r.algebra, parse_algebra(fixture("cls.alg"), t.signature)).has_value(),
            "isomorphic to the 38-state table");
  v.require(r.validated.passed(), "validation");
  v.require(s < 1800, "under 30 min");
  auto path = std::filesystem::temp_directory_path() / "localterm_cls_labeled.trs";
  ProveOptions po;
  po.export_path = path.string();
  ProofTrace pt = prove_local(t, r.algebra, po);
  std::size_t exported = 0;
  if (pt.outcome == Outcome::kExported) exported = parse_trs(read_file(path.string())).rules.size();
  std::filesystem::remove(path);
  v.detail << ", exported " << exported << " labeled rules";
  v.require(pt.outcome == Outcome::kExported, "export of the labeled system");
  v.require(exported == 1800, "exactly 1800 labeled rules");
}

void rfc(Verdict& v) {
  auto t0 = std::chrono::steady_clock::now();
  Trs srs = parse_srs(fixture("rfc.srs"));
  MarkedSrs m = build_marked(srs);
  FiniteAlgebra a = parse_algebra(fixture("rfc.alg"), m.marked.signature);
  v.require(check_rfc_closure(m, a).verdict, "closure");
  LabeledTrs l = label_trs(restrict_to_core(a), m.base, LabelOptions{true, false});
  auto rules = shown(l.trs);
  std::set<std::string> got(rules.begin(), rules.end());
  v.require(got == std::set<std::string>{"a^0(x) -> x", "a^1(x) -> x", "b^0(x) -> x", "c^1(c^0(x)) -> a^0(x)",
                                         "c^0(c^1(x)) -> a^1(x)", "a^0(b^0(x)) -> b^0(b^0(c^1(a^1(c^0(x)))))"},
            "the six displayed rules");
  ProveOptions po;
  po.mirror = true;
  ProofTrace p = rfc_pipeline(srs, a, po);
  double s = seconds_since(t0);
  v.require(p.outcome == Outcome::kProved, "proof by linear removal");
  v.require(s < 60, "under 60 s");
  ClosingSearch cs = search_closing_algebra(srs, 3, po);
  v.detail << l.trs.rules.size() << " labeled rules, outcome " << to_string(p.outcome) << " in " << s
           << " s; search: " << (cs.algebra ? std::to_string(cs.algebra->size()) + " states" : std::string("none"))
           << " after " << cs.candidates << " candidates";
  v.require(cs.algebra && cs.algebra->size() == 3 && cs.trace.outcome == Outcome::kProved,
            "search finds a 3-state closing algebra");
}

void turing_machine(Verdict& v) {
  Trs t = parse_trs(fixture("tm.trs"));
  const ProofTrace base = parse_script(t, fixture("tm.script"));
  v.require(check_stepwise_script(base).proved, "script proved");
  int tried = 0, broke = 0, leaked = 0;
  std::vector<int> per_step(base.steps.size(), 0);
  for (std::size_t k = 0; k < base.steps.size(); ++k) {
    for (std::size_t p = 0; p < base.steps[k].algebra.polys.size(); ++p) {
      if (!base.steps[k].algebra.polys[p].form) continue;
      for (std::size_t c = 0; c <= base.steps[k].algebra.polys[p].form->coefs.size(); ++c) {
        for (int delta : {1, -1}) {
          ProofTrace s = base;
          AffineForm& f = *s.steps[k].algebra.polys[p].form;
          Coef& slot = c == 0 ? f.constant : f.coefs[c - 1];
          if (delta < 0 && slot == 0) continue;
          slot = delta > 0 ? slot + 1 : slot - 1;
          ++tried;
          ReplayReport r = check_stepwise_script(s);
          for (std::size_t j = 0; j < r.steps.size(); ++j) {
            if (j != k && !r.steps[j].ok) ++leaked;
          }
          if (!r.steps[k].ok) {
            ++broke;
            ++per_step[k];
          }
        }
      }
    }
  }
  v.detail << tried << " single-coefficient perturbations, " << broke << " rejected by their own step, " << leaked
           << " affecting another step";
  v.require(leaked == 0, "perturbations stay local");
  for (std::size_t k = 0; k < per_step.size(); ++k) {
    v.require(per_step[k] > 0, "step " + std::to_string(k + 1) + " detects a perturbation");
  }
}

void sk(Verdict& v) {
  Trs t = parse_trs(fixture("sk.trs"));
  AlgebraFile f = parse_algebra_file(fixture("sk.alg"));
  FiniteAlgebra a = to_algebra(f, t.signature);
  CarrierRelation ge = ge_relation(f);
  bool rel = check_relational_model(a, ge, t).verdict;
  bool mono = check_closed_monotone(a, ge).verdict;
  v.detail << "relational model " << (rel ? "valid" : "invalid") << ", closed and monotone "
           << (mono ? "valid" : "invalid");
  v.require(rel && mono, "both checks");
}

void properties(Verdict& v) {
  std::string cmd = std::string(LOCALTERM_PROPERTIES) + " --gtest_brief=1 > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  v.detail << "property suites exit status " << rc;
  v.require(rc == 0, "all property suites");
}

void factorial(Verdict& v) {
  Trs t = parse_trs(fixture("fac.trs"));
  auto nf = reduce(t, parse_term(t.signature, "fac(s(s(s(0))))"), Strategy::kLeftmostInnermost, 10'000);
  v.require(nf.reached_nf && to_string(t.signature, nf.final) == "s(s(s(s(s(s(0))))))", "fac(3) = 6");
  auto trace = reduction_trace(t, parse_term(t.signature, "fac(-(x))"), Strategy::kLeftmostOutermost, 200);
  std::uint64_t early = trace.size() > 20 ? trace[19].result.size() : 0;
  std::uint64_t late = trace.empty() ? 0 : trace.back().result.size();
  v.detail << "fac(-(x)): " << trace.size() << " steps, size " << early << " after 20 and " << late << " after "
           << trace.size();
  v.require(trace.size() == 200 && late > early, "unbounded growth");
  ProofTrace g = prove_global(t);
  v.detail << "; automated global outcome " << to_string(g.outcome);
  v.require(g.outcome != Outcome::kProved, "global proof is out of reach");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"Owl model discovery", owl_discovery},
      {"Owl labeling and proof", owl_end_to_end},
      {"S-flat labeling and proof", sflat},
      {"CL(S) discovery, labeling and export", cls},
      {"RFC closure, labeling, proof and search", rfc},
      {"TM stepwise script and perturbations", turing_machine},
      {"SK monotone partial model", sk},
      {"Property suites", properties},
      {"Factorial system", factorial}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << v.detail.str()
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
