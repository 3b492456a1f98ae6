// Command-line front end. Exit codes: 0 proved/valid, 1 disproved/invalid,
// 2 unknown or exported, 3 usage or input errors.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "localterm/discovery.hpp"
#include "localterm/labeling.hpp"
#include "localterm/parallel.hpp"
#include "localterm/prover.hpp"
#include "localterm/rfc.hpp"
#include "localterm/trs_io.hpp"

namespace lt = localterm;

namespace {

constexpr int kValid = 0;
constexpr int kInvalid = 1;
constexpr int kUnknown = 2;
constexpr int kError = 3;

int exit_code(lt::Outcome o) {
  switch (o) {
    case lt::Outcome::kProved:
      return kValid;
    case lt::Outcome::kDisproved:
      return kInvalid;
    default:
      return kUnknown;
  }
}

lt::Trs load_system(const std::string& path) {
  std::string text = lt::read_file(path);
  std::string ext = std::filesystem::path(path).extension().string();
  return ext == ".srs" ? lt::parse_srs(text) : lt::parse_trs(text);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    lt::write_file(path, text);
  }
}

void print_report(const lt::Signature& sig, const std::vector<lt::Rule>& rules, const lt::ModelReport& rep,
                  const std::string& title) {
  std::cout << title << ": " << (rep.verdict ? "valid" : "invalid") << "\n";
  for (std::size_t k = 0; k < rep.counterexamples.size() && k < 20; ++k) {
    std::cout << "  " << lt::describe(sig, rules, rep.counterexamples[k]) << "\n";
  }
  if (rep.counterexamples.size() > 20) std::cout << "  ... " << rep.counterexamples.size() - 20 << " more\n";
}

std::string list(const std::vector<lt::Element>& xs) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  os << '}';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local termination of term rewriting systems"};
  app.require_subcommand(1);
  int jobs = 0;
  bool verbose = false;
  app.add_option("--jobs", jobs, "Maximal number of threads (default: LOCALTERM_JOBS or all cores)");
  app.add_flag("--verbose", verbose, "Print version information to the error stream");

  std::string trs_path, alg_path, out_path, term_text, strategy = "lo", relation = "eq", script_path;

  auto* validate = app.add_subcommand("validate", "Parse a system and check its rules");
  validate->add_option("system", trs_path)->required();

  auto* rewrite = app.add_subcommand("rewrite", "Print a reduction under a strategy");
  std::size_t steps = 100;
  rewrite->add_option("system", trs_path)->required();
  rewrite->add_option("-t,--term", term_text)->required();
  rewrite->add_option("--strategy", strategy)->check(CLI::IsMember({"lo", "li"}));
  rewrite->add_option("--steps", steps);

  auto* check_model = app.add_subcommand("check-model", "Check a finite algebra against a system");
  check_model->add_option("system", trs_path)->required();
  check_model->add_option("algebra", alg_path)->required();
  check_model->add_option("--relation", relation)->check(CLI::IsMember({"eq", "ge", "strict"}));

  auto* discover = app.add_subcommand("discover", "Learn a partial model of the normalizing terms");
  lt::DiscoveryParams dp;
  lt::EscalationLimits limits{-1, 0};
  discover->add_option("system", trs_path)->required();
  discover->add_option("-c", dp.c, "Context depth");
  discover->add_option("-d", dp.d, "Reduction budget");
  discover->add_option("--strategy", strategy)->check(CLI::IsMember({"lo", "li"}));
  discover->add_option("--max-states", dp.max_states);
  discover->add_option("--filler-depth", dp.filler_depth, "Depth of the ground arguments in the initial contexts");
  discover->add_option("--c-max", limits.c_max, "Escalation ceiling for -c (default: -c)");
  discover->add_option("--d-max", limits.d_max, "Escalation ceiling for -d (default: 4 * -d)");
  discover->add_option("-o,--output", out_path);

  auto* label = app.add_subcommand("label", "Label a system with a finite algebra");
  label->add_option("system", trs_path)->required();
  label->add_option("algebra", alg_path)->required();
  label->add_option("-o,--output", out_path);

  auto* nf = app.add_subcommand("nf-states", "Print the normal-form states and the induced replacement map");
  nf->add_option("system", trs_path)->required();
  nf->add_option("algebra", alg_path)->required();

  lt::ProveOptions po;
  bool lpo_flag = false, mirror_flag = false;
  auto* prove = app.add_subcommand("prove", "Prove global termination");
  prove->add_option("system", trs_path)->required();
  prove->add_option("--coeff-bound", po.coeff_bound);
  prove->add_flag("--lpo", lpo_flag, "Finish with the lexicographic path order");
  prove->add_flag("--mirror", mirror_flag, "Allow reversed rounds on string systems");
  prove->add_option("--export", po.export_path, "Write the unsolved remainder here");
  prove->add_option("-o,--output", out_path, "Write the trace here");

  auto* prove_local = app.add_subcommand("prove-local", "Prove termination on the language of an algebra");
  prove_local->add_option("system", trs_path)->required();
  prove_local->add_option("algebra", alg_path)->required();
  prove_local->add_option("--coeff-bound", po.coeff_bound);
  prove_local->add_option("--export", po.export_path, "Write the labeled remainder here");
  prove_local->add_option("-o,--output", out_path, "Write the trace here");

  auto* check_script = app.add_subcommand("check-script", "Verify a stepwise proof script");
  check_script->add_option("system", trs_path)->required();
  check_script->add_option("script", script_path)->required();

  auto* replay_cmd = app.add_subcommand("replay", "Re-check a saved proof trace");
  replay_cmd->add_option("trace", script_path)->required();

  int search_states = 3;
  std::size_t search_budget = 5'000'000;
  auto* rfc = app.add_subcommand("rfc", "Prove termination of a string system via forward closures");
  rfc->add_option("system", trs_path)->required();
  rfc->add_option("algebra", alg_path);
  rfc->add_option("--search-states", search_states);
  rfc->add_option("--search-budget", search_budget);
  rfc->add_option("--coeff-bound", po.coeff_bound);
  rfc->add_option("-o,--output", out_path, "Write the trace here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  if (jobs > 0) {
    lt::set_max_jobs(jobs);
  } else if (auto env = lt::jobs_from_environment()) {
    lt::set_max_jobs(*env);
  }
  if (verbose) std::cerr << "localterm 1.0 (" << lt::max_jobs() << " threads)\n";

  try {
    if (*validate) {
      lt::Trs trs = load_system(trs_path);
      lt::check_trs(trs);
      std::cout << "ok: " << trs.rules.size() << " rules, " << trs.signature.size() << " symbols\n";
      for (const auto& s : trs.signature.symbols()) std::cout << "  " << s.name << "/" << s.arity << "\n";
      std::cout << "left-linear: " << (lt::is_left_linear(trs) ? "yes" : "no") << "\n";
      return kValid;
    }
    if (*rewrite) {
      lt::Trs trs = load_system(trs_path);
      lt::Term t = lt::parse_term(trs.signature, term_text);
      auto st = lt::parse_strategy(strategy);
      auto trace = lt::reduction_trace(trs, t, st, steps);
      std::cout << "0: " << lt::to_string(trs.signature, t) << "\n";
      for (std::size_t i = 0; i < trace.size(); ++i) {
        std::cout << i + 1 << ": " << lt::to_string(trs.signature, trace[i].result) << "   [rule "
                  << trace[i].rule_index << " at " << lt::to_string(trace[i].position) << ", size "
                  << trace[i].result.size() << "]\n";
      }
      const lt::Term& last = trace.empty() ? t : trace.back().result;
      if (lt::is_normal_form(trs, last)) {
        std::cout << "normal form after " << trace.size() << " steps\n";
      } else {
        std::cout << "no normal form within " << steps << " steps\n";
      }
      return kValid;
    }
    if (*check_model) {
      lt::Trs trs = load_system(trs_path);
      lt::AlgebraFile f = lt::parse_algebra_file(lt::read_file(alg_path));
      lt::FiniteAlgebra a = lt::align_algebra(lt::to_algebra(f), trs.signature);
      lt::ModelReport rep;
      if (relation == "eq") {
        rep = lt::check_partial_model(a, trs);
        print_report(a.signature(), trs.rules, rep, "partial model");
        return rep.verdict ? kValid : kInvalid;
      }
      lt::CarrierRelation rel = relation == "ge" ? lt::ge_relation(f) : lt::strict_relation(f);
      rep = lt::check_relational_model(a, rel, trs);
      print_report(a.signature(), trs.rules, rep, "relational model");
      lt::ModelReport cm = lt::check_closed_monotone(a, rel);
      std::cout << "closed and monotone: " << (cm.verdict ? "valid" : "invalid") << "\n";
      for (std::size_t k = 0; k < cm.counterexamples.size() && k < 20; ++k) {
        std::cout << "  " << cm.counterexamples[k].what << "\n";
      }
      return rep.verdict && cm.verdict ? kValid : kInvalid;
    }
    if (*discover) {
      lt::Trs trs = load_system(trs_path);
      dp.strategy = lt::parse_strategy(strategy);
      if (limits.c_max < 0) limits.c_max = dp.c;
      if (limits.d_max == 0) limits.d_max = dp.d * 4;
      auto attempts = lt::discover_with_escalation(trs, dp, limits);
      for (const auto& r : attempts) {
        std::cerr << "c=" << r.params.c << " d=" << r.params.d << ": " << r.algebra.size() << " states, "
                  << (r.validated.passed() ? "validated" : "not validated") << "\n";
      }
      const auto& r = attempts.back();
      std::vector<std::string> header{
          "discovered with c=" + std::to_string(r.params.c) + " d=" + std::to_string(r.params.d) +
              " strategy=" + std::string(lt::to_string(r.params.strategy)),
          std::string("partial model: ") + (r.validated.partial_model ? "yes" : "no"),
          std::string("undefined implies redex: ") +
              (r.validated.nf_coverage_checked ? (r.validated.nf_coverage ? "yes" : "no") : "not checked"),
          "states: " + std::to_string(r.algebra.size())};
      for (const auto& d : r.validated.diagnostics) header.push_back(d);
      if (r.empty_language) header.push_back("empty language: no normalizing ground term found");
      if (r.aborted) header.push_back("aborted: state limit reached");
      emit(out_path, lt::write_algebra(r.algebra, header));
      if (r.empty_language) return kUnknown;
      return r.validated.passed() && !r.aborted ? kValid : kInvalid;
    }
    if (*label) {
      lt::Trs trs = load_system(trs_path);
      lt::FiniteAlgebra a = lt::to_algebra(lt::parse_algebra_file(lt::read_file(alg_path)));
      lt::Trs sys = trs;
      bool collapsing = false;
      for (const auto& r : sys.rules) collapsing = collapsing || lt::is_collapsing(r);
      if (collapsing) sys = lt::eliminate_collapsing(sys);
      lt::LabeledTrs lab = lt::label_trs(a, sys, lt::LabelOptions{false, true});
      for (const auto& w : lab.warnings) std::cerr << "warning: " << w << "\n";
      std::cerr << lab.trs.rules.size() << " labeled rules\n";
      emit(out_path, lt::write_trs(lab.trs));
      return kValid;
    }
    if (*nf) {
      lt::Trs trs = load_system(trs_path);
      lt::FiniteAlgebra a =
          lt::restrict_to_core(lt::align_algebra(lt::to_algebra(lt::parse_algebra_file(lt::read_file(alg_path))),
                                                 trs.signature));
      auto states = lt::nf_states(a, trs);
      std::cout << "NF states: " << list(states) << "\n";
      lt::LabeledSignature lsig(a);
      lt::ReplacementMap mu = lt::nf_replacement_map(lsig, a, trs);
      for (lt::SymbolId f = 0; f < lsig.signature().size(); ++f) {
        if (lsig.signature().arity(f) == 0) continue;
        std::cout << "mu(" << lsig.signature().name(f) << ") = {";
        for (std::size_t i = 0; i < mu.positions[f].size(); ++i) std::cout << (i ? "," : "") << mu.positions[f][i];
        std::cout << "}\n";
      }
      return kValid;
    }
    if (*prove) {
      lt::Trs trs = load_system(trs_path);
      po.lpo = lpo_flag;
      po.mirror = mirror_flag;
      lt::ProofTrace t = lt::prove_global(trs, po);
      emit(out_path, lt::write_trace(t));
      if (!out_path.empty() && out_path != "-") std::cout << "outcome: " << lt::to_string(t.outcome) << "\n";
      return exit_code(t.outcome);
    }
    if (*prove_local) {
      lt::Trs trs = load_system(trs_path);
      lt::FiniteAlgebra a = lt::to_algebra(lt::parse_algebra_file(lt::read_file(alg_path)));
      lt::ProofTrace t = lt::prove_local(trs, a, po);
      emit(out_path, lt::write_trace(t));
      if (!out_path.empty() && out_path != "-") std::cout << "outcome: " << lt::to_string(t.outcome) << "\n";
      return exit_code(t.outcome);
    }
    if (*check_script || *replay_cmd) {
      lt::ProofTrace t;
      if (*check_script) {
        t = lt::parse_script(load_system(trs_path), lt::read_file(script_path));
      } else {
        t = lt::parse_trace(lt::read_file(script_path));
      }
      lt::ReplayReport rep = lt::replay(t);
      for (std::size_t k = 0; k < rep.steps.size(); ++k) {
        std::cout << "step " << k + 1 << " (" << t.steps[k].tag << "): " << (rep.steps[k].ok ? "ok" : "FAILED") << "\n";
        for (const auto& f : rep.steps[k].failures) std::cout << "  " << f << "\n";
      }
      for (const auto& d : rep.diagnostics) std::cout << d << "\n";
      std::cout << "outcome: " << (rep.proved ? "proved" : "not proved") << "\n";
      return rep.proved ? kValid : kInvalid;
    }
    if (*rfc) {
      lt::Trs srs = load_system(trs_path);
      lt::ProofTrace t;
      if (!alg_path.empty()) {
        lt::FiniteAlgebra a = lt::to_algebra(lt::parse_algebra_file(lt::read_file(alg_path)));
        t = lt::rfc_pipeline(srs, a, po);
      } else {
        lt::ClosingSearch s = lt::search_closing_algebra(srs, search_states, po, search_budget);
        std::cerr << s.candidates << " closing algebras tried" << (s.exhausted ? " (budget exhausted)" : "") << "\n";
        if (!s.algebra) {
          std::cout << "no closing algebra with at most " << search_states << " states led to a proof\n";
          return kUnknown;
        }
        t = s.trace;
      }
      emit(out_path, lt::write_trace(t));
      if (!out_path.empty() && out_path != "-") std::cout << "outcome: " << lt::to_string(t.outcome) << "\n";
      return exit_code(t.outcome);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
