#pragma once

// Termination proofs: rule removal with linear interpretations, the
// lexicographic path order, the local pipelines, and a replayable trace
// format shared with hand-written proof scripts.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "localterm/algebra.hpp"
#include "localterm/interpretations.hpp"
#include "localterm/trs_io.hpp"

namespace localterm {

// -- lexicographic path order ----------------------------------------------------

// rank[f] > rank[g] means f is above g; -1 marks symbols outside the
// precedence, which are incomparable to everything else.
using Precedence = std::vector<int>;

bool lpo_gt(const Precedence& rank, const Term& s, const Term& t);
bool lpo_ge(const Precedence& rank, const Term& s, const Term& t);

struct LpoOptions {
  std::size_t max_symbols = 12;  // symbols occurring in rules
  std::size_t node_budget = 200'000;
};

// Orients the `strict` rules with >lpo and the others with >=lpo. Returns the
// symbols of a total precedence, greatest first.
std::optional<std::vector<SymbolId>> prove_lpo(const Trs& trs, const std::set<std::size_t>& strict,
                                               const LpoOptions& options = {});
std::optional<std::vector<SymbolId>> prove_lpo(const Trs& trs, const LpoOptions& options = {});

Precedence precedence_from(const Signature& sig, const std::vector<std::string>& greatest_first);

// -- traces --------------------------------------------------------------------------

enum class GoalKind { kGlobal, kLocal, kRelative };
enum class Outcome { kProved, kDisproved, kUnknown, kExported };

std::string_view to_string(GoalKind g);
std::string_view to_string(Outcome o);

struct RemovalStep {
  // transform, stepwise, quasicomb, qremove, linear-removal, lpo-finish, rfc
  std::string tag;
  std::vector<std::size_t> removed;  // indices into the system of the current phase
  bool mirror = false;
  std::vector<std::string> precedence;  // greatest first
  AlgebraFile algebra;                  // finite part (carrier_size 0 if absent) and POLY lines
  std::vector<std::pair<Element, Element>> leads;
  bool leads_total = false;
  std::vector<std::string> notes;

  friend bool operator==(const RemovalStep&, const RemovalStep&) = default;
};

struct ProofTrace {
  GoalKind goal = GoalKind::kGlobal;
  Trs system;
  std::vector<std::size_t> relative;  // rules that may only be weakly decreasing
  std::vector<std::string> seeds;     // ground terms of the starting language
  std::optional<AlgebraFile> language;
  std::vector<RemovalStep> steps;
  Outcome outcome = Outcome::kUnknown;
  std::string loop;         // disproved: a term reaching an instance of itself
  std::string export_path;  // exported: where the remaining problem was written
  std::vector<std::string> diagnostics;
};

// Steps of a transform/rfc phase refer to the labeled system; these helpers
// expose the system each step indexes into.
std::string write_trace(const ProofTrace& trace);
ProofTrace parse_trace(std::string_view text);
// A script is a trace body without the system, which is supplied separately.
ProofTrace parse_script(const Trs& system, std::string_view text);

struct StepReport {
  bool ok = true;
  std::vector<std::string> failures;  // one line per failed check
};

struct ReplayReport {
  bool proved = false;
  std::vector<StepReport> steps;
  std::vector<std::size_t> remaining;  // after the last step, in the final phase
  std::vector<std::string> diagnostics;
};

// Re-runs every checker named by the steps. Each step is checked even if an
// earlier one failed, so a broken step is reported on its own.
ReplayReport replay(const ProofTrace& trace);

ReplayReport check_stepwise_script(const ProofTrace& script);

// -- automated proofs ------------------------------------------------------------------

struct ProveOptions {
  Coef coeff_bound = 3;
  bool lpo = true;
  bool mirror = false;  // allow reversed rounds on string-shaped systems
  std::size_t max_internal_rules = 200;  // larger systems are exported
  std::size_t loop_budget = 2000;        // terms explored per rule by loop detection
  std::string export_path;               // written when the outcome is exported
  std::size_t node_budget = 2'000'000;
};

// Finds l ->+ C[l sigma] for some lhs l; returns the rendered start term.
std::optional<std::string> find_loop(const Trs& trs, std::size_t budget);

ProofTrace prove_global(const Trs& trs, const ProveOptions& options = {});

// Steps appended to an existing trace whose current phase is `trs`.
void append_global_steps(ProofTrace& trace, const Trs& trs, const ProveOptions& options);

ProofTrace prove_local(const Trs& trs, const FiniteAlgebra& a, const ProveOptions& options = {});

}  // namespace localterm
