#pragma once

// Learning a finite partial algebra whose language approximates the set of
// normalizing ground terms, by refining a bounded behavioural equivalence.

#include <optional>
#include <string>
#include <vector>

#include "localterm/algebra.hpp"

namespace localterm {

struct DiscoveryParams {
  int c = 3;        // hole depth of the initial contexts
  std::size_t d = 100;  // reduction budget
  Strategy strategy = Strategy::kLeftmostOutermost;
  std::size_t max_states = 256;
  int filler_depth = 1;  // ground arguments of the initial contexts, up to this depth
};

// One layer of a context: f(t1, ..., hole, ..., tk).
struct ContextLayer {
  SymbolId symbol = 0;
  int hole = 0;  // 0-based argument index
  std::vector<Term> others;
};

// Layers from the outermost inwards; no layers is the empty context.
struct Context {
  std::vector<ContextLayer> layers;

  Term plug(const Term& t) const;
  std::size_t depth() const { return layers.size(); }
};

std::string to_string(const Signature& sig, const Context& c);

bool guess_normalizing(const Trs& trs, const Term& t, Strategy strategy, std::size_t d);
bool behavior_distinct(const Trs& trs, const Term& s, const Term& t, const std::vector<Context>& contexts,
                       Strategy strategy, std::size_t d);

// All contexts of depth <= c whose non-hole arguments are fillers, ordered by
// depth, then by layers from the outermost (symbol, hole position, fillers in
// the given order).
std::vector<Context> enumerate_contexts(const Signature& sig, const std::vector<Term>& fillers, int c);

struct Validation {
  bool partial_model = false;
  bool nf_coverage = false;
  bool nf_coverage_checked = false;  // false for non-left-linear systems
  std::vector<std::string> diagnostics;

  bool passed() const { return partial_model && nf_coverage; }
};

struct DiscoveryResult {
  FiniteAlgebra algebra;
  std::vector<Term> representatives;  // state i is represented by representatives[i]
  Validation validated;
  bool empty_language = false;
  bool aborted = false;  // max_states exceeded
  DiscoveryParams params;
  std::size_t contexts = 0;
  std::size_t reductions = 0;
};

DiscoveryResult discover_model(const Trs& trs, const DiscoveryParams& params);

struct EscalationLimits {
  int c_max = 3;
  std::size_t d_max = 400;
};

// Runs discover_model, doubling d up to d_max and then incrementing c, until
// validation passes. All attempts are returned in order; the last one is the
// result.
std::vector<DiscoveryResult> discover_with_escalation(const Trs& trs, const DiscoveryParams& start,
                                                      const EscalationLimits& limits);

// A carrier bijection (index in a -> element of b) commuting with all tables;
// symbols are matched by name.
std::optional<std::vector<Element>> models_isomorphic(const FiniteAlgebra& a, const FiniteAlgebra& b);

// Canonical numbering: elements in the order a breadth-first closure from the
// constants discovers them.
std::vector<Element> canonical_numbering(const FiniteAlgebra& a);

Validation validate_model(const FiniteAlgebra& a, const Trs& trs);

namespace serial {
DiscoveryResult discover_model(const Trs& trs, const DiscoveryParams& params);
}

}  // namespace localterm
