#pragma once

// Global termination of string rewriting via right-hand sides of forward
// closures: an end-marked system, a closing partial model, and labeling.

#include <optional>
#include <string>
#include <vector>

#include "localterm/prover.hpp"

namespace localterm {

struct MarkedSrs {
  Trs base;    // the input over its signature plus the grounding constant
  Trs marked;  // base rules followed by the end-marker rules, over base + marker
  std::vector<Term> seeds;
  SymbolId marker = 0;    // in marked.signature
  SymbolId constant = 0;  // in both signatures
};

// Throws TermError unless the system is string-shaped.
MarkedSrs build_marked(const Trs& srs);

// Seeds defined and a partial model of the marked system. `a` is matched to
// the marked signature by symbol name.
ModelReport check_rfc_closure(const MarkedSrs& m, const FiniteAlgebra& a);

// Minimal words over the base letters undefined from every reachable state,
// up to the given length.
std::vector<std::string> excluded_factors(const MarkedSrs& m, const FiniteAlgebra& a, std::size_t max_length = 4);

ProofTrace rfc_pipeline(const Trs& srs, const FiniteAlgebra& a, const ProveOptions& options = {});

struct ClosingSearch {
  std::optional<FiniteAlgebra> algebra;  // over the marked signature, core-restricted
  ProofTrace trace;                      // of the pipeline run with that algebra
  std::size_t candidates = 0;            // closing algebras tried
  bool exhausted = false;                // search budget spent
};

// Enumerates closing algebras with 2..max_states elements in canonical order
// and runs the pipeline on each until one yields a proof. The last element is
// kept apart for marked words, so the base letters use at most max_states - 1.
ClosingSearch search_closing_algebra(const Trs& srs, int max_states, const ProveOptions& options = {},
                                     std::size_t node_budget = 5'000'000);

}  // namespace localterm
