#pragma once

// Finite partial Sigma-algebras (deterministic bottom-up tree automata with
// partial transitions) and the checks that make them partial models.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "localterm/terms.hpp"

namespace localterm {

using Element = std::int32_t;
inline constexpr Element kUndefined = -1;

class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FiniteAlgebra {
 public:
  FiniteAlgebra() = default;
  FiniteAlgebra(Signature signature, int carrier_size);

  const Signature& signature() const { return signature_; }
  int size() const { return size_; }

  // Throws AlgebraError if the entry is already defined or out of range.
  void define(SymbolId f, std::span<const Element> args, Element result);
  void set(SymbolId f, std::span<const Element> args, Element result);
  void undefine(SymbolId f, std::span<const Element> args);

  Element lookup(SymbolId f, std::span<const Element> args) const;
  std::optional<Element> apply(SymbolId f, std::span<const Element> args) const {
    Element e = lookup(f, args);
    if (e == kUndefined) return std::nullopt;
    return e;
  }

  // Dense table of one symbol; tuples are numbered lexicographically with the
  // first argument most significant.
  std::span<const Element> table(SymbolId f) const { return tables_.at(f); }
  std::size_t tuple_count(SymbolId f) const { return tables_.at(f).size(); }
  std::vector<Element> tuple_of(SymbolId f, std::size_t index) const;
  std::size_t index_of(SymbolId f, std::span<const Element> args) const;

  std::size_t entry_count() const;
  bool total() const;

  friend bool operator==(const FiniteAlgebra&, const FiniteAlgebra&) = default;

 private:
  Signature signature_;
  int size_ = 0;
  std::vector<std::vector<Element>> tables_;
};

// Binary relation on a finite carrier as a dense boolean matrix.
class CarrierRelation {
 public:
  CarrierRelation() = default;
  explicit CarrierRelation(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}

  static CarrierRelation identity(int n);
  static CarrierRelation total(int n);
  static CarrierRelation from_pairs(int n, std::span<const std::pair<Element, Element>> pairs);

  int size() const { return n_; }
  bool contains(Element a, Element b) const {
    return bits_[static_cast<std::size_t>(a) * n_ + b] != 0;
  }
  void insert(Element a, Element b);
  std::vector<std::pair<Element, Element>> pairs() const;
  bool empty() const;
  CarrierRelation united(const CarrierRelation& other) const;

  friend bool operator==(const CarrierRelation&, const CarrierRelation&) = default;

 private:
  int n_ = 0;
  std::vector<char> bits_;
};

using Assignment = std::map<std::string, Element>;

struct Counterexample {
  std::size_t rule_index = 0;
  std::vector<std::string> variables;
  std::vector<Element> values;  // parallel to variables
  Element lhs_value = kUndefined;
  std::optional<Element> rhs_value;
  std::string what;  // short description of the violated condition

  friend bool operator==(const Counterexample&, const Counterexample&) = default;
};

struct ModelReport {
  bool verdict = true;
  std::vector<Counterexample> counterexamples;
};

std::string describe(const Signature& sig, const std::vector<Rule>& rules, const Counterexample& c);

// Kleene evaluation: undefined on a missing variable or table entry.
std::optional<Element> interpret(const FiniteAlgebra& a, const Term& t, const Assignment& alpha = {});
bool language_member(const FiniteAlgebra& a, const Term& ground);

std::vector<Element> core(const FiniteAlgebra& a);
bool is_core(const FiniteAlgebra& a);
// Keeps core elements, renumbered in ascending original order. The second
// component maps old elements to new ones (kUndefined for dropped elements).
std::pair<FiniteAlgebra, std::vector<Element>> restrict_to_core_mapped(const FiniteAlgebra& a);
FiniteAlgebra restrict_to_core(const FiniteAlgebra& a);
CarrierRelation restrict_relation(const CarrierRelation& rel, const std::vector<Element>& mapping,
                                  int new_size);

// Partial-model check: lhs defined implies rhs defined and equal. Assignments
// are enumerated exhaustively and partitioned across OpenMP threads;
// counterexamples are ordered by rule, then assignment.
ModelReport check_partial_model(const FiniteAlgebra& a, const Trs& trs);
// lhs defined implies (lhs, rhs) in rel.
ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel, const Trs& trs);
ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel,
                                   const Signature& sig, std::span<const Rule> rules,
                                   std::span<const std::size_t> rule_ids);

// Restricts the monotonicity requirement to selected argument positions
// (1-based) of the entry at `tuple`.
using PositionFilter = std::function<bool(SymbolId, std::span<const Element> tuple, int position)>;

ModelReport check_closed_monotone(const FiniteAlgebra& a, const CarrierRelation& rel,
                                  const PositionFilter& mu = {});

// No cycle of strict ∪ weak contains a strict edge.
bool check_relative_wf(const CarrierRelation& strict, const CarrierRelation& weak);

std::vector<Element> nf_states(const FiniteAlgebra& a, const Trs& trs);

struct RedexCoverage {
  bool verdict = true;
  std::optional<Term> witness;  // undefined ground term without a redex
};

// Decides whether every ground term outside L(a) contains a redex. Throws
// AlgebraError for non-left-linear systems.
RedexCoverage check_undefined_implies_redex_witness(const FiniteAlgebra& a, const Trs& trs);
bool check_undefined_implies_redex(const FiniteAlgebra& a, const Trs& trs);

// L(language) ⊆ L(a) where both algebras share symbol names; symbols of
// `language` absent from `a` are treated as undefined there.
struct Inclusion {
  bool verdict = true;
  std::optional<Term> witness;  // over language.signature()
};
Inclusion language_included(const FiniteAlgebra& language, const FiniteAlgebra& a);

// Rebinds an algebra to a signature containing its symbols by name.
FiniteAlgebra rebind(const FiniteAlgebra& a, const Signature& target);

namespace serial {
// Single-threaded reference implementations kept for differential testing.
ModelReport check_partial_model(const FiniteAlgebra& a, const Trs& trs);
ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel, const Trs& trs);
}  // namespace serial

}  // namespace localterm
