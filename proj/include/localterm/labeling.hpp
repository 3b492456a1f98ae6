#pragma once

// Semantic labeling by argument-value tuples.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "localterm/algebra.hpp"

namespace localterm {

struct LabeledSymbol {
  SymbolId base = 0;
  std::vector<Element> label;
};

// f^a1_a2...; nullary symbols keep their name.
std::string mangle(const std::string& base, std::span<const Element> label);
// Inverse of mangle on names containing '^'; nullopt for plain names.
std::optional<std::pair<std::string, std::vector<Element>>> demangle(const std::string& name);

// The labeled signature: one symbol per defined table entry, ordered by base
// symbol and then lexicographically by label.
class LabeledSignature {
 public:
  LabeledSignature() = default;
  explicit LabeledSignature(const FiniteAlgebra& a);

  const Signature& signature() const { return signature_; }
  const Signature& base() const { return base_; }
  int carrier_size() const { return n_; }
  const LabeledSymbol& origin(SymbolId labeled) const { return origin_.at(labeled); }
  std::optional<SymbolId> find(SymbolId base, std::span<const Element> label) const;

 private:
  Signature signature_;
  Signature base_;
  int n_ = 0;
  std::vector<LabeledSymbol> origin_;
  std::vector<std::vector<std::int64_t>> by_base_;  // tuple index -> labeled id or -1
};

struct ReplacementMap {
  std::vector<std::vector<int>> positions;  // per labeled symbol, 1-based, ascending

  bool contains(SymbolId f, int position) const;
};

// Throws AlgebraError when the term is undefined under alpha.
Term label_term(const LabeledSignature& lsig, const FiniteAlgebra& a, const Term& t, const Assignment& alpha);

struct LabelOptions {
  bool allow_collapsing = false;
  bool restrict_core = false;
};

struct LabeledTrs {
  FiniteAlgebra algebra;  // the algebra actually used (possibly core-restricted)
  LabeledSignature lsig;
  Trs trs;                               // over lsig.signature()
  std::vector<std::size_t> source_rule;  // parallel to trs.rules
  std::vector<std::string> warnings;
};

// The algebra may range over more symbols than the system; symbol names are
// matched and the system's ids are preserved.
LabeledTrs label_trs(const FiniteAlgebra& a, const Trs& trs, const LabelOptions& options = {});

// μ(f^λ) = positions i with λ_i not an NF state.
ReplacementMap nf_replacement_map(const LabeledSignature& lsig, const FiniteAlgebra& a, const Trs& trs);
// The same map as a filter over the unlabeled algebra's table entries.
PositionFilter nf_position_filter(const FiniteAlgebra& a, const Trs& trs);

// Aligns an algebra with a system: the returned signature extends the
// system's with the algebra-only symbols.
FiniteAlgebra align_algebra(const FiniteAlgebra& a, const Signature& system);

namespace serial {
LabeledTrs label_trs(const FiniteAlgebra& a, const Trs& trs, const LabelOptions& options = {});
}

}  // namespace localterm
