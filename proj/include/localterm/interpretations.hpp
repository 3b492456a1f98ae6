#pragma once

// Partial affine interpretations over the naturals.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "localterm/labeling.hpp"

namespace localterm {

using Coef = std::uint64_t;

class InterpretationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// c0 + c1*x1 + ... + ck*xk
struct AffineForm {
  Coef constant = 0;
  std::vector<Coef> coefs;

  static AffineForm identity(int arity);
  bool is_identity() const;
  friend bool operator==(const AffineForm&, const AffineForm&) = default;
};

class LinearInterpretation {
 public:
  LinearInterpretation() = default;
  // All symbols start UNDEFINED.
  explicit LinearInterpretation(Signature signature);
  // Identity on non-constants, 0 on constants.
  static LinearInterpretation identity(Signature signature);

  const Signature& signature() const { return signature_; }
  const std::optional<AffineForm>& form(SymbolId f) const { return forms_.at(f); }
  void set(SymbolId f, AffineForm form);
  void set_undefined(SymbolId f) { forms_.at(f).reset(); }

  friend bool operator==(const LinearInterpretation&, const LinearInterpretation&) = default;

 private:
  Signature signature_;
  std::vector<std::optional<AffineForm>> forms_;
};

struct LinearPoly {
  Coef constant = 0;
  std::map<std::string, Coef> coefs;  // zero coefficients are omitted

  friend bool operator==(const LinearPoly&, const LinearPoly&) = default;
};

// Variables printed in the given order, then any others by name.
std::string to_string(const LinearPoly& p, const std::vector<std::string>& order = {});

// Throws InterpretationError on coefficient overflow.
std::optional<LinearPoly> eval_symbolic(const LinearInterpretation& i, const Term& t);
// Evaluates at a point; nullopt when undefined.
std::optional<Coef> evaluate(const LinearInterpretation& i, const Term& t, const std::map<std::string, Coef>& alpha);

// Absolute positiveness.
bool poly_ge(const LinearPoly& p, const LinearPoly& q, bool strict);
bool check_rule(const LinearInterpretation& i, const Rule& rule, bool strict);
bool check_mu_monotone(const LinearInterpretation& i, const ReplacementMap& mu);
// Every position of every defined symbol has coefficient >= 1.
bool check_fully_monotone(const LinearInterpretation& i);
// i ranges over lsig.signature().
bool check_label_compat(const LinearInterpretation& i, const LabeledSignature& lsig, const CarrierRelation& ge);

struct SearchConstraints {
  enum class Monotonicity { kFull, kReplacementMap, kNone };
  Monotonicity monotonicity = Monotonicity::kFull;
  const ReplacementMap* mu = nullptr;           // used with kReplacementMap
  const LabeledSignature* label_sig = nullptr;  // label compatibility when set
  const CarrierRelation* ge = nullptr;
  std::size_t node_budget = 2'000'000;  // candidate forms tried before giving up
};

// Finds the first interpretation in canonical order (fewer non-identity
// symbols first, then lexicographic coefficient vectors) orienting the
// target rules strictly and all other rules weakly.
std::optional<LinearInterpretation> search_linear(const Trs& trs, const std::set<std::size_t>& strict_target,
                                                  Coef coeff_bound, const SearchConstraints& constraints = {});

namespace serial {
std::optional<LinearInterpretation> search_linear(const Trs& trs, const std::set<std::size_t>& strict_target,
                                                  Coef coeff_bound, const SearchConstraints& constraints = {});
}

}  // namespace localterm
