#include "localterm/interpretations.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

namespace localterm {

namespace {

bool mul_overflow(Coef a, Coef b, Coef& out) { return __builtin_mul_overflow(a, b, &out); }
bool add_overflow(Coef a, Coef b, Coef& out) { return __builtin_add_overflow(a, b, &out); }

}  // namespace

AffineForm AffineForm::identity(int arity) {
  return AffineForm{0, std::vector<Coef>(static_cast<std::size_t>(arity), 1)};
}

bool AffineForm::is_identity() const {
  return constant == 0 && std::all_of(coefs.begin(), coefs.end(), [](Coef c) { return c == 1; });
}

LinearInterpretation::LinearInterpretation(Signature signature)
    : signature_(std::move(signature)), forms_(signature_.size()) {}

LinearInterpretation LinearInterpretation::identity(Signature signature) {
  LinearInterpretation i(std::move(signature));
  for (SymbolId f = 0; f < i.signature_.size(); ++f) i.forms_[f] = AffineForm::identity(i.signature_.arity(f));
  return i;
}

void LinearInterpretation::set(SymbolId f, AffineForm form) {
  if (static_cast<int>(form.coefs.size()) != signature_.arity(f)) {
    throw InterpretationError("coefficient count does not match the arity of '" + signature_.name(f) + "'");
  }
  forms_.at(f) = std::move(form);
}

std::string to_string(const LinearPoly& p, const std::vector<std::string>& order) {
  std::ostringstream os;
  bool first = true;
  auto term = [&](const std::string& v, Coef c) {
    if (c == 0) return;
    os << (first ? "" : " + ");
    if (c != 1) os << c << "*";
    os << v;
    first = false;
  };
  for (const auto& v : order) {
    auto it = p.coefs.find(v);
    if (it != p.coefs.end()) term(v, it->second);
  }
  for (const auto& [v, c] : p.coefs) {
    if (std::find(order.begin(), order.end(), v) == order.end()) term(v, c);
  }
  if (p.constant != 0 || first) os << (first ? "" : " + ") << p.constant;
  return os.str();
}

std::optional<LinearPoly> eval_symbolic(const LinearInterpretation& i, const Term& t) {
  if (t.is_var()) {
    LinearPoly p;
    p.coefs[t.var_name()] = 1;
    return p;
  }
  const auto& form = i.form(t.symbol());
  if (!form) return std::nullopt;
  LinearPoly out;
  out.constant = form->constant;
  for (std::size_t k = 0; k < t.arity(); ++k) {
    auto sub = eval_symbolic(i, t.arg(k));
    if (!sub) return std::nullopt;
    const Coef c = form->coefs[k];
    Coef tmp;
    if (mul_overflow(c, sub->constant, tmp) || add_overflow(out.constant, tmp, out.constant)) {
      throw InterpretationError("coefficient overflow");
    }
    for (const auto& [v, d] : sub->coefs) {
      if (mul_overflow(c, d, tmp)) throw InterpretationError("coefficient overflow");
      if (tmp == 0) continue;
      Coef& slot = out.coefs[v];
      if (add_overflow(slot, tmp, slot)) throw InterpretationError("coefficient overflow");
    }
  }
  return out;
}

std::optional<Coef> evaluate(const LinearInterpretation& i, const Term& t, const std::map<std::string, Coef>& alpha) {
  if (t.is_var()) {
    auto it = alpha.find(t.var_name());
    if (it == alpha.end()) return std::nullopt;
    return it->second;
  }
  const auto& form = i.form(t.symbol());
  if (!form) return std::nullopt;
  Coef acc = form->constant;
  for (std::size_t k = 0; k < t.arity(); ++k) {
    auto v = evaluate(i, t.arg(k), alpha);
    if (!v) return std::nullopt;
    Coef tmp;
    if (mul_overflow(form->coefs[k], *v, tmp) || add_overflow(acc, tmp, acc)) {
      throw InterpretationError("value overflow");
    }
  }
  return acc;
}

bool poly_ge(const LinearPoly& p, const LinearPoly& q, bool strict) {
  for (const auto& [v, c] : q.coefs) {
    auto it = p.coefs.find(v);
    Coef have = it == p.coefs.end() ? 0 : it->second;
    if (have < c) return false;
  }
  return strict ? p.constant > q.constant : p.constant >= q.constant;
}

bool check_rule(const LinearInterpretation& i, const Rule& rule, bool strict) {
  auto l = eval_symbolic(i, rule.lhs);
  if (!l) return true;
  auto r = eval_symbolic(i, rule.rhs);
  return r && poly_ge(*l, *r, strict);
}

bool check_mu_monotone(const LinearInterpretation& i, const ReplacementMap& mu) {
  for (SymbolId f = 0; f < i.signature().size(); ++f) {
    const auto& form = i.form(f);
    if (!form || f >= mu.positions.size()) continue;
    for (int p : mu.positions[f]) {
      if (form->coefs.at(static_cast<std::size_t>(p - 1)) < 1) return false;
    }
  }
  return true;
}

bool check_fully_monotone(const LinearInterpretation& i) {
  for (SymbolId f = 0; f < i.signature().size(); ++f) {
    const auto& form = i.form(f);
    if (!form) continue;
    for (Coef c : form->coefs) {
      if (c < 1) return false;
    }
  }
  return true;
}

namespace {

bool dominates(const AffineForm& a, const AffineForm& b) {
  if (a.constant < b.constant) return false;
  for (std::size_t k = 0; k < a.coefs.size(); ++k) {
    if (a.coefs[k] < b.coefs[k]) return false;
  }
  return true;
}

// Pairs (x, y) of labeled symbols where form(x) must dominate form(y).
std::vector<std::pair<SymbolId, SymbolId>> compat_pairs(const LabeledSignature& lsig, const CarrierRelation& ge) {
  std::vector<std::pair<SymbolId, SymbolId>> out;
  const Signature& sig = lsig.signature();
  for (SymbolId x = 0; x < sig.size(); ++x) {
    const auto& ox = lsig.origin(x);
    for (std::size_t j = 0; j < ox.label.size(); ++j) {
      for (Element b = 0; b < ge.size(); ++b) {
        if (b == ox.label[j] || !ge.contains(ox.label[j], b)) continue;
        auto lab = ox.label;
        lab[j] = b;
        if (auto y = lsig.find(ox.base, lab)) out.emplace_back(x, *y);
      }
    }
  }
  return out;
}

}  // namespace

bool check_label_compat(const LinearInterpretation& i, const LabeledSignature& lsig, const CarrierRelation& ge) {
  for (auto [x, y] : compat_pairs(lsig, ge)) {
    const auto& fx = i.form(x);
    const auto& fy = i.form(y);
    if (!fx || !fy) continue;
    if (!dominates(*fx, *fy)) return false;
  }
  return true;
}

// -- search ---------------------------------------------------------------------------

namespace {

// A rule side flattened for fast re-evaluation under changing forms.
struct FlatTerm {
  struct Node {
    bool is_var;
    std::uint32_t index;  // variable slot or symbol
    int arity;
  };
  std::vector<Node> nodes;  // post-order
};

void flatten(const Term& t, std::map<std::string, std::uint32_t>& slots, FlatTerm& out) {
  if (t.is_var()) {
    auto [it, _] = slots.emplace(t.var_name(), static_cast<std::uint32_t>(slots.size()));
    out.nodes.push_back({true, it->second, 0});
    return;
  }
  for (const Term& c : t.args()) flatten(c, slots, out);
  out.nodes.push_back({false, t.symbol(), static_cast<int>(t.arity())});
}

struct FlatRule {
  FlatTerm lhs, rhs;
  std::size_t vars = 0;
  bool strict = false;
  std::set<SymbolId> symbols;
};

// Evaluates to a vector [constant, c_var0, c_var1, ...]; false on overflow.
bool eval_flat(const FlatTerm& t, std::size_t vars, const std::vector<const AffineForm*>& forms,
               std::vector<std::vector<Coef>>& stack, std::vector<Coef>& out) {
  std::size_t top = 0;
  for (const auto& n : t.nodes) {
    if (top >= stack.size()) stack.emplace_back();
    if (n.is_var) {
      auto& slot = stack[top++];
      slot.assign(vars + 1, 0);
      slot[1 + n.index] = 1;
      continue;
    }
    const AffineForm& f = *forms[n.index];
    std::vector<Coef> acc(vars + 1, 0);
    acc[0] = f.constant;
    top -= static_cast<std::size_t>(n.arity);
    for (int k = 0; k < n.arity; ++k) {
      const auto& sub = stack[top + static_cast<std::size_t>(k)];
      const Coef c = f.coefs[static_cast<std::size_t>(k)];
      for (std::size_t v = 0; v <= vars; ++v) {
        Coef tmp;
        if (mul_overflow(c, sub[v], tmp) || add_overflow(acc[v], tmp, acc[v])) return false;
      }
    }
    if (top >= stack.size()) stack.emplace_back();
    stack[top++] = std::move(acc);
  }
  out = stack[0];
  return true;
}

bool flat_rule_ok(const FlatRule& r, const std::vector<const AffineForm*>& forms,
                  std::vector<std::vector<Coef>>& stack) {
  std::vector<Coef> l, rr;
  if (!eval_flat(r.lhs, r.vars, forms, stack, l)) return false;
  if (!eval_flat(r.rhs, r.vars, forms, stack, rr)) return false;
  for (std::size_t v = 1; v <= r.vars; ++v) {
    if (l[v] < rr[v]) return false;
  }
  return r.strict ? l[0] > rr[0] : l[0] >= rr[0];
}

struct SearchProblem {
  const Signature* sig = nullptr;
  std::vector<FlatRule> rules;
  std::vector<SymbolId> relevant;
  std::vector<std::vector<AffineForm>> candidates;  // per relevant index
  std::vector<AffineForm> identity;                 // per symbol
  std::vector<std::pair<SymbolId, SymbolId>> compat;
};

std::vector<AffineForm> enumerate_forms(int arity, Coef bound, const std::vector<Coef>& min_coef) {
  // All vectors (c0, c1..ck) in [0,bound], ordered by sum then lexicographically.
  std::vector<AffineForm> out;
  const std::size_t len = static_cast<std::size_t>(arity) + 1;
  std::vector<Coef> v(len, 0);
  while (true) {
    bool ok = true;
    for (int k = 0; k < arity; ++k) ok &= v[static_cast<std::size_t>(k) + 1] >= min_coef[static_cast<std::size_t>(k)];
    if (ok) {
      AffineForm f{v[0], std::vector<Coef>(v.begin() + 1, v.end())};
      if (!f.is_identity()) out.push_back(std::move(f));
    }
    std::size_t i = len;
    while (i > 0) {
      --i;
      if (++v[i] <= bound) break;
      v[i] = 0;
      if (i == 0) {
        i = len + 1;
        break;
      }
    }
    if (i == len + 1) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const AffineForm& a, const AffineForm& b) {
    Coef sa = a.constant, sb = b.constant;
    for (Coef c : a.coefs) sa += c;
    for (Coef c : b.coefs) sb += c;
    return sa < sb;
  });
  return out;
}

SearchProblem build_problem(const Trs& trs, const std::set<std::size_t>& strict_target, Coef bound,
                            const SearchConstraints& cons) {
  SearchProblem p;
  p.sig = &trs.signature;
  std::set<SymbolId> relevant;
  for (std::size_t ri = 0; ri < trs.rules.size(); ++ri) {
    FlatRule fr;
    std::map<std::string, std::uint32_t> slots;
    flatten(trs.rules[ri].lhs, slots, fr.lhs);
    flatten(trs.rules[ri].rhs, slots, fr.rhs);
    fr.vars = slots.size();
    fr.strict = strict_target.count(ri) > 0;
    for (const FlatTerm* side : {&fr.lhs, &fr.rhs}) {
      for (const auto& n : side->nodes) {
        if (!n.is_var) fr.symbols.insert(n.index);
      }
    }
    relevant.insert(fr.symbols.begin(), fr.symbols.end());
    p.rules.push_back(std::move(fr));
  }
  if (cons.label_sig && cons.ge) {
    p.compat = compat_pairs(*cons.label_sig, *cons.ge);
    for (auto [x, y] : p.compat) {
      relevant.insert(x);
      relevant.insert(y);
    }
  }
  p.relevant.assign(relevant.begin(), relevant.end());
  for (SymbolId f = 0; f < trs.signature.size(); ++f) p.identity.push_back(AffineForm::identity(trs.signature.arity(f)));
  for (SymbolId f : p.relevant) {
    const int k = trs.signature.arity(f);
    std::vector<Coef> mins(static_cast<std::size_t>(k), 0);
    for (int pos = 1; pos <= k; ++pos) {
      bool need = false;
      switch (cons.monotonicity) {
        case SearchConstraints::Monotonicity::kFull: need = true; break;
        case SearchConstraints::Monotonicity::kReplacementMap: need = cons.mu && cons.mu->contains(f, pos); break;
        case SearchConstraints::Monotonicity::kNone: need = false; break;
      }
      mins[static_cast<std::size_t>(pos - 1)] = need ? 1 : 0;
    }
    p.candidates.push_back(enumerate_forms(k, bound, mins));
  }
  return p;
}

// Explores one combination of non-identity symbols, with the first chosen
// symbol's form fixed to `first`.
class SubtreeSearch {
 public:
  SubtreeSearch(const SearchProblem& p, const std::vector<std::size_t>& chosen, std::size_t budget)
      : p_(p), chosen_(chosen), budget_(budget), forms_(p.sig->size()) {
    for (SymbolId f = 0; f < p.sig->size(); ++f) forms_[f] = &p.identity[f];
    // Check each rule / compat pair at the depth where its last chosen symbol is set.
    std::vector<int> depth_of(p.sig->size(), -1);
    for (std::size_t d = 0; d < chosen.size(); ++d) depth_of[p.relevant[chosen[d]]] = static_cast<int>(d);
    rules_at_.resize(chosen.size());
    compat_at_.resize(chosen.size());
    for (std::size_t ri = 0; ri < p.rules.size(); ++ri) {
      int d = -1;
      for (SymbolId s : p.rules[ri].symbols) d = std::max(d, depth_of[s]);
      if (d >= 0) rules_at_[static_cast<std::size_t>(d)].push_back(ri);
    }
    for (std::size_t ci = 0; ci < p.compat.size(); ++ci) {
      int d = std::max(depth_of[p.compat[ci].first], depth_of[p.compat[ci].second]);
      if (d >= 0) compat_at_[static_cast<std::size_t>(d)].push_back(ci);
    }
  }

  // Returns true with forms set on success.
  bool run(std::size_t first) {
    const SymbolId f0 = p_.relevant[chosen_[0]];
    forms_[f0] = &p_.candidates[chosen_[0]][first];
    ++nodes_;
    if (!level_ok(0)) return false;
    return dfs(1);
  }

  std::size_t nodes() const { return nodes_; }
  bool exhausted() const { return nodes_ > budget_; }
  const std::vector<const AffineForm*>& forms() const { return forms_; }

 private:
  bool level_ok(std::size_t d) {
    for (std::size_t ri : rules_at_[d]) {
      if (!flat_rule_ok(p_.rules[ri], forms_, stack_)) return false;
    }
    for (std::size_t ci : compat_at_[d]) {
      if (!dominates(*forms_[p_.compat[ci].first], *forms_[p_.compat[ci].second])) return false;
    }
    return true;
  }

  bool dfs(std::size_t d) {
    if (d == chosen_.size()) return true;
    const SymbolId f = p_.relevant[chosen_[d]];
    for (const AffineForm& form : p_.candidates[chosen_[d]]) {
      if (++nodes_ > budget_) return false;
      forms_[f] = &form;
      if (level_ok(d) && dfs(d + 1)) return true;
    }
    forms_[f] = &p_.identity[f];
    return false;
  }

  const SearchProblem& p_;
  const std::vector<std::size_t>& chosen_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::vector<const AffineForm*> forms_;
  std::vector<std::vector<std::size_t>> rules_at_;
  std::vector<std::vector<std::size_t>> compat_at_;
  std::vector<std::vector<Coef>> stack_;
};

LinearInterpretation materialize(const Trs& trs, const std::vector<const AffineForm*>& forms) {
  LinearInterpretation out = LinearInterpretation::identity(trs.signature);
  for (SymbolId f = 0; f < trs.signature.size(); ++f) out.set(f, *forms[f]);
  return out;
}

bool verify(const Trs& trs, const std::set<std::size_t>& strict_target, const SearchConstraints& cons,
            const LinearInterpretation& i) {
  for (std::size_t ri = 0; ri < trs.rules.size(); ++ri) {
    if (!check_rule(i, trs.rules[ri], strict_target.count(ri) > 0)) return false;
  }
  switch (cons.monotonicity) {
    case SearchConstraints::Monotonicity::kFull:
      if (!check_fully_monotone(i)) return false;
      break;
    case SearchConstraints::Monotonicity::kReplacementMap:
      if (cons.mu && !check_mu_monotone(i, *cons.mu)) return false;
      break;
    case SearchConstraints::Monotonicity::kNone: break;
  }
  if (cons.label_sig && cons.ge && !check_label_compat(i, *cons.label_sig, *cons.ge)) return false;
  return true;
}

template <bool kParallel>
std::optional<LinearInterpretation> search_impl(const Trs& trs, const std::set<std::size_t>& strict_target,
                                                Coef bound, const SearchConstraints& cons) {
  if (bound < 1) throw InterpretationError("coefficient bound must be at least 1");
  SearchProblem p = build_problem(trs, strict_target, bound, cons);

  // k = 0: everything identity.
  {
    std::vector<const AffineForm*> forms(trs.signature.size());
    for (SymbolId f = 0; f < trs.signature.size(); ++f) forms[f] = &p.identity[f];
    std::vector<std::vector<Coef>> stack;
    bool ok = std::all_of(p.rules.begin(), p.rules.end(),
                          [&](const FlatRule& r) { return flat_rule_ok(r, forms, stack); });
    if (ok) {
      auto out = materialize(trs, forms);
      if (verify(trs, strict_target, cons, out)) return out;
    }
  }

  const std::size_t m = p.relevant.size();
  const std::size_t subtree_budget = std::max<std::size_t>(cons.node_budget / 16, 1000);
  std::size_t used = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    std::vector<std::size_t> chosen(k);
    for (std::size_t i = 0; i < k; ++i) chosen[i] = i;
    while (true) {
      const auto& firsts = p.candidates[chosen[0]];
      const std::int64_t nf = static_cast<std::int64_t>(firsts.size());
      std::vector<std::size_t> nodes(firsts.size(), 0);
      std::vector<std::optional<std::vector<const AffineForm*>>> found(firsts.size());
      std::atomic<std::int64_t> best{nf};
      auto work = [&](std::int64_t i) {
        if (i > best.load(std::memory_order_relaxed)) return;
        SubtreeSearch s(p, chosen, subtree_budget);
        if (s.run(static_cast<std::size_t>(i))) {
          found[static_cast<std::size_t>(i)] = s.forms();
          std::int64_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        }
        nodes[static_cast<std::size_t>(i)] = s.nodes();
      };
      if constexpr (kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < nf; ++i) work(i);
      } else {
        for (std::int64_t i = 0; i < nf; ++i) {
          work(i);
          if (found[static_cast<std::size_t>(i)]) break;
        }
      }
      for (std::int64_t i = 0; i < nf; ++i) {
        if (found[static_cast<std::size_t>(i)]) {
          auto out = materialize(trs, *found[static_cast<std::size_t>(i)]);
          if (verify(trs, strict_target, cons, out)) return out;
        }
      }
      for (std::size_t n : nodes) used += n;
      if (used > cons.node_budget) return std::nullopt;
      // next combination
      std::size_t i = k;
      while (i > 0 && chosen[i - 1] == m - k + (i - 1)) --i;
      if (i == 0) break;
      ++chosen[i - 1];
      for (std::size_t j = i; j < k; ++j) chosen[j] = chosen[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<LinearInterpretation> search_linear(const Trs& trs, const std::set<std::size_t>& strict_target,
                                                  Coef coeff_bound, const SearchConstraints& constraints) {
  return search_impl<true>(trs, strict_target, coeff_bound, constraints);
}

namespace serial {
std::optional<LinearInterpretation> search_linear(const Trs& trs, const std::set<std::size_t>& strict_target,
                                                  Coef coeff_bound, const SearchConstraints& constraints) {
  return search_impl<false>(trs, strict_target, coeff_bound, constraints);
}
}  // namespace serial

}  // namespace localterm
