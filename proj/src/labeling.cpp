#include "localterm/labeling.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include "compiled_term.hpp"

namespace localterm {

std::string mangle(const std::string& base, std::span<const Element> label) {
  if (label.empty()) return base;
  std::string out = base + "^";
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) out += '_';
    out += std::to_string(label[i]);
  }
  return out;
}

std::optional<std::pair<std::string, std::vector<Element>>> demangle(const std::string& name) {
  auto caret = name.find('^');
  if (caret == std::string::npos || caret == 0) return std::nullopt;
  std::vector<Element> label;
  std::size_t pos = caret + 1;
  while (pos <= name.size()) {
    auto end = name.find('_', pos);
    if (end == std::string::npos) end = name.size();
    Element v = 0;
    auto [p, ec] = std::from_chars(name.data() + pos, name.data() + end, v);
    if (ec != std::errc() || p != name.data() + end) return std::nullopt;
    label.push_back(v);
    pos = end + 1;
  }
  return std::make_pair(name.substr(0, caret), label);
}

LabeledSignature::LabeledSignature(const FiniteAlgebra& a) : base_(a.signature()), n_(a.size()) {
  by_base_.resize(base_.size());
  for (SymbolId f = 0; f < base_.size(); ++f) {
    if (base_.arity(f) > 0 && base_.name(f).find('^') != std::string::npos) {
      throw AlgebraError("symbol '" + base_.name(f) + "' contains '^' and cannot be labeled");
    }
    auto table = a.table(f);
    by_base_[f].assign(table.size(), -1);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] == kUndefined) continue;
      auto tuple = a.tuple_of(f, idx);
      SymbolId id = signature_.add(mangle(base_.name(f), tuple), base_.arity(f));
      by_base_[f][idx] = id;
      origin_.push_back({f, std::move(tuple)});
    }
  }
}

std::optional<SymbolId> LabeledSignature::find(SymbolId base, std::span<const Element> label) const {
  if (base >= by_base_.size()) return std::nullopt;
  std::size_t idx = 0;
  for (Element e : label) {
    if (e < 0 || e >= n_) return std::nullopt;
    idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(e);
  }
  std::int64_t id = by_base_[base].at(idx);
  if (id < 0) return std::nullopt;
  return static_cast<SymbolId>(id);
}

bool ReplacementMap::contains(SymbolId f, int position) const {
  if (f >= positions.size()) return false;
  const auto& p = positions[f];
  return std::binary_search(p.begin(), p.end(), position);
}

namespace {

// Labels t and returns its value; kUndefined on failure.
Element label_rec(const LabeledSignature& lsig, const FiniteAlgebra& a, const Term& t,
                  const std::map<std::string, Element>& alpha, Term& out) {
  if (t.is_var()) {
    auto it = alpha.find(t.var_name());
    out = t;
    return it == alpha.end() ? kUndefined : it->second;
  }
  std::vector<Term> kids(t.arity());
  std::vector<Element> vals(t.arity());
  for (std::size_t i = 0; i < t.arity(); ++i) {
    vals[i] = label_rec(lsig, a, t.arg(i), alpha, kids[i]);
    if (vals[i] == kUndefined) return kUndefined;
  }
  Element v = a.lookup(t.symbol(), vals);
  if (v == kUndefined) return kUndefined;
  auto id = lsig.find(t.symbol(), vals);
  out = Term::app(*id, std::move(kids));
  return v;
}

struct RuleKey {
  Rule rule;
  bool operator==(const RuleKey& o) const { return rule == o.rule; }
};
struct RuleKeyHash {
  std::size_t operator()(const RuleKey& k) const { return k.rule.lhs.hash() * 31 + k.rule.rhs.hash(); }
};

struct Prepared {
  FiniteAlgebra algebra;
  std::vector<std::string> warnings;
};

Prepared prepare(const FiniteAlgebra& a, const Trs& trs, const LabelOptions& options) {
  Prepared p{align_algebra(a, trs.signature), {}};
  if (!is_core(p.algebra)) {
    if (options.restrict_core) {
      p.algebra = restrict_to_core(p.algebra);
      p.warnings.push_back("algebra restricted to its core before labeling");
    } else {
      p.warnings.push_back("algebra is not core-restricted; labeled termination may not transfer back");
    }
  }
  for (const Rule& r : trs.rules) {
    if (!options.allow_collapsing && is_collapsing(r)) {
      throw AlgebraError("collapsing rule " + to_string(trs.signature, r) +
                         " must be eliminated before labeling");
    }
  }
  return p;
}

template <bool kParallel>
LabeledTrs label_impl(const FiniteAlgebra& input, const Trs& trs, const LabelOptions& options) {
  Prepared prep = prepare(input, trs, options);
  const FiniteAlgebra& a = prep.algebra;
  LabeledTrs out;
  out.lsig = LabeledSignature(a);
  out.trs.signature = out.lsig.signature();
  out.warnings = std::move(prep.warnings);
  const int n = a.size();
  std::unordered_set<RuleKey, RuleKeyHash> seen;
  for (std::size_t ri = 0; ri < trs.rules.size(); ++ri) {
    const Rule& rule = trs.rules[ri];
    detail::CompiledRule cr(rule);
    const std::size_t k = cr.vars.size();
    const std::size_t total = detail::assignment_count(n, k);
    std::vector<Rule> produced(total);
    auto build = [&](std::size_t idx) {
      std::vector<Element> v(k);
      detail::decode_assignment(idx, n, k, v.data());
      if (cr.lhs.evaluate(a, v.data()) == kUndefined) return;
      std::map<std::string, Element> alpha;
      for (std::size_t i = 0; i < k; ++i) alpha.emplace(cr.vars[i], v[i]);
      Term l, r;
      label_rec(out.lsig, a, rule.lhs, alpha, l);
      if (label_rec(out.lsig, a, rule.rhs, alpha, r) == kUndefined) {
        throw AlgebraError("rhs undefined where lhs is defined: not a partial model for rule " +
                           to_string(trs.signature, rule));
      }
      produced[idx] = Rule{l, r};
    };
    if constexpr (kParallel) {
      std::string error;
#pragma omp parallel for schedule(dynamic, 64)
      for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
        try {
          build(static_cast<std::size_t>(idx));
        } catch (const std::exception& e) {
#pragma omp critical
          if (error.empty()) error = e.what();
        }
      }
      if (!error.empty()) throw AlgebraError(error);
    } else {
      for (std::size_t idx = 0; idx < total; ++idx) build(idx);
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (produced[idx].lhs.is_null()) continue;
      if (seen.insert(RuleKey{produced[idx]}).second) {
        out.trs.rules.push_back(std::move(produced[idx]));
        out.source_rule.push_back(ri);
      }
    }
  }
  out.algebra = a;
  return out;
}

}  // namespace

FiniteAlgebra align_algebra(const FiniteAlgebra& a, const Signature& system) {
  if (a.signature() == system) return a;
  Signature merged = system;
  for (const auto& s : a.signature().symbols()) {
    auto id = merged.find(s.name);
    if (id && merged.arity(*id) != s.arity) {
      throw AlgebraError("symbol '" + s.name + "' has different arities in algebra and system");
    }
    if (!id) merged.add(s.name, s.arity);
  }
  return rebind(a, merged);
}

Term label_term(const LabeledSignature& lsig, const FiniteAlgebra& a, const Term& t, const Assignment& alpha) {
  Term out;
  if (label_rec(lsig, a, t, alpha, out) == kUndefined) {
    throw AlgebraError("cannot label a term whose interpretation is undefined");
  }
  return out;
}

LabeledTrs label_trs(const FiniteAlgebra& a, const Trs& trs, const LabelOptions& options) {
  return label_impl<true>(a, trs, options);
}

namespace serial {
LabeledTrs label_trs(const FiniteAlgebra& a, const Trs& trs, const LabelOptions& options) {
  return label_impl<false>(a, trs, options);
}
}  // namespace serial

ReplacementMap nf_replacement_map(const LabeledSignature& lsig, const FiniteAlgebra& a, const Trs& trs) {
  FiniteAlgebra aligned = align_algebra(a, trs.signature);
  auto nf = nf_states(aligned, trs);
  ReplacementMap mu;
  mu.positions.resize(lsig.signature().size());
  for (SymbolId f = 0; f < lsig.signature().size(); ++f) {
    const auto& lab = lsig.origin(f).label;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (!std::binary_search(nf.begin(), nf.end(), lab[i])) mu.positions[f].push_back(static_cast<int>(i + 1));
    }
  }
  return mu;
}

PositionFilter nf_position_filter(const FiniteAlgebra& a, const Trs& trs) {
  auto nf = nf_states(align_algebra(a, trs.signature), trs);
  return [nf](SymbolId, std::span<const Element> tuple, int position) {
    return !std::binary_search(nf.begin(), nf.end(), tuple[position - 1]);
  };
}

}  // namespace localterm
