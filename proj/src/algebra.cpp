#include "localterm/algebra.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "compiled_term.hpp"

namespace localterm {

namespace {

std::size_t table_size(int n, int arity) {
  std::size_t s = 1;
  for (int i = 0; i < arity; ++i) {
    if (s > (std::size_t{1} << 28) / static_cast<std::size_t>(std::max(n, 1))) {
      throw AlgebraError("table too large for a dense representation");
    }
    s *= static_cast<std::size_t>(n);
  }
  return s;
}

}  // namespace

FiniteAlgebra::FiniteAlgebra(Signature signature, int carrier_size)
    : signature_(std::move(signature)), size_(carrier_size) {
  if (carrier_size <= 0) throw AlgebraError("carrier must be non-empty");
  tables_.reserve(signature_.size());
  for (const auto& s : signature_.symbols()) {
    tables_.emplace_back(table_size(size_, s.arity), kUndefined);
  }
}

std::size_t FiniteAlgebra::index_of(SymbolId f, std::span<const Element> args) const {
  if (f >= signature_.size()) throw AlgebraError("unknown symbol id");
  if (static_cast<int>(args.size()) != signature_.arity(f)) {
    throw AlgebraError("arity mismatch for '" + signature_.name(f) + "'");
  }
  std::size_t idx = 0;
  for (Element e : args) {
    if (e < 0 || e >= size_) throw AlgebraError("carrier element out of range");
    idx = idx * static_cast<std::size_t>(size_) + static_cast<std::size_t>(e);
  }
  return idx;
}

std::vector<Element> FiniteAlgebra::tuple_of(SymbolId f, std::size_t index) const {
  std::vector<Element> out(static_cast<std::size_t>(signature_.arity(f)));
  detail::decode_assignment(index, size_, out.size(), out.data());
  return out;
}

void FiniteAlgebra::define(SymbolId f, std::span<const Element> args, Element result) {
  std::size_t idx = index_of(f, args);
  if (tables_[f][idx] != kUndefined) {
    throw AlgebraError("duplicate entry for '" + signature_.name(f) + "'");
  }
  set(f, args, result);
}

void FiniteAlgebra::set(SymbolId f, std::span<const Element> args, Element result) {
  if (result < 0 || result >= size_) throw AlgebraError("carrier element out of range");
  tables_[f][index_of(f, args)] = result;
}

void FiniteAlgebra::undefine(SymbolId f, std::span<const Element> args) {
  tables_[f][index_of(f, args)] = kUndefined;
}

Element FiniteAlgebra::lookup(SymbolId f, std::span<const Element> args) const {
  for (Element e : args) {
    if (e == kUndefined) return kUndefined;
  }
  return tables_[f][index_of(f, args)];
}

std::size_t FiniteAlgebra::entry_count() const {
  std::size_t c = 0;
  for (const auto& t : tables_) c += static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [](Element e) { return e != kUndefined; }));
  return c;
}

bool FiniteAlgebra::total() const {
  for (const auto& t : tables_) {
    if (std::find(t.begin(), t.end(), kUndefined) != t.end()) return false;
  }
  return true;
}

// -- relations -----------------------------------------------------------------

CarrierRelation CarrierRelation::identity(int n) {
  CarrierRelation r(n);
  for (int i = 0; i < n; ++i) r.insert(i, i);
  return r;
}

CarrierRelation CarrierRelation::total(int n) {
  CarrierRelation r(n);
  std::fill(r.bits_.begin(), r.bits_.end(), 1);
  return r;
}

CarrierRelation CarrierRelation::from_pairs(int n, std::span<const std::pair<Element, Element>> pairs) {
  CarrierRelation r(n);
  for (auto [a, b] : pairs) r.insert(a, b);
  return r;
}

void CarrierRelation::insert(Element a, Element b) {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw AlgebraError("relation pair out of range");
  bits_[static_cast<std::size_t>(a) * n_ + b] = 1;
}

std::vector<std::pair<Element, Element>> CarrierRelation::pairs() const {
  std::vector<std::pair<Element, Element>> out;
  for (int a = 0; a < n_; ++a) {
    for (int b = 0; b < n_; ++b) {
      if (contains(a, b)) out.emplace_back(a, b);
    }
  }
  return out;
}

bool CarrierRelation::empty() const {
  return std::find(bits_.begin(), bits_.end(), 1) == bits_.end();
}

CarrierRelation CarrierRelation::united(const CarrierRelation& other) const {
  if (other.n_ != n_) throw AlgebraError("relation carrier sizes differ");
  CarrierRelation r(n_);
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] | other.bits_[i];
  return r;
}

std::string describe(const Signature& sig, const std::vector<Rule>& rules, const Counterexample& c) {
  std::ostringstream os;
  os << "rule " << c.rule_index;
  if (c.rule_index < rules.size()) os << " [" << to_string(sig, rules[c.rule_index]) << "]";
  os << " with {";
  for (std::size_t i = 0; i < c.variables.size(); ++i) {
    os << (i ? ", " : "") << c.variables[i] << "=" << c.values[i];
  }
  os << "}: " << c.what;
  return os.str();
}

// -- evaluation ----------------------------------------------------------------

std::optional<Element> interpret(const FiniteAlgebra& a, const Term& t, const Assignment& alpha) {
  if (t.is_var()) {
    auto it = alpha.find(t.var_name());
    if (it == alpha.end() || it->second == kUndefined) return std::nullopt;
    return it->second;
  }
  std::vector<Element> args;
  args.reserve(t.arity());
  for (const Term& c : t.args()) {
    auto v = interpret(a, c, alpha);
    if (!v) return std::nullopt;
    args.push_back(*v);
  }
  return a.apply(t.symbol(), args);
}

bool language_member(const FiniteAlgebra& a, const Term& ground) {
  return interpret(a, ground).has_value();
}

std::vector<Element> core(const FiniteAlgebra& a) {
  const int n = a.size();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
      auto table = a.table(f);
      const int k = a.signature().arity(f);
      std::vector<Element> tuple(static_cast<std::size_t>(k));
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        Element r = table[idx];
        if (r == kUndefined || in[r]) continue;
        detail::decode_assignment(idx, n, tuple.size(), tuple.data());
        if (std::all_of(tuple.begin(), tuple.end(), [&](Element e) { return in[e] != 0; })) {
          in[r] = 1;
          changed = true;
        }
      }
    }
  }
  std::vector<Element> out;
  for (int e = 0; e < n; ++e) {
    if (in[e]) out.push_back(e);
  }
  return out;
}

bool is_core(const FiniteAlgebra& a) { return static_cast<int>(core(a).size()) == a.size(); }

std::pair<FiniteAlgebra, std::vector<Element>> restrict_to_core_mapped(const FiniteAlgebra& a) {
  auto c = core(a);
  if (c.empty()) throw AlgebraError("core is empty: the algebra denotes no ground term");
  std::vector<Element> map(static_cast<std::size_t>(a.size()), kUndefined);
  for (std::size_t i = 0; i < c.size(); ++i) map[c[i]] = static_cast<Element>(i);
  FiniteAlgebra out(a.signature(), static_cast<int>(c.size()));
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    auto table = a.table(f);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      Element r = table[idx];
      if (r == kUndefined || map[r] == kUndefined) continue;
      auto tuple = a.tuple_of(f, idx);
      bool keep = true;
      for (Element& e : tuple) {
        if (map[e] == kUndefined) {
          keep = false;
          break;
        }
        e = map[e];
      }
      if (keep) out.set(f, tuple, map[r]);
    }
  }
  return {std::move(out), std::move(map)};
}

FiniteAlgebra restrict_to_core(const FiniteAlgebra& a) { return restrict_to_core_mapped(a).first; }

CarrierRelation restrict_relation(const CarrierRelation& rel, const std::vector<Element>& mapping,
                                  int new_size) {
  CarrierRelation out(new_size);
  for (auto [x, y] : rel.pairs()) {
    if (mapping[x] != kUndefined && mapping[y] != kUndefined) out.insert(mapping[x], mapping[y]);
  }
  return out;
}

// -- model checks ----------------------------------------------------------------

namespace {

// rel == nullptr means equality.
template <bool kParallel>
ModelReport check_model_impl(const FiniteAlgebra& a, const CarrierRelation* rel,
                             std::span<const Rule> rules, std::span<const std::size_t> ids) {
  ModelReport report;
  const int n = a.size();
  for (std::size_t ri : ids) {
    detail::CompiledRule cr(rules[ri]);
    const std::size_t k = cr.vars.size();
    const std::size_t total = detail::assignment_count(n, k);
    struct Hit {
      std::size_t index;
      Element lhs;
      Element rhs;
    };
    std::vector<Hit> hits;
    auto visit = [&](std::size_t idx, std::vector<Hit>& out) {
      Element vals[16];
      std::vector<Element> big;
      Element* v = vals;
      if (k > 16) {
        big.resize(k);
        v = big.data();
      }
      detail::decode_assignment(idx, n, k, v);
      Element l = cr.lhs.evaluate(a, v);
      if (l == kUndefined) return;
      Element r = cr.rhs.evaluate(a, v);
      bool ok = r != kUndefined && (rel ? rel->contains(l, r) : l == r);
      if (!ok) out.push_back({idx, l, r});
    };
    if constexpr (kParallel) {
#pragma omp parallel
      {
        std::vector<Hit> local;
#pragma omp for schedule(static) nowait
        for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
          visit(static_cast<std::size_t>(idx), local);
        }
#pragma omp critical
        hits.insert(hits.end(), local.begin(), local.end());
      }
      std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.index < y.index; });
    } else {
      for (std::size_t idx = 0; idx < total; ++idx) visit(idx, hits);
    }
    for (const Hit& h : hits) {
      Counterexample c;
      c.rule_index = ri;
      c.variables = cr.vars;
      c.values.resize(k);
      detail::decode_assignment(h.index, n, k, c.values.data());
      c.lhs_value = h.lhs;
      if (h.rhs != kUndefined) c.rhs_value = h.rhs;
      std::ostringstream os;
      os << "lhs = " << h.lhs << ", rhs = " << (h.rhs == kUndefined ? std::string("undefined") : std::to_string(h.rhs));
      c.what = os.str();
      report.counterexamples.push_back(std::move(c));
    }
  }
  report.verdict = report.counterexamples.empty();
  return report;
}

std::vector<std::size_t> all_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

ModelReport check_partial_model(const FiniteAlgebra& a, const Trs& trs) {
  auto ids = all_ids(trs.rules.size());
  return check_model_impl<true>(a, nullptr, trs.rules, ids);
}

ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel, const Trs& trs) {
  auto ids = all_ids(trs.rules.size());
  return check_relational_model(a, rel, trs.signature, trs.rules, ids);
}

ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel,
                                   const Signature&, std::span<const Rule> rules,
                                   std::span<const std::size_t> rule_ids) {
  if (rel.size() != a.size()) throw AlgebraError("relation and algebra carrier sizes differ");
  return check_model_impl<true>(a, &rel, rules, rule_ids);
}

namespace serial {

ModelReport check_partial_model(const FiniteAlgebra& a, const Trs& trs) {
  auto ids = all_ids(trs.rules.size());
  return check_model_impl<false>(a, nullptr, trs.rules, ids);
}

ModelReport check_relational_model(const FiniteAlgebra& a, const CarrierRelation& rel, const Trs& trs) {
  auto ids = all_ids(trs.rules.size());
  return check_model_impl<false>(a, &rel, trs.rules, ids);
}

}  // namespace serial

ModelReport check_closed_monotone(const FiniteAlgebra& a, const CarrierRelation& rel,
                                  const PositionFilter& mu) {
  if (rel.size() != a.size()) throw AlgebraError("relation and algebra carrier sizes differ");
  ModelReport report;
  const int n = a.size();
  const auto pairs = rel.pairs();
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    const int k = a.signature().arity(f);
    auto table = a.table(f);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      Element r = table[idx];
      if (r == kUndefined) continue;
      auto tuple = a.tuple_of(f, idx);
      for (int pos = 1; pos <= k; ++pos) {
        if (mu && !mu(f, tuple, pos)) continue;
        for (auto [x, y] : pairs) {
          if (tuple[pos - 1] != x) continue;
          auto moved = tuple;
          moved[pos - 1] = y;
          Element r2 = a.lookup(f, moved);
          if (r2 != kUndefined && rel.contains(r, r2)) continue;
          Counterexample c;
          c.rule_index = f;
          for (int i = 0; i < k; ++i) c.variables.push_back("#" + std::to_string(i + 1));
          c.values = tuple;
          c.lhs_value = r;
          if (r2 != kUndefined) c.rhs_value = r2;
          std::ostringstream os;
          os << a.signature().name(f) << "(";
          for (int i = 0; i < k; ++i) os << (i ? "," : "") << tuple[i];
          os << ") = " << r << " but moving argument " << pos << " from " << x << " to " << y;
          if (r2 == kUndefined) {
            os << " is undefined (not closed)";
          } else {
            os << " gives " << r2 << " (not monotone)";
          }
          c.what = os.str();
          report.counterexamples.push_back(std::move(c));
        }
      }
    }
    (void)n;
  }
  report.verdict = report.counterexamples.empty();
  return report;
}

bool check_relative_wf(const CarrierRelation& strict, const CarrierRelation& weak) {
  if (strict.size() != weak.size()) throw AlgebraError("relation carrier sizes differ");
  const int n = strict.size();
  const CarrierRelation u = strict.united(weak);
  // Tarjan's SCC algorithm, iterative.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int counter = 0, comps = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<std::pair<int, int>> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < n) {
        int w = next++;
        if (!u.contains(v, w)) continue;
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  for (auto [x, y] : strict.pairs()) {
    if (comp[x] == comp[y]) return false;
  }
  return true;
}

std::vector<Element> nf_states(const FiniteAlgebra& a, const Trs& trs) {
  const int n = a.size();
  auto c = core(a);
  std::vector<char> in_core(static_cast<std::size_t>(n), 0);
  for (Element e : c) in_core[e] = 1;
  std::vector<char> bad(static_cast<std::size_t>(n), 0);
  for (const Rule& r : trs.rules) {
    detail::CompiledRule cr(r);
    const std::size_t k = cr.vars.size();
    const std::size_t total = detail::assignment_count(n, k);
    std::vector<Element> v(k);
    for (std::size_t idx = 0; idx < total; ++idx) {
      detail::decode_assignment(idx, n, k, v.data());
      if (!std::all_of(v.begin(), v.end(), [&](Element e) { return in_core[e] != 0; })) continue;
      Element l = cr.lhs.evaluate(a, v.data());
      if (l != kUndefined) bad[l] = 1;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
      auto table = a.table(f);
      for (std::size_t idx = 0; idx < table.size(); ++idx) {
        Element r = table[idx];
        if (r == kUndefined || bad[r] || !in_core[r]) continue;
        auto tuple = a.tuple_of(f, idx);
        bool all_core = std::all_of(tuple.begin(), tuple.end(), [&](Element e) { return in_core[e] != 0; });
        bool some_bad = std::any_of(tuple.begin(), tuple.end(), [&](Element e) { return bad[e] != 0; });
        if (all_core && some_bad) {
          bad[r] = 1;
          changed = true;
        }
      }
    }
  }
  std::vector<Element> out;
  for (Element e : c) {
    if (!bad[e]) out.push_back(e);
  }
  return out;
}

// -- undefined implies redex ---------------------------------------------------------

namespace {

// Linear patterns with variables collapsed to a wildcard.
struct PatternSet {
  struct Node {
    SymbolId symbol;
    std::vector<int> children;  // -1 = wildcard
  };
  std::vector<Node> nodes;
  std::vector<char> is_lhs;
  std::map<std::pair<SymbolId, std::vector<int>>, int> index;

  int intern(const Term& t) {
    if (t.is_var()) return -1;
    std::vector<int> kids;
    for (const Term& c : t.args()) kids.push_back(intern(c));
    auto key = std::make_pair(t.symbol(), kids);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back({t.symbol(), kids});
    is_lhs.push_back(0);
    index.emplace(std::move(key), id);
    return id;
  }
};

}  // namespace

RedexCoverage check_undefined_implies_redex_witness(const FiniteAlgebra& a, const Trs& trs) {
  if (!is_left_linear(trs)) {
    throw AlgebraError("undefined-implies-redex check requires a left-linear system");
  }
  PatternSet ps;
  for (const Rule& r : trs.rules) {
    int id = ps.intern(r.lhs);
    ps.is_lhs[id] = 1;
  }
  std::vector<std::vector<int>> by_symbol(a.signature().size());
  for (std::size_t p = 0; p < ps.nodes.size(); ++p) {
    by_symbol[ps.nodes[p].symbol].push_back(static_cast<int>(p));
  }

  // Pattern states: sorted sets of matched pattern ids; id 0 is "redex seen".
  std::map<std::vector<int>, int> pat_index;
  std::vector<std::vector<int>> pat_sets{{}};  // index 0 reserved for the redex state
  auto pat_state = [&](std::vector<int> set) {
    auto it = pat_index.find(set);
    if (it != pat_index.end()) return it->second;
    int id = static_cast<int>(pat_sets.size());
    pat_sets.push_back(set);
    pat_index.emplace(std::move(set), id);
    return id;
  };
  constexpr int kRedex = 0;

  struct State {
    Element alg;  // kUndefined = sink
    int pat;
    Term witness;
  };
  std::vector<State> states;
  std::map<std::pair<Element, int>, int> state_index;
  auto add_state = [&](Element alg, int pat, const std::function<Term()>& make) -> bool {
    auto key = std::make_pair(alg, pat);
    if (state_index.count(key)) return false;
    state_index.emplace(key, static_cast<int>(states.size()));
    states.push_back({alg, pat, make()});
    return true;
  };

  const Signature& sig = a.signature();
  std::size_t old_count = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = states.size();
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const int k = sig.arity(f);
      if (k == 0 && old_count > 0) continue;
      if (k > 0 && count == 0) continue;
      // Enumerate tuples over [0,count) with at least one component >= old_count.
      std::vector<std::size_t> tuple(static_cast<std::size_t>(k), 0);
      while (true) {
        bool fresh = k == 0 ? old_count == 0
                            : std::any_of(tuple.begin(), tuple.end(), [&](std::size_t s) { return s >= old_count; });
        if (fresh) {
          Element alg = kUndefined;
          bool child_redex = false;
          std::vector<Element> vals;
          bool sink = false;
          for (std::size_t s : tuple) {
            if (states[s].alg == kUndefined) sink = true;
            vals.push_back(states[s].alg);
            if (states[s].pat == kRedex) child_redex = true;
          }
          if (!sink) alg = a.lookup(f, vals);
          int pat = kRedex;
          if (!child_redex) {
            std::vector<int> matched;
            bool redex = false;
            for (int p : by_symbol[f]) {
              const auto& node = ps.nodes[p];
              bool ok = true;
              for (int i = 0; i < k && ok; ++i) {
                int want = node.children[i];
                if (want < 0) continue;
                const auto& set = pat_sets[states[tuple[i]].pat];
                ok = std::binary_search(set.begin(), set.end(), want);
              }
              if (!ok) continue;
              if (ps.is_lhs[p]) redex = true;
              matched.push_back(p);
            }
            if (!redex) pat = pat_state(std::move(matched));
          }
          const auto snapshot = tuple;
          if (add_state(alg, pat, [&] {
                std::vector<Term> kids;
                for (std::size_t s : snapshot) kids.push_back(states[s].witness);
                return Term::app(f, std::move(kids));
              })) {
            grew = true;
            if (alg == kUndefined && pat != kRedex) {
              return {false, states.back().witness};
            }
          }
        }
        // advance odometer
        int i = k - 1;
        while (i >= 0 && ++tuple[i] == count) {
          tuple[i] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
    old_count = count;
  }
  return {true, std::nullopt};
}

bool check_undefined_implies_redex(const FiniteAlgebra& a, const Trs& trs) {
  return check_undefined_implies_redex_witness(a, trs).verdict;
}

// -- inclusion / rebinding -------------------------------------------------------------

FiniteAlgebra rebind(const FiniteAlgebra& a, const Signature& target) {
  FiniteAlgebra out(target, a.size());
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    auto g = target.find(a.signature().name(f));
    if (!g || target.arity(*g) != a.signature().arity(f)) {
      bool defined = false;
      for (Element e : a.table(f)) defined |= e != kUndefined;
      if (!defined) continue;
      throw AlgebraError("symbol '" + a.signature().name(f) + "' is not in the target signature");
    }
    auto table = a.table(f);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] != kUndefined) out.set(*g, a.tuple_of(f, idx), table[idx]);
    }
  }
  return out;
}

Inclusion language_included(const FiniteAlgebra& language, const FiniteAlgebra& a) {
  const Signature& sig = language.signature();
  std::vector<std::optional<SymbolId>> to_a(sig.size());
  for (SymbolId f = 0; f < sig.size(); ++f) {
    auto g = a.signature().find(sig.name(f));
    if (g && a.signature().arity(*g) == sig.arity(f)) to_a[f] = *g;
  }
  struct State {
    Element t;
    Element alg;
    Term witness;
  };
  std::vector<State> states;
  std::set<std::pair<Element, Element>> seen;
  std::size_t old_count = 0;
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = states.size();
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const int k = sig.arity(f);
      if (k == 0 && old_count > 0) continue;
      if (k > 0 && count == 0) continue;
      std::vector<std::size_t> tuple(static_cast<std::size_t>(k), 0);
      while (true) {
        bool fresh = k == 0 || std::any_of(tuple.begin(), tuple.end(), [&](std::size_t s) { return s >= old_count; });
        if (fresh) {
          std::vector<Element> tv, av;
          for (std::size_t s : tuple) {
            tv.push_back(states[s].t);
            av.push_back(states[s].alg);
          }
          Element t = language.lookup(f, tv);
          if (t != kUndefined) {
            Element alg = to_a[f] ? a.lookup(*to_a[f], av) : kUndefined;
            if (seen.emplace(t, alg).second) {
              std::vector<Term> kids;
              for (std::size_t s : tuple) kids.push_back(states[s].witness);
              states.push_back({t, alg, Term::app(f, std::move(kids))});
              grew = true;
              if (alg == kUndefined) return {false, states.back().witness};
            }
          }
        }
        int i = k - 1;
        while (i >= 0 && ++tuple[i] == count) {
          tuple[i] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
    old_count = count;
  }
  return {true, std::nullopt};
}

}  // namespace localterm
