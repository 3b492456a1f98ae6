#include "localterm/discovery.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <omp.h>

namespace localterm {

Term Context::plug(const Term& t) const {
  Term cur = t;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    std::vector<Term> args;
    args.reserve(it->others.size() + 1);
    for (std::size_t i = 0, j = 0; i <= it->others.size(); ++i) {
      if (static_cast<int>(i) == it->hole) {
        args.push_back(cur);
      } else {
        args.push_back(it->others[j++]);
      }
    }
    cur = Term::app(it->symbol, std::move(args));
  }
  return cur;
}

std::string to_string(const Signature& sig, const Context& c) {
  std::string hole = "[]";
  std::string out = hole;
  for (auto it = c.layers.rbegin(); it != c.layers.rend(); ++it) {
    std::string s = sig.name(it->symbol) + "(";
    for (std::size_t i = 0, j = 0; i <= it->others.size(); ++i) {
      if (i) s += ",";
      s += static_cast<int>(i) == it->hole ? out : to_string(sig, it->others[j++]);
    }
    out = s + ")";
  }
  return out;
}

bool guess_normalizing(const Trs& trs, const Term& t, Strategy strategy, std::size_t d) {
  Rewriter rw(trs);
  auto r = rw.reduce(t, strategy, d);
  return r.reached_nf && r.steps < d;
}

bool behavior_distinct(const Trs& trs, const Term& s, const Term& t, const std::vector<Context>& contexts,
                       Strategy strategy, std::size_t d) {
  if (s == t) return false;
  Rewriter rw(trs);
  auto guess = [&](const Term& u) {
    auto r = rw.reduce(u, strategy, d);
    return r.reached_nf && r.steps < d;
  };
  for (const auto& c : contexts) {
    if (guess(c.plug(s)) != guess(c.plug(t))) return true;
  }
  return false;
}

namespace {

// Layers for one symbol/hole position, with filler tuples in lexicographic order.
void layers_for(const Signature& sig, const std::vector<Term>& fillers, std::vector<ContextLayer>& out) {
  for (SymbolId f = 0; f < sig.size(); ++f) {
    const int k = sig.arity(f);
    for (int hole = 0; hole < k; ++hole) {
      const int others = k - 1;
      if (others > 0 && fillers.empty()) continue;
      std::vector<std::size_t> idx(static_cast<std::size_t>(others), 0);
      while (true) {
        ContextLayer layer{f, hole, {}};
        for (std::size_t i : idx) layer.others.push_back(fillers[i]);
        out.push_back(std::move(layer));
        int i = others - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == fillers.size()) {
          idx[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
  }
}

}  // namespace

std::vector<Context> enumerate_contexts(const Signature& sig, const std::vector<Term>& fillers, int c) {
  std::vector<ContextLayer> layers;
  layers_for(sig, fillers, layers);
  std::vector<Context> out{Context{}};
  std::vector<Context> frontier{Context{}};
  for (int depth = 1; depth <= c; ++depth) {
    std::vector<Context> next;
    for (const auto& layer : layers) {
      for (const auto& inner : frontier) {
        Context ctx;
        ctx.layers.reserve(inner.layers.size() + 1);
        ctx.layers.push_back(layer);
        ctx.layers.insert(ctx.layers.end(), inner.layers.begin(), inner.layers.end());
        next.push_back(std::move(ctx));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

Validation validate_model(const FiniteAlgebra& a, const Trs& trs) {
  Validation v;
  auto report = check_partial_model(a, trs);
  v.partial_model = report.verdict;
  for (std::size_t i = 0; i < report.counterexamples.size() && i < 5; ++i) {
    v.diagnostics.push_back("partial model: " + describe(trs.signature, trs.rules, report.counterexamples[i]));
  }
  if (is_left_linear(trs)) {
    auto cov = check_undefined_implies_redex_witness(a, trs);
    v.nf_coverage = cov.verdict;
    v.nf_coverage_checked = true;
    if (!cov.verdict) {
      v.diagnostics.push_back("undefined normal form: " + to_string(a.signature(), *cov.witness));
    }
  } else {
    v.diagnostics.push_back("coverage check skipped: system is not left-linear");
  }
  return v;
}

namespace {

template <bool kParallel>
DiscoveryResult discover_impl(const Trs& trs, const DiscoveryParams& params) {
  if (params.c < 0 || params.d < 1 || params.max_states < 1 || params.filler_depth < 0) throw std::invalid_argument("invalid discovery parameters");
  if (trs.signature.constants().empty()) throw std::invalid_argument("the signature has no constant");
  const Signature& sig = trs.signature;
  DiscoveryResult result;
  result.params = params;

  // Ground terms of depth <= filler_depth, constants having depth 0.
  std::vector<Term> base_fillers;
  {
    std::set<Term, CanonicalLess> level;
    for (SymbolId c : sig.constants()) level.insert(Term::constant(c));
    for (int depth = 1; depth <= params.filler_depth; ++depth) {
      std::vector<Term> prev(level.begin(), level.end());
      for (SymbolId f = 0; f < sig.size(); ++f) {
        const int k = sig.arity(f);
        if (k == 0) continue;
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        while (true) {
          std::vector<Term> args;
          for (std::size_t i : idx) args.push_back(prev[i]);
          level.insert(Term::app(f, std::move(args)));
          int i = k - 1;
          while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == prev.size()) {
            idx[static_cast<std::size_t>(i)] = 0;
            --i;
          }
          if (i < 0) break;
        }
      }
    }
    base_fillers.assign(level.begin(), level.end());
  }

  std::vector<Term> reps;
  std::vector<Context> contexts;
  std::set<std::string> context_keys;
  struct Row {
    Term term;
    std::vector<char> sig;  // one entry per context computed so far
    bool normalizing = false;
    bool probed = false;
    bool candidate = false;  // f(representatives); others are one-layer extensions
  };
  std::vector<Row> rows;
  std::unordered_map<Term, std::size_t, TermHash> row_of;
  std::vector<std::size_t> rep_rows;

  const int threads = kParallel ? omp_get_max_threads() : 1;
  std::vector<std::unique_ptr<Rewriter>> rewriters;
  for (int i = 0; i < threads; ++i) rewriters.push_back(std::make_unique<Rewriter>(trs));
  std::vector<std::unique_ptr<InnermostNormalizer>> normalizers;
  const bool innermost = params.strategy == Strategy::kLeftmostInnermost;
  if (innermost) {
    for (int i = 0; i < threads; ++i) normalizers.push_back(std::make_unique<InnermostNormalizer>(trs, params.d - 1));
  }
  auto guess_at = [&](int tid, const Term& t) {
    if (innermost) return normalizers[static_cast<std::size_t>(tid)]->steps(t).has_value();
    auto r = rewriters[static_cast<std::size_t>(tid)]->reduce(t, params.strategy, params.d);
    return r.reached_nf && r.steps < params.d;
  };

  auto add_context = [&](Context ctx) {
    std::string key = to_string(sig, ctx);
    if (!context_keys.insert(std::move(key)).second) return false;
    contexts.push_back(std::move(ctx));
    return true;
  };
  for (auto& ctx : enumerate_contexts(sig, base_fillers, params.c)) add_context(std::move(ctx));

  auto add_row = [&](const Term& t, bool candidate) {
    auto [it, inserted] = row_of.emplace(t, rows.size());
    if (inserted) {
      rows.push_back({t, {}, false, false, candidate});
    } else if (candidate) {
      rows[it->second].candidate = true;
    }
    return it->second;
  };

  auto add_candidates = [&] {
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const int k = sig.arity(f);
      if (k > 0 && reps.empty()) continue;
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      while (true) {
        std::vector<Term> args;
        for (std::size_t i : idx) args.push_back(reps[i]);
        add_row(Term::app(f, args), true);
        int i = k - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == reps.size()) {
          idx[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
  };

  auto fill_signatures = [&] {
    // First decide normalization of unprobed rows, then extend normalizing rows.
    std::vector<std::size_t> probe;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].probed) probe.push_back(r);
    }
    auto probe_one = [&](std::size_t i, int tid) {
      Row& row = rows[probe[i]];
      row.normalizing = guess_at(tid, row.term);
      row.probed = true;
    };
    if constexpr (kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(probe.size()); ++i) {
        probe_one(static_cast<std::size_t>(i), omp_get_thread_num());
      }
    } else {
      for (std::size_t i = 0; i < probe.size(); ++i) probe_one(i, 0);
    }
    result.reductions += probe.size();

    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Row& row = rows[r];
      if (!row.normalizing) continue;
      const std::size_t from = row.sig.size();
      row.sig.resize(contexts.size(), 0);
      for (std::size_t c = from; c < contexts.size(); ++c) work.emplace_back(r, c);
    }
    auto run_one = [&](std::size_t i, int tid) {
      auto [r, c] = work[i];
      rows[r].sig[c] = c == 0 ? 1 : guess_at(tid, contexts[c].plug(rows[r].term));
    };
    if constexpr (kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(work.size()); ++i) {
        run_one(static_cast<std::size_t>(i), omp_get_thread_num());
      }
    } else {
      for (std::size_t i = 0; i < work.size(); ++i) run_one(i, 0);
    }
    result.reductions += work.size();
  };

  // Layers f(r1, ..., hole, ..., rk) with representatives as the other arguments.
  auto rep_layers = [&] {
    std::vector<ContextLayer> layers;
    layers_for(sig, reps, layers);
    return layers;
  };
  auto plug_layer = [](const ContextLayer& layer, const Term& t) { return Context{{layer}}.plug(t); };

  while (true) {
    add_candidates();
    fill_signatures();
    std::map<std::vector<char>, std::size_t> rep_by_sig;
    for (std::size_t i = 0; i < rep_rows.size(); ++i) rep_by_sig.emplace(rows[rep_rows[i]].sig, i);
    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].candidate && rows[r].normalizing) order.push_back(r);
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return canonical_compare(rows[x].term, rows[y].term) < 0; });
    std::optional<std::size_t> fresh;
    for (std::size_t r : order) {
      if (!rep_by_sig.count(rows[r].sig)) {
        fresh = r;
        break;
      }
    }
    if (fresh) {
      if (reps.size() >= params.max_states) {
        result.aborted = true;
        break;
      }
      reps.push_back(rows[*fresh].term);
      rep_rows.push_back(*fresh);
      continue;
    }

    // Consistency: a row and its representative must agree after one more
    // layer L. A disagreement under context C yields the new context C[L].
    // These contexts may be deeper than c; each one splits a class, so the
    // state limit bounds their number.
    const auto layers = rep_layers();
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> pairs;  // row, layer, ext rows
    for (std::size_t r : order) {
      const std::size_t p = rep_rows[rep_by_sig.at(rows[r].sig)];
      if (p == r) continue;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        std::size_t u = add_row(plug_layer(layers[l], rows[r].term), false);
        std::size_t v = add_row(plug_layer(layers[l], rows[p].term), false);
        pairs.emplace_back(r, l, u, v);
      }
    }
    fill_signatures();
    bool grew = false;
    for (auto [r, l, u, v] : pairs) {
      const Row& ru = rows[u];
      const Row& rv = rows[v];
      if (ru.normalizing == rv.normalizing && (!ru.normalizing || ru.sig == rv.sig)) continue;
      std::size_t j = 0;
      if (ru.normalizing == rv.normalizing) {
        while (ru.sig[j] == rv.sig[j]) ++j;
      }
      Context ctx = contexts[j];
      ctx.layers.push_back(layers[l]);  // innermost
      grew |= add_context(std::move(ctx));
    }
    if (!grew) break;
  }
  result.contexts = contexts.size();
  result.representatives = reps;

  if (reps.empty()) {
    result.empty_language = true;
    result.algebra = FiniteAlgebra(sig, 1);
    result.validated.diagnostics.push_back("empty language: no ground term was guessed normalizing");
    return result;
  }
  // Assemble the tables.
  FiniteAlgebra a(sig, static_cast<int>(reps.size()));
  std::map<std::vector<char>, std::size_t> rep_by_sig;
  for (std::size_t i = 0; i < rep_rows.size(); ++i) rep_by_sig.emplace(rows[rep_rows[i]].sig, i);
  bool ambiguous = false;
  for (SymbolId f = 0; f < sig.size(); ++f) {
    const int k = sig.arity(f);
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    while (true) {
      std::vector<Term> args;
      std::vector<Element> tuple;
      for (std::size_t i : idx) {
        args.push_back(reps[i]);
        tuple.push_back(static_cast<Element>(i));
      }
      Term t = Term::app(f, args);
      auto it = row_of.find(t);
      if (it != row_of.end() && rows[it->second].normalizing) {
        auto rep = rep_by_sig.find(rows[it->second].sig);
        if (rep == rep_by_sig.end()) {
          ambiguous = true;
        } else {
          a.set(f, tuple, static_cast<Element>(rep->second));
        }
      }
      int i = k - 1;
      while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == reps.size()) {
        idx[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  result.algebra = std::move(a);
  if (result.aborted) {
    result.validated.diagnostics.push_back("aborted: more than " + std::to_string(params.max_states) + " states");
    return result;
  }
  result.validated = validate_model(result.algebra, trs);
  if (ambiguous) {
    result.validated.partial_model = false;
    result.validated.diagnostics.push_back("parameter failure: a candidate matched no representative");
  }
  return result;
}

}  // namespace

DiscoveryResult discover_model(const Trs& trs, const DiscoveryParams& params) {
  return discover_impl<true>(trs, params);
}

namespace serial {
DiscoveryResult discover_model(const Trs& trs, const DiscoveryParams& params) {
  return discover_impl<false>(trs, params);
}
}  // namespace serial

std::vector<DiscoveryResult> discover_with_escalation(const Trs& trs, const DiscoveryParams& start,
                                                      const EscalationLimits& limits) {
  std::vector<DiscoveryResult> attempts;
  for (int c = start.c; c <= std::max(start.c, limits.c_max); ++c) {
    for (std::size_t d = start.d; d <= std::max(start.d, limits.d_max); d *= 2) {
      DiscoveryParams p = start;
      p.c = c;
      p.d = d;
      attempts.push_back(discover_model(trs, p));
      const auto& r = attempts.back();
      if (r.empty_language || (r.validated.passed() && !r.aborted)) return attempts;
    }
  }
  return attempts;
}

std::vector<Element> canonical_numbering(const FiniteAlgebra& a) {
  const Signature& sig = a.signature();
  std::vector<Element> order;
  std::vector<char> seen(static_cast<std::size_t>(a.size()), 0);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = order.size();
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const int k = sig.arity(f);
      if (k > 0 && count == 0) continue;
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      while (true) {
        std::vector<Element> tuple;
        for (std::size_t i : idx) tuple.push_back(order[i]);
        Element r = a.lookup(f, tuple);
        if (r != kUndefined && !seen[r]) {
          seen[r] = 1;
          order.push_back(r);
          grew = true;
        }
        int i = k - 1;
        while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == count) {
          idx[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
  }
  return order;
}

std::optional<std::vector<Element>> models_isomorphic(const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (a.size() != b.size()) return std::nullopt;
  // Symbols must correspond by name; symbols undefined everywhere may be absent.
  std::vector<std::optional<SymbolId>> to_b(a.signature().size());
  auto defined_somewhere = [](const FiniteAlgebra& x, SymbolId f) {
    for (Element e : x.table(f)) {
      if (e != kUndefined) return true;
    }
    return false;
  };
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    auto g = b.signature().find(a.signature().name(f));
    if (g && b.signature().arity(*g) != a.signature().arity(f)) return std::nullopt;
    if (!g && defined_somewhere(a, f)) return std::nullopt;
    to_b[f] = g;
  }
  for (SymbolId g = 0; g < b.signature().size(); ++g) {
    if (!a.signature().find(b.signature().name(g)) && defined_somewhere(b, g)) return std::nullopt;
  }
  // Number b's elements with a's symbol order so both closures run in step.
  FiniteAlgebra b_aligned(a.signature(), b.size());
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    if (!to_b[f]) continue;
    auto table = b.table(*to_b[f]);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] != kUndefined) b_aligned.set(f, b.tuple_of(*to_b[f], idx), table[idx]);
    }
  }
  auto na = canonical_numbering(a);
  auto nb = canonical_numbering(b_aligned);
  if (na.size() != static_cast<std::size_t>(a.size()) || nb.size() != na.size()) return std::nullopt;
  std::vector<Element> map(static_cast<std::size_t>(a.size()));
  for (std::size_t i = 0; i < na.size(); ++i) map[na[i]] = nb[i];
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    auto table = a.table(f);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      auto tuple = a.tuple_of(f, idx);
      for (Element& e : tuple) e = map[e];
      Element want = table[idx] == kUndefined ? kUndefined : map[table[idx]];
      if (b_aligned.lookup(f, tuple) != want) return std::nullopt;
    }
  }
  return map;
}

}  // namespace localterm
