#include "localterm/rfc.hpp"

#include <algorithm>
#include <sstream>

#include "localterm/labeling.hpp"

namespace localterm {

namespace {

std::string fresh_name(const Signature& sig, std::string name) {
  while (sig.find(name)) name += '\'';
  return name;
}

}  // namespace

MarkedSrs build_marked(const Trs& srs) {
  if (!is_string_shaped(srs.signature)) throw TermError("forward closures need a string rewriting system");
  MarkedSrs m;
  m.base = srs;
  auto constants = srs.signature.constants();
  if (constants.empty()) {
    m.constant = m.base.signature.add(fresh_name(srs.signature, "e"), 0);
  } else {
    m.constant = constants.front();
  }
  m.marked.signature = m.base.signature;
  m.marker = m.marked.signature.add(fresh_name(m.base.signature, "#"), 1);
  m.marked.rules = m.base.rules;
  const Term x = Term::var("x");
  for (const Rule& r : m.base.rules) {
    auto lw = word_of(r.lhs);
    auto rw = word_of(r.rhs);
    for (std::size_t cut = 1; cut < lw.size(); ++cut) {
      std::span<const SymbolId> u(lw.data(), cut);
      Rule marked{Term::app(m.marker, {term_of_word(u, x)}), Term::app(m.marker, {term_of_word(rw, x)})};
      if (std::find(m.marked.rules.begin(), m.marked.rules.end(), marked) == m.marked.rules.end()) {
        m.marked.rules.push_back(std::move(marked));
      }
    }
  }
  const Term e = Term::constant(m.constant);
  for (const Rule& r : m.base.rules) {
    Term seed = Term::app(m.marker, {term_of_word(word_of(r.rhs), e)});
    if (std::find(m.seeds.begin(), m.seeds.end(), seed) == m.seeds.end()) m.seeds.push_back(seed);
  }
  return m;
}

ModelReport check_rfc_closure(const MarkedSrs& m, const FiniteAlgebra& a) {
  FiniteAlgebra al = align_algebra(a, m.marked.signature);
  ModelReport rep = check_partial_model(al, m.marked);
  for (auto& c : rep.counterexamples) {
    if (c.what.empty() || c.what.find("rule") == std::string::npos) {
      c.what = describe(al.signature(), m.marked.rules, c);
    }
  }
  std::vector<Counterexample> seed_failures;
  for (const Term& s : m.seeds) {
    if (!language_member(al, s)) {
      Counterexample c;
      c.rule_index = m.marked.rules.size();
      c.what = "seed " + to_string(m.marked.signature, s) + " is undefined";
      seed_failures.push_back(std::move(c));
    }
  }
  rep.counterexamples.insert(rep.counterexamples.begin(), seed_failures.begin(), seed_failures.end());
  rep.verdict = rep.counterexamples.empty();
  return rep;
}

std::vector<std::string> excluded_factors(const MarkedSrs& m, const FiniteAlgebra& a, std::size_t max_length) {
  FiniteAlgebra al = align_algebra(a, m.marked.signature);
  std::vector<SymbolId> letters;
  for (SymbolId f = 0; f < m.base.signature.size(); ++f) {
    if (m.base.signature.arity(f) == 1) letters.push_back(f);
  }
  // States reachable by words over the base letters from the constant.
  std::vector<Element> reach;
  if (auto e = al.apply(m.constant, {})) {
    reach.push_back(*e);
    for (std::size_t k = 0; k < reach.size(); ++k) {
      for (SymbolId f : letters) {
        Element q = reach[k];
        if (auto r = al.apply(f, std::span<const Element>(&q, 1))) {
          if (std::find(reach.begin(), reach.end(), *r) == reach.end()) reach.push_back(*r);
        }
      }
    }
  }
  auto excluded = [&](const std::vector<SymbolId>& w) {
    for (Element q : reach) {
      Element cur = q;
      bool defined = true;
      for (SymbolId f : w) {
        auto r = al.apply(f, std::span<const Element>(&cur, 1));
        if (!r) {
          defined = false;
          break;
        }
        cur = *r;
      }
      if (defined) return false;
    }
    return true;
  };
  std::vector<std::vector<SymbolId>> found;
  auto has_excluded_factor = [&](const std::vector<SymbolId>& w) {
    for (const auto& f : found) {
      if (f.size() < w.size() && std::search(w.begin(), w.end(), f.begin(), f.end()) != w.end()) return true;
    }
    return false;
  };
  std::vector<std::vector<SymbolId>> layer{{}};
  for (std::size_t len = 1; len <= max_length && !letters.empty(); ++len) {
    std::vector<std::vector<SymbolId>> next;
    for (const auto& w : layer) {
      for (SymbolId f : letters) {
        auto v = w;
        v.push_back(f);
        if (has_excluded_factor(v)) continue;
        if (excluded(v)) {
          found.push_back(v);
        } else {
          next.push_back(std::move(v));
        }
      }
    }
    layer = std::move(next);
  }
  std::vector<std::string> out;
  for (const auto& w : found) {
    std::string s;
    for (SymbolId f : w) {
      if (!s.empty()) s += ' ';
      s += m.base.signature.name(f);
    }
    out.push_back(s);
  }
  return out;
}

ProofTrace rfc_pipeline(const Trs& srs, const FiniteAlgebra& a, const ProveOptions& options) {
  ProofTrace trace;
  trace.goal = GoalKind::kGlobal;
  trace.system = srs;
  MarkedSrs m = build_marked(srs);
  ModelReport rep = check_rfc_closure(m, a);
  if (!rep.verdict) {
    for (std::size_t k = 0; k < rep.counterexamples.size() && k < 10; ++k) {
      trace.diagnostics.push_back("closure fails: " + rep.counterexamples[k].what);
    }
    if (auto loop = find_loop(srs, options.loop_budget)) {
      trace.outcome = Outcome::kDisproved;
      trace.loop = *loop;
    }
    return trace;
  }
  FiniteAlgebra al = restrict_to_core(align_algebra(a, m.marked.signature));
  LabeledTrs lab = label_trs(al, m.base, LabelOptions{true, false});
  RemovalStep step;
  step.tag = "rfc";
  step.algebra = from_algebra(al);
  step.notes.push_back(std::to_string(m.marked.rules.size() - m.base.rules.size()) + " end-marker rules, " +
                       std::to_string(lab.trs.rules.size()) + " labeled rules");
  for (const auto& w : excluded_factors(m, al)) step.notes.push_back("excluded factor: " + w);
  trace.steps.push_back(std::move(step));
  ProveOptions po = options;
  po.mirror = true;
  append_global_steps(trace, lab.trs, po);
  if (trace.outcome == Outcome::kUnknown) {
    if (auto loop = find_loop(srs, options.loop_budget)) {
      trace.outcome = Outcome::kDisproved;
      trace.loop = *loop;
    }
  }
  return trace;
}

namespace {

constexpr Element kUnassigned = -2;

// Lazy enumeration of closing algebras: entries are fixed only when some
// requirement evaluates them, trying "undefined" first and new states in
// order of first use.
class ClosingSearcher {
 public:
  ClosingSearcher(const MarkedSrs& m, int n, std::size_t budget) : m_(m), n_(n), budget_(budget) {
    const Signature& sig = m.marked.signature;
    offset_.resize(sig.size());
    std::size_t total = 0;
    for (SymbolId f = 0; f < sig.size(); ++f) {
      offset_[f] = total;
      total += sig.arity(f) == 0 ? 1 : static_cast<std::size_t>(n);
    }
    table_.assign(total, kUnassigned);
    // The last state is reserved for marked words: nothing is defined on it
    // and only the marker may produce it.
    sink_ = n - 1;
    for (SymbolId f = 0; f < sig.size(); ++f) {
      if (sig.arity(f) == 1) table_[offset_[f] + static_cast<std::size_t>(sink_)] = kUndefined;
    }
    for (const Term& s : m.seeds) seeds_.push_back(word_of(s));
    for (const Rule& r : m.marked.rules) {
      rules_.push_back({word_of(r.lhs), word_of(r.rhs)});
    }
  }

  // Calls visit on each complete solution until it returns true.
  template <class Visit>
  bool run(Visit&& visit) {
    return dfs(visit);
  }

  bool exhausted() const { return nodes_ > budget_; }
  std::size_t nodes() const { return nodes_; }

  FiniteAlgebra algebra() const {
    FiniteAlgebra a(m_.marked.signature, n_);
    const Signature& sig = m_.marked.signature;
    for (SymbolId f = 0; f < sig.size(); ++f) {
      if (sig.arity(f) == 0) {
        Element v = table_[offset_[f]];
        if (v >= 0) a.define(f, {}, v);
        continue;
      }
      for (Element q = 0; q < n_; ++q) {
        Element v = table_[offset_[f] + q];
        if (v >= 0) a.define(f, std::span<const Element>(&q, 1), v);
      }
    }
    return a;
  }

 private:
  struct Eval {
    Element value = kUndefined;
    std::size_t need = SIZE_MAX;  // entry to decide first
  };

  Eval run_word(Element start, const std::vector<SymbolId>& w) const {
    Eval r;
    Element cur = start;
    for (SymbolId f : w) {
      std::size_t slot = offset_[f] + static_cast<std::size_t>(cur);
      Element v = table_[slot];
      if (v == kUnassigned) {
        r.need = slot;
        return r;
      }
      if (v == kUndefined) return r;
      cur = v;
    }
    r.value = cur;
    return r;
  }

  // SIZE_MAX with ok=true: all requirements hold.
  std::size_t first_open(bool& ok) const {
    ok = true;
    std::size_t const_slot = offset_[m_.constant];
    Element e = table_[const_slot];
    if (e == kUnassigned) return const_slot;
    for (const auto& w : seeds_) {
      if (e == kUndefined) {
        ok = false;
        return SIZE_MAX;
      }
      Eval r = run_word(e, w);
      if (r.need != SIZE_MAX) return r.need;
      if (r.value == kUndefined) {
        ok = false;
        return SIZE_MAX;
      }
    }
    for (const auto& [lw, rw] : rules_) {
      for (Element q = 0; q < used_; ++q) {
        Eval l = run_word(q, lw);
        if (l.need != SIZE_MAX) return l.need;
        if (l.value == kUndefined) continue;
        Eval r = run_word(q, rw);
        if (r.need != SIZE_MAX) return r.need;
        if (r.value != l.value) {
          ok = false;
          return SIZE_MAX;
        }
      }
    }
    return SIZE_MAX;
  }

  template <class Visit>
  bool dfs(Visit& visit) {
    if (++nodes_ > budget_) return false;
    bool ok = true;
    std::size_t slot = first_open(ok);
    if (!ok) return false;
    if (slot == SIZE_MAX) return visit();
    const int saved_used = used_;
    std::vector<Element> options{kUndefined};
    if (is_marker_slot(slot)) {
      options.push_back(sink_);
    } else {
      for (Element v = 0; v < used_; ++v) options.push_back(v);
      if (used_ < sink_) options.push_back(used_);
    }
    for (Element v : options) {
      table_[slot] = v;
      if (v == used_) ++used_;
      if (dfs(visit)) return true;
      used_ = saved_used;
      if (exhausted()) break;
    }
    table_[slot] = kUnassigned;
    return false;
  }

  bool is_marker_slot(std::size_t slot) const {
    return slot >= offset_[m_.marker] && slot < offset_[m_.marker] + static_cast<std::size_t>(n_);
  }

  const MarkedSrs& m_;
  int n_;
  Element sink_ = 0;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  int used_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<Element> table_;
  std::vector<std::vector<SymbolId>> seeds_;
  std::vector<std::pair<std::vector<SymbolId>, std::vector<SymbolId>>> rules_;
};

}  // namespace

ClosingSearch search_closing_algebra(const Trs& srs, int max_states, const ProveOptions& options,
                                     std::size_t node_budget) {
  ClosingSearch out;
  MarkedSrs m = build_marked(srs);
  std::size_t spent = 0;
  ProveOptions po = options;
  po.export_path.clear();
  for (int n = 2; n <= max_states; ++n) {
    if (spent > node_budget) break;
    ClosingSearcher searcher(m, n, node_budget - spent);
    bool found = searcher.run([&] {
      FiniteAlgebra a = restrict_to_core(searcher.algebra());
      if (a.size() != n) return false;  // already tried with fewer states
      ++out.candidates;
      ProofTrace t = rfc_pipeline(srs, a, po);
      if (t.outcome != Outcome::kProved) return false;
      out.algebra = a;
      out.trace = std::move(t);
      return true;
    });
    spent += searcher.nodes();
    if (found) return out;
    if (searcher.exhausted()) {
      out.exhausted = true;
      break;
    }
  }
  return out;
}

}  // namespace localterm
