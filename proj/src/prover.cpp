#include "localterm/prover.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_set>

#include "localterm/labeling.hpp"
#include "localterm/rfc.hpp"

namespace localterm {

// -- LPO ------------------------------------------------------------------------------

namespace {

bool prec_gt(const Precedence& rank, SymbolId f, SymbolId g) {
  if (f >= rank.size() || g >= rank.size()) return false;
  return rank[f] >= 0 && rank[g] >= 0 && rank[f] > rank[g];
}

}  // namespace

bool lpo_gt(const Precedence& rank, const Term& s, const Term& t) {
  if (s.is_var()) return false;
  if (t.is_var()) return contains_var(s, t.var_name());
  for (const Term& si : s.args()) {
    if (si == t || lpo_gt(rank, si, t)) return true;
  }
  auto all_below = [&](std::size_t from) {
    for (std::size_t j = from; j < t.arity(); ++j) {
      if (!lpo_gt(rank, s, t.arg(j))) return false;
    }
    return true;
  };
  if (s.symbol() == t.symbol()) {
    std::size_t i = 0;
    while (i < s.arity() && s.arg(i) == t.arg(i)) ++i;
    if (i == s.arity()) return false;
    return lpo_gt(rank, s.arg(i), t.arg(i)) && all_below(i + 1);
  }
  return prec_gt(rank, s.symbol(), t.symbol()) && all_below(0);
}

bool lpo_ge(const Precedence& rank, const Term& s, const Term& t) { return s == t || lpo_gt(rank, s, t); }

Precedence precedence_from(const Signature& sig, const std::vector<std::string>& greatest_first) {
  Precedence rank(sig.size(), -1);
  int r = static_cast<int>(greatest_first.size());
  for (const auto& name : greatest_first) {
    auto id = sig.find(name);
    if (!id) throw TermError("precedence names unknown symbol '" + name + "'");
    if (rank[*id] >= 0) throw TermError("symbol '" + name + "' listed twice in precedence");
    rank[*id] = r--;
  }
  return rank;
}

namespace {

// Strict partial precedence over at most 64 compact symbols, kept
// transitively closed: bit g of rows[f] means f > g.
struct Prec {
  std::vector<std::uint64_t> rows;
  friend bool operator==(const Prec&, const Prec&) = default;
};

bool subsumes(const Prec& weaker, const Prec& stronger) {
  for (std::size_t i = 0; i < weaker.rows.size(); ++i) {
    if ((weaker.rows[i] & ~stronger.rows[i]) != 0) return false;
  }
  return true;
}

class LpoSolver {
 public:
  LpoSolver(const std::vector<int>& compact, std::size_t budget) : compact_(compact), budget_(budget) {}

  bool exhausted() const { return spent_ > budget_; }

  std::optional<Prec> add(const Prec& p, SymbolId f0, SymbolId g0) const {
    int f = compact_[f0], g = compact_[g0];
    if (f == g) return std::nullopt;
    if ((p.rows[g] >> f) & 1) return std::nullopt;
    if ((p.rows[f] >> g) & 1) return p;
    Prec q = p;
    const std::uint64_t below = q.rows[g] | (std::uint64_t{1} << g);
    for (std::size_t a = 0; a < q.rows.size(); ++a) {
      if (static_cast<int>(a) == f || ((q.rows[a] >> f) & 1)) q.rows[a] |= below;
    }
    for (std::size_t a = 0; a < q.rows.size(); ++a) {
      if ((q.rows[a] >> a) & 1) return std::nullopt;
    }
    return q;
  }

  static void minimize(std::vector<Prec>& ps) {
    std::vector<Prec> out;
    for (const Prec& p : ps) {
      bool dominated = false;
      for (const Prec& q : out) {
        if (subsumes(q, p)) {
          dominated = true;
          break;
        }
      }
      if (dominated) continue;
      std::erase_if(out, [&](const Prec& q) { return subsumes(p, q); });
      out.push_back(p);
    }
    if (out.size() > kMaxAlternatives) out.resize(kMaxAlternatives);
    ps = std::move(out);
  }

  // All minimal extensions of p under which s >lpo t.
  std::vector<Prec> gt(const Term& s, const Term& t, const Prec& p) {
    ++spent_;
    if (exhausted()) return {};
    if (s.is_var()) return {};
    if (t.is_var()) {
      if (contains_var(s, t.var_name())) return {p};
      return {};
    }
    for (const Term& si : s.args()) {
      if (si == t) return {p};
    }
    std::vector<Prec> out;
    for (const Term& si : s.args()) {
      auto r = gt(si, t, p);
      out.insert(out.end(), r.begin(), r.end());
    }
    if (s.symbol() == t.symbol()) {
      std::size_t i = 0;
      while (i < s.arity() && s.arg(i) == t.arg(i)) ++i;
      if (i < s.arity()) {
        for (const Prec& p1 : gt(s.arg(i), t.arg(i), p)) {
          auto r = all_gt(s, t.args().subspan(i + 1), p1);
          out.insert(out.end(), r.begin(), r.end());
        }
      }
    } else if (auto p1 = add(p, s.symbol(), t.symbol())) {
      auto r = all_gt(s, t.args(), *p1);
      out.insert(out.end(), r.begin(), r.end());
    }
    minimize(out);
    return out;
  }

  std::vector<Prec> all_gt(const Term& s, std::span<const Term> ts, const Prec& p) {
    std::vector<Prec> cur{p};
    for (const Term& tj : ts) {
      std::vector<Prec> next;
      for (const Prec& q : cur) {
        auto r = gt(s, tj, q);
        next.insert(next.end(), r.begin(), r.end());
      }
      minimize(next);
      if (next.empty()) return {};
      cur = std::move(next);
    }
    return cur;
  }

 private:
  static constexpr std::size_t kMaxAlternatives = 32;
  const std::vector<int>& compact_;
  std::size_t budget_;
  std::size_t spent_ = 0;
};

}  // namespace

std::optional<std::vector<SymbolId>> prove_lpo(const Trs& trs, const std::set<std::size_t>& strict,
                                               const LpoOptions& options) {
  const Signature& sig = trs.signature;
  std::vector<int> compact(sig.size(), -1);
  std::vector<SymbolId> used;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.is_var()) return;
    if (compact[t.symbol()] < 0) {
      compact[t.symbol()] = static_cast<int>(used.size());
      used.push_back(t.symbol());
    }
    for (const Term& c : t.args()) collect(c);
  };
  for (const Rule& r : trs.rules) {
    collect(r.lhs);
    collect(r.rhs);
  }
  if (used.size() > options.max_symbols || used.size() > 64) return std::nullopt;
  // Compact ids follow the canonical symbol order.
  std::sort(used.begin(), used.end());
  for (std::size_t i = 0; i < used.size(); ++i) compact[used[i]] = static_cast<int>(i);

  LpoSolver solver(compact, options.node_budget);
  Prec start{std::vector<std::uint64_t>(used.size(), 0)};
  std::optional<Prec> found;
  std::function<bool(std::size_t, const Prec&)> dfs = [&](std::size_t k, const Prec& p) -> bool {
    if (solver.exhausted()) return false;
    if (k == trs.rules.size()) {
      found = p;
      return true;
    }
    const Rule& r = trs.rules[k];
    if (!strict.count(k) && r.lhs == r.rhs) return dfs(k + 1, p);
    for (const Prec& q : solver.gt(r.lhs, r.rhs, p)) {
      if (dfs(k + 1, q)) return true;
    }
    return false;
  };
  if (!dfs(0, start)) return std::nullopt;

  // Complete to a total order: repeatedly take the least-indexed maximal symbol.
  std::vector<SymbolId> order;
  std::vector<char> taken(used.size(), 0);
  for (std::size_t round = 0; round < used.size(); ++round) {
    for (std::size_t c = 0; c < used.size(); ++c) {
      if (taken[c]) continue;
      bool maximal = true;
      for (std::size_t a = 0; a < used.size(); ++a) {
        if (!taken[a] && ((found->rows[a] >> c) & 1)) {
          maximal = false;
          break;
        }
      }
      if (maximal) {
        taken[c] = 1;
        order.push_back(used[c]);
        break;
      }
    }
  }
  return order;
}

std::optional<std::vector<SymbolId>> prove_lpo(const Trs& trs, const LpoOptions& options) {
  std::set<std::size_t> all;
  for (std::size_t i = 0; i < trs.rules.size(); ++i) all.insert(i);
  return prove_lpo(trs, all, options);
}

// -- trace text format --------------------------------------------------------------------

std::string_view to_string(GoalKind g) {
  switch (g) {
    case GoalKind::kGlobal:
      return "global";
    case GoalKind::kLocal:
      return "local";
    case GoalKind::kRelative:
      return "relative";
  }
  return "global";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kProved:
      return "proved";
    case Outcome::kDisproved:
      return "disproved";
    case Outcome::kUnknown:
      return "unknown";
    case Outcome::kExported:
      return "exported";
  }
  return "unknown";
}

namespace {

void write_lines(std::ostringstream& os, const std::string& block, const std::string& indent) {
  std::istringstream is(block);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == ';') continue;
    os << indent << line << "\n";
  }
}

std::vector<std::size_t> parse_indices(const SExpr& e) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const SExpr& x = e.items[i];
    if (!x.is_atom || x.atom.empty() || !std::all_of(x.atom.begin(), x.atom.end(), ::isdigit)) {
      x.fail("expected a rule index");
    }
    out.push_back(std::stoul(x.atom));
  }
  return out;
}

std::string atom_of(const SExpr& e, const char* what) {
  if (!e.is_atom) e.fail(std::string("expected ") + what);
  return e.atom;
}

RemovalStep parse_step(const SExpr& e) {
  RemovalStep step;
  if (e.items.size() < 2) e.fail("expected (STEP tag ...)");
  step.tag = atom_of(e.items[1], "a step tag");
  static const std::set<std::string> kTags = {"transform",      "stepwise",   "quasicomb", "qremove",
                                              "linear-removal", "lpo-finish", "rfc"};
  if (!kTags.count(step.tag)) e.items[1].fail("unknown step tag '" + step.tag + "'");
  std::vector<SExpr> alg;
  for (std::size_t i = 2; i < e.items.size(); ++i) {
    const SExpr& x = e.items[i];
    const std::string& h = x.head();
    if (h == "REMOVE") {
      step.removed = parse_indices(x);
    } else if (h == "MIRROR") {
      step.mirror = x.items.size() == 2 && x.items[1].is_atom && x.items[1].atom == "true";
    } else if (h == "PRECEDENCE") {
      for (std::size_t j = 1; j < x.items.size(); ++j) step.precedence.push_back(atom_of(x.items[j], "a symbol"));
    } else if (h == "LEADS") {
      if (x.items.size() == 2 && x.items[1].is_atom && x.items[1].atom == "total") {
        step.leads_total = true;
      } else if (x.items.size() == 3) {
        auto a = parse_indices(x);
        step.leads.emplace_back(static_cast<Element>(a[0]), static_cast<Element>(a[1]));
      } else {
        x.fail("expected (LEADS a b) or (LEADS total)");
      }
    } else if (h == "NOTE") {
      for (std::size_t j = 1; j < x.items.size(); ++j) step.notes.push_back(atom_of(x.items[j], "text"));
    } else {
      alg.push_back(x);
    }
  }
  if (!alg.empty()) step.algebra = algebra_file_from(alg);
  for (auto [a, b] : step.leads) {
    if (a >= step.algebra.carrier_size || b >= step.algebra.carrier_size) e.fail("LEADS element out of range");
  }
  return step;
}

Outcome parse_outcome(const SExpr& e) {
  std::string o = e.items.size() == 2 ? atom_of(e.items[1], "an outcome") : "";
  if (o == "proved") return Outcome::kProved;
  if (o == "disproved") return Outcome::kDisproved;
  if (o == "unknown") return Outcome::kUnknown;
  if (o == "exported") return Outcome::kExported;
  e.fail("unknown outcome '" + o + "'");
}

ProofTrace parse_body(std::span<const SExpr> items, bool want_system) {
  ProofTrace t;
  bool goal_given = false;
  bool have_system = false;
  for (const SExpr& e : items) {
    const std::string& h = e.head();
    if (h == "GOAL") {
      std::string g = e.items.size() == 2 ? atom_of(e.items[1], "a goal") : "";
      if (g == "global") {
        t.goal = GoalKind::kGlobal;
      } else if (g == "local") {
        t.goal = GoalKind::kLocal;
      } else if (g == "relative") {
        t.goal = GoalKind::kRelative;
      } else {
        e.fail("unknown goal '" + g + "'");
      }
      goal_given = true;
    } else if (h == "SYSTEM") {
      if (!want_system) e.fail("a script must not embed the system");
      if (e.items.size() != 2 || !e.items[1].is_atom) e.fail("expected (SYSTEM \"...\")");
      t.system = parse_trs(e.items[1].atom);
      have_system = true;
    } else if (h == "RELATIVE") {
      t.relative = parse_indices(e);
    } else if (h == "SEED") {
      for (std::size_t j = 1; j < e.items.size(); ++j) t.seeds.push_back(atom_of(e.items[j], "a term"));
    } else if (h == "LANGUAGE") {
      t.language = algebra_file_from(std::span<const SExpr>(e.items).subspan(1));
    } else if (h == "STEP") {
      t.steps.push_back(parse_step(e));
    } else if (h == "OUTCOME") {
      t.outcome = parse_outcome(e);
    } else if (h == "LOOP") {
      t.loop = e.items.size() == 2 ? atom_of(e.items[1], "a term") : "";
    } else if (h == "EXPORTED") {
      t.export_path = e.items.size() == 2 ? atom_of(e.items[1], "a path") : "";
    } else if (h == "DIAGNOSTIC") {
      for (std::size_t j = 1; j < e.items.size(); ++j) t.diagnostics.push_back(atom_of(e.items[j], "text"));
    } else {
      e.fail("unknown trace line '" + (e.is_atom ? e.atom : h) + "'");
    }
  }
  if (want_system && !have_system) throw ParseError("trace has no (SYSTEM ...)", 1, 1);
  if (!goal_given) {
    if (!t.relative.empty()) {
      t.goal = GoalKind::kRelative;
    } else if (!t.seeds.empty() || t.language) {
      t.goal = GoalKind::kLocal;
    }
  }
  return t;
}

std::span<const SExpr> unwrap(const std::vector<SExpr>& top) {
  if (top.size() == 1 && top[0].head() == "TRACE") return std::span<const SExpr>(top[0].items).subspan(1);
  return top;
}

}  // namespace

std::string write_trace(const ProofTrace& t) {
  std::ostringstream os;
  os << "(TRACE\n";
  os << "  (GOAL " << to_string(t.goal) << ")\n";
  os << "  (SYSTEM " << quote(write_trs(t.system)) << ")\n";
  if (!t.relative.empty()) {
    os << "  (RELATIVE";
    for (auto i : t.relative) os << ' ' << i;
    os << ")\n";
  }
  for (const auto& s : t.seeds) os << "  (SEED " << quote(s) << ")\n";
  if (t.language) {
    os << "  (LANGUAGE\n";
    write_lines(os, write_algebra_file(*t.language), "    ");
    os << "  )\n";
  }
  for (const RemovalStep& s : t.steps) {
    os << "  (STEP " << s.tag << "\n";
    os << "    (REMOVE";
    for (auto i : s.removed) os << ' ' << i;
    os << ")\n";
    if (s.mirror) os << "    (MIRROR true)\n";
    if (!s.precedence.empty()) {
      os << "    (PRECEDENCE";
      for (const auto& p : s.precedence) os << ' ' << p;
      os << ")\n";
    }
    AlgebraFile alg = s.algebra;
    alg.comments.clear();
    write_lines(os, write_algebra_file(alg), "    ");
    if (s.leads_total) os << "    (LEADS total)\n";
    for (auto [a, b] : s.leads) os << "    (LEADS " << a << ' ' << b << ")\n";
    for (const auto& n : s.notes) os << "    (NOTE " << quote(n) << ")\n";
    os << "  )\n";
  }
  os << "  (OUTCOME " << to_string(t.outcome) << ")\n";
  if (!t.loop.empty()) os << "  (LOOP " << quote(t.loop) << ")\n";
  if (!t.export_path.empty()) os << "  (EXPORTED " << quote(t.export_path) << ")\n";
  for (const auto& d : t.diagnostics) os << "  (DIAGNOSTIC " << quote(d) << ")\n";
  os << ")\n";
  return os.str();
}

ProofTrace parse_trace(std::string_view text) {
  auto top = parse_sexprs(text);
  return parse_body(unwrap(top), true);
}

ProofTrace parse_script(const Trs& system, std::string_view text) {
  auto top = parse_sexprs(text);
  ProofTrace t = parse_body(unwrap(top), false);
  t.system = system;
  return t;
}

// -- replay --------------------------------------------------------------------------------

namespace {

std::string rule_text(const Signature& sig, const Rule& r) { return to_string(sig, r); }

Trs subsystem(const Trs& sys, const std::vector<std::size_t>& ids) {
  Trs out;
  out.signature = sys.signature;
  for (auto i : ids) out.rules.push_back(sys.rules[i]);
  return out;
}

// Unlisted symbols default to the identity (constants to 0).
LinearInterpretation interpretation_of(const AlgebraFile& f, const Signature& sig, bool fill_identity) {
  LinearInterpretation i = to_interpretation(f, sig, false);
  if (fill_identity) {
    std::set<std::string> listed;
    for (const auto& p : f.polys) listed.insert(p.symbol);
    for (SymbolId s = 0; s < sig.size(); ++s) {
      if (!listed.count(sig.name(s))) i.set(s, AffineForm::identity(sig.arity(s)));
    }
  }
  return i;
}

bool fully_defined(const LinearInterpretation& i) {
  for (SymbolId s = 0; s < i.signature().size(); ++s) {
    if (!i.form(s)) return false;
  }
  return true;
}

// Bookkeeping for one phase: a system and the fate of each rule.
struct Phase {
  Trs sys;
  enum State : char { kAlive, kRemoved, kDropped };
  std::vector<State> state;
  std::set<std::size_t> weak_only;
  bool has_language = false;  // seeds or LANGUAGE available
  bool global_phase = true;   // no starting language: mirror is allowed

  std::vector<std::size_t> with(State s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i] == s) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> not_dropped() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i] != kDropped) out.push_back(i);
    }
    return out;
  }
};

class Replayer {
 public:
  explicit Replayer(const ProofTrace& t) : trace_(t) {
    phase_.sys = t.system;
    phase_.state.assign(t.system.rules.size(), Phase::kAlive);
    phase_.weak_only.insert(t.relative.begin(), t.relative.end());
    phase_.has_language = !t.seeds.empty() || t.language.has_value();
    phase_.global_phase = !phase_.has_language;
  }

  ReplayReport run() {
    ReplayReport rep;
    for (const auto& i : trace_.relative) {
      if (i >= trace_.system.rules.size()) rep.diagnostics.push_back("RELATIVE index " + std::to_string(i) + " out of range");
    }
    try {
      parse_seeds();
    } catch (const std::exception& ex) {
      rep.diagnostics.push_back(std::string("seeds: ") + ex.what());
    }
    for (std::size_t k = 0; k < trace_.steps.size(); ++k) {
      StepReport sr;
      current_ = &sr;
      try {
        run_step(k, trace_.steps[k]);
      } catch (const std::exception& ex) {
        fail(ex.what());
      }
      sr.ok = sr.failures.empty();
      rep.steps.push_back(std::move(sr));
    }
    rep.remaining = phase_.with(Phase::kAlive);
    bool all_ok = rep.diagnostics.empty() &&
                  std::all_of(rep.steps.begin(), rep.steps.end(), [](const StepReport& s) { return s.ok; });
    bool consumed = std::all_of(rep.remaining.begin(), rep.remaining.end(),
                                [&](std::size_t i) { return phase_.weak_only.count(i) > 0; });
    if (!consumed) {
      std::ostringstream os;
      os << "rules not removed:";
      for (auto i : rep.remaining) {
        if (!phase_.weak_only.count(i)) os << ' ' << i;
      }
      rep.diagnostics.push_back(os.str());
    }
    rep.proved = all_ok && consumed;
    return rep;
  }

 private:
  void fail(const std::string& what) { current_->failures.push_back(what); }

  void parse_seeds() {
    for (const auto& s : trace_.seeds) {
      Term t = parse_term(trace_.system.signature, s);
      if (!t.ground()) throw TermError("seed '" + s + "' is not ground");
      seeds_.push_back(t);
    }
    if (trace_.language) language_ = to_algebra(*trace_.language);
  }

  // Validates and returns the removed set; failures are recorded.
  std::vector<std::size_t> removal_set(const RemovalStep& s) {
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (auto i : s.removed) {
      if (i >= phase_.state.size()) {
        fail("REMOVE index " + std::to_string(i) + " out of range");
        continue;
      }
      if (!seen.insert(i).second) {
        fail("REMOVE index " + std::to_string(i) + " listed twice");
        continue;
      }
      if (phase_.state[i] != Phase::kAlive) {
        fail("rule " + std::to_string(i) + " was already removed");
        continue;
      }
      if (phase_.weak_only.count(i)) {
        fail("rule " + std::to_string(i) + " is relative and may only decrease weakly");
        continue;
      }
      out.push_back(i);
    }
    return out;
  }

  void commit(const std::vector<std::size_t>& removed, Phase::State to) {
    for (auto i : removed) phase_.state[i] = to;
  }

  void run_step(std::size_t k, const RemovalStep& s) {
    if (s.tag == "transform" || s.tag == "rfc") {
      if (k != 0) fail(s.tag + " must be the first step");
      if (s.tag == "transform") {
        transform(s);
      } else {
        rfc(s);
      }
      return;
    }
    auto removed = removal_set(s);
    if (s.tag == "linear-removal") {
      linear_removal(s, removed);
    } else if (s.tag == "lpo-finish") {
      lpo_finish(s, removed);
    } else if (s.tag == "qremove") {
      qremove(s, removed);
      commit(removed, Phase::kDropped);
      return;
    } else if (s.tag == "quasicomb") {
      quasicomb(s, removed);
    } else if (s.tag == "stepwise") {
      if (s.algebra.carrier_size > 0) {
        stepwise_finite(s, removed);
      } else {
        stepwise_linear(s, removed);
      }
    }
    commit(removed, Phase::kRemoved);
  }

  // -- global steps --

  void linear_removal(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    if (s.mirror) {
      if (!phase_.global_phase) fail("mirroring needs a global phase");
      if (!is_string_shaped(phase_.sys.signature)) fail("mirroring needs a string-shaped system");
    }
    if (s.algebra.carrier_size > 0 || !s.algebra.entries.empty()) fail("linear-removal takes POLY lines only");
    Trs sys = s.mirror && is_string_shaped(phase_.sys.signature) ? mirror(phase_.sys) : phase_.sys;
    LinearInterpretation i = interpretation_of(s.algebra, sys.signature, true);
    if (!fully_defined(i)) fail("linear-removal needs a total interpretation");
    if (!check_fully_monotone(i)) fail("interpretation is not monotone in every argument");
    check_orientation(i, sys, removed);
  }

  void check_orientation(const LinearInterpretation& i, const Trs& sys, const std::vector<std::size_t>& removed) {
    std::set<std::size_t> strict(removed.begin(), removed.end());
    for (auto r : phase_.with(Phase::kAlive)) {
      bool st = strict.count(r) > 0;
      if (!check_rule(i, sys.rules[r], st)) {
        fail(std::string(st ? "not strictly" : "not weakly") + " decreasing: rule " + std::to_string(r) + " " +
             rule_text(sys.signature, sys.rules[r]));
      }
    }
  }

  void lpo_finish(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    Precedence rank = precedence_from(phase_.sys.signature, s.precedence);
    std::set<std::size_t> strict(removed.begin(), removed.end());
    for (auto r : phase_.with(Phase::kAlive)) {
      const Rule& rule = phase_.sys.rules[r];
      bool st = strict.count(r) > 0;
      bool ok = st ? lpo_gt(rank, rule.lhs, rule.rhs) : lpo_ge(rank, rule.lhs, rule.rhs);
      if (!ok) fail("LPO does not orient rule " + std::to_string(r) + " " + rule_text(phase_.sys.signature, rule));
    }
  }

  // -- phase changes --

  void transform(const RemovalStep& s) {
    if (s.algebra.carrier_size == 0) {
      fail("transform needs an algebra");
      return;
    }
    if (!s.removed.empty()) fail("transform removes no rules");
    Trs sys = phase_.sys;
    if (std::any_of(sys.rules.begin(), sys.rules.end(), [](const Rule& r) { return is_collapsing(r); })) {
      sys = eliminate_collapsing(sys);
      if (!phase_.weak_only.empty()) fail("relative rules cannot be combined with collapsing elimination");
    }
    FiniteAlgebra a = restrict_to_core(align_algebra(to_algebra(s.algebra), sys.signature));
    ModelReport rep = check_partial_model(a, sys);
    if (!rep.verdict) {
      fail("not a partial model: " + describe(a.signature(), sys.rules, rep.counterexamples.front()));
      return;
    }
    LabeledTrs lab = label_trs(a, sys);
    enter(lab);
  }

  void rfc(const RemovalStep& s) {
    if (trace_.goal != GoalKind::kGlobal) fail("rfc proves global termination only");
    if (!is_string_shaped(phase_.sys.signature)) {
      fail("rfc needs a string rewriting system");
      return;
    }
    MarkedSrs m = build_marked(phase_.sys);
    FiniteAlgebra a = to_algebra(s.algebra, m.marked.signature);
    ModelReport rep = check_rfc_closure(m, a);
    if (!rep.verdict) {
      for (const auto& c : rep.counterexamples) fail("closure: " + c.what);
      return;
    }
    enter(label_trs(a, m.base, LabelOptions{true, true}));
  }

  void enter(const LabeledTrs& lab) {
    Phase next;
    next.sys = lab.trs;
    next.state.assign(lab.trs.rules.size(), Phase::kAlive);
    for (std::size_t i = 0; i < lab.source_rule.size(); ++i) {
      if (phase_.weak_only.count(lab.source_rule[i])) next.weak_only.insert(i);
    }
    next.global_phase = true;
    phase_ = std::move(next);
    transformed_ = true;
  }

  // -- local steps --

  bool need_language(const std::string& tag) {
    if (transformed_) {
      fail(tag + " cannot follow a transform step");
      return false;
    }
    if (!phase_.has_language) {
      fail(tag + " needs a starting language (SEED or LANGUAGE)");
      return false;
    }
    return true;
  }

  // T ⊆ L(a) for a finite algebra aligned with the phase signature.
  void check_language(const FiniteAlgebra& a) {
    for (std::size_t k = 0; k < seeds_.size(); ++k) {
      if (!language_member(a, seeds_[k])) fail("seed " + trace_.seeds[k] + " is undefined");
    }
    if (language_) {
      Inclusion inc = language_included(*language_, a);
      if (!inc.verdict) {
        fail("language not included; witness " +
             (inc.witness ? to_string(language_->signature(), *inc.witness) : std::string("?")));
      }
    }
  }

  FiniteAlgebra finite_algebra(const RemovalStep& s) {
    if (s.algebra.carrier_size == 0) throw AlgebraError(s.tag + " needs a (CARRIER n) algebra");
    return align_algebra(to_algebra(s.algebra), phase_.sys.signature);
  }

  void relational(const FiniteAlgebra& a, const CarrierRelation& rel, const std::vector<std::size_t>& ids,
                  const std::string& what) {
    ModelReport rep = check_relational_model(a, rel, phase_.sys.signature, phase_.sys.rules, ids);
    if (!rep.verdict) {
      const Counterexample& c = rep.counterexamples.front();
      fail(what + " fails: " + describe(a.signature(), phase_.sys.rules, c));
    }
  }

  void closed_monotone(const FiniteAlgebra& a, const CarrierRelation& rel, const std::string& what) {
    ModelReport rep = check_closed_monotone(a, rel);
    if (!rep.verdict) {
      const Counterexample& c = rep.counterexamples.front();
      fail(what + ": " + c.what);
    }
  }

  void qremove(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    if (!need_language(s.tag)) return;
    FiniteAlgebra a = finite_algebra(s);
    CarrierRelation ge = ge_relation(s.algebra);
    relational(a, ge, phase_.not_dropped(), "monotone partial model (GE)");
    closed_monotone(a, ge, "GE");
    check_language(a);
    for (auto r : removed) {
      const Rule& rule = phase_.sys.rules[r];
      detail_lhs_undefined(a, rule, r);
    }
  }

  void detail_lhs_undefined(const FiniteAlgebra& a, const Rule& rule, std::size_t r) {
    auto vars = variables(rule.lhs);
    std::vector<Element> v(vars.size(), 0);
    const int n = a.size();
    while (true) {
      Assignment alpha;
      for (std::size_t i = 0; i < vars.size(); ++i) alpha[vars[i]] = v[i];
      if (auto val = interpret(a, rule.lhs, alpha)) {
        fail("lhs of rule " + std::to_string(r) + " is defined (value " + std::to_string(*val) + ")");
        return;
      }
      std::size_t i = vars.size();
      while (i > 0 && ++v[i - 1] == n) v[--i] = 0;
      if (i == 0) return;
    }
  }

  void quasicomb(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    if (!need_language(s.tag)) return;
    FiniteAlgebra a = finite_algebra(s);
    CarrierRelation ge = ge_relation(s.algebra);
    relational(a, ge, phase_.not_dropped(), "monotone partial model (GE)");
    closed_monotone(a, ge, "GE");
    check_language(a);

    std::set<std::size_t> strict(removed.begin(), removed.end());
    std::vector<std::size_t> weak_ids;
    for (auto r : phase_.with(Phase::kAlive)) {
      if (!strict.count(r)) weak_ids.push_back(r);
    }
    LabelOptions lo{true, false};
    LabeledTrs lab_strict = label_trs(a, subsystem(phase_.sys, removed), lo);
    LabeledTrs lab_weak = label_trs(a, subsystem(phase_.sys, weak_ids), lo);
    const LabeledSignature& lsig = lab_strict.lsig;
    LinearInterpretation b = to_interpretation(s.algebra, lsig.signature(), true);
    auto orient = [&](const LabeledTrs& lab, const std::vector<std::size_t>& ids, bool st) {
      for (std::size_t k = 0; k < lab.trs.rules.size(); ++k) {
        const Rule& r = lab.trs.rules[k];
        if (!check_rule(b, r, st)) {
          fail(std::string(st ? "labeled rule not strictly decreasing: " : "labeled rule not weakly decreasing: ") +
               rule_text(lsig.signature(), r) + " (from rule " + std::to_string(ids[lab.source_rule[k]]) + ")");
        }
      }
    };
    orient(lab_strict, removed, true);
    orient(lab_weak, weak_ids, false);
    Trs active = subsystem(phase_.sys, phase_.with(Phase::kAlive));
    ReplacementMap mu = nf_replacement_map(lsig, a, active);
    if (!check_mu_monotone(b, mu)) fail("B is not monotone on the positions outside NF states");
    if (!check_label_compat(b, lsig, ge)) fail("B is not compatible with GE on labels");
  }

  void stepwise_finite(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    if (!need_language(s.tag)) return;
    FiniteAlgebra a = finite_algebra(s);
    const int n = a.size();
    CarrierRelation weak = ge_relation(s.algebra);
    CarrierRelation strict = strict_relation(s.algebra);
    CarrierRelation leads = s.leads_total ? CarrierRelation::total(n) : CarrierRelation::from_pairs(n, s.leads);
    check_language(a);
    closed_monotone(a, leads, "LEADS");
    closed_monotone(a, strict, "STRICT");
    closed_monotone(a, weak, "GE");
    std::set<std::size_t> st(removed.begin(), removed.end());
    std::vector<std::size_t> weak_ids, prior;
    for (auto r : phase_.with(Phase::kAlive)) {
      if (!st.count(r)) weak_ids.push_back(r);
    }
    prior = phase_.with(Phase::kRemoved);
    relational(a, strict, removed, "STRICT model of the removed rules");
    relational(a, weak, weak_ids, "GE model of the remaining rules");
    relational(a, leads, prior, "LEADS model of the earlier removed rules");
    if (!check_relative_wf(strict, weak)) fail("STRICT is not well-founded relative to GE");
  }

  void stepwise_linear(const RemovalStep& s, const std::vector<std::size_t>& removed) {
    if (!need_language(s.tag)) return;
    if (!s.leads_total) fail("a linear stepwise step needs (LEADS total)");
    LinearInterpretation i = interpretation_of(s.algebra, phase_.sys.signature, false);
    for (std::size_t k = 0; k < seeds_.size(); ++k) {
      if (!evaluate(i, seeds_[k], {})) fail("seed " + trace_.seeds[k] + " is undefined");
    }
    if (language_) {
      auto c = core(*language_);
      std::vector<char> in_core(static_cast<std::size_t>(language_->size()), 0);
      for (Element e : c) in_core[e] = 1;
      const Signature& ls = language_->signature();
      for (SymbolId f = 0; f < ls.size(); ++f) {
        auto table = language_->table(f);
        bool used = false;
        for (std::size_t idx = 0; idx < table.size() && !used; ++idx) {
          if (table[idx] == kUndefined) continue;
          auto tuple = language_->tuple_of(f, idx);
          used = std::all_of(tuple.begin(), tuple.end(), [&](Element e) { return in_core[e] != 0; });
        }
        if (!used) continue;
        auto id = phase_.sys.signature.find(ls.name(f));
        if (!id || !i.form(*id)) fail("symbol " + ls.name(f) + " of the language is undefined");
      }
    }
    if (!check_fully_monotone(i)) fail("interpretation is not monotone in every argument");
    std::set<std::size_t> st(removed.begin(), removed.end());
    check_orientation(i, phase_.sys, removed);
    for (auto r : phase_.with(Phase::kRemoved)) {
      const Rule& rule = phase_.sys.rules[r];
      if (eval_symbolic(i, rule.lhs) && !eval_symbolic(i, rule.rhs)) {
        fail("earlier removed rule " + std::to_string(r) + " has a defined lhs but undefined rhs");
      }
    }
  }

  const ProofTrace& trace_;
  Phase phase_;
  bool transformed_ = false;
  std::vector<Term> seeds_;
  std::optional<FiniteAlgebra> language_;
  StepReport* current_ = nullptr;
};

}  // namespace

ReplayReport replay(const ProofTrace& trace) { return Replayer(trace).run(); }

ReplayReport check_stepwise_script(const ProofTrace& script) { return replay(script); }

// -- automated proofs --------------------------------------------------------------------------

std::optional<std::string> find_loop(const Trs& trs, std::size_t budget) {
  constexpr std::uint64_t kMaxSize = 400;
  for (const Rule& rule : trs.rules) {
    const Term& start = rule.lhs;
    std::unordered_set<Term, TermHash> seen{start};
    std::deque<Term> queue{start};
    std::size_t explored = 0;
    while (!queue.empty() && explored < budget) {
      Term u = queue.front();
      queue.pop_front();
      ++explored;
      for (const Successor& s : one_step_successors(trs, u)) {
        for (const Term& sub : subterms(s.result)) {
          if (!sub.is_var() && match(start, sub)) return to_string(trs.signature, start);
        }
        if (s.result.size() <= kMaxSize && seen.insert(s.result).second) queue.push_back(s.result);
      }
    }
  }
  return std::nullopt;
}

namespace {

Trs with_rules(const Trs& sys, const std::vector<std::size_t>& ids) { return subsystem(sys, ids); }

}  // namespace

void append_global_steps(ProofTrace& trace, const Trs& trs, const ProveOptions& options) {
  std::vector<std::size_t> alive(trs.rules.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  const bool can_mirror = options.mirror && is_string_shaped(trs.signature);
  const Trs mirrored = can_mirror ? mirror(trs) : Trs{};

  if (trs.rules.size() > options.max_internal_rules) {
    trace.diagnostics.push_back(std::to_string(trs.rules.size()) + " rules exceed the internal limit of " +
                                std::to_string(options.max_internal_rules));
  } else {
    SearchConstraints sc;
    sc.node_budget = options.node_budget;
    while (!alive.empty()) {
      bool progress = false;
      for (int pass = 0; pass < (can_mirror ? 2 : 1) && !progress; ++pass) {
        const Trs& base = pass == 0 ? trs : mirrored;
        Trs sub = with_rules(base, alive);
        for (std::size_t k = 0; k < alive.size() && !progress; ++k) {
          auto found = search_linear(sub, {k}, options.coeff_bound, sc);
          if (!found) continue;
          RemovalStep step;
          step.tag = "linear-removal";
          step.mirror = pass == 1;
          step.algebra.polys = poly_lines(*found);
          std::vector<std::size_t> keep;
          for (std::size_t j = 0; j < alive.size(); ++j) {
            if (check_rule(*found, sub.rules[j], true)) {
              step.removed.push_back(alive[j]);
            } else {
              keep.push_back(alive[j]);
            }
          }
          trace.steps.push_back(std::move(step));
          alive = std::move(keep);
          progress = true;
        }
      }
      if (!progress) break;
    }
    if (!alive.empty() && options.lpo) {
      Trs sub = with_rules(trs, alive);
      if (auto prec = prove_lpo(sub)) {
        RemovalStep step;
        step.tag = "lpo-finish";
        step.removed = alive;
        for (SymbolId f : *prec) step.precedence.push_back(trs.signature.name(f));
        trace.steps.push_back(std::move(step));
        alive.clear();
      }
    }
  }
  if (alive.empty()) {
    trace.outcome = Outcome::kProved;
    return;
  }
  Trs rest = with_rules(trs, alive);
  if (rest.rules.size() <= options.max_internal_rules) {
    if (auto loop = find_loop(rest, options.loop_budget)) {
      trace.outcome = Outcome::kDisproved;
      trace.loop = *loop;
      return;
    }
  }
  if (!options.export_path.empty()) {
    write_file(options.export_path, write_trs(rest));
    trace.export_path = options.export_path;
    trace.outcome = Outcome::kExported;
    return;
  }
  trace.outcome = Outcome::kUnknown;
}

ProofTrace prove_global(const Trs& trs, const ProveOptions& options) {
  ProofTrace trace;
  trace.goal = GoalKind::kGlobal;
  trace.system = trs;
  append_global_steps(trace, trs, options);
  return trace;
}

ProofTrace prove_local(const Trs& trs, const FiniteAlgebra& a, const ProveOptions& options) {
  ProofTrace trace;
  trace.goal = GoalKind::kLocal;
  trace.system = trs;
  Trs sys = trs;
  if (std::any_of(sys.rules.begin(), sys.rules.end(), [](const Rule& r) { return is_collapsing(r); })) {
    sys = eliminate_collapsing(sys);
    trace.diagnostics.push_back("collapsing rules instantiated: " + std::to_string(sys.rules.size()) + " rules");
  }
  FiniteAlgebra aligned = align_algebra(a, sys.signature);
  FiniteAlgebra ca = restrict_to_core(aligned);
  if (ca.size() != aligned.size()) {
    trace.diagnostics.push_back("restricted to core: " + std::to_string(ca.size()) + " of " +
                                std::to_string(aligned.size()) + " elements");
  }
  ModelReport rep = check_partial_model(ca, sys);
  if (!rep.verdict) {
    for (std::size_t k = 0; k < rep.counterexamples.size() && k < 10; ++k) {
      trace.diagnostics.push_back("not a partial model: " + describe(ca.signature(), sys.rules, rep.counterexamples[k]));
    }
    trace.outcome = Outcome::kUnknown;
    return trace;
  }
  RemovalStep step;
  step.tag = "transform";
  step.algebra = from_algebra(a);
  LabeledTrs lab = label_trs(ca, sys);
  step.notes.push_back(std::to_string(lab.trs.rules.size()) + " labeled rules");
  trace.steps.push_back(std::move(step));
  append_global_steps(trace, lab.trs, options);
  return trace;
}

}  // namespace localterm
