#include "localterm/terms.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace localterm {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > Term::kSizeCap - b ? Term::kSizeCap : a + b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Signature

SymbolId Signature::add(std::string name, int arity) {
  if (name.empty()) throw TermError("symbol name must be non-empty");
  if (arity < 0) throw TermError("negative arity for symbol '" + name + "'");
  if (index_.count(name)) throw TermError("duplicate symbol '" + name + "'");
  auto id = static_cast<SymbolId>(symbols_.size());
  index_.emplace(name, id);
  symbols_.push_back({std::move(name), arity});
  return id;
}

SymbolId Signature::ensure(const std::string& name, int arity) {
  if (auto id = find(name)) {
    if (symbols_[*id].arity != arity) {
      throw TermError("symbol '" + name + "' used with arities " +
                      std::to_string(symbols_[*id].arity) + " and " + std::to_string(arity));
    }
    return *id;
  }
  return add(name, arity);
}

std::optional<SymbolId> Signature::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<SymbolId> Signature::constants() const {
  std::vector<SymbolId> out;
  for (SymbolId i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].arity == 0) out.push_back(i);
  }
  return out;
}

bool operator==(const Signature& a, const Signature& b) {
  if (a.symbols_.size() != b.symbols_.size()) return false;
  for (std::size_t i = 0; i < a.symbols_.size(); ++i) {
    if (a.symbols_[i].name != b.symbols_[i].name || a.symbols_[i].arity != b.symbols_[i].arity) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Term

Term Term::var(std::string name) {
  auto node = std::make_shared<detail::TermNode>();
  node->is_var = true;
  node->hash = mix(0x51ed27, std::hash<std::string>{}(name));
  node->var_name = std::move(name);
  node->ground = false;
  return Term(std::move(node));
}

Term Term::app(SymbolId symbol, std::vector<Term> args) {
  auto node = std::make_shared<detail::TermNode>();
  node->symbol = symbol;
  std::size_t h = mix(0x7a3c1, symbol);
  std::uint64_t size = 1;
  std::uint32_t depth = 0;
  bool ground = true;
  for (const auto& a : args) {
    if (a.is_null()) throw TermError("null argument term");
    h = mix(h, a.hash());
    size = saturating_add(size, a.size());
    depth = std::max(depth, a.depth() + 1);
    ground = ground && a.ground();
  }
  node->args = std::move(args);
  node->hash = h;
  node->size = size;
  node->depth = depth;
  node->ground = ground;
  return Term(std::move(node));
}

bool Term::is_var() const { return node_ && node_->is_var; }
const std::string& Term::var_name() const { return node_->var_name; }
SymbolId Term::symbol() const { return node_->symbol; }
std::span<const Term> Term::args() const { return node_->args; }
std::size_t Term::hash() const { return node_ ? node_->hash : 0; }
std::uint64_t Term::size() const { return node_->size; }
std::uint32_t Term::depth() const { return node_->depth; }
bool Term::ground() const { return node_->ground; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.node_->is_var != b.node_->is_var) return false;
  if (a.node_->is_var) return a.node_->var_name == b.node_->var_name;
  if (a.node_->symbol != b.node_->symbol || a.node_->args.size() != b.node_->args.size()) {
    return false;
  }
  if (a.node_->size != b.node_->size || a.node_->depth != b.node_->depth) return false;
  for (std::size_t i = 0; i < a.node_->args.size(); ++i) {
    if (!(a.node_->args[i] == b.node_->args[i])) return false;
  }
  return true;
}

std::strong_ordering canonical_compare(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return std::strong_ordering::equal;
  if (auto c = a.depth() <=> b.depth(); c != 0) return c;
  if (a.is_var() != b.is_var()) {
    return a.is_var() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.is_var()) return a.var_name() <=> b.var_name();
  if (auto c = a.symbol() <=> b.symbol(); c != 0) return c;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (auto c = canonical_compare(a.arg(i), b.arg(i)); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const Position& p) {
  if (p.path.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < p.path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p.path[i]);
  }
  return s;
}

std::string_view to_string(Strategy s) {
  return s == Strategy::kLeftmostOutermost ? "lo" : "li";
}

Strategy parse_strategy(std::string_view tag) {
  if (tag == "lo" || tag == "leftmost-outermost") return Strategy::kLeftmostOutermost;
  if (tag == "li" || tag == "leftmost-innermost") return Strategy::kLeftmostInnermost;
  throw TermError("unknown strategy '" + std::string(tag) + "'");
}

// ---------------------------------------------------------------------------
// utilities

namespace {
void collect_vars(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (t.is_var()) {
    if (seen.insert(t.var_name()).second) out.push_back(t.var_name());
    return;
  }
  if (t.ground()) return;
  for (const auto& a : t.args()) collect_vars(a, out, seen);
}

bool linear_rec(const Term& t, std::set<std::string>& seen) {
  if (t.is_var()) return seen.insert(t.var_name()).second;
  for (const auto& a : t.args()) {
    if (!linear_rec(a, seen)) return false;
  }
  return true;
}
}  // namespace

std::vector<std::string> variables(const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(t, out, seen);
  return out;
}

bool contains_var(const Term& t, const std::string& name) {
  if (t.is_var()) return t.var_name() == name;
  if (t.ground()) return false;
  for (const auto& a : t.args()) {
    if (contains_var(a, name)) return true;
  }
  return false;
}

bool is_linear(const Term& t) {
  std::set<std::string> seen;
  return linear_rec(t, seen);
}

bool is_left_linear(const Trs& trs) {
  return std::all_of(trs.rules.begin(), trs.rules.end(),
                     [](const Rule& r) { return is_linear(r.lhs); });
}

bool is_collapsing(const Rule& r) { return r.rhs.is_var(); }

void check_term(const Signature& sig, const Term& t) {
  if (t.is_null()) throw TermError("null term");
  if (t.is_var()) return;
  if (t.symbol() >= sig.size()) throw TermError("unknown symbol id " + std::to_string(t.symbol()));
  if (static_cast<int>(t.arity()) != sig.arity(t.symbol())) {
    throw TermError("symbol '" + sig.name(t.symbol()) + "' expects " +
                    std::to_string(sig.arity(t.symbol())) + " arguments, got " +
                    std::to_string(t.arity()));
  }
  for (const auto& a : t.args()) check_term(sig, a);
}

void check_rule(const Signature& sig, const Rule& r) {
  check_term(sig, r.lhs);
  check_term(sig, r.rhs);
  if (r.lhs.is_var()) throw TermError("left-hand side is a variable: " + to_string(sig, r));
  for (const auto& v : variables(r.rhs)) {
    if (!contains_var(r.lhs, v)) {
      throw TermError("variable '" + v + "' of the right-hand side does not occur on the left: " +
                      to_string(sig, r));
    }
  }
}

void check_trs(const Trs& trs) {
  for (const auto& r : trs.rules) check_rule(trs.signature, r);
}

namespace {
void positions_rec(const Term& t, std::vector<int>& path, std::vector<Position>& out) {
  out.push_back(Position{path});
  if (t.is_var()) return;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    positions_rec(t.arg(i), path, out);
    path.pop_back();
  }
}

Term replace_rec(const Term& t, std::span<const int> path, const Term& replacement) {
  if (path.empty()) return replacement;
  std::vector<Term> args(t.args().begin(), t.args().end());
  auto i = static_cast<std::size_t>(path.front() - 1);
  args[i] = replace_rec(args[i], path.subspan(1), replacement);
  return Term::app(t.symbol(), std::move(args));
}
}  // namespace

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  std::vector<int> path;
  positions_rec(t, path, out);
  return out;
}

const Term& subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p.path) {
    if (cur->is_var() || i < 1 || static_cast<std::size_t>(i) > cur->arity()) {
      throw TermError("position " + to_string(p) + " is not in Pos(t)");
    }
    cur = &cur->arg(static_cast<std::size_t>(i - 1));
  }
  return *cur;
}

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  (void)subterm_at(t, p);  // validates
  return replace_rec(t, p.path, replacement);
}

std::vector<Term> subterms(const Term& t) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  std::function<void(const Term&)> rec = [&](const Term& s) {
    if (!seen.insert(s).second) return;
    out.push_back(s);
    if (s.is_var()) return;
    for (const auto& a : s.args()) rec(a);
  };
  rec(t);
  return out;
}

Term apply(const Substitution& sigma, const Term& t) {
  if (t.is_var()) {
    auto it = sigma.find(t.var_name());
    return it == sigma.end() ? t : it->second;
  }
  if (t.ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(localterm::apply(sigma, a));
  return Term::app(t.symbol(), std::move(args));
}

namespace {
void print(std::ostream& os, const Signature& sig, const Term& t) {
  if (t.is_var()) {
    os << t.var_name();
    return;
  }
  os << sig.name(t.symbol());
  if (t.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) os << ',';
    print(os, sig, t.arg(i));
  }
  os << ')';
}
}  // namespace

std::string to_string(const Signature& sig, const Term& t) {
  std::ostringstream os;
  print(os, sig, t);
  return os.str();
}

std::string to_string(const Signature& sig, const Rule& r) {
  return to_string(sig, r.lhs) + " -> " + to_string(sig, r.rhs);
}

// ---------------------------------------------------------------------------
// matching and rewriting

namespace {
bool match_rec(const Term& p, const Term& s, Substitution& sigma) {
  if (p.is_var()) {
    auto [it, inserted] = sigma.emplace(p.var_name(), s);
    return inserted || it->second == s;
  }
  if (s.is_var() || p.symbol() != s.symbol() || p.arity() != s.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (!match_rec(p.arg(i), s.arg(i), sigma)) return false;
  }
  return true;
}
}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  Substitution sigma;
  if (!match_rec(pattern, subject, sigma)) return std::nullopt;
  return sigma;
}

std::vector<Successor> one_step_successors(const Trs& trs, const Term& t) {
  std::vector<Successor> out;
  for (const auto& pos : positions(t)) {
    const Term& sub = subterm_at(t, pos);
    if (sub.is_var()) continue;
    for (std::size_t i = 0; i < trs.rules.size(); ++i) {
      const auto& rule = trs.rules[i];
      if (auto sigma = match(rule.lhs, sub)) {
        out.push_back(Successor{i, pos, replace_at(t, pos, localterm::apply(*sigma, rule.rhs))});
      }
    }
  }
  return out;
}

bool is_normal_form(const Trs& trs, const Term& t) {
  Rewriter rw(trs);
  return !rw.select(t, Strategy::kLeftmostOutermost).has_value();
}

Reduction reduce(const Trs& trs, const Term& t, Strategy strategy, std::size_t budget) {
  Rewriter rw(trs);
  return rw.reduce(t, strategy, budget);
}

std::vector<ReductionStep> reduction_trace(const Trs& trs, const Term& t, Strategy strategy,
                                           std::size_t budget) {
  Rewriter rw(trs);
  std::vector<ReductionStep> out;
  Term cur = t;
  while (out.size() < budget) {
    auto step = rw.select(cur, strategy);
    if (!step) break;
    cur = step->result;
    out.push_back(std::move(*step));
  }
  return out;
}

FamilyResult family_bounded(const Trs& trs, std::span<const Term> seeds, std::size_t step_budget,
                            std::size_t size_budget) {
  FamilyResult res;
  std::unordered_set<Term, TermHash> family;
  std::unordered_set<Term, TermHash> visited;  // reducts already expanded
  auto add_subterms = [&](const Term& t) {
    for (const auto& s : subterms(t)) {
      if (family.count(s)) continue;
      if (family.size() >= size_budget) {
        res.truncated = true;
        return;
      }
      family.insert(s);
    }
  };
  std::vector<Term> frontier;
  for (const auto& s : seeds) {
    if (visited.insert(s).second) frontier.push_back(s);
  }
  for (const auto& s : frontier) add_subterms(s);
  for (std::size_t step = 0; step < step_budget && !frontier.empty(); ++step) {
    std::vector<Term> next;
    for (const auto& t : frontier) {
      for (auto& succ : one_step_successors(trs, t)) {
        if (visited.insert(succ.result).second) {
          add_subterms(succ.result);
          next.push_back(std::move(succ.result));
        }
      }
    }
    frontier = std::move(next);
  }
  res.terms.assign(family.begin(), family.end());
  std::sort(res.terms.begin(), res.terms.end(), CanonicalLess{});
  return res;
}

Trs eliminate_collapsing(const Trs& trs) {
  Trs out;
  out.signature = trs.signature;
  for (const auto& r : trs.rules) {
    if (!is_collapsing(r)) {
      out.rules.push_back(r);
      continue;
    }
    auto used = variables(r.lhs);
    std::set<std::string> taken(used.begin(), used.end());
    for (SymbolId f = 0; f < trs.signature.size(); ++f) {
      std::vector<Term> fresh;
      int counter = 1;
      for (int i = 0; i < trs.signature.arity(f); ++i) {
        std::string name;
        do {
          name = "x" + std::to_string(counter++);
        } while (taken.count(name));
        fresh.push_back(Term::var(name));
      }
      Substitution sigma{{r.rhs.var_name(), Term::app(f, std::move(fresh))}};
      out.rules.push_back(Rule{localterm::apply(sigma, r.lhs), localterm::apply(sigma, r.rhs)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// strings

bool is_string_shaped(const Signature& sig) {
  int constants = 0;
  for (const auto& s : sig.symbols()) {
    if (s.arity > 1) return false;
    if (s.arity == 0) ++constants;
  }
  return constants <= 1;
}

std::vector<SymbolId> word_of(const Term& t) {
  std::vector<SymbolId> w;
  const Term* cur = &t;
  while (cur->is_app() && cur->arity() == 1) {
    w.push_back(cur->symbol());
    cur = &cur->arg(0);
  }
  std::reverse(w.begin(), w.end());
  return w;
}

Term term_of_word(std::span<const SymbolId> word, const Term& base) {
  Term t = base;
  for (SymbolId s : word) t = Term::app(s, {t});
  return t;
}

namespace {
Term base_of(const Term& t) {
  const Term* cur = &t;
  while (cur->is_app() && cur->arity() == 1) cur = &cur->arg(0);
  return *cur;
}

Term mirror_side(const Term& t) {
  auto w = word_of(t);
  std::reverse(w.begin(), w.end());
  return term_of_word(w, base_of(t));
}
}  // namespace

Trs mirror(const Trs& srs) {
  for (const auto& s : srs.signature.symbols()) {
    if (s.arity >= 2) throw TermError("mirror: symbol '" + s.name + "' is not unary");
  }
  Trs out;
  out.signature = srs.signature;
  for (const auto& r : srs.rules) out.rules.push_back({mirror_side(r.lhs), mirror_side(r.rhs)});
  return out;
}

// ---------------------------------------------------------------------------
// Rewriter

Rewriter::Rewriter(const Trs& trs) {
  by_root_.resize(trs.signature.size());
  for (std::size_t i = 0; i < trs.rules.size(); ++i) {
    const auto& r = trs.rules[i];
    CompiledRule c;
    std::map<std::string, std::uint32_t> slots;
    compile(r.lhs, c.lhs, slots);
    compile(r.rhs, c.rhs, slots);
    c.var_count = slots.size();
    rules_.push_back(std::move(c));
    if (r.lhs.is_app()) {
      if (r.lhs.symbol() >= by_root_.size()) by_root_.resize(r.lhs.symbol() + 1);
      by_root_[r.lhs.symbol()].push_back(static_cast<std::uint32_t>(i));
    }
  }
}

void Rewriter::compile(const Term& t, Pattern& out, std::map<std::string, std::uint32_t>& slots) {
  // Nodes are laid out in pre-order; children are filled after recursion.
  std::function<std::uint32_t(const Term&)> rec = [&](const Term& s) -> std::uint32_t {
    auto id = static_cast<std::uint32_t>(out.nodes.size());
    out.nodes.emplace_back();
    if (s.is_var()) {
      auto [it, inserted] = slots.emplace(s.var_name(), static_cast<std::uint32_t>(slots.size()));
      out.nodes[id].is_var = true;
      out.nodes[id].index = it->second;
      return id;
    }
    out.nodes[id].index = s.symbol();
    std::vector<std::uint32_t> kids;
    for (const auto& a : s.args()) kids.push_back(rec(a));
    out.nodes[id].children = std::move(kids);
    return id;
  };
  rec(t);
}

bool Rewriter::match_at(const Pattern& p, std::uint32_t node, const Term& t,
                        std::vector<Term>& binding) const {
  const auto& pn = p.nodes[node];
  if (pn.is_var) {
    auto& slot = binding[pn.index];
    if (slot.is_null()) {
      slot = t;
      return true;
    }
    return slot == t;
  }
  if (t.is_var() || t.symbol() != pn.index) return false;
  for (std::size_t i = 0; i < pn.children.size(); ++i) {
    if (!match_at(p, pn.children[i], t.arg(i), binding)) return false;
  }
  return true;
}

Term Rewriter::build(const Pattern& p, std::uint32_t node, const std::vector<Term>& binding) const {
  const auto& pn = p.nodes[node];
  if (pn.is_var) return binding[pn.index];
  std::vector<Term> args;
  args.reserve(pn.children.size());
  for (auto c : pn.children) args.push_back(build(p, c, binding));
  return Term::app(pn.index, std::move(args));
}

std::optional<std::pair<std::size_t, Term>> Rewriter::contract(const Term& t) const {
  if (!t.is_app() || t.symbol() >= by_root_.size()) return std::nullopt;
  std::vector<Term> binding;
  for (auto i : by_root_[t.symbol()]) {
    const auto& r = rules_[i];
    binding.assign(r.var_count, Term());
    if (match_at(r.lhs, 0, t, binding)) return std::make_pair(std::size_t{i}, build(r.rhs, 0, binding));
  }
  return std::nullopt;
}

bool Rewriter::is_redex(const Term& t) const { return contract(t).has_value(); }

InnermostNormalizer::InnermostNormalizer(const Trs& trs, std::size_t budget, std::size_t max_entries)
    : rw_(trs), budget_(budget), max_entries_(max_entries) {}

std::optional<std::size_t> InnermostNormalizer::steps(const Term& t) {
  if (memo_.size() > max_entries_) memo_.clear();
  clock_ = 0;
  Entry e = run(t);
  active_.clear();
  if (e.steps > budget_) return std::nullopt;
  return e.steps;
}

// clock_ counts the steps of the whole query. Work inside one call is
// contiguous, so its own count is the clock advance since it started; the
// query stops once the clock passes the budget, and only calls that already
// spent more than the budget themselves are recorded as exceeded.
InnermostNormalizer::Entry InnermostNormalizer::run(const Term& t) {
  if (t.is_var()) return {t, 0};
  if (auto it = memo_.find(t); it != memo_.end()) {
    clock_ += it->second.steps;
    return it->second;
  }
  const Entry exceeded{Term(), budget_ + 1};
  if (!active_.insert(t).second) {
    clock_ = kNever;  // t reaches itself: every open call diverges
    return exceeded;
  }
  const std::size_t start = clock_;
  auto fail = [&] {
    active_.erase(t);
    if (clock_ - start > budget_) memo_.emplace(t, exceeded);
    return exceeded;
  };
  bool changed = false;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) {
    Entry e = run(a);
    if (clock_ > budget_) return fail();
    changed |= e.nf.identity() != a.identity();
    args.push_back(std::move(e.nf));
  }
  Term cur = changed ? Term::app(t.symbol(), std::move(args)) : t;
  if (auto c = rw_.contract(cur)) {
    if (++clock_ > budget_) return fail();
    Entry e = run(c->second);
    if (clock_ > budget_) return fail();
    cur = std::move(e.nf);
  }
  active_.erase(t);
  Entry out{cur, clock_ - start};
  memo_.emplace(t, out);
  return out;
}

bool Rewriter::find_outermost(const Term& t, std::vector<int>& path, std::size_t& rule,
                              Term& result) {
  if (t.is_var()) return false;
  if (normal_.count(t)) return false;
  if (auto c = contract(t)) {
    rule = c->first;
    result = std::move(c->second);
    return true;
  }
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    if (find_outermost(t.arg(i), path, rule, result)) return true;
    path.pop_back();
  }
  normal_.emplace(t, true);
  return false;
}

bool Rewriter::find_innermost(const Term& t, std::vector<int>& path, std::size_t& rule,
                              Term& result) {
  if (t.is_var()) return false;
  if (normal_.count(t)) return false;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    path.push_back(static_cast<int>(i) + 1);
    if (find_innermost(t.arg(i), path, rule, result)) return true;
    path.pop_back();
  }
  if (auto c = contract(t)) {
    rule = c->first;
    result = std::move(c->second);
    return true;
  }
  normal_.emplace(t, true);
  return false;
}

std::optional<ReductionStep> Rewriter::select(const Term& t, Strategy strategy) {
  // The memo holds handles, so cached nodes stay alive and identities are stable.
  if (normal_.size() > (1u << 20)) normal_.clear();
  std::vector<int> path;
  std::size_t rule = 0;
  Term contractum;
  bool found = strategy == Strategy::kLeftmostOutermost ? find_outermost(t, path, rule, contractum)
                                                        : find_innermost(t, path, rule, contractum);
  if (!found) return std::nullopt;
  Position pos{std::move(path)};
  return ReductionStep{rule, pos, replace_rec(t, pos.path, contractum)};
}

Reduction Rewriter::reduce(const Term& t, Strategy strategy, std::size_t budget) {
  Reduction r{t, 0, false};
  while (true) {
    auto step = select(r.final, strategy);
    if (!step) {
      r.reached_nf = true;
      return r;
    }
    if (r.steps == budget) return r;
    r.final = std::move(step->result);
    ++r.steps;
  }
}

}  // namespace localterm
