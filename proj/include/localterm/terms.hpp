#pragma once

// First-order terms, rules and rewriting.
//
// Terms are immutable and share structure: rewriting a term rebuilds only the
// path to the contracted redex, and duplicating rules copy handles rather than
// subtrees. A term may therefore denote a tree that is exponentially larger
// than its memory footprint; size() saturates instead of overflowing.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace localterm {

using SymbolId = std::uint32_t;

class TermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Symbol {
  std::string name;
  int arity = 0;
};

// Ordered symbol table. The insertion order is the canonical symbol index.
class Signature {
 public:
  Signature() = default;

  SymbolId add(std::string name, int arity);
  // Returns the existing id when (name, arity) is already present.
  SymbolId ensure(const std::string& name, int arity);

  std::optional<SymbolId> find(std::string_view name) const;
  const Symbol& operator[](SymbolId id) const { return symbols_.at(id); }
  const std::string& name(SymbolId id) const { return symbols_.at(id).name; }
  int arity(SymbolId id) const { return symbols_.at(id).arity; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  std::vector<SymbolId> constants() const;

  friend bool operator==(const Signature& a, const Signature& b);

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, SymbolId> index_;
};

class Term;

namespace detail {
struct TermNode;
}

class Term {
 public:
  static constexpr std::uint64_t kSizeCap = UINT64_MAX;

  Term() = default;  // null handle; only valid as a placeholder

  static Term var(std::string name);
  static Term app(SymbolId symbol, std::vector<Term> args);
  static Term constant(SymbolId symbol) { return app(symbol, {}); }

  bool is_null() const { return node_ == nullptr; }
  bool is_var() const;
  bool is_app() const { return !is_null() && !is_var(); }
  const std::string& var_name() const;
  SymbolId symbol() const;
  std::span<const Term> args() const;
  // 0-based child access.
  const Term& arg(std::size_t i) const { return args()[i]; }
  std::size_t arity() const { return args().size(); }

  std::size_t hash() const;
  // Number of tree nodes, saturating at kSizeCap.
  std::uint64_t size() const;
  // Height of the tree: variables and constants have depth 0.
  std::uint32_t depth() const;
  bool ground() const;

  const void* identity() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const detail::TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::TermNode> node_;
};

namespace detail {
struct TermNode {
  bool is_var = false;
  SymbolId symbol = 0;
  std::string var_name;
  std::vector<Term> args;
  std::size_t hash = 0;
  std::uint64_t size = 1;
  std::uint32_t depth = 0;
  bool ground = true;
};
}  // namespace detail

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Canonical order: depth, then root symbol index, then children left to right.
// Variables precede applications of equal depth and are ordered by name.
std::strong_ordering canonical_compare(const Term& a, const Term& b);

struct CanonicalLess {
  bool operator()(const Term& a, const Term& b) const { return canonical_compare(a, b) < 0; }
};

// A path of 1-based child indices; the empty path is the root.
struct Position {
  std::vector<int> path;

  bool is_root() const { return path.empty(); }
  friend auto operator<=>(const Position&, const Position&) = default;
  friend bool operator==(const Position&, const Position&) = default;
};

std::string to_string(const Position& p);

using Substitution = std::map<std::string, Term>;

struct Rule {
  Term lhs;
  Term rhs;
  friend bool operator==(const Rule&, const Rule&) = default;
};

// Rule indices refer to positions in `rules`.
struct Trs {
  Signature signature;
  std::vector<Rule> rules;
};

enum class Strategy { kLeftmostOutermost, kLeftmostInnermost };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view tag);

// -- term utilities ---------------------------------------------------------

std::vector<std::string> variables(const Term& t);  // first-occurrence order
bool contains_var(const Term& t, const std::string& name);
bool is_linear(const Term& t);
bool is_left_linear(const Trs& trs);
bool is_collapsing(const Rule& r);

// Throws TermError if the term uses an unknown symbol or a wrong arity.
void check_term(const Signature& sig, const Term& t);
// Throws TermError on a variable lhs, an rhs variable missing from the lhs,
// or an ill-formed side.
void check_rule(const Signature& sig, const Rule& r);
void check_trs(const Trs& trs);

std::vector<Position> positions(const Term& t);  // pre-order
const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& replacement);
std::vector<Term> subterms(const Term& t);  // distinct, pre-order

Term apply(const Substitution& sigma, const Term& t);

std::string to_string(const Signature& sig, const Term& t);
std::string to_string(const Signature& sig, const Rule& r);

// -- rewriting --------------------------------------------------------------

// Plain first-order matching; repeated pattern variables must bind equal terms.
std::optional<Substitution> match(const Term& pattern, const Term& subject);

struct Successor {
  std::size_t rule_index;
  Position position;
  Term result;
};

// All one-step reducts, ordered by position (pre-order) then rule index.
std::vector<Successor> one_step_successors(const Trs& trs, const Term& t);

bool is_normal_form(const Trs& trs, const Term& t);

struct Reduction {
  Term final;
  std::size_t steps = 0;
  bool reached_nf = false;
};

// Applies the deterministic strategy until a normal form or `budget` steps.
Reduction reduce(const Trs& trs, const Term& t, Strategy strategy, std::size_t budget);

struct ReductionStep {
  std::size_t rule_index;
  Position position;
  Term result;
};

// Like reduce() but records every step.
std::vector<ReductionStep> reduction_trace(const Trs& trs, const Term& t, Strategy strategy,
                                           std::size_t budget);

struct FamilyResult {
  std::vector<Term> terms;  // canonical order
  bool truncated = false;
};

// Subterms of all reducts reachable within step_budget steps, collecting at
// most size_budget distinct terms.
FamilyResult family_bounded(const Trs& trs, std::span<const Term> seeds, std::size_t step_budget,
                            std::size_t size_budget);

Trs eliminate_collapsing(const Trs& trs);

// -- string rewriting ----------------------------------------------------------

// True iff every symbol is unary, apart from at most one constant.
bool is_string_shaped(const Signature& sig);

// Word reading of a unary term: the innermost symbol comes first. A trailing
// constant or variable is not part of the word.
std::vector<SymbolId> word_of(const Term& t);
// Builds w_n(...w_1(base)...).
Term term_of_word(std::span<const SymbolId> word, const Term& base);

// Reverses both sides of every rule. Throws TermError on symbols of arity >= 2.
Trs mirror(const Trs& srs);

// A rewriting engine with precompiled rules, reusable across many terms.
// Not thread-safe; create one per thread.
class Rewriter {
 public:
  explicit Rewriter(const Trs& trs);

  std::optional<ReductionStep> select(const Term& t, Strategy strategy);
  Reduction reduce(const Term& t, Strategy strategy, std::size_t budget);
  bool is_redex(const Term& t) const;
  // Index of the first rule whose lhs matches at the root, with the
  // instantiated rhs.
  std::optional<std::pair<std::size_t, Term>> contract(const Term& t) const;

 private:
  struct PatternNode {
    bool is_var = false;
    std::uint32_t index = 0;  // variable slot or symbol id
    std::vector<std::uint32_t> children;
  };
  struct Pattern {
    std::vector<PatternNode> nodes;  // node 0 is the root
  };
  struct CompiledRule {
    Pattern lhs;
    Pattern rhs;
    std::size_t var_count = 0;
  };

  static void compile(const Term& t, Pattern& out, std::map<std::string, std::uint32_t>& slots);
  bool match_at(const Pattern& p, std::uint32_t node, const Term& t, std::vector<Term>& binding) const;
  Term build(const Pattern& p, std::uint32_t node, const std::vector<Term>& binding) const;

  bool find_outermost(const Term& t, std::vector<int>& path, std::size_t& rule, Term& result);
  bool find_innermost(const Term& t, std::vector<int>& path, std::size_t& rule, Term& result);

  std::vector<CompiledRule> rules_;
  std::vector<std::vector<std::uint32_t>> by_root_;  // rules indexed by lhs root symbol
  struct IdentityHash {
    std::size_t operator()(const Term& t) const {
      return std::hash<const void*>{}(t.identity());
    }
  };
  struct IdentityEq {
    bool operator()(const Term& a, const Term& b) const { return a.identity() == b.identity(); }
  };
  std::unordered_map<Term, bool, IdentityHash, IdentityEq> normal_;  // subtree redex-free
};

// Leftmost-innermost normalization with memoised subterm results. Step counts
// agree with Rewriter::reduce under Strategy::kLeftmostInnermost; each
// occurrence of a shared subterm is counted. Not thread-safe.
class InnermostNormalizer {
 public:
  InnermostNormalizer(const Trs& trs, std::size_t budget, std::size_t max_entries = 1'000'000);

  // Steps to the normal form, or nullopt when more than `budget` are needed.
  std::optional<std::size_t> steps(const Term& t);

 private:
  struct Entry {
    Term nf;
    std::size_t steps = 0;  // budget + 1 when exceeded
  };
  static constexpr std::size_t kNever = SIZE_MAX / 2;
  Entry run(const Term& t);

  Rewriter rw_;
  std::size_t budget_;
  std::size_t max_entries_;
  std::size_t clock_ = 0;
  std::unordered_map<Term, Entry, TermHash> memo_;
  std::unordered_set<Term, TermHash> active_;
};

}  // namespace localterm
