#pragma once

// Flattened terms for repeated evaluation under many assignments.

#include <map>
#include <string>
#include <vector>

#include "localterm/algebra.hpp"

namespace localterm::detail {

class CompiledTerm {
 public:
  CompiledTerm() = default;
  // Variables receive slots in `slots`; unseen variables are appended.
  CompiledTerm(const Term& t, std::map<std::string, int>& slots) { compile(t, slots); }

  Element evaluate(const FiniteAlgebra& a, const Element* values) const {
    Element stack[kInlineDepth] = {};
    std::vector<Element> heap;
    Element* s = stack;
    if (nodes_.size() > kInlineDepth) {
      heap.resize(nodes_.size());
      s = heap.data();
    }
    std::size_t top = 0;
    for (const Node& n : nodes_) {
      if (n.is_var) {
        s[top++] = values[n.index];
        continue;
      }
      top -= n.arity;
      Element r = kUndefined;
      bool ok = true;
      for (int i = 0; i < n.arity; ++i) {
        if (s[top + i] == kUndefined) {
          ok = false;
          break;
        }
      }
      if (ok) {
        const auto table = a.table(n.index);
        std::size_t idx = 0;
        for (int i = 0; i < n.arity; ++i) idx = idx * a.size() + s[top + i];
        r = table[idx];
      }
      s[top++] = r;
    }
    return s[0];
  }

  bool empty() const { return nodes_.empty(); }

 private:
  static constexpr std::size_t kInlineDepth = 64;
  struct Node {
    bool is_var;
    int arity;
    std::uint32_t index;  // slot or symbol
  };

  void compile(const Term& t, std::map<std::string, int>& slots) {
    if (t.is_var()) {
      auto [it, fresh] = slots.emplace(t.var_name(), static_cast<int>(slots.size()));
      nodes_.push_back({true, 0, static_cast<std::uint32_t>(it->second)});
      return;
    }
    for (const Term& c : t.args()) compile(c, slots);
    nodes_.push_back({false, static_cast<int>(t.arity()), t.symbol()});
  }

  std::vector<Node> nodes_;  // post-order
};

// Variables of a rule in first-occurrence order of the lhs, with compiled
// sides sharing slot numbers.
struct CompiledRule {
  std::vector<std::string> vars;
  CompiledTerm lhs;
  CompiledTerm rhs;

  explicit CompiledRule(const Rule& r) {
    std::map<std::string, int> slots;
    for (const auto& v : variables(r.lhs)) slots.emplace(v, static_cast<int>(slots.size()));
    vars = variables(r.lhs);
    lhs = CompiledTerm(r.lhs, slots);
    rhs = CompiledTerm(r.rhs, slots);
  }
};

// n^k, throwing when the assignment space is unreasonably large.
inline std::size_t assignment_count(int n, std::size_t k) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (total > (std::size_t{1} << 40) / static_cast<std::size_t>(n)) {
      throw AlgebraError("assignment space too large to enumerate");
    }
    total *= static_cast<std::size_t>(n);
  }
  return total;
}

// Decodes an assignment index; the first variable is most significant.
inline void decode_assignment(std::size_t index, int n, std::size_t k, Element* out) {
  for (std::size_t i = k; i-- > 0;) {
    out[i] = static_cast<Element>(index % static_cast<std::size_t>(n));
    index /= static_cast<std::size_t>(n);
  }
}

}  // namespace localterm::detail
