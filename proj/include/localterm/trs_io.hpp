#pragma once

// Text formats: TPDB term and string rewriting systems, finite algebra files
// (with optional linear interpretation lines), and a small S-expression reader
// shared by the script and trace formats.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "localterm/algebra.hpp"
#include "localterm/interpretations.hpp"

namespace localterm {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// -- rewriting systems ---------------------------------------------------------

Trs parse_trs(std::string_view text);
std::string write_trs(const Trs& trs);

// Letters become unary symbols; the word a1...an is the term an(...a1(x)...).
// A fresh constant (named "e" unless taken) is appended for grounding.
Trs parse_srs(std::string_view text);
std::string write_srs(const Trs& srs);

// Parses a term over `sig`. Identifiers not in the signature and not applied
// to arguments are variables.
Term parse_term(const Signature& sig, std::string_view text);

// -- S-expressions -----------------------------------------------------------------

struct SExpr {
  bool is_atom = false;
  bool quoted = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_list() const { return !is_atom; }
  // Head symbol of a list, or empty.
  const std::string& head() const;
  [[noreturn]] void fail(const std::string& message) const;
};

// ';' starts a comment running to the end of the line. Atoms may be
// double-quoted.
std::vector<SExpr> parse_sexprs(std::string_view text);
std::string quote(std::string_view s);

// -- algebra files -------------------------------------------------------------------

struct AlgebraEntry {
  std::string symbol;
  std::vector<Element> args;
  Element result = 0;
  friend bool operator==(const AlgebraEntry&, const AlgebraEntry&) = default;
};

struct PolyLine {
  std::string symbol;
  std::optional<AffineForm> form;  // nullopt = undefined
  friend bool operator==(const PolyLine&, const PolyLine&) = default;
};

struct AlgebraFile {
  std::vector<std::string> comments;  // header comment lines, without ';'
  int carrier_size = 0;
  std::vector<AlgebraEntry> entries;
  std::vector<std::pair<Element, Element>> ge_pairs;
  std::vector<std::pair<Element, Element>> strict_pairs;
  std::vector<PolyLine> polys;
  friend bool operator==(const AlgebraFile&, const AlgebraFile&) = default;
};

AlgebraFile parse_algebra_file(std::string_view text);
// Parses the lines of an already-read S-expression list (used by scripts).
AlgebraFile algebra_file_from(std::span<const SExpr> lines);
std::string write_algebra_file(const AlgebraFile& file);

// Symbols of the file missing from `sig` are appended with their inferred
// arity; symbols of `sig` without entries are everywhere undefined.
FiniteAlgebra to_algebra(const AlgebraFile& file, const Signature& sig);
// Symbols and arities inferred from the entries alone.
FiniteAlgebra to_algebra(const AlgebraFile& file);
CarrierRelation ge_relation(const AlgebraFile& file);
CarrierRelation strict_relation(const AlgebraFile& file);
// Every symbol of `sig` must be listed.
LinearInterpretation to_interpretation(const AlgebraFile& file, const Signature& sig, bool require_all = true);

AlgebraFile from_algebra(const FiniteAlgebra& a);
std::string write_algebra(const FiniteAlgebra& a, const std::vector<std::string>& comments = {});
FiniteAlgebra parse_algebra(std::string_view text, const Signature& sig);

std::vector<PolyLine> poly_lines(const LinearInterpretation& i);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace localterm
