#include "localterm/trs_io.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "localterm/labeling.hpp"

namespace localterm {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

// -- TPDB lexer -----------------------------------------------------------------

enum class Tok { kLParen, kRParen, kComma, kArrow, kIdent, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token next() {
    Token t = current_;
    advance();
    return t;
  }
  Token expect(Tok kind, const char* what) {
    if (current_.kind != kind) fail(std::string("expected ") + what);
    return next();
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message + (current_.kind == Tok::kEnd ? " at end of input" : " near '" + current_.text + "'"),
                     current_.line, current_.column);
  }

 private:
  static bool delimiter(char c) {
    return c == '(' || c == ')' || c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    skip_space();
    current_ = Token{Tok::kEnd, "", line_, col_};
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    if (c == '(' || c == ')' || c == ',') {
      current_.kind = c == '(' ? Tok::kLParen : c == ')' ? Tok::kRParen : Tok::kComma;
      current_.text = std::string(1, c);
      bump();
      return;
    }
    if (text_.substr(pos_, 2) == "->") {
      current_.kind = Tok::kArrow;
      current_.text = "->";
      bump();
      bump();
      return;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !delimiter(text_[pos_]) && text_.substr(pos_, 2) != "->") bump();
    current_.kind = Tok::kIdent;
    current_.text = std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

struct RawTerm {
  std::string name;
  bool applied = false;
  std::vector<RawTerm> kids;
  int line = 0;
  int column = 0;
};

RawTerm parse_raw(Lexer& lx) {
  Token id = lx.expect(Tok::kIdent, "a symbol or variable");
  RawTerm t{id.text, false, {}, id.line, id.column};
  if (lx.peek().kind == Tok::kLParen) {
    lx.next();
    t.applied = true;
    if (lx.peek().kind != Tok::kRParen) {
      t.kids.push_back(parse_raw(lx));
      while (lx.peek().kind == Tok::kComma) {
        lx.next();
        t.kids.push_back(parse_raw(lx));
      }
    }
    lx.expect(Tok::kRParen, "')'");
  }
  return t;
}

void skip_section(Lexer& lx) {
  int depth = 1;
  while (depth > 0) {
    const Token& t = lx.peek();
    if (t.kind == Tok::kEnd) lx.fail("unterminated section");
    if (t.kind == Tok::kLParen) ++depth;
    if (t.kind == Tok::kRParen) --depth;
    lx.next();
  }
}

Term convert(const RawTerm& r, const std::set<std::string>& vars, Signature& sig) {
  if (vars.count(r.name)) {
    if (r.applied) throw ParseError("variable '" + r.name + "' used as function symbol", r.line, r.column);
    return Term::var(r.name);
  }
  const int arity = static_cast<int>(r.kids.size());
  SymbolId id;
  if (auto found = sig.find(r.name)) {
    if (sig.arity(*found) != arity) {
      throw ParseError("symbol '" + r.name + "' used with arity " + std::to_string(arity) + " and " +
                           std::to_string(sig.arity(*found)),
                       r.line, r.column);
    }
    id = *found;
  } else {
    id = sig.add(r.name, arity);
  }
  std::vector<Term> kids;
  for (const auto& k : r.kids) kids.push_back(convert(k, vars, sig));
  return Term::app(id, std::move(kids));
}

void check_parsed_rule(const Signature& sig, const Rule& rule, const RawTerm& at) {
  try {
    check_rule(sig, rule);
  } catch (const TermError& e) {
    throw ParseError(e.what(), at.line, at.column);
  }
}

}  // namespace

Trs parse_trs(std::string_view text) {
  Lexer lx(text);
  std::set<std::string> vars;
  std::vector<std::pair<RawTerm, RawTerm>> raw_rules;
  while (lx.peek().kind != Tok::kEnd) {
    lx.expect(Tok::kLParen, "'('");
    Token section = lx.expect(Tok::kIdent, "a section name");
    if (section.text == "VAR") {
      while (lx.peek().kind == Tok::kIdent) vars.insert(lx.next().text);
      lx.expect(Tok::kRParen, "')'");
    } else if (section.text == "RULES") {
      while (lx.peek().kind != Tok::kRParen) {
        RawTerm l = parse_raw(lx);
        lx.expect(Tok::kArrow, "'->'");
        RawTerm r = parse_raw(lx);
        raw_rules.emplace_back(std::move(l), std::move(r));
        if (lx.peek().kind == Tok::kComma) lx.next();
      }
      lx.next();
    } else {
      skip_section(lx);
    }
  }
  Trs trs;
  for (const auto& [l, r] : raw_rules) {
    Rule rule{convert(l, vars, trs.signature), convert(r, vars, trs.signature)};
    check_parsed_rule(trs.signature, rule, l);
    trs.rules.push_back(std::move(rule));
  }
  return trs;
}

std::string write_trs(const Trs& trs) {
  std::vector<std::string> vars;
  std::set<std::string> seen;
  for (const auto& r : trs.rules) {
    for (const auto& side : {r.lhs, r.rhs}) {
      for (auto& v : variables(side)) {
        if (seen.insert(v).second) vars.push_back(v);
      }
    }
  }
  std::ostringstream os;
  if (!vars.empty()) {
    os << "(VAR";
    for (const auto& v : vars) os << ' ' << v;
    os << ")\n";
  }
  if (trs.rules.empty()) {
    os << "(RULES)\n";
    return os.str();
  }
  os << "(RULES\n";
  for (const auto& r : trs.rules) os << "  " << to_string(trs.signature, r) << "\n";
  os << ")\n";
  return os.str();
}

Trs parse_srs(std::string_view text) {
  Lexer lx(text);
  std::vector<std::pair<std::vector<Token>, std::vector<Token>>> raw;
  auto word = [&lx]() {
    std::vector<Token> w;
    while (lx.peek().kind == Tok::kIdent) w.push_back(lx.next());
    if (w.size() == 1 && w[0].text == "eps") w.clear();
    for (const auto& t : w) {
      if (t.text == "eps") throw ParseError("'eps' must stand alone", t.line, t.column);
    }
    return w;
  };
  while (lx.peek().kind != Tok::kEnd) {
    lx.expect(Tok::kLParen, "'('");
    Token section = lx.expect(Tok::kIdent, "a section name");
    if (section.text != "RULES") {
      skip_section(lx);
      continue;
    }
    while (lx.peek().kind != Tok::kRParen) {
      Token at = lx.peek();
      auto l = word();
      lx.expect(Tok::kArrow, "'->'");
      auto r = word();
      if (l.empty()) throw ParseError("lhs is a variable (empty word)", at.line, at.column);
      raw.emplace_back(std::move(l), std::move(r));
      if (lx.peek().kind == Tok::kComma) {
        lx.next();
      } else if (lx.peek().kind != Tok::kRParen) {
        lx.fail("expected ',' or ')'");
      }
    }
    lx.next();
  }
  Trs srs;
  for (const auto& [l, r] : raw) {
    for (const auto* w : {&l, &r}) {
      for (const auto& t : *w) srs.signature.ensure(t.text, 1);
    }
  }
  std::string constant = "e";
  while (srs.signature.find(constant)) constant += "'";
  srs.signature.add(constant, 0);
  const Term x = Term::var("x");
  auto to_term = [&](const std::vector<Token>& w) {
    std::vector<SymbolId> ids;
    for (const auto& t : w) ids.push_back(*srs.signature.find(t.text));
    return term_of_word(ids, x);
  };
  for (const auto& [l, r] : raw) srs.rules.push_back({to_term(l), to_term(r)});
  return srs;
}

std::string write_srs(const Trs& srs) {
  if (!is_string_shaped(srs.signature)) throw TermError("write_srs: system is not string-shaped");
  std::ostringstream os;
  os << "; orientation: right-top\n(RULES";
  auto side = [&](const Term& t) {
    auto w = word_of(t);
    if (w.empty()) return std::string("eps");
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + srs.signature.name(w[i]);
    return s;
  };
  for (std::size_t i = 0; i < srs.rules.size(); ++i) {
    os << (i ? ",\n  " : "\n  ") << side(srs.rules[i].lhs) << " -> " << side(srs.rules[i].rhs);
  }
  os << (srs.rules.empty() ? ")\n" : "\n)\n");
  return os.str();
}

Term parse_term(const Signature& sig, std::string_view text) {
  Lexer lx(text);
  RawTerm raw = parse_raw(lx);
  if (lx.peek().kind != Tok::kEnd) lx.fail("trailing input after term");
  std::function<Term(const RawTerm&)> conv = [&](const RawTerm& r) -> Term {
    auto id = sig.find(r.name);
    if (!id) {
      if (r.applied) throw ParseError("unknown symbol '" + r.name + "'", r.line, r.column);
      return Term::var(r.name);
    }
    if (sig.arity(*id) != static_cast<int>(r.kids.size())) {
      throw ParseError("symbol '" + r.name + "' expects " + std::to_string(sig.arity(*id)) + " arguments",
                       r.line, r.column);
    }
    std::vector<Term> kids;
    for (const auto& k : r.kids) kids.push_back(conv(k));
    return Term::app(*id, std::move(kids));
  };
  return conv(raw);
}

// -- S-expressions ---------------------------------------------------------------------

const std::string& SExpr::head() const {
  static const std::string kEmpty;
  if (is_atom || items.empty() || !items[0].is_atom) return kEmpty;
  return items[0].atom;
}

void SExpr::fail(const std::string& message) const { throw ParseError(message, line, column); }

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::size_t pos = 0;
  int line = 1, col = 1;
  auto bump = [&] {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  };
  auto skip = [&] {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  };
  std::function<SExpr()> read = [&]() -> SExpr {
    skip();
    if (pos >= text.size()) throw ParseError("unexpected end of input", line, col);
    SExpr e;
    e.line = line;
    e.column = col;
    char c = text[pos];
    if (c == '(') {
      bump();
      while (true) {
        skip();
        if (pos >= text.size()) throw ParseError("unbalanced '('", e.line, e.column);
        if (text[pos] == ')') {
          bump();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw ParseError("unexpected ')'", line, col);
    e.is_atom = true;
    if (c == '"') {
      e.quoted = true;
      bump();
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) bump();
        e.atom += text[pos];
        bump();
      }
      if (pos >= text.size()) throw ParseError("unterminated string", e.line, e.column);
      bump();
      return e;
    }
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' &&
           text[pos] != ')' && text[pos] != ';') {
      e.atom += text[pos];
      bump();
    }
    return e;
  };
  std::vector<SExpr> out;
  while (true) {
    skip();
    if (pos >= text.size()) break;
    out.push_back(read());
  }
  return out;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// -- algebra files -------------------------------------------------------------------------

namespace {

long long parse_int(const SExpr& e) {
  if (!e.is_atom) e.fail("expected a number");
  long long v = 0;
  auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), v);
  if (ec != std::errc() || p != e.atom.data() + e.atom.size()) e.fail("expected a number, got '" + e.atom + "'");
  return v;
}

Element parse_element(const SExpr& e, int n) {
  long long v = parse_int(e);
  if (v < 0 || v >= n) e.fail("element " + std::to_string(v) + " out of range for carrier of size " + std::to_string(n));
  return static_cast<Element>(v);
}

std::vector<std::string> header_comments(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] != ';') break;
    std::string body = line.substr(first + 1);
    if (!body.empty() && body[0] == ' ') body.erase(0, 1);
    while (!body.empty() && (body.back() == '\r' || body.back() == ' ')) body.pop_back();
    out.push_back(body);
  }
  return out;
}

}  // namespace

AlgebraFile algebra_file_from(std::span<const SExpr> lines) {
  AlgebraFile f;
  bool have_carrier = false;
  std::set<std::pair<std::string, std::vector<Element>>> seen;
  std::set<std::string> seen_poly;
  for (const SExpr& e : lines) {
    const std::string& h = e.head();
    if (h == "CARRIER") {
      if (have_carrier) e.fail("duplicate CARRIER line");
      if (e.items.size() != 2) e.fail("expected (CARRIER n)");
      long long n = parse_int(e.items[1]);
      if (n <= 0) e.fail("carrier must be non-empty");
      f.carrier_size = static_cast<int>(n);
      have_carrier = true;
    } else if (h == "FUN") {
      if (!have_carrier) e.fail("FUN before CARRIER");
      if (e.items.size() < 4 || !e.items[1].is_atom || e.items[e.items.size() - 2].atom != "->") {
        e.fail("expected (FUN f a1 ... ak -> b)");
      }
      AlgebraEntry entry;
      entry.symbol = e.items[1].atom;
      for (std::size_t i = 2; i + 2 < e.items.size(); ++i) entry.args.push_back(parse_element(e.items[i], f.carrier_size));
      entry.result = parse_element(e.items.back(), f.carrier_size);
      if (!seen.emplace(entry.symbol, entry.args).second) e.fail("duplicate FUN entry for '" + entry.symbol + "'");
      f.entries.push_back(std::move(entry));
    } else if (h == "GE" || h == "STRICT") {
      if (!have_carrier) e.fail(h + " before CARRIER");
      if (e.items.size() != 3) e.fail("expected (" + h + " a b)");
      auto p = std::make_pair(parse_element(e.items[1], f.carrier_size), parse_element(e.items[2], f.carrier_size));
      (h == "GE" ? f.ge_pairs : f.strict_pairs).push_back(p);
    } else if (h == "POLY") {
      if (e.items.size() < 3 || !e.items[1].is_atom) e.fail("expected (POLY f c0 c1 ... ck) or (POLY f undefined)");
      PolyLine pl;
      pl.symbol = e.items[1].atom;
      if (!seen_poly.insert(pl.symbol).second) e.fail("duplicate POLY line for '" + pl.symbol + "'");
      if (e.items.size() == 3 && e.items[2].atom == "undefined") {
        f.polys.push_back(std::move(pl));
        continue;
      }
      AffineForm form;
      for (std::size_t i = 2; i < e.items.size(); ++i) {
        long long v = parse_int(e.items[i]);
        if (v < 0) e.items[i].fail("coefficients must be non-negative");
        if (i == 2) {
          form.constant = static_cast<Coef>(v);
        } else {
          form.coefs.push_back(static_cast<Coef>(v));
        }
      }
      pl.form = std::move(form);
      f.polys.push_back(std::move(pl));
    } else {
      e.fail("unknown line '" + (e.is_atom ? e.atom : h) + "'");
    }
  }
  if (!have_carrier && !(f.entries.empty() && f.ge_pairs.empty() && f.strict_pairs.empty() && !f.polys.empty())) {
    throw ParseError("missing (CARRIER n)", 1, 1);
  }
  return f;
}

AlgebraFile parse_algebra_file(std::string_view text) {
  auto exprs = parse_sexprs(text);
  AlgebraFile f = algebra_file_from(exprs);
  f.comments = header_comments(text);
  return f;
}

std::string write_algebra_file(const AlgebraFile& file) {
  std::ostringstream os;
  for (const auto& c : file.comments) os << "; " << c << "\n";
  if (file.carrier_size > 0) os << "(CARRIER " << file.carrier_size << ")\n";
  for (const auto& e : file.entries) {
    os << "(FUN " << e.symbol;
    for (Element a : e.args) os << ' ' << a;
    os << " -> " << e.result << ")\n";
  }
  for (auto [a, b] : file.ge_pairs) os << "(GE " << a << ' ' << b << ")\n";
  for (auto [a, b] : file.strict_pairs) os << "(STRICT " << a << ' ' << b << ")\n";
  for (const auto& p : file.polys) {
    os << "(POLY " << p.symbol;
    if (!p.form) {
      os << " undefined";
    } else {
      os << ' ' << p.form->constant;
      for (Coef c : p.form->coefs) os << ' ' << c;
    }
    os << ")\n";
  }
  return os.str();
}

FiniteAlgebra to_algebra(const AlgebraFile& file, const Signature& base) {
  Signature sig = base;
  for (const auto& e : file.entries) {
    auto id = sig.find(e.symbol);
    if (!id) {
      sig.add(e.symbol, static_cast<int>(e.args.size()));
    } else if (sig.arity(*id) != static_cast<int>(e.args.size())) {
      throw AlgebraError("entry for '" + e.symbol + "' has " + std::to_string(e.args.size()) +
                         " arguments but the symbol has arity " + std::to_string(sig.arity(*id)));
    }
  }
  FiniteAlgebra a(sig, file.carrier_size);
  for (const auto& e : file.entries) a.define(*sig.find(e.symbol), e.args, e.result);
  return a;
}

FiniteAlgebra to_algebra(const AlgebraFile& file) { return to_algebra(file, Signature{}); }

CarrierRelation ge_relation(const AlgebraFile& file) {
  return CarrierRelation::from_pairs(file.carrier_size, file.ge_pairs);
}

CarrierRelation strict_relation(const AlgebraFile& file) {
  return CarrierRelation::from_pairs(file.carrier_size, file.strict_pairs);
}

LinearInterpretation to_interpretation(const AlgebraFile& file, const Signature& sig, bool require_all) {
  LinearInterpretation i(sig);
  std::set<SymbolId> listed;
  for (const auto& p : file.polys) {
    auto id = sig.find(p.symbol);
    if (!id) throw InterpretationError("POLY line for unknown symbol '" + p.symbol + "'");
    listed.insert(*id);
    if (p.form) i.set(*id, *p.form);
  }
  if (require_all) {
    for (SymbolId f = 0; f < sig.size(); ++f) {
      if (!listed.count(f)) throw InterpretationError("no POLY line for symbol '" + sig.name(f) + "'");
    }
  }
  return i;
}

AlgebraFile from_algebra(const FiniteAlgebra& a) {
  AlgebraFile f;
  f.carrier_size = a.size();
  for (SymbolId s = 0; s < a.signature().size(); ++s) {
    auto table = a.table(s);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] == kUndefined) continue;
      f.entries.push_back({a.signature().name(s), a.tuple_of(s, idx), table[idx]});
    }
  }
  return f;
}

std::string write_algebra(const FiniteAlgebra& a, const std::vector<std::string>& comments) {
  AlgebraFile f = from_algebra(a);
  f.comments = comments;
  return write_algebra_file(f);
}

FiniteAlgebra parse_algebra(std::string_view text, const Signature& sig) {
  return to_algebra(parse_algebra_file(text), sig);
}

std::vector<PolyLine> poly_lines(const LinearInterpretation& i) {
  std::vector<PolyLine> out;
  for (SymbolId f = 0; f < i.signature().size(); ++f) out.push_back({i.signature().name(f), i.form(f)});
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace localterm
