#include "gny/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gny {

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident,
  Var,
  Label,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LAngle,
  RAngle,
  Comma,
  Colon,
  Arrow,
  Star,
  Equals,
  Newline,
  End,
  Bad,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Var: return "variable";
    case Tok::Label: return "label";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Star: return "'*'";
    case Tok::Equals: return "'='";
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    case Tok::Bad: return "invalid character";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int len) {
    out.push_back({k, std::move(text), {line, col, std::max(len, 1)}});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      push(Tok::Newline, "\n", 1);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    if (c == '\\') {
      std::size_t j = i + 1;
      while (j < src.size() && (src[j] == ' ' || src[j] == '\t' || src[j] == '\r')) ++j;
      if (j < src.size() && src[j] == '\n') {
        i = j + 1;
        ++line;
        col = 1;
        continue;
      }
      push(Tok::Bad, "\\", 1);
      ++i;
      ++col;
      continue;
    }
    if (ident_start(c) || c == '?') {
      std::size_t j = i + (c == '?' ? 1 : 0);
      while (j < src.size()) {
        char d = src[j];
        if (ident_char(d) || (c == '?' && d == '^')) {
          ++j;
        } else if (d == '-' && j + 1 < src.size() && ident_char(src[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      std::string text = src.substr(i, j - i);
      int len = static_cast<int>(j - i);
      if (c == '?') {
        if (len == 1) {
          push(Tok::Bad, "?", 1);
        } else {
          push(Tok::Var, text.substr(1), len);
        }
      } else {
        push(Tok::Ident, text, len);
      }
      col += len;
      i = j;
      continue;
    }
    if (c == '[') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != ']' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != ']' || j == i + 1) {
        push(Tok::Bad, "[", static_cast<int>(j - i));
        col += static_cast<int>(j - i);
        i = j;
        continue;
      }
      int len = static_cast<int>(j + 1 - i);
      push(Tok::Label, src.substr(i + 1, j - i - 1), len);
      col += len;
      i = j + 1;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::Arrow, "->", 2);
      i += 2;
      col += 2;
      continue;
    }
    Tok k = Tok::Bad;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '<': k = Tok::LAngle; break;
      case '>': k = Tok::RAngle; break;
      case ',': k = Tok::Comma; break;
      case ':': k = Tok::Colon; break;
      case '*': k = Tok::Star; break;
      case '=': k = Tok::Equals; break;
      default: break;
    }
    push(k, std::string(1, c), 1);
    ++i;
    ++col;
  }
  push(Tok::Newline, "\n", 1);
  push(Tok::End, "", 1);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

const std::set<std::string>& sections() {
  static const std::set<std::string> s{"protocol", "options", "principals", "declare",
                                       "assume",   "messages", "goals"};
  return s;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> s{
      "protocol", "options", "principals", "declare", "assume", "messages", "goals",  "nonce",  "timestamp",
      "key",      "tag",     "literal",    "keypair", "derive", "when",     "then",   "believes", "sees",
      "holds",    "said",    "controls",   "shares",  "with",   "means",    "fresh",  "freshany", "recog",
      "pubkey",   "of",      "and",        "enc",     "dec",    "H",        "F",      "succ",   "id",
      "pub",      "priv"};
  return s;
}

bool is_verb(const Token& t) {
  return t.kind == Tok::Ident && (t.text == "believes" || t.text == "sees" || t.text == "holds" ||
                                  t.text == "said" || t.text == "controls" || t.text == "shares");
}

struct Fail {
  ParseError error;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, ProtocolSpec& spec, bool allow_star)
      : toks_(std::move(toks)), spec_(spec), allow_star_(allow_star) {
    index_declarations();
  }

  std::vector<ParseError> errors;

  // -- token helpers --------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const Token& t, std::string msg, std::vector<std::string> expected = {}) const {
    throw Fail{{t.span, std::move(msg), std::move(expected)}};
  }
  [[noreturn]] void fail_expected(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::Ident || t.kind == Tok::Var ? "'" + t.text + "'" : tok_name(t.kind);
    if (t.kind == Tok::Bad && t.text == "[") got = "unterminated label";
    std::string msg = "expected " + expected.front();
    for (std::size_t i = 1; i < expected.size(); ++i) msg += (i + 1 == expected.size() ? " or " : ", ") + expected[i];
    fail(t, msg + ", found " + got, std::move(expected));
  }
  const Token& expect(Tok k) {
    if (!at(k)) fail_expected({tok_name(k)});
    return next();
  }
  void expect_word(const char* w) {
    if (!at_word(w)) fail_expected({std::string("'") + w + "'"});
    next();
  }
  void end_line() {
    if (!at(Tok::Newline)) fail_expected({"end of line"});
    skip_newlines();
  }
  void skip_newlines() {
    while (at(Tok::Newline)) next();
  }
  void sync() {
    while (!at(Tok::Newline) && !at(Tok::End)) next();
    skip_newlines();
  }

  // -- declarations ---------------------------------------------------------
  void index_declarations() {
    for (const auto& p : spec_.principals) principals_.insert(p);
    for (const auto& a : spec_.atoms) atoms_[a.name] = a.kind;
    for (const auto& k : spec_.keypairs) keypairs_.insert(k);
    for (const auto& d : spec_.derived) derived_[d.name] = d.definition;
  }
  bool declared(const std::string& n) const {
    return principals_.count(n) || atoms_.count(n) || keypairs_.count(n) || derived_.count(n);
  }
  void declare_name(const Token& t) {
    if (reserved().count(t.text)) fail(t, "'" + t.text + "' is a keyword and cannot be declared");
    if (declared(t.text)) fail(t, "'" + t.text + "' is already declared");
  }

  // -- names ----------------------------------------------------------------
  Name principal() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      next();
      return Name::meta(t.text);
    }
    if (t.kind == Tok::Ident) {
      if (principals_.count(t.text)) {
        next();
        return Name::of(t.text);
      }
      fail(t, "unknown principal '" + t.text + "'", {"principal"});
    }
    fail_expected({"principal"});
  }
  Name key_label() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      next();
      return Name::meta(t.text);
    }
    if (t.kind == Tok::Ident) {
      if (keypairs_.count(t.text)) {
        next();
        return Name::of(t.text);
      }
      fail(t, "unknown keypair '" + t.text + "'", {"keypair"});
    }
    fail_expected({"keypair"});
  }

  // -- terms ----------------------------------------------------------------
  std::vector<Term> term_list(Tok close) {
    std::vector<Term> out{term()};
    while (at(Tok::Comma)) {
      next();
      out.push_back(term());
    }
    expect(close);
    return out;
  }

  Term term() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Star:
        if (!allow_star_) fail(t, "'*' marks received messages and is not allowed in specifications");
        next();
        return Term::starred(term());
      case Tok::LParen:
        next();
        return make_tuple(term_list(Tok::RParen));
      case Tok::Var:
        next();
        return Term::meta(t.text);
      case Tok::LAngle: {
        next();
        Statement s = statement();
        expect(Tok::RAngle);
        return Term::quoted(std::move(s));
      }
      case Tok::Ident:
        break;
      default:
        fail_expected({"term"});
    }
    const std::string& w = t.text;
    if (w == "enc" || w == "dec") {
      next();
      expect(Tok::LBrace);
      Term body = make_tuple(term_list(Tok::RBrace));
      Term key = term();
      if (w == "dec") return Term::sym_dec(std::move(body), std::move(key));
      if (key.is(TermKind::PublicKey) || key.is(TermKind::PrivateKey)) {
        return Term::asym_enc(std::move(body), std::move(key));
      }
      return Term::sym_enc(std::move(body), std::move(key));
    }
    if (w == "H" || w == "F") {
      next();
      expect(Tok::LParen);
      auto args = term_list(Tok::RParen);
      if (w == "H") return Term::hash(make_tuple(std::move(args)));
      return Term::func(std::move(args));
    }
    if (w == "succ") {
      next();
      expect(Tok::LParen);
      Term body = term();
      expect(Tok::RParen);
      return Term::succ(std::move(body));
    }
    if (w == "id") {
      next();
      expect(Tok::LParen);
      Name p = principal();
      expect(Tok::RParen);
      return Term::identity(std::move(p));
    }
    if (w == "pub" || w == "priv") {
      next();
      expect(Tok::LParen);
      Name k = key_label();
      expect(Tok::RParen);
      return w == "pub" ? Term::public_key(std::move(k)) : Term::private_key(std::move(k));
    }
    if (auto it = atoms_.find(w); it != atoms_.end()) {
      next();
      return Term::atom(it->second, w);
    }
    if (auto it = derived_.find(w); it != derived_.end()) {
      next();
      return it->second;
    }
    if (principals_.count(w)) fail(t, "principal '" + w + "' used as a formula; write id(" + w + ")");
    if (keypairs_.count(w)) fail(t, "keypair '" + w + "' used as a formula; write pub(" + w + ") or priv(" + w + ")");
    if (reserved().count(w)) fail(t, "keyword '" + w + "' cannot start a formula", {"term"});
    fail(t, "undeclared symbol '" + w + "'", {"term"});
  }

  // -- statements -----------------------------------------------------------
  std::vector<Statement> statement_list() {
    std::vector<Statement> out{statement()};
    while (at(Tok::Comma)) {
      next();
      out.push_back(statement());
    }
    return out;
  }

  Statement principal_statement() {
    Name p = principal();
    const Token& verb = peek();
    if (!is_verb(verb)) fail_expected({"'believes'", "'sees'", "'holds'", "'said'", "'controls'", "'shares'"});
    next();
    const std::string& v = verb.text;
    if (v == "believes") return Statement::believes(std::move(p), statement());
    if (v == "controls") return Statement::controls(std::move(p), statement());
    if (v == "sees") return Statement::sees(std::move(p), term());
    if (v == "holds") return Statement::holds(std::move(p), term());
    if (v == "said") return Statement::said(std::move(p), term());
    Term s = term();
    expect_word("with");
    Name q = principal();
    return Statement::shared_secret(std::move(p), std::move(s), std::move(q));
  }

  Statement means_statement() {
    Term x = term();
    expect_word("means");
    return Statement::means(std::move(x), statement());
  }

  Statement statement() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      const std::string& w = t.text;
      if (w == "fresh" || w == "recog") {
        next();
        expect(Tok::LParen);
        Term x = term();
        expect(Tok::RParen);
        return w == "fresh" ? Statement::fresh(std::move(x)) : Statement::recognizable(std::move(x));
      }
      if (w == "freshany") {
        next();
        expect(Tok::LParen);
        return Statement::fresh_any(term_list(Tok::RParen));
      }
      if (w == "pubkey") {
        next();
        expect(Tok::LParen);
        Name k = key_label();
        expect(Tok::RParen);
        expect_word("of");
        return Statement::public_key_of(Term::public_key(std::move(k)), principal());
      }
      if (w == "and") {
        next();
        expect(Tok::LParen);
        auto parts = statement_list();
        expect(Tok::RParen);
        return Statement::conj(std::move(parts));
      }
      if (principals_.count(w) && is_verb(peek(1))) return principal_statement();
      if (principals_.count(w)) {
        next();
        fail_expected({"'believes'", "'sees'", "'holds'", "'said'", "'controls'", "'shares'"});
      }
      return means_statement();
    }
    if (t.kind == Tok::Var) {
      if (is_verb(peek(1))) return principal_statement();
      if (peek(1).kind == Tok::Ident && peek(1).text == "means") return means_statement();
      next();
      return Statement::meta(t.text);
    }
    if (t.kind == Tok::Star) {
      next();
      return Statement::wildcard();
    }
    if (t.kind == Tok::LParen) {
      std::size_t save = pos_;
      try {
        next();
        Statement s = statement();
        expect(Tok::RParen);
        return s;
      } catch (const Fail&) {
        pos_ = save;
      }
      return means_statement();
    }
    if (t.kind == Tok::LAngle) return means_statement();
    fail_expected({"statement"});
  }

  // -- spec sections --------------------------------------------------------
  void parse_file() {
    skip_newlines();
    std::set<std::string> seen;
    while (!at(Tok::End)) {
      const Token& t = peek();
      if (t.kind != Tok::Ident || !sections().count(t.text)) {
        errors.push_back({t.span, "expected a section keyword", {sections().begin(), sections().end()}});
        sync();
        continue;
      }
      next();
      if (!seen.insert(t.text).second) errors.push_back({t.span, "duplicate section '" + t.text + "'", {}});
      guarded([&] { header(t); });
      if (t.text == "declare" || t.text == "assume" || t.text == "messages" || t.text == "goals") body(t.text);
    }
    for (const char* required : {"protocol", "principals"}) {
      if (!seen.count(required)) {
        const Token& first = toks_.front();
        errors.push_back({first.span, std::string("missing section '") + required + "'", {required}});
      }
    }
  }

  template <typename F>
  void guarded(F&& f) {
    try {
      f();
    } catch (const Fail& e) {
      errors.push_back(e.error);
      sync();
    }
  }

  void header(const Token& section) {
    const std::string& s = section.text;
    if (s == "protocol") {
      spec_.name = expect(Tok::Ident).text;
      end_line();
    } else if (s == "options") {
      while (at(Tok::Ident)) {
        const Token& o = next();
        if (o.text != "commutative-asym") fail(o, "unknown option '" + o.text + "'", {"commutative-asym"});
        spec_.commutative_asym = true;
      }
      end_line();
    } else if (s == "principals") {
      if (!at(Tok::Ident)) fail_expected({"principal name"});
      while (at(Tok::Ident)) {
        const Token& p = next();
        declare_name(p);
        principals_.insert(p.text);
        spec_.principals.push_back(p.text);
      }
      end_line();
    } else {
      end_line();
    }
  }

  bool at_section() const { return at(Tok::End) || (at(Tok::Ident) && sections().count(peek().text)); }

  void body(const std::string& section) {
    while (!at_section()) {
      guarded([&] {
        if (section == "declare") {
          declaration();
        } else if (section == "assume") {
          assumption();
        } else if (section == "messages") {
          message();
        } else {
          goal();
        }
        end_line();
      });
    }
  }

  void declaration() {
    const Token& kw = peek();
    static const std::map<std::string, AtomKind> kinds{{"nonce", AtomKind::Nonce},
                                                       {"timestamp", AtomKind::Timestamp},
                                                       {"key", AtomKind::SymKey},
                                                       {"tag", AtomKind::StageTag},
                                                       {"literal", AtomKind::Literal}};
    if (kw.kind != Tok::Ident) fail_expected({"declaration kind"});
    if (kw.text == "derive") {
      next();
      const Token& n = expect(Tok::Ident);
      declare_name(n);
      expect(Tok::Equals);
      Term def = normalize(term());
      if (!def.is_ground()) fail(n, "derived formula '" + n.text + "' must not contain variables");
      derived_[n.text] = def;
      spec_.derived.push_back({n.text, def});
      return;
    }
    bool keypair = kw.text == "keypair";
    auto kind = kinds.find(kw.text);
    if (!keypair && kind == kinds.end()) {
      fail(kw, "unknown declaration kind '" + kw.text + "'",
           {"nonce", "timestamp", "key", "tag", "literal", "keypair", "derive"});
    }
    next();
    if (!at(Tok::Ident)) fail_expected({"name"});
    while (at(Tok::Ident)) {
      const Token& n = next();
      declare_name(n);
      if (keypair) {
        keypairs_.insert(n.text);
        spec_.keypairs.push_back(n.text);
      } else {
        atoms_[n.text] = kind->second;
        spec_.atoms.push_back({n.text, kind->second});
      }
    }
  }

  std::string label() {
    if (!at(Tok::Label)) return {};
    return next().text;
  }

  void assumption() {
    Assumption a;
    a.label = label();
    if (at_word("when")) {
      next();
      for (auto& s : statement_list()) a.when.push_back(normalize(s));
      expect_word("then");
    }
    for (auto& s : statement_list()) a.then.push_back(normalize(s));
    spec_.assumptions.push_back(std::move(a));
  }

  void message() {
    const Token& lab = expect(Tok::Ident);
    for (const auto& m : spec_.messages) {
      if (m.label == lab.text) fail(lab, "duplicate message label '" + lab.text + "'");
    }
    expect(Tok::Colon);
    const Token& from_tok = peek();
    Name from = principal();
    expect(Tok::Arrow);
    Name to = principal();
    if (from.var || to.var) fail(from_tok, "message endpoints must be declared principals");
    expect(Tok::Colon);
    const Token& body_tok = peek();
    Term t = normalize(term());
    if (!t.is_ground()) fail(body_tok, "message formulae must not contain variables");
    spec_.messages.push_back({lab.text, std::move(from), std::move(to), std::move(t)});
  }

  void goal() {
    Goal g;
    g.label = label();
    const Token& start = peek();
    g.statement = normalize(statement());
    if (!g.statement.is_ground()) fail(start, "goals must not contain variables");
    spec_.goals.push_back(std::move(g));
  }

  void finish_single() {
    skip_newlines();
    if (!at(Tok::End)) fail_expected({"end of input"});
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ProtocolSpec& spec_;
  bool allow_star_;
  std::set<std::string> principals_;
  std::map<std::string, AtomKind> atoms_;
  std::set<std::string> keypairs_;
  std::map<std::string, Term> derived_;
};

}  // namespace

std::string format_error(const ParseError& e, const std::string& file) {
  std::ostringstream out;
  if (!file.empty()) out << file << ":";
  out << e.span.line << ":" << e.span.column << ": " << e.message;
  return out.str();
}

ParseResult parse_spec(const std::string& text) {
  ProtocolSpec spec;
  Parser p(lex(text), spec, false);
  p.parse_file();
  ParseResult r;
  r.errors = std::move(p.errors);
  if (!r.errors.empty()) return r;
  try {
    validate(spec);
  } catch (const SpecError& e) {
    r.errors.push_back({{1, 1, 1}, e.what(), {}});
    return r;
  }
  r.spec = std::move(spec);
  return r;
}

StatementResult parse_statement(const std::string& text, const ProtocolSpec& spec) {
  ProtocolSpec ctx = spec;
  Parser p(lex(text), ctx, true);
  StatementResult r;
  try {
    p.skip_newlines();
    Statement s = p.statement();
    p.finish_single();
    r.statement = normalize(s);
  } catch (const Fail& e) {
    r.errors.push_back(e.error);
  }
  return r;
}

TermResult parse_term(const std::string& text, const ProtocolSpec& spec) {
  ProtocolSpec ctx = spec;
  Parser p(lex(text), ctx, true);
  TermResult r;
  try {
    p.skip_newlines();
    Term t = p.term();
    p.finish_single();
    r.term = normalize(t);
  } catch (const Fail& e) {
    r.errors.push_back(e.error);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string name_text(const Name& n) { return n.var ? "?" + n.id : n.id; }

bool needs_parens(const Statement& s) {
  return s.is(StmtKind::Believes) || s.is(StmtKind::Controls) || s.is(StmtKind::Means);
}

}  // namespace

Renderer::Renderer(const ProtocolSpec& spec) {
  for (const auto& d : spec.derived) aliases_.emplace_back(d.definition, d.name);
}

std::string Renderer::term(const Term& t) const { return term(t, aliases_.size()); }

std::string Renderer::term(const Term& t, std::size_t alias_limit) const {
  for (std::size_t i = 0; i < alias_limit && i < aliases_.size(); ++i) {
    if (aliases_[i].first == t) return aliases_[i].second;
  }
  auto join = [&](const std::vector<Term>& ts) {
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ", ";
      out += term(ts[i], alias_limit);
    }
    return out;
  };
  switch (t.kind()) {
    case TermKind::Atom: return t.label();
    case TermKind::Identity: return "id(" + name_text(t.name()) + ")";
    case TermKind::PublicKey: return "pub(" + name_text(t.name()) + ")";
    case TermKind::PrivateKey: return "priv(" + name_text(t.name()) + ")";
    case TermKind::Concat: return "(" + join(t.children()) + ")";
    case TermKind::SymEnc:
    case TermKind::AsymEnc:
      return "enc{" + term(t.body(), alias_limit) + "}" + term(t.key(), alias_limit);
    case TermKind::SymDec: return "dec{" + term(t.body(), alias_limit) + "}" + term(t.key(), alias_limit);
    case TermKind::Hash:
      if (t.body().is(TermKind::Concat)) {
        bool aliased = false;
        for (std::size_t i = 0; i < alias_limit && i < aliases_.size(); ++i) aliased |= aliases_[i].first == t.body();
        if (!aliased) return "H(" + join(t.body().children()) + ")";
      }
      return "H(" + term(t.body(), alias_limit) + ")";
    case TermKind::Func: return "F(" + join(t.children()) + ")";
    case TermKind::Starred: return "*" + term(t.body(), alias_limit);
    case TermKind::Succ: return "succ(" + term(t.body(), alias_limit) + ")";
    case TermKind::Quoted: return "<" + statement(t.quoted_statement()) + ">";
    case TermKind::MetaVar: return "?" + t.label();
  }
  return "?";
}

std::string Renderer::statement(const Statement& s) const {
  auto sub = [&](const Statement& x) { return needs_parens(x) ? "(" + statement(x) + ")" : statement(x); };
  auto p = [&] { return name_text(s.principal()); };
  switch (s.kind()) {
    case StmtKind::Sees: return p() + " sees " + term(s.term());
    case StmtKind::Holds: return p() + " holds " + term(s.term());
    case StmtKind::Said: return p() + " said " + term(s.term());
    case StmtKind::Believes: return p() + " believes " + sub(s.inner());
    case StmtKind::Controls: return p() + " controls " + sub(s.inner());
    case StmtKind::Fresh: return "fresh(" + term(s.term()) + ")";
    case StmtKind::Recognizable: return "recog(" + term(s.term()) + ")";
    case StmtKind::FreshAny: {
      std::string out = "freshany(";
      for (std::size_t i = 0; i < s.terms().size(); ++i) out += (i ? ", " : "") + term(s.terms()[i]);
      return out + ")";
    }
    case StmtKind::SharedSecret:
      return p() + " shares " + term(s.term()) + " with " + name_text(s.other());
    case StmtKind::PublicKeyOf:
      if (s.term().is(TermKind::PublicKey)) return "pubkey(" + name_text(s.term().name()) + ") of " + name_text(s.other());
      return "pubkey(" + term(s.term()) + ") of " + name_text(s.other());
    case StmtKind::Means: return term(s.term()) + " means " + sub(s.inner());
    case StmtKind::Conj: {
      std::string out = "and(";
      for (std::size_t i = 0; i < s.parts().size(); ++i) out += (i ? ", " : "") + statement(s.parts()[i]);
      return out + ")";
    }
    case StmtKind::Wildcard: return "*";
    case StmtKind::MetaStmt: return "?" + s.label();
  }
  return "?";
}

std::function<std::string(const Statement&)> Renderer::as_function() const {
  return [self = *this](const Statement& s) { return self.statement(s); };
}

std::string render(const Term& t) { return Renderer{}.term(t); }
std::string render(const Statement& s) { return Renderer{}.statement(s); }

std::string render_spec(const ProtocolSpec& spec) {
  Renderer r(spec);
  auto list = [&](const std::vector<Statement>& ss) {
    std::string out;
    for (std::size_t i = 0; i < ss.size(); ++i) out += (i ? ", " : "") + r.statement(ss[i]);
    return out;
  };
  std::ostringstream out;
  out << "protocol " << spec.name << "\n";
  if (spec.commutative_asym) out << "options commutative-asym\n";
  out << "principals";
  for (const auto& p : spec.principals) out << " " << p;
  out << "\n";
  if (!spec.atoms.empty() || !spec.keypairs.empty() || !spec.derived.empty()) {
    out << "\ndeclare\n";
    for (const auto& a : spec.atoms) out << "  " << to_string(a.kind) << " " << a.name << "\n";
    for (const auto& k : spec.keypairs) out << "  keypair " << k << "\n";
    for (std::size_t i = 0; i < spec.derived.size(); ++i) {
      out << "  derive " << spec.derived[i].name << " = " << r.term(spec.derived[i].definition, i) << "\n";
    }
  }
  if (!spec.assumptions.empty()) {
    out << "\nassume\n";
    for (const auto& a : spec.assumptions) {
      out << "  ";
      if (!a.label.empty()) out << "[" << a.label << "] ";
      if (a.conditional()) out << "when " << list(a.when) << " then ";
      out << list(a.then) << "\n";
    }
  }
  if (!spec.messages.empty()) {
    out << "\nmessages\n";
    for (const auto& m : spec.messages) {
      out << "  " << m.label << ": " << m.sender.id << " -> " << m.receiver.id << " : " << r.term(m.term) << "\n";
    }
  }
  if (!spec.goals.empty()) {
    out << "\ngoals\n";
    for (const auto& g : spec.goals) {
      out << "  ";
      if (!g.label.empty()) out << "[" << g.label << "] ";
      out << r.statement(g.statement) << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Export

namespace {

using ojson = nlohmann::ordered_json;

ojson nodes_json(const ProofTrace& trace, const Renderer& r) {
  ojson nodes = ojson::array();
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const auto& n = trace.nodes[i];
    ojson node;
    node["id"] = i;
    node["statement"] = r.statement(n.statement);
    node["origin"] = to_string(n.why.origin);
    node["rule"] = n.why.origin == Origin::Rule ? ojson(n.why.rule) : ojson(nullptr);
    node["lift"] = n.why.lift;
    node["label"] = n.why.label;
    node["premises"] = n.premises;
    nodes.push_back(std::move(node));
  }
  return nodes;
}

std::string derivation_text(const ProofTrace& trace, const Renderer& r, const std::string& indent = {}) {
  std::ostringstream out;
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const auto& n = trace.nodes[i];
    out << indent << i << ". " << r.statement(n.statement) << "    ";
    if (n.why.origin == Origin::Rule) {
      out << "By " << display_name(n.why.rule, n.why.lift);
      for (std::size_t k = 0; k < n.premises.size(); ++k) out << (k ? ", " : " from ") << n.premises[k];
    } else {
      out << describe(n.why);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string export_trace(const ProofTrace& trace, TraceFormat format, const Renderer& renderer) {
  if (format == TraceFormat::Structured) {
    ojson doc;
    doc["format"] = "gny-trace";
    doc["version"] = 1;
    doc["nodes"] = nodes_json(trace, renderer);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "# derivation (" << trace.nodes.size() << " steps)\n" << derivation_text(trace, renderer);
  return out.str();
}

std::string export_report(const GoalReport& report, TraceFormat format, const Renderer& renderer) {
  std::size_t proved = 0;
  for (const auto& g : report.goals) proved += g.proved ? 1 : 0;
  if (format == TraceFormat::Structured) {
    ojson doc;
    doc["format"] = "gny-report";
    doc["version"] = 1;
    doc["protocol"] = report.protocol;
    doc["all_proved"] = report.all_proved();
    ojson goals = ojson::array();
    for (const auto& g : report.goals) {
      ojson j;
      j["label"] = g.label;
      j["statement"] = renderer.statement(g.statement);
      j["proved"] = g.proved;
      j["proof"] = g.proof ? nodes_json(*g.proof, renderer) : ojson(nullptr);
      goals.push_back(std::move(j));
    }
    doc["goals"] = std::move(goals);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "protocol " << report.protocol << "\n";
  for (const auto& g : report.goals) {
    out << "  " << (g.proved ? "proved    " : "UNPROVED  ");
    if (!g.label.empty()) out << "[" << g.label << "] ";
    out << renderer.statement(g.statement) << "\n";
  }
  out << proved << " of " << report.goals.size() << " goals proved\n";
  return out.str();
}

ProofTrace import_trace(const std::string& json_text, const ProtocolSpec& spec) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("trace is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "gny-trace" || !doc.contains("nodes")) {
    throw std::invalid_argument("not a gny-trace document");
  }
  static const std::map<std::string, Origin> origins{{"precondition", Origin::Precondition},
                                                     {"receipt", Origin::Receipt},
                                                     {"author", Origin::Author},
                                                     {"rule", Origin::Rule}};
  ProofTrace out;
  try {
    for (const auto& n : doc.at("nodes")) {
      auto parsed = parse_statement(n.at("statement").get<std::string>(), spec);
      if (!parsed.statement) {
        throw std::invalid_argument("node " + std::to_string(out.nodes.size()) +
                                    ": " + format_error(parsed.errors.front()));
      }
      TraceNode node;
      node.statement = *parsed.statement;
      auto origin = origins.find(n.at("origin").get<std::string>());
      if (origin == origins.end()) throw std::invalid_argument("unknown origin");
      node.why.origin = origin->second;
      if (!n.at("rule").is_null()) node.why.rule = n.at("rule").get<std::string>();
      node.why.lift = n.at("lift").get<int>();
      node.why.label = n.at("label").get<std::string>();
      for (const auto& p : n.at("premises")) {
        auto id = p.get<std::size_t>();
        if (id >= out.nodes.size()) throw std::invalid_argument("premise refers forward");
        node.premises.push_back(id);
        node.why.premises.push_back(out.nodes[id].statement);
      }
      out.nodes.push_back(std::move(node));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace node: ") + e.what());
  }
  return out;
}

}  // namespace gny
