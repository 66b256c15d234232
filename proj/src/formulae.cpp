#include "gny/formulae.hpp"

#include <algorithm>
#include <utility>

namespace gny {

struct TermNode {
  TermKind kind = TermKind::Atom;
  AtomKind atom_kind = AtomKind::Literal;
  std::string label;
  Name name;
  std::vector<Term> kids;
  std::vector<Statement> quoted;  // at most one element
  bool ground = true;
  std::string key;
  std::size_t hash = 0;
};

struct StmtNode {
  StmtKind kind = StmtKind::Wildcard;
  Name principal;
  Name other;
  std::vector<Term> terms;
  std::vector<Statement> subs;
  std::string label;
  bool ground = true;
  int depth = 0;
  std::string key;
  std::size_t hash = 0;
};

struct NodeAccess {
  static Term make(std::shared_ptr<TermNode> n) {
    n->hash = std::hash<std::string>{}(n->key);
    return Term(std::move(n));
  }
  static Statement make(std::shared_ptr<StmtNode> n) {
    n->hash = std::hash<std::string>{}(n->key);
    return Statement(std::move(n));
  }
  static const TermNode& node(const Term& t) { return *t.node_; }
  static const StmtNode& node(const Statement& s) { return *s.node_; }
};

namespace {

std::string name_key(const Name& n) { return n.var ? "?" + n.id : n.id; }

char atom_char(AtomKind k) {
  switch (k) {
    case AtomKind::Nonce: return 'n';
    case AtomKind::Timestamp: return 't';
    case AtomKind::SymKey: return 'k';
    case AtomKind::StageTag: return 's';
    case AtomKind::Literal: return 'l';
  }
  return 'l';
}

const char* term_tag(TermKind k) {
  switch (k) {
    case TermKind::Concat: return "C";
    case TermKind::SymEnc: return "E";
    case TermKind::SymDec: return "D";
    case TermKind::AsymEnc: return "X";
    case TermKind::Hash: return "H";
    case TermKind::Func: return "F";
    case TermKind::Starred: return "*";
    case TermKind::Succ: return "S";
    default: return "?";
  }
}

const char* stmt_tag(StmtKind k) {
  switch (k) {
    case StmtKind::Sees: return "sees";
    case StmtKind::Holds: return "holds";
    case StmtKind::Said: return "said";
    case StmtKind::Believes: return "bel";
    case StmtKind::Fresh: return "fresh";
    case StmtKind::FreshAny: return "freshany";
    case StmtKind::Recognizable: return "recog";
    case StmtKind::SharedSecret: return "share";
    case StmtKind::PublicKeyOf: return "pk";
    case StmtKind::Controls: return "ctl";
    case StmtKind::Means: return "means";
    case StmtKind::Conj: return "and";
    case StmtKind::Wildcard: return "*";
    case StmtKind::MetaStmt: return "?";
  }
  return "?";
}

Term compound(TermKind kind, std::vector<Term> kids) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  std::string key = term_tag(kind);
  key += '(';
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i) key += ',';
    key += kids[i].canonical_key();
    n->ground = n->ground && kids[i].is_ground();
  }
  key += ')';
  n->key = std::move(key);
  n->kids = std::move(kids);
  return NodeAccess::make(std::move(n));
}

// Statement with principal/other names, term slots and sub-statements.
Statement stmt(StmtKind kind, Name p, Name q, std::vector<Term> terms,
               std::vector<Statement> subs, std::string label = {}) {
  auto n = std::make_shared<StmtNode>();
  n->kind = kind;
  std::string key = stmt_tag(kind);
  key += '(';
  bool first = true;
  auto sep = [&] {
    if (!first) key += ',';
    first = false;
  };
  bool has_p = kind == StmtKind::Sees || kind == StmtKind::Holds || kind == StmtKind::Said ||
               kind == StmtKind::Believes || kind == StmtKind::Controls ||
               kind == StmtKind::SharedSecret;
  bool has_q = kind == StmtKind::SharedSecret || kind == StmtKind::PublicKeyOf;
  if (has_p) {
    sep();
    key += name_key(p);
    n->ground = n->ground && !p.var;
  }
  for (const auto& t : terms) {
    sep();
    key += t.canonical_key();
    n->ground = n->ground && t.is_ground();
  }
  if (has_q) {
    sep();
    key += name_key(q);
    n->ground = n->ground && !q.var;
  }
  int depth = 0;
  for (const auto& s : subs) {
    sep();
    key += s.canonical_key();
    n->ground = n->ground && s.is_ground();
    depth = std::max(depth, s.belief_depth());
  }
  if (kind == StmtKind::MetaStmt) {
    key += label;
    n->ground = false;
  }
  key += ')';
  n->depth = depth + (kind == StmtKind::Believes ? 1 : 0);
  n->key = std::move(key);
  n->principal = std::move(p);
  n->other = std::move(q);
  n->terms = std::move(terms);
  n->subs = std::move(subs);
  n->label = std::move(label);
  return NodeAccess::make(std::move(n));
}

}  // namespace

const char* to_string(AtomKind k) {
  switch (k) {
    case AtomKind::Nonce: return "nonce";
    case AtomKind::Timestamp: return "timestamp";
    case AtomKind::SymKey: return "key";
    case AtomKind::StageTag: return "tag";
    case AtomKind::Literal: return "literal";
  }
  return "literal";
}

const char* to_string(TermKind k) {
  switch (k) {
    case TermKind::Atom: return "Atom";
    case TermKind::Identity: return "IdentityOf";
    case TermKind::PublicKey: return "PublicKey";
    case TermKind::PrivateKey: return "PrivateKey";
    case TermKind::Concat: return "Concat";
    case TermKind::SymEnc: return "SymEnc";
    case TermKind::SymDec: return "SymDec";
    case TermKind::AsymEnc: return "AsymEnc";
    case TermKind::Hash: return "Hash";
    case TermKind::Func: return "Func";
    case TermKind::Starred: return "Starred";
    case TermKind::Succ: return "Succ";
    case TermKind::Quoted: return "Quoted";
    case TermKind::MetaVar: return "MetaVar";
  }
  return "?";
}

const char* to_string(StmtKind k) {
  switch (k) {
    case StmtKind::Sees: return "Sees";
    case StmtKind::Holds: return "Holds";
    case StmtKind::Said: return "Said";
    case StmtKind::Believes: return "Believes";
    case StmtKind::Fresh: return "Fresh";
    case StmtKind::FreshAny: return "FreshAny";
    case StmtKind::Recognizable: return "Recognizable";
    case StmtKind::SharedSecret: return "SharedSecret";
    case StmtKind::PublicKeyOf: return "PublicKeyOf";
    case StmtKind::Controls: return "Controls";
    case StmtKind::Means: return "Means";
    case StmtKind::Conj: return "Conj";
    case StmtKind::Wildcard: return "Wildcard";
    case StmtKind::MetaStmt: return "MetaStmt";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Term

Term::Term() : Term(atom(AtomKind::Literal, "_")) {}

Term Term::atom(AtomKind kind, std::string label) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Atom;
  n->atom_kind = kind;
  n->key = std::string("a") + atom_char(kind) + ":" + label;
  n->label = std::move(label);
  return NodeAccess::make(std::move(n));
}

Term Term::identity(Name principal) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Identity;
  n->key = "I:" + name_key(principal);
  n->ground = !principal.var;
  n->label = principal.id;
  n->name = std::move(principal);
  return NodeAccess::make(std::move(n));
}

namespace {
Term key_term(TermKind kind, Name label) {
  auto n = std::make_shared<TermNode>();
  n->kind = kind;
  n->key = (kind == TermKind::PublicKey ? "+" : "-") + name_key(label);
  n->ground = !label.var;
  n->label = label.id;
  n->name = std::move(label);
  return NodeAccess::make(std::move(n));
}
}  // namespace

Term Term::public_key(Name label) { return key_term(TermKind::PublicKey, std::move(label)); }
Term Term::private_key(Name label) { return key_term(TermKind::PrivateKey, std::move(label)); }
Term Term::concat(std::vector<Term> parts) { return compound(TermKind::Concat, std::move(parts)); }
Term Term::sym_enc(Term body, Term key) { return compound(TermKind::SymEnc, {std::move(body), std::move(key)}); }
Term Term::sym_dec(Term body, Term key) { return compound(TermKind::SymDec, {std::move(body), std::move(key)}); }
Term Term::asym_enc(Term body, Term key) { return compound(TermKind::AsymEnc, {std::move(body), std::move(key)}); }
Term Term::hash(Term body) { return compound(TermKind::Hash, {std::move(body)}); }
Term Term::func(std::vector<Term> args) { return compound(TermKind::Func, std::move(args)); }
Term Term::starred(Term body) { return compound(TermKind::Starred, {std::move(body)}); }
Term Term::succ(Term body) { return compound(TermKind::Succ, {std::move(body)}); }

Term Term::quoted(Statement s) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::Quoted;
  n->key = "Q(" + s.canonical_key() + ")";
  n->ground = s.is_ground();
  n->quoted.push_back(std::move(s));
  return NodeAccess::make(std::move(n));
}

Term Term::meta(std::string label) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::MetaVar;
  n->key = "?" + label;
  n->ground = false;
  n->label = std::move(label);
  return NodeAccess::make(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
AtomKind Term::atom_kind() const { return node_->atom_kind; }
const std::string& Term::label() const { return node_->label; }
const Name& Term::name() const { return node_->name; }
const std::vector<Term>& Term::children() const { return node_->kids; }
const Term& Term::body() const { return node_->kids.at(0); }
const Term& Term::key() const { return node_->kids.at(1); }
const Statement& Term::quoted_statement() const { return node_->quoted.at(0); }
bool Term::is_ground() const { return node_->ground; }
const std::string& Term::canonical_key() const { return node_->key; }
std::size_t Term::hash_value() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  return a.node_ == b.node_ || (a.node_->hash == b.node_->hash && a.node_->key == b.node_->key);
}
bool operator<(const Term& a, const Term& b) { return a.node_->key < b.node_->key; }

// ---------------------------------------------------------------------------
// Statement

Statement::Statement() : Statement(wildcard()) {}

Statement Statement::sees(Name p, Term t) { return stmt(StmtKind::Sees, std::move(p), {}, {std::move(t)}, {}); }
Statement Statement::holds(Name p, Term t) { return stmt(StmtKind::Holds, std::move(p), {}, {std::move(t)}, {}); }
Statement Statement::said(Name p, Term t) { return stmt(StmtKind::Said, std::move(p), {}, {std::move(t)}, {}); }
Statement Statement::believes(Name p, Statement s) {
  return stmt(StmtKind::Believes, std::move(p), {}, {}, {std::move(s)});
}
Statement Statement::fresh(Term t) { return stmt(StmtKind::Fresh, {}, {}, {std::move(t)}, {}); }
Statement Statement::fresh_any(std::vector<Term> ts) { return stmt(StmtKind::FreshAny, {}, {}, std::move(ts), {}); }
Statement Statement::recognizable(Term t) { return stmt(StmtKind::Recognizable, {}, {}, {std::move(t)}, {}); }

Statement Statement::shared_secret(Name p, Term secret, Name q) {
  if (q < p) std::swap(p, q);
  return stmt(StmtKind::SharedSecret, std::move(p), std::move(q), {std::move(secret)}, {});
}

Statement Statement::public_key_of(Term key, Name q) {
  return stmt(StmtKind::PublicKeyOf, {}, std::move(q), {std::move(key)}, {});
}
Statement Statement::controls(Name p, Statement target) {
  return stmt(StmtKind::Controls, std::move(p), {}, {}, {std::move(target)});
}
Statement Statement::means(Term x, Statement c) { return stmt(StmtKind::Means, {}, {}, {std::move(x)}, {std::move(c)}); }
Statement Statement::conj(std::vector<Statement> parts) { return stmt(StmtKind::Conj, {}, {}, {}, std::move(parts)); }
Statement Statement::wildcard() { return stmt(StmtKind::Wildcard, {}, {}, {}, {}); }
Statement Statement::meta(std::string label) { return stmt(StmtKind::MetaStmt, {}, {}, {}, {}, std::move(label)); }

StmtKind Statement::kind() const { return node_->kind; }
const Name& Statement::principal() const { return node_->principal; }
const Name& Statement::other() const { return node_->other; }
const Term& Statement::term() const { return node_->terms.at(0); }
const std::vector<Term>& Statement::terms() const { return node_->terms; }
const Statement& Statement::inner() const { return node_->subs.at(0); }
const std::vector<Statement>& Statement::parts() const { return node_->subs; }
const std::string& Statement::label() const { return node_->label; }
bool Statement::is_ground() const { return node_->ground; }
int Statement::belief_depth() const { return node_->depth; }
const std::string& Statement::canonical_key() const { return node_->key; }
std::size_t Statement::hash_value() const { return node_->hash; }

bool operator==(const Statement& a, const Statement& b) {
  return a.node_ == b.node_ || (a.node_->hash == b.node_->hash && a.node_->key == b.node_->key);
}
bool operator<(const Statement& a, const Statement& b) { return a.node_->key < b.node_->key; }

// ---------------------------------------------------------------------------
// Normalization

std::vector<Term> components(const Term& t) {
  if (t.is(TermKind::Concat)) return t.children();
  return {t};
}

Term make_tuple(std::vector<Term> parts) {
  if (parts.size() == 1) return parts.front();
  return Term::concat(std::move(parts));
}

namespace {

Term rebuild(const Term& t, std::vector<Term> kids) {
  switch (t.kind()) {
    case TermKind::Concat: return Term::concat(std::move(kids));
    case TermKind::SymEnc: return Term::sym_enc(kids[0], kids[1]);
    case TermKind::SymDec: return Term::sym_dec(kids[0], kids[1]);
    case TermKind::AsymEnc: return Term::asym_enc(kids[0], kids[1]);
    case TermKind::Hash: return Term::hash(kids[0]);
    case TermKind::Func: return Term::func(std::move(kids));
    case TermKind::Starred: return Term::starred(kids[0]);
    case TermKind::Succ: return Term::succ(kids[0]);
    default: return t;
  }
}

bool key_pair(const Term& a, const Term& b) {
  return a.name() == b.name() &&
         ((a.is(TermKind::PublicKey) && b.is(TermKind::PrivateKey)) ||
          (a.is(TermKind::PrivateKey) && b.is(TermKind::PublicKey)));
}

}  // namespace

Term normalize(const Term& t) {
  switch (t.kind()) {
    case TermKind::Atom:
    case TermKind::Identity:
    case TermKind::PublicKey:
    case TermKind::PrivateKey:
    case TermKind::MetaVar:
      return t;
    case TermKind::Quoted:
      return Term::quoted(normalize(t.quoted_statement()));
    default:
      break;
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& k : t.children()) kids.push_back(normalize(k));

  switch (t.kind()) {
    case TermKind::Concat: {
      std::vector<Term> flat;
      for (auto& k : kids) {
        if (k.is(TermKind::Concat)) {
          flat.insert(flat.end(), k.children().begin(), k.children().end());
        } else {
          flat.push_back(std::move(k));
        }
      }
      return make_tuple(std::move(flat));
    }
    case TermKind::Starred:
      if (kids[0].is(TermKind::Starred)) return kids[0];
      break;
    case TermKind::AsymEnc: {
      const Term& inner = kids[0];
      if (inner.is(TermKind::AsymEnc) && key_pair(inner.key(), kids[1])) return inner.body();
      break;
    }
    case TermKind::SymEnc:
      if (kids[0].is(TermKind::SymDec) && kids[0].key() == kids[1]) return kids[0].body();
      break;
    case TermKind::SymDec:
      if (kids[0].is(TermKind::SymEnc) && kids[0].key() == kids[1]) return kids[0].body();
      break;
    default:
      break;
  }
  return rebuild(t, std::move(kids));
}

Statement normalize(const Statement& s) {
  switch (s.kind()) {
    case StmtKind::Sees: return Statement::sees(s.principal(), normalize(s.term()));
    case StmtKind::Holds: return Statement::holds(s.principal(), normalize(s.term()));
    case StmtKind::Said: return Statement::said(s.principal(), normalize(s.term()));
    case StmtKind::Believes: return Statement::believes(s.principal(), normalize(s.inner()));
    case StmtKind::Fresh: return Statement::fresh(normalize(s.term()));
    case StmtKind::FreshAny: {
      std::vector<Term> ts;
      for (const auto& t : s.terms()) ts.push_back(normalize(t));
      return Statement::fresh_any(std::move(ts));
    }
    case StmtKind::Recognizable: return Statement::recognizable(normalize(s.term()));
    case StmtKind::SharedSecret:
      return Statement::shared_secret(s.principal(), normalize(s.term()), s.other());
    case StmtKind::PublicKeyOf: return Statement::public_key_of(normalize(s.term()), s.other());
    case StmtKind::Controls: return Statement::controls(s.principal(), normalize(s.inner()));
    case StmtKind::Means: return Statement::means(normalize(s.term()), normalize(s.inner()));
    case StmtKind::Conj: {
      std::vector<Statement> flat;
      auto push = [&flat](const Statement& p) {
        if (std::find(flat.begin(), flat.end(), p) == flat.end()) flat.push_back(p);
      };
      for (const auto& p : s.parts()) {
        Statement n = normalize(p);
        if (n.is(StmtKind::Conj)) {
          for (const auto& q : n.parts()) push(q);
        } else {
          push(n);
        }
      }
      if (flat.size() == 1) return flat.front();
      return Statement::conj(std::move(flat));
    }
    case StmtKind::Wildcard:
    case StmtKind::MetaStmt:
      return s;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Subterms

namespace {

void collect(const Term& t, std::set<Term>& out);

void collect(const Statement& s, std::set<Term>& out) {
  for (const auto& t : s.terms()) collect(t, out);
  for (const auto& p : s.parts()) collect(p, out);
}

void collect(const Term& t, std::set<Term>& out) {
  if (t.is(TermKind::Starred)) {
    collect(t.body(), out);
    return;
  }
  if (!out.insert(t).second) return;
  if (t.is(TermKind::Quoted)) {
    collect(t.quoted_statement(), out);
    return;
  }
  for (const auto& k : t.children()) collect(k, out);
}

}  // namespace

std::set<Term> subterms(const Term& t) {
  std::set<Term> out;
  collect(normalize(t), out);
  return out;
}

std::set<Term> subterms(const Statement& s) {
  std::set<Term> out;
  collect(normalize(s), out);
  return out;
}

// ---------------------------------------------------------------------------
// Matching

namespace {

bool match_name(const Name& pat, const Name& sub, Binding& b) {
  if (!pat.var) return pat == sub;
  if (sub.var) return false;
  auto it = b.names.find(pat.id);
  if (it != b.names.end()) return it->second == sub;
  b.names.emplace(pat.id, sub);
  return true;
}

bool match_term(const Term& pat, const Term& sub, Binding& b);
bool match_stmt(const Statement& pat, const Statement& sub, Binding& b);

bool match_term(const Term& pat, const Term& sub, Binding& b) {
  if (pat.is_ground()) return pat == sub;
  if (pat.is(TermKind::MetaVar)) {
    auto it = b.terms.find(pat.label());
    if (it != b.terms.end()) return it->second == sub;
    b.terms.emplace(pat.label(), sub);
    return true;
  }
  if (pat.kind() != sub.kind()) return false;
  switch (pat.kind()) {
    case TermKind::Identity:
    case TermKind::PublicKey:
    case TermKind::PrivateKey:
      return match_name(pat.name(), sub.name(), b);
    case TermKind::Quoted:
      return match_stmt(pat.quoted_statement(), sub.quoted_statement(), b);
    default:
      break;
  }
  const auto& pk = pat.children();
  const auto& sk = sub.children();
  if (pk.size() != sk.size()) return false;
  for (std::size_t i = 0; i < pk.size(); ++i) {
    if (!match_term(pk[i], sk[i], b)) return false;
  }
  return true;
}

bool match_stmt(const Statement& pat, const Statement& sub, Binding& b) {
  if (pat.is_ground()) return pat == sub;
  if (pat.is(StmtKind::MetaStmt)) {
    auto it = b.stmts.find(pat.label());
    if (it != b.stmts.end()) return it->second == sub;
    b.stmts.emplace(pat.label(), sub);
    return true;
  }
  if (pat.kind() != sub.kind()) return false;
  switch (pat.kind()) {
    case StmtKind::Sees:
    case StmtKind::Holds:
    case StmtKind::Said:
      return match_name(pat.principal(), sub.principal(), b) && match_term(pat.term(), sub.term(), b);
    case StmtKind::Believes:
    case StmtKind::Controls:
      return match_name(pat.principal(), sub.principal(), b) && match_stmt(pat.inner(), sub.inner(), b);
    case StmtKind::Fresh:
    case StmtKind::Recognizable:
      return match_term(pat.term(), sub.term(), b);
    case StmtKind::FreshAny: {
      if (pat.terms().size() != sub.terms().size()) return false;
      for (std::size_t i = 0; i < pat.terms().size(); ++i) {
        if (!match_term(pat.terms()[i], sub.terms()[i], b)) return false;
      }
      return true;
    }
    case StmtKind::SharedSecret: {
      Binding straight = b;
      if (match_name(pat.principal(), sub.principal(), straight) &&
          match_name(pat.other(), sub.other(), straight) && match_term(pat.term(), sub.term(), straight)) {
        b = std::move(straight);
        return true;
      }
      Binding swapped = b;
      if (match_name(pat.principal(), sub.other(), swapped) &&
          match_name(pat.other(), sub.principal(), swapped) && match_term(pat.term(), sub.term(), swapped)) {
        b = std::move(swapped);
        return true;
      }
      return false;
    }
    case StmtKind::PublicKeyOf:
      return match_term(pat.term(), sub.term(), b) && match_name(pat.other(), sub.other(), b);
    case StmtKind::Means:
      return match_term(pat.term(), sub.term(), b) && match_stmt(pat.inner(), sub.inner(), b);
    case StmtKind::Conj: {
      if (pat.parts().size() != sub.parts().size()) return false;
      for (std::size_t i = 0; i < pat.parts().size(); ++i) {
        if (!match_stmt(pat.parts()[i], sub.parts()[i], b)) return false;
      }
      return true;
    }
    case StmtKind::Wildcard:
      return true;
    case StmtKind::MetaStmt:
      break;
  }
  return false;
}

}  // namespace

bool match(const Term& pattern, const Term& subject, Binding& b) {
  Binding trial = b;
  if (!match_term(pattern, subject, trial)) return false;
  b = std::move(trial);
  return true;
}

bool match(const Statement& pattern, const Statement& subject, Binding& b) {
  Binding trial = b;
  if (!match_stmt(pattern, subject, trial)) return false;
  b = std::move(trial);
  return true;
}

std::optional<Binding> match(const Term& pattern, const Term& subject) {
  Binding b;
  if (!match_term(pattern, subject, b)) return std::nullopt;
  return b;
}

std::optional<Binding> match(const Statement& pattern, const Statement& subject) {
  Binding b;
  if (!match_stmt(pattern, subject, b)) return std::nullopt;
  return b;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

Name subst_name(const Name& n, const Binding& b, bool strict) {
  if (!n.var) return n;
  auto it = b.names.find(n.id);
  if (it == b.names.end()) {
    if (!strict) return n;
    throw UnboundMetavar(n.id);
  }
  return it->second;
}

Statement subst_stmt(const Statement& s, const Binding& b, bool strict);

Term subst_term(const Term& t, const Binding& b, bool strict) {
  if (t.is_ground()) return t;
  switch (t.kind()) {
    case TermKind::MetaVar: {
      auto it = b.terms.find(t.label());
      if (it == b.terms.end()) {
        if (!strict) return t;
        throw UnboundMetavar(t.label());
      }
      return it->second;
    }
    case TermKind::Identity: return Term::identity(subst_name(t.name(), b, strict));
    case TermKind::PublicKey: return Term::public_key(subst_name(t.name(), b, strict));
    case TermKind::PrivateKey: return Term::private_key(subst_name(t.name(), b, strict));
    case TermKind::Quoted: return Term::quoted(subst_stmt(t.quoted_statement(), b, strict));
    default: break;
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& k : t.children()) kids.push_back(subst_term(k, b, strict));
  return rebuild(t, std::move(kids));
}

Statement subst_stmt(const Statement& s, const Binding& b, bool strict) {
  if (s.is_ground()) return s;
  switch (s.kind()) {
    case StmtKind::Sees: return Statement::sees(subst_name(s.principal(), b, strict), subst_term(s.term(), b, strict));
    case StmtKind::Holds: return Statement::holds(subst_name(s.principal(), b, strict), subst_term(s.term(), b, strict));
    case StmtKind::Said: return Statement::said(subst_name(s.principal(), b, strict), subst_term(s.term(), b, strict));
    case StmtKind::Believes: return Statement::believes(subst_name(s.principal(), b, strict), subst_stmt(s.inner(), b, strict));
    case StmtKind::Fresh: return Statement::fresh(subst_term(s.term(), b, strict));
    case StmtKind::FreshAny: {
      std::vector<Term> ts;
      for (const auto& t : s.terms()) ts.push_back(subst_term(t, b, strict));
      return Statement::fresh_any(std::move(ts));
    }
    case StmtKind::Recognizable: return Statement::recognizable(subst_term(s.term(), b, strict));
    case StmtKind::SharedSecret:
      return Statement::shared_secret(subst_name(s.principal(), b, strict), subst_term(s.term(), b, strict),
                                      subst_name(s.other(), b, strict));
    case StmtKind::PublicKeyOf: return Statement::public_key_of(subst_term(s.term(), b, strict), subst_name(s.other(), b, strict));
    case StmtKind::Controls: return Statement::controls(subst_name(s.principal(), b, strict), subst_stmt(s.inner(), b, strict));
    case StmtKind::Means: return Statement::means(subst_term(s.term(), b, strict), subst_stmt(s.inner(), b, strict));
    case StmtKind::Conj: {
      std::vector<Statement> ps;
      for (const auto& p : s.parts()) ps.push_back(subst_stmt(p, b, strict));
      return Statement::conj(std::move(ps));
    }
    case StmtKind::MetaStmt: {
      auto it = b.stmts.find(s.label());
      if (it == b.stmts.end()) {
        if (!strict) return s;
        throw UnboundMetavar(s.label());
      }
      return it->second;
    }
    case StmtKind::Wildcard: return s;
  }
  return s;
}

}  // namespace

Term substitute(const Term& pattern, const Binding& b) { return normalize(subst_term(pattern, b, true)); }
Statement substitute(const Statement& pattern, const Binding& b) { return normalize(subst_stmt(pattern, b, true)); }
Term substitute_partial(const Term& pattern, const Binding& b) { return normalize(subst_term(pattern, b, false)); }
Statement substitute_partial(const Statement& pattern, const Binding& b) {
  return normalize(subst_stmt(pattern, b, false));
}

}  // namespace gny
