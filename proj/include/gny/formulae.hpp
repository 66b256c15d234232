// Term and statement algebra of the belief logic.
//
// Terms and statements are immutable, reference-counted trees. Every node
// carries a canonical key string, so equality, ordering and hashing are a
// string comparison away. Construction through the factory functions does
// *not* normalize; call normalize() (or go through substitute(), which always
// does) to obtain the canonical form stored in knowledge bases.

#ifndef GNY_FORMULAE_HPP_
#define GNY_FORMULAE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gny {

// A principal, or a principal-position metavariable in a pattern.
// The same struct names keypair labels in pub(K)/priv(K).
struct Name {
  std::string id;
  bool var = false;

  static Name of(std::string id) { return {std::move(id), false}; }
  static Name meta(std::string id) { return {std::move(id), true}; }

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name&, const Name&) = default;
};

enum class AtomKind : std::uint8_t { Nonce, Timestamp, SymKey, StageTag, Literal };

enum class TermKind : std::uint8_t {
  Atom,
  Identity,
  PublicKey,
  PrivateKey,
  Concat,
  SymEnc,
  SymDec,
  AsymEnc,
  Hash,
  Func,
  Starred,
  Succ,
  Quoted,
  MetaVar,
};

enum class StmtKind : std::uint8_t {
  Sees,
  Holds,
  Said,
  Believes,
  Fresh,
  FreshAny,
  Recognizable,
  SharedSecret,
  PublicKeyOf,
  Controls,
  Means,
  Conj,
  Wildcard,  // the `*` in "Q controls Q believes *"
  MetaStmt,  // statement-position metavariable
};

const char* to_string(AtomKind k);
const char* to_string(TermKind k);
const char* to_string(StmtKind k);

class Statement;
struct TermNode;
struct StmtNode;
struct NodeAccess;

class Term {
 public:
  Term();  // the literal atom "_"; only useful as a placeholder

  static Term atom(AtomKind kind, std::string label);
  static Term identity(Name principal);
  static Term public_key(Name label);
  static Term private_key(Name label);
  static Term concat(std::vector<Term> parts);
  static Term sym_enc(Term body, Term key);
  static Term sym_dec(Term body, Term key);
  static Term asym_enc(Term body, Term key);
  static Term hash(Term body);
  static Term func(std::vector<Term> args);
  static Term starred(Term body);
  static Term succ(Term body);
  static Term quoted(Statement s);
  static Term meta(std::string label);

  TermKind kind() const;
  AtomKind atom_kind() const;
  // Atom label, metavariable label, or key label for PublicKey/PrivateKey.
  const std::string& label() const;
  // Principal of IdentityOf, or key label (possibly a metavariable) of keys.
  const Name& name() const;
  // Concat parts, Func args, or {body, key} for encryptions, {body} for
  // Hash/Starred/Succ.
  const std::vector<Term>& children() const;
  const Term& body() const;
  const Term& key() const;
  const Statement& quoted_statement() const;

  bool is(TermKind k) const { return kind() == k; }
  bool is_ground() const;
  const std::string& canonical_key() const;
  std::size_t hash_value() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator<(const Term& a, const Term& b);

 private:
  friend struct NodeAccess;
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

class Statement {
 public:
  Statement();  // Wildcard

  static Statement sees(Name p, Term t);
  static Statement holds(Name p, Term t);
  static Statement said(Name p, Term t);
  static Statement believes(Name p, Statement s);
  static Statement fresh(Term t);
  static Statement fresh_any(std::vector<Term> ts);
  static Statement recognizable(Term t);
  // Built in canonical order (principals sorted by name), so the argument
  // order never matters.
  static Statement shared_secret(Name p, Term secret, Name q);
  static Statement public_key_of(Term key, Name q);
  static Statement controls(Name p, Statement target);
  static Statement means(Term x, Statement c);
  static Statement conj(std::vector<Statement> parts);
  static Statement wildcard();
  static Statement meta(std::string label);

  StmtKind kind() const;
  bool is(StmtKind k) const { return kind() == k; }
  // Sees/Holds/Said/Believes/Controls subject; SharedSecret left side.
  const Name& principal() const;
  // SharedSecret right side, PublicKeyOf owner.
  const Name& other() const;
  // The formula slot (Sees/Holds/Said/Fresh/Recognizable/SharedSecret secret,
  // PublicKeyOf key, Means message).
  const Term& term() const;
  const std::vector<Term>& terms() const;  // FreshAny
  // Believes/Controls/Means inner statement.
  const Statement& inner() const;
  const std::vector<Statement>& parts() const;  // Conj
  const std::string& label() const;             // MetaStmt

  bool is_ground() const;
  // Number of nested `believes` along the deepest path (terms not entered).
  int belief_depth() const;
  const std::string& canonical_key() const;
  std::size_t hash_value() const;

  friend bool operator==(const Statement& a, const Statement& b);
  friend bool operator<(const Statement& a, const Statement& b);

 private:
  friend struct NodeAccess;
  explicit Statement(std::shared_ptr<const StmtNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const StmtNode> node_;
};

// Metavariable assignment. Principal and key-label variables share the
// `names` map; term and statement variables have their own.
struct Binding {
  std::map<std::string, Name> names;
  std::map<std::string, Term> terms;
  std::map<std::string, Statement> stmts;

  friend bool operator==(const Binding&, const Binding&) = default;
};

class UnboundMetavar : public std::logic_error {
 public:
  explicit UnboundMetavar(const std::string& var)
      : std::logic_error("unbound metavariable ?" + var) {}
};

Term normalize(const Term& t);
Statement normalize(const Statement& s);

// t and all transitive components, normalized; Starred bodies contribute
// themselves unstarred (the starred node itself is not a member), and quoted
// statements contribute the terms they mention.
std::set<Term> subterms(const Term& t);
// Terms mentioned by a statement together with their subterms.
std::set<Term> subterms(const Statement& s);

// Extend `b` so that substitute(pattern, b) == subject. `b` is left untouched
// on failure.
bool match(const Term& pattern, const Term& subject, Binding& b);
bool match(const Statement& pattern, const Statement& subject, Binding& b);
std::optional<Binding> match(const Term& pattern, const Term& subject);
std::optional<Binding> match(const Statement& pattern, const Statement& subject);

// Throws UnboundMetavar when a variable of the pattern is missing from b.
Term substitute(const Term& pattern, const Binding& b);
Statement substitute(const Statement& pattern, const Binding& b);
// Like substitute, but unbound variables are left in place.
Term substitute_partial(const Term& pattern, const Binding& b);
Statement substitute_partial(const Statement& pattern, const Binding& b);

// Top-level components of a Concat; {t} otherwise.
std::vector<Term> components(const Term& t);
// Concat of parts, or the single part itself.
Term make_tuple(std::vector<Term> parts);

}  // namespace gny

template <>
struct std::hash<gny::Term> {
  std::size_t operator()(const gny::Term& t) const noexcept { return t.hash_value(); }
};
template <>
struct std::hash<gny::Statement> {
  std::size_t operator()(const gny::Statement& s) const noexcept { return s.hash_value(); }
};

#endif  // GNY_FORMULAE_HPP_
