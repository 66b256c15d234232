#include "gny/protocol.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gny/dsl.hpp"
#include "gny_fixture_sources.inc"

namespace gny {

namespace {

// Symbols mentioned by a term or statement.
struct Symbols {
  std::set<std::string> principals;
  std::set<std::string> keypairs;
  std::map<std::string, AtomKind> atoms;
  std::set<std::string> principal_vars;
  std::set<std::string> key_vars;
  bool term_vars = false;
  bool stmt_vars = false;
};

void scan(const Statement& s, Symbols& out);

void scan_principal(const Name& n, Symbols& out) {
  (n.var ? out.principal_vars : out.principals).insert(n.id);
}

void scan(const Term& t, Symbols& out) {
  switch (t.kind()) {
    case TermKind::Atom:
      out.atoms.emplace(t.label(), t.atom_kind());
      return;
    case TermKind::Identity:
      scan_principal(t.name(), out);
      return;
    case TermKind::PublicKey:
    case TermKind::PrivateKey:
      (t.name().var ? out.key_vars : out.keypairs).insert(t.name().id);
      return;
    case TermKind::MetaVar:
      out.term_vars = true;
      return;
    case TermKind::Quoted:
      scan(t.quoted_statement(), out);
      return;
    case TermKind::Concat:
    case TermKind::Func:
      for (const auto& c : t.children()) scan(c, out);
      return;
    case TermKind::SymEnc:
    case TermKind::SymDec:
    case TermKind::AsymEnc:
      scan(t.body(), out);
      scan(t.key(), out);
      return;
    case TermKind::Hash:
    case TermKind::Starred:
    case TermKind::Succ:
      scan(t.body(), out);
      return;
  }
}

void scan(const Statement& s, Symbols& out) {
  switch (s.kind()) {
    case StmtKind::Sees:
    case StmtKind::Holds:
    case StmtKind::Said:
      scan_principal(s.principal(), out);
      scan(s.term(), out);
      return;
    case StmtKind::Believes:
    case StmtKind::Controls:
      scan_principal(s.principal(), out);
      scan(s.inner(), out);
      return;
    case StmtKind::Fresh:
    case StmtKind::Recognizable:
      scan(s.term(), out);
      return;
    case StmtKind::FreshAny:
      for (const auto& t : s.terms()) scan(t, out);
      return;
    case StmtKind::SharedSecret:
      scan_principal(s.principal(), out);
      scan_principal(s.other(), out);
      scan(s.term(), out);
      return;
    case StmtKind::PublicKeyOf:
      scan_principal(s.other(), out);
      scan(s.term(), out);
      return;
    case StmtKind::Means:
      scan(s.term(), out);
      scan(s.inner(), out);
      return;
    case StmtKind::Conj:
      for (const auto& p : s.parts()) scan(p, out);
      return;
    case StmtKind::Wildcard:
      return;
    case StmtKind::MetaStmt:
      out.stmt_vars = true;
      return;
  }
}

void check_symbols(const ProtocolSpec& spec, const Symbols& sym, const std::string& label) {
  std::set<std::string> principals(spec.principals.begin(), spec.principals.end());
  std::set<std::string> keypairs(spec.keypairs.begin(), spec.keypairs.end());
  for (const auto& p : sym.principals) {
    if (!principals.count(p)) throw SpecError(label, "unknown principal '" + p + "'");
  }
  for (const auto& k : sym.keypairs) {
    if (!keypairs.count(k)) throw SpecError(label, "undeclared keypair '" + k + "'");
  }
  for (const auto& [name, kind] : sym.atoms) {
    auto it = std::find_if(spec.atoms.begin(), spec.atoms.end(), [&](const AtomDecl& a) { return a.name == name; });
    if (it == spec.atoms.end()) throw SpecError(label, "undeclared symbol '" + name + "'");
    if (it->kind != kind) throw SpecError(label, "'" + name + "' used with the wrong kind");
  }
}

template <typename T>
Symbols symbols_of(const T& x) {
  Symbols s;
  scan(x, s);
  return s;
}

}  // namespace

void validate(const ProtocolSpec& spec) {
  std::set<std::string> names;
  auto declare = [&](const std::string& n, const char* what) {
    if (n.empty()) throw SpecError({}, std::string("empty ") + what + " name");
    if (!names.insert(n).second) throw SpecError({}, "'" + n + "' declared twice");
  };
  for (const auto& p : spec.principals) declare(p, "principal");
  for (const auto& a : spec.atoms) declare(a.name, "atom");
  for (const auto& k : spec.keypairs) declare(k, "keypair");
  for (const auto& d : spec.derived) {
    declare(d.name, "derived");
    if (!d.definition.is_ground()) throw SpecError(d.name, "derived formula contains variables");
    check_symbols(spec, symbols_of(d.definition), d.name);
  }

  std::set<std::string> labels;
  for (const auto& a : spec.assumptions) {
    if (!a.label.empty() && !labels.insert(a.label).second) throw SpecError(a.label, "duplicate precondition label");
    if (a.then.empty()) throw SpecError(a.label, "precondition without statements");
    for (const auto* group : {&a.when, &a.then}) {
      for (const auto& s : *group) {
        Symbols sym = symbols_of(s);
        check_symbols(spec, sym, a.label);
        if (!a.conditional() && (sym.term_vars || sym.stmt_vars)) {
          throw SpecError(a.label, "fact precondition has formula or statement variables; use 'when ... then'");
        }
      }
    }
  }

  std::set<std::string> message_labels;
  for (const auto& m : spec.messages) {
    if (!message_labels.insert(m.label).second) throw SpecError(m.label, "duplicate message label");
    Symbols ends;
    scan_principal(m.sender, ends);
    scan_principal(m.receiver, ends);
    if (!ends.principal_vars.empty()) throw SpecError(m.label, "message endpoints must be principals");
    check_symbols(spec, ends, m.label);
    if (!m.term.is_ground()) throw SpecError(m.label, "message formula contains variables");
    check_symbols(spec, symbols_of(m.term), m.label);
  }

  for (const auto& g : spec.goals) {
    if (!g.statement.is_ground()) throw SpecError(g.label, "goal contains variables");
    check_symbols(spec, symbols_of(g.statement), g.label);
  }
}

Universe build_universe(const ProtocolSpec& spec) {
  Universe u;
  auto add_ground = [&](const std::set<Term>& ts) {
    for (const auto& t : ts) {
      if (t.is_ground()) u.insert(t);
    }
  };
  for (const auto& m : spec.messages) add_ground(subterms(m.term));
  for (const auto& a : spec.assumptions) {
    for (const auto& s : a.when) add_ground(subterms(s));
    for (const auto& s : a.then) add_ground(subterms(s));
  }
  for (const auto& g : spec.goals) add_ground(subterms(g.statement));
  for (const auto& d : spec.derived) add_ground(subterms(d.definition));
  for (const auto& k : spec.keypairs) {
    u.insert(Term::public_key(Name::of(k)));
    u.insert(Term::private_key(Name::of(k)));
  }
  return u;
}

std::vector<std::pair<Statement, std::string>> precondition_facts(const ProtocolSpec& spec) {
  std::vector<std::pair<Statement, std::string>> out;
  for (const auto& a : spec.assumptions) {
    if (a.conditional()) continue;
    for (const auto& s : a.then) {
      Symbols sym = symbols_of(s);
      // Expand name variables: key-label positions over keypairs, the rest
      // over principals.
      std::vector<std::pair<std::string, const std::vector<std::string>*>> vars;
      for (const auto& v : sym.key_vars) vars.emplace_back(v, &spec.keypairs);
      for (const auto& v : sym.principal_vars) {
        if (!sym.key_vars.count(v)) vars.emplace_back(v, &spec.principals);
      }
      std::vector<std::size_t> idx(vars.size(), 0);
      bool empty_domain = std::any_of(vars.begin(), vars.end(), [](const auto& v) { return v.second->empty(); });
      if (empty_domain) continue;
      while (true) {
        Binding b;
        for (std::size_t i = 0; i < vars.size(); ++i) b.names.emplace(vars[i].first, Name::of((*vars[i].second)[idx[i]]));
        out.emplace_back(substitute(s, b), a.label);
        std::size_t i = 0;
        while (i < vars.size() && ++idx[i] == vars[i].second->size()) idx[i++] = 0;
        if (i == vars.size()) break;
      }
    }
  }
  return out;
}

std::vector<Rule> local_rules(const ProtocolSpec& spec) {
  std::vector<Rule> out;
  for (std::size_t i = 0; i < spec.assumptions.size(); ++i) {
    const auto& a = spec.assumptions[i];
    if (!a.conditional()) continue;
    std::string name = a.label.empty() ? "local:" + std::to_string(i + 1) : a.label;
    out.push_back(conditional_rule(std::move(name), a.when, a.then));
  }
  return out;
}

std::vector<Statement> RunState::known_after(std::size_t messages_done) const {
  if (messages_done >= checkpoints.size()) throw std::out_of_range("message step not reached");
  std::vector<Statement> out;
  const auto& nodes = kb.trace().nodes;
  for (std::size_t i = 0; i < checkpoints[messages_done]; ++i) out.push_back(nodes[i].statement);
  return out;
}

RunState init_run(const ProtocolSpec& spec, EngineConfig config) {
  validate(spec);
  RunState run;
  run.spec = spec;
  config.commutative_asym = config.commutative_asym || spec.commutative_asym;
  run.config = config;
  run.universe = build_universe(spec);
  run.rules = local_rules(spec);
  for (auto& [s, label] : precondition_facts(spec)) {
    Justification why;
    why.origin = Origin::Precondition;
    why.label = label;
    run.kb.add(s, std::move(why));
  }
  run.kb = saturate(std::move(run.kb), run.universe, run.config, run.rules);
  run.checkpoints.push_back(run.kb.size());
  return run;
}

RunState step(RunState run) {
  if (run.complete()) throw RunComplete();
  const Message& m = run.spec.messages[run.cursor];
  Justification authored;
  authored.origin = Origin::Author;
  authored.label = m.label;
  run.kb.add(Statement::holds(m.sender, m.term), std::move(authored));

  // A receiver recognizes formulae it sent itself; those arrive unstarred.
  bool own = false;
  for (std::size_t i = 0; i <= run.cursor; ++i) {
    const Message& o = run.spec.messages[i];
    own = own || (o.sender == m.receiver && o.term == m.term);
  }
  Justification received;
  received.origin = Origin::Receipt;
  received.label = m.label;
  run.kb.add(Statement::sees(m.receiver, own ? m.term : Term::starred(m.term)), std::move(received));

  run.kb = saturate(std::move(run.kb), run.universe, run.config, run.rules);
  ++run.cursor;
  run.checkpoints.push_back(run.kb.size());
  return run;
}

RunState run_to_completion(RunState run) {
  while (!run.complete()) run = step(std::move(run));
  return run;
}

bool GoalReport::all_proved() const {
  return std::all_of(goals.begin(), goals.end(), [](const GoalResult& g) { return g.proved; });
}

GoalReport check_goals(const RunState& run) {
  GoalReport report;
  report.protocol = run.spec.name;
  for (const auto& g : run.spec.goals) {
    GoalResult r;
    r.label = g.label;
    r.statement = g.statement;
    r.proof = holds_goal(run.kb, g.statement);
    r.proved = r.proof.has_value();
    report.goals.push_back(std::move(r));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Attacks

namespace {

Message& message_named(ProtocolSpec& spec, const std::string& label) {
  for (auto& m : spec.messages) {
    if (m.label == label) return m;
  }
  throw SpecError(label, "no such message");
}

struct ApplyTransform {
  ProtocolSpec& spec;

  void operator()(const ReplaceMessage& t) const {
    Message& m = message_named(spec, t.message);
    m.term = normalize(t.term);
    if (t.sender) m.sender = *t.sender;
  }
  void operator()(const DropMessage& t) const {
    message_named(spec, t.message);
    std::erase_if(spec.messages, [&](const Message& m) { return m.label == t.message; });
  }
  void operator()(const RemovePrecondition& t) const {
    auto n = std::erase_if(spec.assumptions, [&](const Assumption& a) { return a.label == t.label; });
    if (n == 0) throw SpecError(t.label, "no such precondition");
  }
  void operator()(const AddPrincipal& t) const {
    if (std::find(spec.principals.begin(), spec.principals.end(), t.name) == spec.principals.end()) {
      spec.principals.push_back(t.name);
    }
    Assumption a;
    a.label = "attacker:" + t.name;
    for (const auto& g : t.grants) {
      for (const auto& k : symbols_of(g).keypairs) {
        if (std::find(spec.keypairs.begin(), spec.keypairs.end(), k) == spec.keypairs.end()) spec.keypairs.push_back(k);
      }
      a.then.push_back(Statement::holds(Name::of(t.name), normalize(g)));
    }
    if (!a.then.empty()) spec.assumptions.push_back(std::move(a));
  }
};

const Term* derived_named(const ProtocolSpec& spec, const std::string& name) {
  for (const auto& d : spec.derived) {
    if (d.name == name) return &d.definition;
  }
  return nullptr;
}

// Rebuilds `t` with every occurrence of `from` replaced by `to`.
Term replace(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  auto all = [&](const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& c : ts) out.push_back(replace(c, from, to));
    return out;
  };
  switch (t.kind()) {
    case TermKind::Concat: return Term::concat(all(t.children()));
    case TermKind::Func: return Term::func(all(t.children()));
    case TermKind::SymEnc: return Term::sym_enc(replace(t.body(), from, to), replace(t.key(), from, to));
    case TermKind::SymDec: return Term::sym_dec(replace(t.body(), from, to), replace(t.key(), from, to));
    case TermKind::AsymEnc: return Term::asym_enc(replace(t.body(), from, to), replace(t.key(), from, to));
    case TermKind::Hash: return Term::hash(replace(t.body(), from, to));
    case TermKind::Starred: return Term::starred(replace(t.body(), from, to));
    case TermKind::Succ: return Term::succ(replace(t.body(), from, to));
    default: return t;
  }
}

Term parse_or_throw(const std::string& text, const ProtocolSpec& spec) {
  auto r = parse_term(text, spec);
  if (!r.term) throw std::logic_error("attack term: " + format_error(r.errors.front()));
  return *r.term;
}

// The attacker M intercepts the server certificate and substitutes one it
// signed itself, binding its own key to a service D. The client then
// encrypts the pre-master secret and computes its finished hash over what it
// actually received.
std::vector<AttackTransform> cert_substitution(const ProtocolSpec& spec) {
  const Term* cert = derived_named(spec, "CERT_B");
  const Term* pms = derived_named(spec, "PMS");
  const Term* fin = derived_named(spec, "FIN_A");
  const Term* k_ab = derived_named(spec, "K_AB");
  if (!cert || !pms || !fin || !k_ab) throw std::out_of_range("cert-substitution does not apply to " + spec.name);
  const Term fin_msg = normalize(Term::sym_enc(*fin, *k_ab));
  const Message* cert_msg = nullptr;
  const Message* pms_msg = nullptr;
  const Message* fin_a_msg = nullptr;
  for (const auto& m : spec.messages) {
    if (m.term == *cert) cert_msg = &m;
    if (m.term == *pms) pms_msg = &m;
    if (m.term == fin_msg) fin_a_msg = &m;
  }
  if (!cert_msg || !pms_msg || !fin_a_msg) throw std::out_of_range("cert-substitution does not apply to " + spec.name);

  AddPrincipal attacker{"M", {}};
  AddPrincipal service{"D", {}};
  ProtocolSpec ctx = apply_attack(spec, {AddPrincipal{"M", {}}, service});
  ctx.keypairs.push_back("K_M");
  attacker.grants = {parse_or_throw("pub(K_M)", ctx), parse_or_throw("priv(K_M)", ctx)};
  Term bogus_cert = parse_or_throw("enc{(pub(K_M), id(D), id(C))}priv(K_M)", ctx);
  Term bogus_pms = parse_or_throw("enc{N'_A}pub(K_M)", ctx);
  Term bogus_fin = replace(replace(fin_msg, *cert, bogus_cert), *pms, bogus_pms);

  return {attacker,
          service,
          ReplaceMessage{cert_msg->label, bogus_cert, Name::of("M")},
          ReplaceMessage{pms_msg->label, bogus_pms, std::nullopt},
          ReplaceMessage{fin_a_msg->label, normalize(bogus_fin), std::nullopt}};
}

}  // namespace

ProtocolSpec apply_attack(const ProtocolSpec& spec, const std::vector<AttackTransform>& transforms) {
  ProtocolSpec out = spec;
  for (const auto& t : transforms) std::visit(ApplyTransform{out}, t);
  return out;
}

std::vector<AttackTransform> named_attack(const ProtocolSpec& spec, const std::string& attack) {
  if (attack == "cert-substitution") return cert_substitution(spec);
  throw std::out_of_range("unknown attack '" + attack + "'");
}

std::vector<std::string> attack_names() { return {"cert-substitution"}; }

// ---------------------------------------------------------------------------
// Fixtures

namespace {

struct FixtureTable {
  std::vector<ProtocolSpec> specs;
  std::map<std::string, std::string> sources;
};

const FixtureTable& table() {
  static const FixtureTable t = [] {
    FixtureTable out;
    for (const auto& [name, text] : kFixtureSources) {
      auto r = parse_spec(text);
      if (!r.spec) throw std::logic_error(std::string("fixture ") + name + ": " + format_error(r.errors.front()));
      out.sources.emplace(r.spec->name, text);
      out.specs.push_back(std::move(*r.spec));
    }
    return out;
  }();
  return t;
}

}  // namespace

const std::vector<ProtocolSpec>& fixtures() { return table().specs; }

const ProtocolSpec& fixture(const std::string& name) {
  for (const auto& s : fixtures()) {
    if (s.name == name) return s;
  }
  throw std::out_of_range("unknown fixture '" + name + "'");
}

const std::string& fixture_source(const std::string& name) {
  auto it = table().sources.find(name);
  if (it == table().sources.end()) throw std::out_of_range("unknown fixture '" + name + "'");
  return it->second;
}

}  // namespace gny
