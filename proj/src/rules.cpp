#include "gny/rules.hpp"

#include <stdexcept>
#include <utility>

namespace gny {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::Precondition: return "precondition";
    case Origin::Receipt: return "receipt";
    case Origin::Author: return "author";
    case Origin::Rule: return "rule";
  }
  return "rule";
}

std::string display_name(const std::string& rule, int lift) {
  if (lift == 0) return rule;
  if (lift == 1) return rule + "+Localize";
  return rule + "+Localize^" + std::to_string(lift);
}

const Term* subject_term(const Statement& s) {
  const Statement* cur = &s;
  while (cur->is(StmtKind::Believes)) cur = &cur->inner();
  switch (cur->kind()) {
    case StmtKind::Sees:
    case StmtKind::Holds:
    case StmtKind::Said:
    case StmtKind::Fresh:
    case StmtKind::Recognizable:
      return &cur->term();
    default:
      return nullptr;
  }
}

const Rule& RuleCatalog::lookup(const std::string& name) const {
  for (const auto& r : rules) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("no rule named " + name);
}

bool RuleCatalog::contains(const std::string& name) const {
  for (const auto& r : rules) {
    if (r.name == name) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

Step premise(Statement s) {
  Step st;
  st.kind = StepKind::Premise;
  st.premise = std::move(s);
  return st;
}

Step seed(Term pattern) {
  Step st;
  st.kind = StepKind::Seed;
  st.pattern = std::move(pattern);
  return st;
}

Step slices(std::string src, std::string dst) {
  Step st;
  st.kind = StepKind::Slices;
  st.src = std::move(src);
  st.dst = std::move(dst);
  return st;
}

Step parts(std::string src, std::string dst) {
  Step st;
  st.kind = StepKind::Parts;
  st.src = std::move(src);
  st.dst = std::move(dst);
  return st;
}

Step all_parts(std::string src, Statement tmpl) {
  Step st;
  st.kind = StepKind::AllParts;
  st.src = std::move(src);
  st.premise = std::move(tmpl);
  return st;
}

Step func_inverse(std::string src, std::string dst, Statement tmpl) {
  Step st;
  st.kind = StepKind::FuncInverse;
  st.src = std::move(src);
  st.dst = std::move(dst);
  st.premise = std::move(tmpl);
  return st;
}

Step split_secret(std::string src, std::string rest, std::string secret) {
  Step st;
  st.kind = StepKind::SplitSecret;
  st.src = std::move(src);
  st.dst = std::move(rest);
  st.dst2 = std::move(secret);
  return st;
}

Step require(Cond c, std::string src = {}) {
  Step st;
  st.kind = StepKind::Require;
  st.cond = c;
  st.src = std::move(src);
  return st;
}

Step any_universe(std::string dst) {
  Step st;
  st.kind = StepKind::AnyUniverse;
  st.dst = std::move(dst);
  return st;
}

Conclusion plain(Statement s) { return {std::move(s), false}; }
Conclusion built(Statement s) { return {std::move(s), true}; }

const Name P = Name::meta("P");
const Name Q = Name::meta("Q");
const Name KL = Name::meta("K");

Term v(const char* label) { return Term::meta(label); }
Term pub() { return Term::public_key(KL); }
Term priv() { return Term::private_key(KL); }
Term star(Term t) { return Term::starred(std::move(t)); }
Term tup(Term a, Term b) { return Term::concat({std::move(a), std::move(b)}); }
Statement bel(Name p, Statement s) { return Statement::believes(std::move(p), std::move(s)); }
Statement sees(Term t) { return Statement::sees(P, std::move(t)); }
Statement holds(Term t) { return Statement::holds(P, std::move(t)); }
Statement bfresh(Term t) { return bel(P, Statement::fresh(std::move(t))); }
Statement brecog(Term t) { return bel(P, Statement::recognizable(std::move(t))); }
Statement slot() { return holds(v("_")); }

Rule make(std::string name, std::vector<Statement> prem, std::vector<Statement> concl, std::vector<Form> forms) {
  Rule r;
  r.name = std::move(name);
  r.premises = std::move(prem);
  r.conclusions = std::move(concl);
  r.forms = std::move(forms);
  return r;
}

// Same form with the first premise read through the star, the conclusion
// keeping it (decomposing a received message keeps the not-originated mark).
Form starred_variant(Form f, const Statement& starred_first, const Statement& starred_concl) {
  for (auto& st : f.steps) {
    if (st.kind == StepKind::Premise) {
      st.premise = starred_first;
      break;
    }
  }
  f.conclusions = {plain(starred_concl)};
  return f;
}

void being_told(std::vector<Rule>& out) {
  const Term X = v("X"), K = v("K"), T = v("T"), Y = v("Y");
  out.push_back(make("T1", {sees(star(X))}, {sees(X)}, {Form{{premise(sees(star(X)))}, {plain(sees(X))}}}));

  Form t2{{premise(sees(T)), require(Cond::IsConcat, "T"), slices("T", "X")}, {plain(sees(X))}};
  out.push_back(make("T2", {sees(tup(X, Y))}, {sees(X)}, {t2, starred_variant(t2, sees(star(T)), sees(star(X)))}));

  Form t3{{premise(sees(Term::sym_enc(X, K))), premise(holds(K))}, {plain(sees(X))}};
  out.push_back(make("T3", {sees(Term::sym_enc(X, K)), holds(K)}, {sees(X)},
                     {t3, starred_variant(t3, sees(star(Term::sym_enc(X, K))), sees(star(X)))}));

  Form t4{{premise(sees(Term::asym_enc(X, pub()))), premise(holds(priv()))}, {plain(sees(X))}};
  out.push_back(make("T4", {sees(Term::asym_enc(X, pub())), holds(priv())}, {sees(X)},
                     {t4, starred_variant(t4, sees(star(Term::asym_enc(X, pub()))), sees(star(X)))}));

  Form t5{{premise(sees(T)), require(Cond::IsFunc, "T"), func_inverse("T", "Y", slot())}, {plain(sees(Y))}};
  out.push_back(make("T5", {sees(Term::func({X, Y})), holds(X)}, {sees(Y)},
                     {t5, starred_variant(t5, sees(star(T)), sees(star(Y)))}));

  Form t6{{require(Cond::CommutativeAsym), premise(sees(Term::asym_enc(X, priv()))), premise(holds(pub()))},
          {plain(sees(X))}};
  out.push_back(make("T6", {sees(Term::asym_enc(X, priv())), holds(pub())}, {sees(X)},
                     {t6, starred_variant(t6, sees(star(Term::asym_enc(X, priv()))), sees(star(X)))}));
}

void possession(std::vector<Rule>& out) {
  const Term X = v("X"), Y = v("Y"), K = v("K"), T = v("T");
  out.push_back(make("P1", {sees(X)}, {holds(X)},
                     {Form{{premise(sees(X)), require(Cond::NotStarred, "X")}, {plain(holds(X))}}}));
  out.push_back(make("P2", {holds(X), holds(Y)}, {holds(tup(X, Y)), holds(Term::func({X, Y}))},
                     {Form{{seed(T), require(Cond::IsTupleOrFunc, "T"), all_parts("T", slot())}, {built(holds(T))}}}));
  out.push_back(make("P3", {holds(tup(X, Y))}, {holds(X)},
                     {Form{{premise(holds(T)), require(Cond::IsConcat, "T"), slices("T", "X")}, {plain(holds(X))}}}));
  out.push_back(make("P4", {holds(X)}, {holds(Term::hash(X))},
                     {Form{{seed(Term::hash(X)), premise(holds(X))}, {built(holds(Term::hash(X)))}}}));
  out.push_back(make("P5", {holds(Term::func({X, Y})), holds(X)}, {holds(Y)},
                     {Form{{premise(holds(T)), require(Cond::IsFunc, "T"), func_inverse("T", "Y", slot())},
                           {plain(holds(Y))}}}));

  auto p6 = [&](Term seeded) {
    return Form{{seed(std::move(seeded)), premise(holds(K)), premise(holds(X))},
                {built(holds(Term::sym_enc(X, K))), built(holds(Term::sym_dec(X, K)))}};
  };
  out.push_back(make("P6", {holds(K), holds(X)}, {holds(Term::sym_enc(X, K)), holds(Term::sym_dec(X, K))},
                     {p6(Term::sym_enc(X, K)), p6(Term::sym_dec(X, K))}));

  auto asym = [&](const char* name, Term key) {
    Term c = Term::asym_enc(X, key);
    out.push_back(make(name, {holds(key), holds(X)}, {holds(c)},
                       {Form{{seed(c), premise(holds(key)), premise(holds(X))}, {built(holds(c))}}}));
  };
  asym("P7", pub());
  asym("P8", priv());
}

// F and R families share their shape; `prop` builds the believed property.
void freshness(std::vector<Rule>& out) {
  const Term X = v("X"), K = v("K"), T = v("T"), Y = v("Y");
  auto closure = [&](const char* name, Statement (*prop)(Term)) {
    out.push_back(make(name, {prop(X)}, {prop(tup(X, Y)), prop(Term::func({X}))},
                       {Form{{seed(T), require(Cond::IsComposite, "T"), parts("T", "X"), premise(prop(X))},
                             {built(prop(T))}}}));
  };
  auto sym = [&](const char* name, Statement (*prop)(Term)) {
    auto f = [&](Term seeded) {
      return Form{{seed(std::move(seeded)), premise(prop(X)), premise(holds(K))},
                  {built(prop(Term::sym_enc(X, K))), built(prop(Term::sym_dec(X, K)))}};
    };
    out.push_back(make(name, {prop(X), holds(K)}, {prop(Term::sym_enc(X, K)), prop(Term::sym_dec(X, K))},
                       {f(Term::sym_enc(X, K)), f(Term::sym_dec(X, K))}));
  };
  auto asym = [&](const char* name, Statement (*prop)(Term), Term key) {
    Term c = Term::asym_enc(X, key);
    out.push_back(make(name, {prop(X), holds(key)}, {prop(c)},
                       {Form{{seed(c), premise(prop(X)), premise(holds(key))}, {built(prop(c))}}}));
  };

  closure("F1", bfresh);
  sym("F2", bfresh);
  asym("F3", bfresh, pub());
  asym("F4", bfresh, priv());
  out.push_back(make("F5", {bfresh(pub())}, {bfresh(priv())},
                     {Form{{premise(bfresh(pub()))}, {built(bfresh(priv()))}}}));
  out.push_back(make("F6", {bfresh(priv())}, {bfresh(pub())},
                     {Form{{premise(bfresh(priv()))}, {built(bfresh(pub()))}}}));

  auto f7 = [&](Term seeded) {
    return Form{{seed(std::move(seeded)), premise(brecog(X)), premise(bfresh(K)), premise(holds(K))},
                {built(bfresh(Term::sym_enc(X, K))), built(bfresh(Term::sym_dec(X, K)))}};
  };
  out.push_back(make("F7", {brecog(X), bfresh(K), holds(K)},
                     {bfresh(Term::sym_enc(X, K)), bfresh(Term::sym_dec(X, K))},
                     {f7(Term::sym_enc(X, K)), f7(Term::sym_dec(X, K))}));
  auto f89 = [&](const char* name, Term key) {
    Term c = Term::asym_enc(X, key);
    out.push_back(make(name, {brecog(X), bfresh(key), holds(key)}, {bfresh(c)},
                       {Form{{seed(c), premise(brecog(X)), premise(bfresh(key)), premise(holds(key))},
                             {built(bfresh(c))}}}));
  };
  f89("F8", pub());
  f89("F9", priv());

  Term h = Term::hash(X);
  out.push_back(make("F10", {bfresh(X), holds(X)}, {bfresh(h)},
                     {Form{{seed(h), premise(bfresh(X)), premise(holds(X))}, {built(bfresh(h))}}}));
  out.push_back(make("F11", {bfresh(h), holds(h)}, {bfresh(X)},
                     {Form{{premise(bfresh(h)), premise(holds(h))}, {plain(bfresh(X))}}}));

  closure("R1", brecog);
  sym("R2", brecog);
  asym("R3", brecog, pub());
  asym("R4", brecog, priv());
  out.push_back(make("R5", {brecog(X), holds(X)}, {brecog(h)},
                     {Form{{seed(h), premise(brecog(X)), premise(holds(X))}, {built(brecog(h))}}}));
  Term hk = Term::hash(K);
  out.push_back(make("R6", {holds(hk)}, {brecog(X)},
                     {Form{{require(Cond::R6Enabled), premise(holds(hk)), any_universe("X")}, {built(brecog(X))}}}));
}

void interpretation(std::vector<Rule>& out) {
  const Term X = v("X"), K = v("K"), S = v("S"), B = v("B"), T = v("T"), Y = v("Y");
  auto said = [](Term t) { return bel(P, Statement::said(Q, std::move(t))); };
  auto qholds = [](Term t) { return bel(P, Statement::holds(Q, std::move(t))); };
  auto share = [](Term s) { return bel(P, Statement::shared_secret(P, std::move(s), Q)); };
  auto fany = [](std::vector<Term> ts) { return bel(P, Statement::fresh_any(std::move(ts))); };
  auto owns = [](Name q) { return bel(P, Statement::public_key_of(pub(), std::move(q))); };

  Term e = Term::sym_enc(X, K);
  out.push_back(make(
      "I1", {sees(star(e)), holds(K), share(K), brecog(X), fany({X, K})}, {said(X), said(e), qholds(K)},
      {Form{{premise(sees(star(e))), premise(holds(K)), premise(share(K)), premise(brecog(X)), premise(fany({X, K}))},
            {plain(said(X)), plain(said(e)), plain(qholds(K))}}}));

  Term xs = tup(X, S);
  Term a = Term::asym_enc(B, pub());
  out.push_back(make("I2",
                     {sees(star(Term::asym_enc(xs, pub()))), holds(tup(priv(), S)), owns(P), share(S), brecog(xs),
                      fany({X, S, pub()})},
                     {said(xs), said(Term::asym_enc(xs, pub())), qholds(pub())},
                     {Form{{premise(sees(star(a))), split_secret("B", "X", "S"), premise(holds(priv())),
                            premise(holds(S)), premise(owns(P)), premise(share(S)), premise(brecog(B)),
                            premise(fany({X, S, pub()}))},
                           {plain(said(B)), plain(said(a)), plain(qholds(pub()))}}}));

  out.push_back(make("I3", {sees(star(Term::hash(xs))), holds(xs), share(S), fany({X, S})},
                     {said(xs), said(Term::hash(xs))},
                     {Form{{premise(sees(star(Term::hash(B)))), split_secret("B", "X", "S"), premise(holds(B)),
                            premise(share(S)), premise(fany({X, S}))},
                           {plain(said(B)), plain(said(Term::hash(B)))}}}));

  Term sig = Term::asym_enc(X, priv());
  std::vector<Step> i4{premise(sees(sig)), premise(holds(pub())), premise(owns(Q)), premise(brecog(X))};
  std::vector<Step> i4s = i4;
  i4s[0] = premise(sees(star(sig)));
  std::vector<Conclusion> i4c{plain(said(X)), plain(said(sig))};
  out.push_back(make("I4", {sees(sig), holds(pub()), owns(Q), brecog(X)}, {said(X), said(sig)},
                     {Form{i4, i4c}, Form{i4s, i4c}}));

  std::vector<Step> i5 = i4;
  i5.push_back(premise(fany({X, pub()})));
  std::vector<Step> i5s = i5;
  i5s[0] = premise(sees(star(sig)));
  std::vector<Conclusion> i5c{plain(qholds(tup(priv(), X)))};
  out.push_back(make("I5", {sees(sig), holds(pub()), owns(Q), brecog(X), fany({X, pub()})},
                     {qholds(tup(priv(), X))}, {Form{i5, i5c}, Form{i5s, i5c}}));

  out.push_back(make("I6", {said(X), bfresh(X)}, {qholds(X)},
                     {Form{{premise(said(X)), premise(bfresh(X))}, {plain(qholds(X))}}}));
  out.push_back(make("I7", {said(tup(X, Y))}, {said(X)},
                     {Form{{premise(said(T)), require(Cond::IsConcat, "T"), slices("T", "X")}, {plain(said(X))}}}));
}

void jurisdiction(std::vector<Rule>& out) {
  const Statement C = Statement::meta("C");
  const Term X = v("X");
  Statement ctl = bel(P, Statement::controls(Q, C));
  Statement qbel = bel(P, Statement::believes(Q, C));
  Statement honest = bel(P, Statement::controls(Q, Statement::believes(Q, Statement::wildcard())));
  Statement said_means = bel(P, Statement::said(Q, Term::quoted(Statement::means(X, C))));
  Statement twice = bel(P, Statement::believes(Q, Statement::believes(Q, C)));

  out.push_back(make("J1", {ctl, qbel}, {bel(P, C)}, {Form{{premise(qbel), premise(ctl)}, {plain(bel(P, C))}}}));
  out.push_back(make("J2", {honest, said_means, bfresh(X)}, {qbel},
                     {Form{{premise(said_means), premise(honest), premise(bfresh(X))}, {plain(qbel)}}}));
  out.push_back(
      make("J3", {honest, twice}, {qbel}, {Form{{premise(twice), premise(honest)}, {plain(qbel)}}}));
}

RuleCatalog build_catalog() {
  RuleCatalog c;
  being_told(c.rules);
  possession(c.rules);
  freshness(c.rules);
  interpretation(c.rules);
  jurisdiction(c.rules);
  return c;
}

}  // namespace

const RuleCatalog& catalog() {
  static const RuleCatalog c = build_catalog();
  return c;
}

// ---------------------------------------------------------------------------
// Localize and conditional rules

namespace {

Statement wrap(Statement s, const std::vector<Name>& layers) {
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) s = Statement::believes(*it, std::move(s));
  return s;
}

}  // namespace

Rule lift(const Rule& rule, int layers) {
  if (layers <= 0) return rule;
  std::vector<Name> names;
  for (int i = 0; i < layers; ++i) names.push_back(Name::meta("^" + std::to_string(rule.lift + i + 1)));
  Rule r = rule;
  r.lift = rule.lift + layers;
  for (auto& s : r.premises) s = wrap(s, names);
  for (auto& s : r.conclusions) s = wrap(s, names);
  for (auto& f : r.forms) {
    for (auto& st : f.steps) {
      if (st.kind == StepKind::Premise || st.kind == StepKind::AllParts || st.kind == StepKind::FuncInverse) {
        st.premise = wrap(st.premise, names);
      }
    }
    for (auto& c : f.conclusions) c.pattern = wrap(c.pattern, names);
  }
  return r;
}

Rule conditional_rule(std::string label, std::vector<Statement> when, std::vector<Statement> then) {
  Form f;
  for (const auto& s : when) f.steps.push_back(premise(s));
  for (const auto& s : then) f.conclusions.push_back(plain(s));
  Rule r = make(std::move(label), std::move(when), std::move(then), {std::move(f)});
  r.local = true;
  return r;
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

struct Partial {
  Binding b;
  std::vector<Statement> used;
};

bool bind_term(Binding& b, const std::string& var, const Term& t) {
  auto it = b.terms.find(var);
  if (it != b.terms.end()) return it->second == t;
  b.terms.emplace(var, t);
  return true;
}

std::vector<Term> parts_of(const Term& t) {
  switch (t.kind()) {
    case TermKind::Concat:
    case TermKind::Func:
      return t.children();
    case TermKind::Succ:
      return {t.body()};
    default:
      return {};
  }
}

class Runner {
 public:
  Runner(const FactView& facts, const Universe& universe, const RuleOptions& options)
      : facts_(facts), universe_(universe), options_(options) {}

  void premise(const Statement& pattern, const Partial& p, std::vector<Partial>& out) const {
    Statement inst = substitute_partial(pattern, p.b);
    std::vector<Name> layers;
    const Statement* core = &inst;
    while (core->is(StmtKind::Believes)) {
      layers.push_back(core->principal());
      core = &core->inner();
    }
    if (core->is(StmtKind::FreshAny)) {
      for (const auto& t : core->terms()) {
        std::size_t before = out.size();
        premise(wrap(Statement::fresh(t), layers), p, out);
        if (out.size() != before) break;
      }
      return;
    }
    if (inst.is_ground()) {
      if (facts_.contains(inst)) {
        Partial q = p;
        q.used.push_back(inst);
        out.push_back(std::move(q));
      }
      return;
    }
    facts_.candidates(inst, [&](const Statement& s) {
      Binding b = p.b;
      if (!match(inst, s, b)) return;
      Partial q{std::move(b), p.used};
      q.used.push_back(s);
      out.push_back(std::move(q));
    });
  }

  // `tmpl` must hold with ?_ bound to each of `terms`.
  std::vector<Partial> each(const Statement& tmpl, const std::vector<Term>& terms, const Partial& p) const {
    std::vector<Partial> acc{p};
    for (const auto& t : terms) {
      std::vector<Partial> next;
      for (auto& a : acc) {
        Partial probe = a;
        probe.b.terms["_"] = t;
        std::size_t before = next.size();
        premise(tmpl, probe, next);
        for (std::size_t i = before; i < next.size(); ++i) next[i].b.terms.erase("_");
      }
      acc = std::move(next);
      if (acc.empty()) break;
    }
    return acc;
  }

  bool cond(Cond c, const Binding& b, const std::string& var) const {
    switch (c) {
      case Cond::CommutativeAsym: return options_.commutative_asym;
      case Cond::R6Enabled: return options_.r6_enabled;
      default: break;
    }
    auto it = b.terms.find(var);
    if (it == b.terms.end()) return false;
    const Term& t = it->second;
    switch (c) {
      case Cond::NotStarred: return !t.is(TermKind::Starred);
      case Cond::IsConcat: return t.is(TermKind::Concat);
      case Cond::IsFunc: return t.is(TermKind::Func);
      case Cond::IsTupleOrFunc: return t.is(TermKind::Concat) || t.is(TermKind::Func);
      case Cond::IsComposite: return t.is(TermKind::Concat) || t.is(TermKind::Func) || t.is(TermKind::Succ);
      default: return false;
    }
  }

  std::vector<Partial> step(const Step& st, std::vector<Partial> cur) const {
    std::vector<Partial> next;
    for (auto& p : cur) {
      switch (st.kind) {
        case StepKind::Premise:
          premise(st.premise, p, next);
          break;
        case StepKind::Seed: {
          Term pat = substitute_partial(st.pattern, p.b);
          for (const auto& u : universe_) {
            Binding b = p.b;
            if (match(pat, u, b)) next.push_back({std::move(b), p.used});
          }
          break;
        }
        case StepKind::Slices: {
          const Term& t = p.b.terms.at(st.src);
          const auto& comps = t.children();
          std::size_t n = comps.size();
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t len = 1; i + len <= n && len < n; ++len) {
              Term slice = make_tuple(std::vector<Term>(comps.begin() + i, comps.begin() + i + len));
              if (len > 1 && !universe_.count(slice)) continue;
              Partial q = p;
              if (bind_term(q.b, st.dst, slice)) next.push_back(std::move(q));
            }
          }
          break;
        }
        case StepKind::Parts:
          for (const auto& part : parts_of(p.b.terms.at(st.src))) {
            Partial q = p;
            if (bind_term(q.b, st.dst, part)) next.push_back(std::move(q));
          }
          break;
        case StepKind::AllParts: {
          auto got = each(st.premise, parts_of(p.b.terms.at(st.src)), p);
          next.insert(next.end(), got.begin(), got.end());
          break;
        }
        case StepKind::FuncInverse: {
          const auto& args = p.b.terms.at(st.src).children();
          if (args.size() < 2) break;
          for (std::size_t i = 0; i < args.size(); ++i) {
            std::vector<Term> known;
            for (std::size_t j = 0; j < args.size(); ++j) {
              if (j != i) known.push_back(args[j]);
            }
            for (auto& q : each(st.premise, known, p)) {
              if (bind_term(q.b, st.dst, args[i])) next.push_back(std::move(q));
            }
          }
          break;
        }
        case StepKind::SplitSecret: {
          const Term body = p.b.terms.at(st.src);
          auto comps = components(body);
          std::vector<std::pair<Term, Term>> splits;
          if (comps.size() >= 2) {
            for (std::size_t i = 0; i < comps.size(); ++i) {
              std::vector<Term> rest;
              for (std::size_t j = 0; j < comps.size(); ++j) {
                if (j != i) rest.push_back(comps[j]);
              }
              splits.emplace_back(make_tuple(std::move(rest)), comps[i]);
            }
          }
          splits.emplace_back(body, body);
          for (const auto& [rest, secret] : splits) {
            Partial q = p;
            if (bind_term(q.b, st.dst, rest) && bind_term(q.b, st.dst2, secret)) next.push_back(std::move(q));
          }
          break;
        }
        case StepKind::Require:
          if (cond(st.cond, p.b, st.src)) next.push_back(std::move(p));
          break;
        case StepKind::AnyUniverse:
          for (const auto& u : universe_) {
            Partial q = p;
            if (bind_term(q.b, st.dst, u)) next.push_back(std::move(q));
          }
          break;
      }
    }
    return next;
  }

 private:
  const FactView& facts_;
  const Universe& universe_;
  const RuleOptions& options_;
};

}  // namespace

std::vector<Derivation> instantiate(const Rule& rule, const FactView& facts, const Universe& universe,
                                    const RuleOptions& options) {
  Runner run(facts, universe, options);
  std::vector<Derivation> out;
  std::set<Statement> seen;
  for (const auto& form : rule.forms) {
    std::vector<Partial> cur{Partial{}};
    for (const auto& st : form.steps) {
      cur = run.step(st, std::move(cur));
      if (cur.empty()) break;
    }
    for (const auto& p : cur) {
      for (const auto& c : form.conclusions) {
        Statement s = substitute(c.pattern, p.b);
        if (c.constructive) {
          const Term* subj = subject_term(s);
          if (subj && !universe.count(*subj)) continue;
        }
        if (!seen.insert(s).second) continue;
        Justification j;
        j.origin = Origin::Rule;
        j.rule = rule.name;
        j.lift = rule.lift;
        j.premises = p.used;
        out.push_back({std::move(s), std::move(j)});
      }
    }
  }
  return out;
}

}  // namespace gny
