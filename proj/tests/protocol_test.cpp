#include "gny/protocol.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "gny/dsl.hpp"

namespace gny {
namespace {

Statement S(const ProtocolSpec& spec, const std::string& text) {
  auto r = parse_statement(text, spec);
  if (!r.statement) ADD_FAILURE() << "cannot parse " << text;
  return r.statement.value_or(Statement());
}

Term T(const ProtocolSpec& spec, const std::string& text) {
  auto r = parse_term(text, spec);
  if (!r.term) ADD_FAILURE() << "cannot parse " << text;
  return r.term.value_or(Term());
}

ProtocolSpec spec_of(const std::string& text) {
  auto r = parse_spec(text);
  if (!r.ok()) {
    ADD_FAILURE() << format_error(r.errors.front(), "<test>");
    return {};
  }
  return *r.spec;
}

std::set<Statement> known(const RunState& run, std::size_t n) {
  auto v = run.known_after(n);
  return {v.begin(), v.end()};
}

const ProtocolSpec& tls() { return fixture("tls-named-server"); }
const ProtocolSpec& kerberos() { return fixture("kerberos"); }

const char* kEcho = R"(protocol echo
principals A B
declare
  nonce N
assume
  [own] A holds N
messages
  M1: A -> B : N
  M2: B -> A : N
)";

// -- runs -------------------------------------------------------------------------

TEST(InitRun, TlsPreconditions) {
  auto run = init_run(tls());
  auto kb = known(run, 0);
  EXPECT_TRUE(kb.count(S(tls(), "A holds pub(K_C)")));
  EXPECT_TRUE(kb.count(S(tls(), "A believes pubkey(K_C) of C")));
  EXPECT_EQ(run.cursor, 0u);
  EXPECT_EQ(run.checkpoints.size(), 1u);
  EXPECT_TRUE(run.config.commutative_asym);
}

TEST(InitRun, KerberosServerKnowsTheSessionKey) {
  EXPECT_TRUE(known(init_run(kerberos()), 0).count(S(kerberos(), "S believes A shares K_AB with B")));
}

TEST(InitRun, SchemaPreconditionsAreExpanded) {
  auto kb = known(init_run(tls()), 0);
  EXPECT_TRUE(kb.count(S(tls(), "A believes C controls pubkey(K_B) of B")));
  EXPECT_TRUE(kb.count(S(tls(), "A believes C controls pubkey(K_C) of A")));
}

TEST(InitRun, NoMessagesMeansComplete) {
  auto run = init_run(spec_of("protocol empty\nprincipals A\n"));
  EXPECT_TRUE(run.complete());
  EXPECT_THROW(step(run), RunComplete);
}

TEST(Step, DeliversOneMessage) {
  auto run = step(init_run(kerberos()));
  EXPECT_EQ(run.cursor, 1u);
  auto kb = known(run, 1);
  EXPECT_TRUE(kb.count(Statement::sees(Name::of("S"), Term::starred(kerberos().messages[0].term))));
  EXPECT_TRUE(kb.count(Statement::holds(Name::of("A"), kerberos().messages[0].term)));
}

TEST(Step, CompleteRunRejectsFurtherSteps) {
  EXPECT_THROW(step(run_to_completion(init_run(kerberos()))), RunComplete);
}

TEST(Step, OwnMessageIsNotStarred) {
  ProtocolSpec spec = spec_of(kEcho);
  auto run = run_to_completion(init_run(spec));
  auto kb = known(run, 2);
  EXPECT_TRUE(kb.count(S(spec, "B sees *N")));
  EXPECT_TRUE(kb.count(S(spec, "A sees N")));
  EXPECT_FALSE(kb.count(S(spec, "A sees *N")));
}

TEST(Step, KnowledgeGrowsWithEachMessage) {
  auto run = run_to_completion(init_run(tls()));
  ASSERT_EQ(run.checkpoints.size(), tls().messages.size() + 1);
  for (std::size_t i = 1; i < run.checkpoints.size(); ++i) EXPECT_LT(run.checkpoints[i - 1], run.checkpoints[i]);
}

TEST(Step, PrefixRunsAgreeUpToTheUniverse) {
  // Dropping the last message only loses statements about terms that no
  // longer occur anywhere in the spec.
  auto full = run_to_completion(init_run(tls()));
  auto shorter = run_to_completion(init_run(apply_attack(tls(), {DropMessage{"M6"}})));
  auto a = known(full, 5);
  auto b = known(shorter, 5);
  EXPECT_TRUE(std::includes(a.begin(), a.end(), b.begin(), b.end()));
  Term m6 = tls().messages[5].term;
  for (const auto& s : a) {
    if (b.count(s)) continue;
    const Term* subject = subject_term(s);
    ASSERT_NE(subject, nullptr) << render(s);
    EXPECT_EQ(*subject, m6) << render(s);
    EXPECT_FALSE(shorter.universe.count(*subject));
  }
}

TEST(Step, KerberosRegressionByStep) {
  auto run = run_to_completion(init_run(kerberos()));
  EXPECT_FALSE(known(run, 1).count(S(kerberos(), "A holds K_AB")));
  EXPECT_TRUE(known(run, 2).count(S(kerberos(), "A holds K_AB")));
  EXPECT_FALSE(known(run, 2).count(S(kerberos(), "B believes A shares K_AB with B")));
  EXPECT_TRUE(known(run, 3).count(S(kerberos(), "B believes A shares K_AB with B")));
}

// -- goals ------------------------------------------------------------------------

TEST(Goals, ReportFollowsDeclarationOrder) {
  auto report = check_goals(run_to_completion(init_run(kerberos())));
  EXPECT_EQ(report.protocol, "kerberos");
  ASSERT_EQ(report.goals.size(), kerberos().goals.size());
  for (std::size_t i = 0; i < report.goals.size(); ++i) {
    EXPECT_EQ(report.goals[i].label, kerberos().goals[i].label);
    EXPECT_TRUE(report.goals[i].proved) << report.goals[i].label;
    EXPECT_TRUE(report.goals[i].proof.has_value());
  }
  EXPECT_TRUE(report.all_proved());
}

TEST(Goals, EmptyGoalListIsVacuouslyProved) {
  auto report = check_goals(run_to_completion(init_run(spec_of(kEcho))));
  EXPECT_TRUE(report.goals.empty());
  EXPECT_TRUE(report.all_proved());
}

TEST(Goals, WrongKeyIsUnproved) {
  ProtocolSpec spec = tls();
  spec.goals = {{"wrong", S(tls(), "A believes pubkey(K_C) of B")}};
  auto report = check_goals(run_to_completion(init_run(spec)));
  ASSERT_EQ(report.goals.size(), 1u);
  EXPECT_FALSE(report.goals[0].proved);
  EXPECT_FALSE(report.goals[0].proof.has_value());
  EXPECT_FALSE(report.all_proved());
}

TEST(Goals, EveryFixtureProvesItsGoals) {
  for (const auto& spec : fixtures()) {
    auto report = check_goals(run_to_completion(init_run(spec)));
    for (const auto& g : report.goals) EXPECT_TRUE(g.proved) << spec.name << " " << g.label;
  }
}

// -- attacks ----------------------------------------------------------------------

TEST(Attack, EmptyTransformListIsIdentity) { EXPECT_EQ(apply_attack(tls(), {}), tls()); }

TEST(Attack, UnknownLabelsAreRejected) {
  EXPECT_THROW(apply_attack(tls(), {DropMessage{"M9"}}), SpecError);
  EXPECT_THROW(apply_attack(tls(), {RemovePrecondition{"nope"}}), SpecError);
  EXPECT_THROW(apply_attack(tls(), {ReplaceMessage{"M9", T(tls(), "N_A"), {}}}), SpecError);
}

TEST(Attack, RemovingTheAuthorityKeyBreaksTheCertificate) {
  auto run = run_to_completion(init_run(apply_attack(tls(), {RemovePrecondition{"ca.A"}})));
  auto report = check_goals(run);
  auto cert = std::find_if(report.goals.begin(), report.goals.end(), [](const GoalResult& g) { return g.label == "cert"; });
  ASSERT_NE(cert, report.goals.end());
  EXPECT_FALSE(cert->proved);
}

TEST(Attack, ReplaceMessageChangesSender) {
  auto spec = apply_attack(kerberos(), {AddPrincipal{"E", {}}, ReplaceMessage{"M1", T(kerberos(), "id(A)"), Name::of("E")}});
  const auto& m1 = spec.messages[0];
  EXPECT_EQ(m1.sender, Name::of("E"));
  EXPECT_EQ(m1.receiver, Name::of("S"));
  EXPECT_EQ(m1.term, T(kerberos(), "id(A)"));
  EXPECT_NO_THROW(validate(spec));
}

TEST(Attack, AddPrincipalDeclaresKeypairs) {
  auto spec = apply_attack(tls(), {AddPrincipal{"M", {Term::private_key(Name::of("K_M"))}}});
  EXPECT_NE(std::find(spec.principals.begin(), spec.principals.end(), "M"), spec.principals.end());
  EXPECT_NE(std::find(spec.keypairs.begin(), spec.keypairs.end(), "K_M"), spec.keypairs.end());
  EXPECT_TRUE(known(init_run(spec), 0).count(Statement::holds(Name::of("M"), Term::private_key(Name::of("K_M")))));
}

TEST(Attack, CertificateSubstitution) {
  auto spec = apply_attack(tls(), named_attack(tls(), "cert-substitution"));
  auto report = check_goals(run_to_completion(init_run(spec)));
  EXPECT_FALSE(report.all_proved());
  auto proved = std::count_if(report.goals.begin(), report.goals.end(), [](const GoalResult& g) { return g.proved; });
  EXPECT_EQ(proved, 0);
}

TEST(Attack, NotApplicableToKerberos) {
  EXPECT_THROW(named_attack(kerberos(), "cert-substitution"), std::out_of_range);
  EXPECT_THROW(named_attack(tls(), "no-such-attack"), std::out_of_range);
  EXPECT_EQ(attack_names(), std::vector<std::string>{"cert-substitution"});
}

// -- fixtures ---------------------------------------------------------------------

TEST(Fixtures, Catalogue) {
  ASSERT_EQ(fixtures().size(), 4u);
  EXPECT_EQ(tls().messages.size(), 6u);
  EXPECT_EQ(kerberos().messages.size(), 4u);
  EXPECT_NO_THROW(fixture("tls-anonymous-server"));
  EXPECT_NO_THROW(fixture("tls-mutual"));
  EXPECT_THROW(fixture("nope"), std::out_of_range);
  EXPECT_NE(fixture_source("kerberos").find("protocol kerberos"), std::string::npos);
}

TEST(Fixtures, SessionKeyDefinition) {
  auto it = std::find_if(tls().derived.begin(), tls().derived.end(), [](const DerivedDecl& d) { return d.name == "K_AB"; });
  ASSERT_NE(it, tls().derived.end());
  EXPECT_EQ(it->definition, T(tls(), "F((N_A, T_A, N_B, T_B), N'_A)"));
}

// -- validation -------------------------------------------------------------------

TEST(Validate, Errors) {
  ProtocolSpec spec = kerberos();
  spec.principals.push_back("A");
  EXPECT_THROW(validate(spec), SpecError);

  spec = kerberos();
  spec.messages[1].label = "M1";
  try {
    validate(spec);
    FAIL() << "duplicate message label accepted";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.label(), "M1");
  }

  spec = kerberos();
  spec.goals.push_back({"ghost", Statement::holds(Name::of("Z"), Term::atom(AtomKind::Nonce, "N_A"))});
  EXPECT_THROW(validate(spec), SpecError);

  spec = kerberos();
  spec.goals.push_back({"kind", Statement::holds(Name::of("A"), Term::atom(AtomKind::SymKey, "N_A"))});
  EXPECT_THROW(validate(spec), SpecError);

  spec = kerberos();
  spec.assumptions.push_back({"var", {}, {Statement::holds(Name::of("A"), Term::meta("X"))}});
  EXPECT_THROW(validate(spec), SpecError);

  EXPECT_NO_THROW(validate(kerberos()));
}

TEST(Validate, InitRunValidates) {
  ProtocolSpec spec = kerberos();
  spec.messages[0].receiver = Name::of("Z");
  EXPECT_THROW(init_run(spec), SpecError);
}

TEST(LocalRules, LabelsBecomeRuleNames) {
  auto rules = local_rules(tls());
  std::vector<std::string> names;
  for (const auto& r : rules) names.push_back(r.name);
  EXPECT_NE(std::find(names.begin(), names.end(), "cert.A"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "finished.B"), names.end());
  EXPECT_TRUE(std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return r.local; }));
}

}  // namespace
}  // namespace gny
