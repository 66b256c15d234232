#include "gny/formulae.hpp"

#include <gtest/gtest.h>

#include <unordered_set>

namespace gny {
namespace {

Term nonce(const char* n) { return Term::atom(AtomKind::Nonce, n); }
Term key(const char* n) { return Term::atom(AtomKind::SymKey, n); }
Term lit(const char* n) { return Term::atom(AtomKind::Literal, n); }
Term pub(const char* k) { return Term::public_key(Name::of(k)); }
Term priv(const char* k) { return Term::private_key(Name::of(k)); }
Term id(const char* p) { return Term::identity(Name::of(p)); }
Name A = Name::of("A"), B = Name::of("B"), C = Name::of("C");

TEST(Normalize, AsymmetricInverseLaws) {
  Term x = nonce("X");
  EXPECT_EQ(normalize(Term::asym_enc(Term::asym_enc(x, priv("K")), pub("K"))), x);
  EXPECT_EQ(normalize(Term::asym_enc(Term::asym_enc(x, pub("K")), priv("K"))), x);
}

TEST(Normalize, MismatchedKeyPairIsKept) {
  Term t = Term::asym_enc(Term::asym_enc(nonce("X"), priv("K")), pub("J"));
  EXPECT_EQ(normalize(t), t);
}

TEST(Normalize, FlattensConcat) {
  Term a = nonce("a"), b = nonce("b"), c = nonce("c");
  EXPECT_EQ(normalize(Term::concat({Term::concat({a, b}), c})), Term::concat({a, b, c}));
}

TEST(Normalize, SymmetricInverse) {
  Term m = nonce("m"), k = key("k");
  EXPECT_EQ(normalize(Term::sym_enc(Term::sym_dec(m, k), k)), m);
  EXPECT_EQ(normalize(Term::sym_dec(Term::sym_enc(m, k), k)), m);
}

TEST(Normalize, StarCollapses) {
  Term x = nonce("X");
  EXPECT_EQ(normalize(Term::starred(Term::starred(x))), Term::starred(x));
}

TEST(Normalize, Idempotent) {
  std::vector<Term> samples{
      Term::concat({Term::concat({nonce("a"), Term::concat({nonce("b"), nonce("c")})}), nonce("d")}),
      Term::hash(Term::asym_enc(Term::asym_enc(nonce("x"), pub("K")), priv("K"))),
      Term::starred(Term::starred(Term::sym_dec(Term::sym_enc(nonce("m"), key("k")), key("k")))),
      Term::func({Term::concat({nonce("a"), nonce("b")}), nonce("c")}),
  };
  for (const auto& t : samples) EXPECT_EQ(normalize(normalize(t)), normalize(t));
}

TEST(Normalize, ConjIsFlatAndDuplicateFree) {
  Statement f = Statement::fresh(nonce("X"));
  Statement r = Statement::recognizable(nonce("Y"));
  Statement nested = Statement::conj({f, Statement::conj({r, f})});
  Statement n = normalize(nested);
  ASSERT_TRUE(n.is(StmtKind::Conj));
  EXPECT_EQ(n.parts().size(), 2u);
}

TEST(Statements, SharedSecretIsSymmetric) {
  Term k = key("K_AB");
  EXPECT_EQ(Statement::shared_secret(A, k, B), Statement::shared_secret(B, k, A));
  EXPECT_NE(Statement::shared_secret(A, k, B), Statement::shared_secret(A, k, C));
}

TEST(Statements, BeliefDepth) {
  Statement s = Statement::believes(B, Statement::believes(A, Statement::shared_secret(A, key("K"), B)));
  EXPECT_EQ(s.belief_depth(), 2);
  EXPECT_EQ(Statement::fresh(nonce("X")).belief_depth(), 0);
}

TEST(Statements, EqualityIsStructuralAndHashConsistent) {
  Statement a = Statement::holds(A, Term::concat({nonce("N_A"), nonce("T_A")}));
  Statement b = Statement::holds(A, Term::concat({nonce("N_A"), nonce("T_A")}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::hash<Statement>{}(a), std::hash<Statement>{}(b));
  std::unordered_set<Statement> set{a};
  EXPECT_TRUE(set.count(b));
  EXPECT_NE(a, Statement::sees(A, Term::concat({nonce("N_A"), nonce("T_A")})));
}

TEST(Subterms, DirectComponents) {
  Term t = Term::concat({nonce("N_A"), nonce("T_A")});
  EXPECT_EQ(subterms(t), (std::set<Term>{t, nonce("N_A"), nonce("T_A")}));
}

TEST(Subterms, Transitive) {
  Term body = Term::concat({key("K_AB"), lit("AB_5")});
  Term h = Term::hash(body);
  EXPECT_EQ(subterms(h), (std::set<Term>{h, body, key("K_AB"), lit("AB_5")}));
}

TEST(Subterms, CertificateContainsKeyAndIdentities) {
  Term cert = Term::asym_enc(Term::concat({pub("K_B"), id("B"), id("C")}), priv("K_C"));
  auto s = subterms(cert);
  EXPECT_TRUE(s.count(pub("K_B")));
  EXPECT_TRUE(s.count(id("B")));
  EXPECT_TRUE(s.count(id("C")));
  EXPECT_TRUE(s.count(priv("K_C")));
}

TEST(Subterms, StarredBodyIsUnstarred) {
  Term body = Term::concat({nonce("a"), nonce("b")});
  auto s = subterms(Term::starred(body));
  EXPECT_TRUE(s.count(body));
  EXPECT_FALSE(s.count(Term::starred(body)));
}

TEST(Subterms, QuotedStatementsContribute) {
  Term q = Term::quoted(Statement::means(nonce("N_A"), Statement::shared_secret(A, key("K"), B)));
  auto s = subterms(q);
  EXPECT_TRUE(s.count(nonce("N_A")));
  EXPECT_TRUE(s.count(key("K")));
}

TEST(Subterms, Closed) {
  Term cert = Term::asym_enc(Term::concat({pub("K_B"), id("B"), Term::hash(Term::func({nonce("x")}))}), priv("K"));
  auto all = subterms(cert);
  for (const auto& t : all) {
    for (const auto& u : subterms(t)) EXPECT_TRUE(all.count(u));
  }
}

TEST(Match, ConstructorMatch) {
  Term pattern = Term::sym_enc(Term::meta("X"), Term::meta("K"));
  Term subject = Term::sym_enc(nonce("N_A"), key("K_AS"));
  auto b = match(pattern, subject);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->terms.at("X"), nonce("N_A"));
  EXPECT_EQ(b->terms.at("K"), key("K_AS"));
}

TEST(Match, VariableTakesWholeConcat) {
  Term pattern = Term::sym_enc(Term::meta("X"), Term::meta("K"));
  Term body = Term::concat({nonce("N_S"), lit("L")});
  auto b = match(pattern, Term::sym_enc(body, key("K_AS")));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->terms.at("X"), body);
}

TEST(Match, KeyProjectionSchema) {
  Statement pattern = Statement::public_key_of(Term::public_key(Name::meta("K")), Name::meta("P"));
  auto b = match(pattern, Statement::public_key_of(pub("K_B"), B));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->names.at("K"), Name::of("K_B"));
  EXPECT_EQ(b->names.at("P"), B);
}

TEST(Match, ConstructorMismatch) {
  Term pattern = Term::sym_enc(Term::meta("X"), Term::meta("K"));
  EXPECT_FALSE(match(pattern, Term::hash(nonce("m"))));
}

TEST(Match, RepeatedVariableMustAgree) {
  Term pattern = Term::concat({Term::meta("X"), Term::meta("X")});
  EXPECT_TRUE(match(pattern, Term::concat({nonce("a"), nonce("a")})));
  EXPECT_FALSE(match(pattern, Term::concat({nonce("a"), nonce("b")})));
}

TEST(Match, FailureLeavesBindingUntouched) {
  Binding b;
  b.terms.emplace("Y", nonce("y"));
  Binding before = b;
  EXPECT_FALSE(match(Term::concat({Term::meta("X"), Term::meta("Y")}), Term::concat({nonce("a"), nonce("z")}), b));
  EXPECT_EQ(b, before);
}

TEST(Match, SharedSecretEitherOrder) {
  Statement pattern = Statement::shared_secret(Name::meta("P"), Term::meta("K"), B);
  auto b = match(pattern, Statement::shared_secret(B, key("K"), A));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->names.at("P"), A);
}

TEST(Match, StatementVariables) {
  Statement pattern = Statement::believes(Name::meta("P"), Statement::meta("C"));
  Statement inner = Statement::fresh(nonce("N_B"));
  auto b = match(pattern, Statement::believes(A, inner));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->stmts.at("C"), inner);
}

TEST(Match, WildcardOnlyMatchesWildcard) {
  Statement honest = Statement::controls(B, Statement::believes(B, Statement::wildcard()));
  EXPECT_TRUE(match(honest, honest));
  EXPECT_FALSE(match(honest, Statement::controls(B, Statement::believes(B, Statement::fresh(nonce("x"))))));
}

TEST(Substitute, HoldsExample) {
  Binding b;
  b.names.emplace("P", B);
  b.terms.emplace("X", nonce("N'_A"));
  EXPECT_EQ(substitute(Statement::holds(Name::meta("P"), Term::meta("X")), b), Statement::holds(B, nonce("N'_A")));
}

TEST(Substitute, BelievesFreshExample) {
  Binding b;
  b.names.emplace("P", A);
  b.terms.emplace("X", nonce("N_B"));
  Statement pattern = Statement::believes(Name::meta("P"), Statement::fresh(Term::meta("X")));
  EXPECT_EQ(substitute(pattern, b), Statement::believes(A, Statement::fresh(nonce("N_B"))));
}

TEST(Substitute, IdentityOnGround) {
  Statement s = Statement::sees(A, Term::starred(Term::sym_enc(nonce("x"), key("k"))));
  EXPECT_EQ(substitute(s, Binding{}), s);
}

TEST(Substitute, UnboundVariableThrows) {
  EXPECT_THROW(substitute(Statement::holds(Name::meta("P"), nonce("x")), Binding{}), UnboundMetavar);
  EXPECT_THROW(substitute(Term::meta("X"), Binding{}), UnboundMetavar);
}

TEST(Substitute, PartialLeavesUnboundVariables) {
  Binding b;
  b.terms.emplace("X", nonce("x"));
  Term out = substitute_partial(Term::concat({Term::meta("X"), Term::meta("Y")}), b);
  EXPECT_EQ(out, Term::concat({nonce("x"), Term::meta("Y")}));
  EXPECT_FALSE(out.is_ground());
}

TEST(Substitute, ResultIsNormalized) {
  Binding b;
  b.terms.emplace("X", Term::concat({nonce("a"), nonce("b")}));
  Term out = substitute(Term::concat({Term::meta("X"), nonce("c")}), b);
  EXPECT_EQ(out, Term::concat({nonce("a"), nonce("b"), nonce("c")}));
}

TEST(Substitute, MatchRoundTrip) {
  std::vector<std::pair<Statement, Statement>> cases{
      {Statement::sees(Name::meta("P"), Term::sym_enc(Term::meta("X"), Term::meta("K"))),
       Statement::sees(A, Term::sym_enc(Term::concat({nonce("a"), nonce("b")}), key("k")))},
      {Statement::believes(Name::meta("P"), Statement::said(Name::meta("Q"), Term::meta("X"))),
       Statement::believes(A, Statement::said(B, Term::hash(nonce("x"))))},
      {Statement::public_key_of(Term::public_key(Name::meta("K")), Name::meta("Q")),
       Statement::public_key_of(pub("K_C"), C)},
  };
  for (const auto& [p, s] : cases) {
    auto b = match(p, s);
    ASSERT_TRUE(b);
    EXPECT_EQ(substitute(p, *b), s);
  }
}

TEST(Tuples, ComponentsAndMakeTuple) {
  Term t = Term::concat({nonce("a"), nonce("b")});
  EXPECT_EQ(components(t).size(), 2u);
  EXPECT_EQ(components(nonce("a")), std::vector<Term>{nonce("a")});
  EXPECT_EQ(make_tuple({nonce("a")}), nonce("a"));
  EXPECT_EQ(make_tuple({nonce("a"), nonce("b")}), t);
}

}  // namespace
}  // namespace gny
