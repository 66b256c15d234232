// Acceptance gate: one PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gny/dsl.hpp"
#include "gny/engine.hpp"
#include "gny/protocol.hpp"
#include "oracle.hpp"
#include "rule_cases.hpp"

using namespace gny;

namespace {

int failures = 0;

void report(int n, const std::string& title, bool ok, const std::vector<std::string>& notes) {
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << title << "\n";
  for (const auto& line : notes) std::cout << "    " << line << "\n";
  if (!ok) ++failures;
}

Statement stmt(const ProtocolSpec& spec, const std::string& text) {
  auto r = parse_statement(text, spec);
  if (!r.statement) throw std::runtime_error("cannot parse '" + text + "': " + r.errors.front().message);
  return *r.statement;
}

// Statements expected after `step` messages.
struct Expectation {
  std::size_t step;
  std::vector<std::string> statements;
};

bool check_steps(const ProtocolSpec& spec, const RunState& run, const std::vector<Expectation>& expected,
                 std::vector<std::string>& notes) {
  bool ok = true;
  std::size_t total = 0;
  for (const auto& e : expected) {
    auto known = run.known_after(e.step);
    std::set<Statement> kb(known.begin(), known.end());
    for (const auto& text : e.statements) {
      ++total;
      if (!kb.count(stmt(spec, text))) {
        ok = false;
        notes.push_back("missing after M" + std::to_string(e.step) + ": " + text);
      }
    }
  }
  notes.push_back(std::to_string(total) + " statements checked at their message steps");
  return ok;
}

const std::vector<std::string> kTlsA1 = {
    "A holds (N_A, T_A)", "A holds (N_B, T_B)", "A holds N_B", "A holds T_B", "A holds N_A", "A holds T_A",
    "A believes fresh(N_B)", "B holds (N_A, T_A)", "B holds (N_B, T_B)", "B holds N_A", "B holds T_A",
    "B holds N_B", "B holds T_B", "B believes fresh(N_A)"};

const std::vector<std::string> kTlsA5 = {
    "A believes B said (N_B, T_B)",
    "A believes B believes A said (N_A, T_A)",
    "A believes B believes A shares K_AB with B",
    "A believes B believes fresh(K_AB)",
    "A believes B sees (N_A, T_A)",
    "A believes B said (N_B, T_B)",
    "A believes B said CERT_B",
    "A believes B sees PMS"};

const std::vector<std::string> kTlsA6 = {
    "B believes A said N'_A",
    "B believes A believes B said (N_B, T_B)",
    "B believes A believes A shares K_AB with B",
    "B believes A believes fresh(K_AB)",
    "B believes A said (N_A, T_A)",
    "B believes A sees (N_B, T_B)",
    "B believes A sees CERT_B",
    "B believes A said PMS"};

void criterion1() {
  const auto& spec = fixture("tls-named-server");
  auto run = run_to_completion(init_run(spec));
  std::vector<std::string> notes;
  bool ok = check_steps(spec, run,
                        {{2, kTlsA1},
                         {3, {"A believes C said (pub(K_B), id(B), id(C))", "A believes C believes pubkey(K_B) of B",
                              "A believes pubkey(K_B) of B", "A holds CERT_B", "A holds PMS"}},
                         {4, {"B holds N'_A", "B holds K_AB", "B believes fresh(K_AB)"}},
                         {5, kTlsA5},
                         {6, kTlsA6}},
                        notes);
  report(1, "TLS full-proof regression (nonce receipt, certificate, pre-master secret, client and server beliefs)", ok, notes);
}

void criterion2() {
  const auto& spec = fixture("kerberos");
  auto run = run_to_completion(init_run(spec));
  std::vector<std::string> notes;
  bool ok = check_steps(spec, run,
                        {{2, {"A believes A shares K_AB with B", "A holds K_AB"}},
                         {3,
                          {"B believes A shares K_AB with B", "B believes A believes A shares K_AB with B",
                           "B believes A holds K_AB"}},
                         {4, {"A believes B believes A shares K_AB with B", "A believes B holds K_AB"}}},
                        notes);
  report(2, "Kerberos regression (after M2, M3, M4)", ok, notes);
}

void criterion3() {
  const auto& honest = fixture("tls-named-server");
  auto spec = apply_attack(honest, named_attack(honest, "cert-substitution"));
  auto run = run_to_completion(init_run(spec));
  std::vector<std::string> notes;
  bool ok = check_steps(spec, run, {{2, kTlsA1}, {spec.messages.size(), kTlsA1}}, notes);
  auto goals = check_goals(run);
  for (const char* label : {"cert", "key.A", "key.B"}) {
    for (const auto& g : goals.goals) {
      if (g.label != label) continue;
      notes.push_back(std::string(label) + (g.proved ? " proved (expected unproved)" : " unproved"));
      ok = ok && !g.proved;
    }
  }
  std::string cmd = std::string(GNY_CLI_PATH) + " check builtin:tls-named-server --attack cert-substitution >/dev/null";
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  notes.push_back("gny check --attack cert-substitution exit code " + std::to_string(code));
  ok = ok && code == 1;
  report(3, "certificate substitution defeats key goals, keeps nonce receipt", ok, notes);
}

void criterion4() {
  std::vector<std::string> notes;
  bool ok = true;
  const auto& tls = fixture("tls-named-server");
  auto truncated = apply_attack(tls, {DropMessage{"M5"}, DropMessage{"M6"}});
  std::vector<std::pair<std::string, ProtocolSpec>> cases{{"kerberos", fixture("kerberos")},
                                                          {"tls-named-server M1-M4", truncated}};
  for (const auto& [name, spec] : cases) {
    auto oracle = testing::oracle_run(spec, 2);
    auto engine = testing::engine_run(spec, 2);
    bool same = oracle == engine;
    ok = ok && same;
    std::ostringstream line;
    line << name << ": " << engine.back().size() << " engine vs " << oracle.back().size() << " oracle statements, "
         << oracle.size() << " checkpoints " << (same ? "identical" : "DIFFER");
    notes.push_back(line.str());
    if (!same) {
      for (std::size_t i = 0; i < std::min(oracle.size(), engine.size()); ++i) {
        for (const auto& s : oracle[i]) {
          if (!engine[i].count(s)) notes.push_back("  oracle only @" + std::to_string(i) + ": " + render(s));
        }
        for (const auto& s : engine[i]) {
          if (!oracle[i].count(s)) notes.push_back("  engine only @" + std::to_string(i) + ": " + render(s));
        }
      }
    }
  }
  report(4, "brute-force oracle equivalence at belief depth 2", ok, notes);
}

void criterion5() {
  std::vector<std::string> notes;
  bool ok = true;
  std::size_t covered = 0;
  for (const auto& rule : catalog().rules) {
    int positive = 0, negative = 0;
    for (const auto& c : testing::rule_cases()) {
      if (c.rule != rule.name) continue;
      bool produced = testing::produces(c);
      if (produced != c.positive) {
        ok = false;
        notes.push_back("case failed: " + testing::describe_case(c));
      }
      (c.positive ? positive : negative) += 1;
    }
    if (positive && negative) {
      ++covered;
    } else {
      ok = false;
      notes.push_back(rule.name + " lacks a " + (positive ? "negative" : "positive") + " case");
    }
  }
  notes.push_back(std::to_string(covered) + " of " + std::to_string(catalog().rules.size()) +
                  " catalog rules covered, " + std::to_string(testing::rule_cases().size()) + " cases");
  report(5, "rule-level positive and near-miss cases", ok, notes);
}

void criterion6() {
  std::vector<std::string> notes;
  bool ok = true;
  for (const auto& spec : fixtures()) {
    auto run = run_to_completion(init_run(spec));
    auto errors = replay(run.kb.trace(), run.universe, run.config, run.rules);
    auto reparsed = parse_spec(render_spec(spec));
    bool round_trip = reparsed.spec && *reparsed.spec == spec;
    ok = ok && errors.empty() && round_trip;
    notes.push_back(spec.name + ": " + std::to_string(run.kb.size()) + " nodes replayed, " +
                    std::to_string(errors.size()) + " failures; round trip " + (round_trip ? "equal" : "DIFFERS"));
    for (std::size_t i = 0; i < errors.size() && i < 5; ++i) notes.push_back("  " + errors[i]);
  }
  report(6, "trace replay soundness and DSL round trip", ok, notes);
}

void criterion7() {
  std::vector<std::string> notes;
  bool ok = true;
  for (const auto& spec : fixtures()) {
    auto export_once = [&] {
      auto run = run_to_completion(init_run(spec));
      return export_trace(run.kb.trace(), TraceFormat::Structured, Renderer(spec));
    };
    auto start = std::chrono::steady_clock::now();
    std::string first = export_once();
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string second = export_once();
    bool same = first == second;
    bool fast = seconds < 5.0;
    ok = ok && same && fast;
    std::ostringstream line;
    line << spec.name << ": " << first.size() << " bytes, " << (same ? "identical" : "DIFFER") << ", run took "
         << seconds << " s";
    notes.push_back(line.str());
  }
  report(7, "deterministic structured trace export (and each run under 5 s)", ok, notes);
}

}  // namespace

int main() {
  void (*criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7};
  for (int i = 0; i < 7; ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(i + 1, std::string("exception: ") + e.what(), false, {});
    }
  }
  std::cout << (failures ? "FAILED " : "all criteria passed") << (failures ? std::to_string(failures) : "") << "\n";
  return failures;
}
