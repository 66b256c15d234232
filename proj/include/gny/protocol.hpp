// Protocol specifications, runs, goal reports, attacks and built-in fixtures.

#ifndef GNY_PROTOCOL_HPP_
#define GNY_PROTOCOL_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gny/engine.hpp"
#include "gny/formulae.hpp"
#include "gny/rules.hpp"

namespace gny {

struct AtomDecl {
  std::string name;
  AtomKind kind = AtomKind::Literal;
  friend bool operator==(const AtomDecl&, const AtomDecl&) = default;
};

// `derive NAME = term`: a named abbreviation, expanded wherever it is used.
struct DerivedDecl {
  std::string name;
  Term definition;
  friend bool operator==(const DerivedDecl&, const DerivedDecl&) = default;
};

// A precondition. With `when` empty it asserts `then` outright; name
// variables in such facts range over the declared principals and keypairs.
// With `when` present it is a conditional rule local to this protocol.
struct Assumption {
  std::string label;
  std::vector<Statement> when;
  std::vector<Statement> then;

  bool conditional() const { return !when.empty(); }
  friend bool operator==(const Assumption&, const Assumption&) = default;
};

struct Message {
  std::string label;
  Name sender;
  Name receiver;
  Term term;
  friend bool operator==(const Message&, const Message&) = default;
};

struct Goal {
  std::string label;
  Statement statement;
  friend bool operator==(const Goal&, const Goal&) = default;
};

struct ProtocolSpec {
  std::string name;
  std::vector<std::string> principals;
  std::vector<AtomDecl> atoms;
  std::vector<std::string> keypairs;
  std::vector<DerivedDecl> derived;
  std::vector<Assumption> assumptions;
  std::vector<Message> messages;
  std::vector<Goal> goals;
  bool commutative_asym = false;

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string label, const std::string& what)
      : std::invalid_argument(label.empty() ? what : "[" + label + "] " + what), label_(std::move(label)) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class RunComplete : public std::logic_error {
 public:
  RunComplete() : std::logic_error("run already complete") {}
};

// Throws SpecError for undeclared symbols, unknown principals, duplicate
// labels or fact assumptions with term/statement variables.
void validate(const ProtocolSpec& spec);

// Subterm closure of message, assumption and goal terms, derived definitions
// and both halves of every declared keypair.
Universe build_universe(const ProtocolSpec& spec);

// Preconditions as ground statements (schemas expanded), with their labels.
std::vector<std::pair<Statement, std::string>> precondition_facts(const ProtocolSpec& spec);
std::vector<Rule> local_rules(const ProtocolSpec& spec);

struct RunState {
  ProtocolSpec spec;
  EngineConfig config;
  Universe universe;
  std::vector<Rule> rules;  // local conditional rules
  KnowledgeBase kb;
  std::size_t cursor = 0;
  // kb.size() after init and after each message; kb prefixes are the
  // knowledge at each step.
  std::vector<std::size_t> checkpoints;

  bool complete() const { return cursor >= spec.messages.size(); }
  // Statements known once `messages_done` messages were delivered.
  std::vector<Statement> known_after(std::size_t messages_done) const;
};

// The spec's commutative flag is or-ed into config.commutative_asym.
RunState init_run(const ProtocolSpec& spec, EngineConfig config = {});
RunState step(RunState run);
RunState run_to_completion(RunState run);

struct GoalResult {
  std::string label;
  Statement statement;
  bool proved = false;
  std::optional<ProofTrace> proof;
};

struct GoalReport {
  std::string protocol;
  std::vector<GoalResult> goals;
  bool all_proved() const;
};

GoalReport check_goals(const RunState& run);

struct ReplaceMessage {
  std::string message;  // label
  Term term;
  std::optional<Name> sender;  // the party that actually injects it
};
struct DropMessage {
  std::string message;
};
struct RemovePrecondition {
  std::string label;
};
// Declares a principal holding `grants`; keypair labels mentioned in them
// are declared as well.
struct AddPrincipal {
  std::string name;
  std::vector<Term> grants;
};
using AttackTransform = std::variant<ReplaceMessage, DropMessage, RemovePrecondition, AddPrincipal>;

// Throws SpecError on unknown message or precondition labels.
ProtocolSpec apply_attack(const ProtocolSpec& spec, const std::vector<AttackTransform>& transforms);

// Built-in attack transforms for a fixture ("cert-substitution").
// Throws std::out_of_range if the attack is unknown for that spec.
std::vector<AttackTransform> named_attack(const ProtocolSpec& spec, const std::string& attack);
std::vector<std::string> attack_names();

// tls-named-server, tls-anonymous-server, tls-mutual, kerberos.
const std::vector<ProtocolSpec>& fixtures();
const ProtocolSpec& fixture(const std::string& name);  // throws std::out_of_range
// The .gny source a fixture was parsed from.
const std::string& fixture_source(const std::string& name);

}  // namespace gny

#endif  // GNY_PROTOCOL_HPP_
