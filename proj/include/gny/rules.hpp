// The inference rule catalog and generic rule application.
//
// A rule is data: display premises/conclusions (what `gny list rules` prints)
// plus one or more executable forms. A form is a short plan of steps run over
// a set of partial bindings; surviving bindings produce its conclusions.

#ifndef GNY_RULES_HPP_
#define GNY_RULES_HPP_

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gny/formulae.hpp"

namespace gny {

using Universe = std::set<Term>;

enum class StepKind {
  Premise,      // match `premise` against a fact (membership test once ground)
  Seed,         // bind by matching `pattern` against universe terms
  Slices,       // dst := each component / in-universe contiguous slice of src
  Parts,        // dst := each component of a Concat, arg of a Func, body of Succ
  AllParts,     // `premise` (with ?_) must hold for every part of src
  FuncInverse,  // dst := one Func arg of src, `premise` holding for the others
  SplitSecret,  // src body -> (dst: rest, dst2: secret)
  Require,      // side condition on src
  AnyUniverse,  // dst := every universe term
};

enum class Cond {
  NotStarred,
  IsConcat,
  IsFunc,
  IsTupleOrFunc,
  IsComposite,  // Concat, Func or Succ
  CommutativeAsym,
  R6Enabled,
};

struct Step {
  StepKind kind = StepKind::Premise;
  Statement premise;
  Term pattern;
  std::string src;
  std::string dst;
  std::string dst2;
  Cond cond = Cond::NotStarred;
};

struct Conclusion {
  Statement pattern;
  // The subject term must already be a universe member.
  bool constructive = false;
};

struct Form {
  std::vector<Step> steps;
  std::vector<Conclusion> conclusions;
};

struct Rule {
  std::string name;
  std::vector<Statement> premises;     // as printed
  std::vector<Statement> conclusions;  // as printed
  std::vector<Form> forms;
  int lift = 0;        // number of Localize layers applied
  bool local = false;  // fixture-supplied conditional rule
};

struct RuleCatalog {
  std::vector<Rule> rules;
  bool localize_enabled = true;

  const Rule& lookup(const std::string& name) const;  // throws std::out_of_range
  bool contains(const std::string& name) const;
};

struct RuleOptions {
  bool r6_enabled = false;
  bool commutative_asym = false;
};

enum class Origin { Precondition, Receipt, Author, Rule };

const char* to_string(Origin o);

struct Justification {
  Origin origin = Origin::Rule;
  std::string rule;  // rule name for Origin::Rule
  int lift = 0;
  std::string label;  // precondition label or message label
  std::vector<Statement> premises;

  friend bool operator==(const Justification&, const Justification&) = default;
};

struct Derivation {
  Statement conclusion;
  Justification why;
};

// Read access to a fact set. candidates() may return a superset of the facts
// matching `pattern`; order must be deterministic.
class FactView {
 public:
  virtual ~FactView() = default;
  virtual bool contains(const Statement& s) const = 0;
  virtual void candidates(const Statement& pattern,
                          const std::function<void(const Statement&)>& fn) const = 0;
};

// Unindexed view over a sorted set; scans everything.
class SetView : public FactView {
 public:
  explicit SetView(const std::set<Statement>& facts) : facts_(facts) {}
  bool contains(const Statement& s) const override { return facts_.count(s) != 0; }
  void candidates(const Statement&, const std::function<void(const Statement&)>& fn) const override {
    for (const auto& s : facts_) fn(s);
  }

 private:
  const std::set<Statement>& facts_;
};

// The 41 rules of the logic in printed order (T, P, F, R, I, J).
const RuleCatalog& catalog();

// Rule wrapped in `layers` Believes levels (the Localize meta-rule).
Rule lift(const Rule& rule, int layers);

// Conditional precondition `when premises then conclusions`, as a rule.
Rule conditional_rule(std::string label, std::vector<Statement> when, std::vector<Statement> then);

// Every conclusion of `rule` derivable from `facts`, in deterministic order.
std::vector<Derivation> instantiate(const Rule& rule, const FactView& facts, const Universe& universe,
                                    const RuleOptions& options = {});

// Term whose membership in the universe bounds a constructive conclusion:
// the formula slot after stripping Believes layers.
const Term* subject_term(const Statement& s);

// Name displayed for a rule application: "T3" or "T3+Localize".
std::string display_name(const std::string& rule, int lift);

}  // namespace gny

#endif  // GNY_RULES_HPP_
