// Knowledge bases, forward-chaining saturation and proof traces.

#ifndef GNY_ENGINE_HPP_
#define GNY_ENGINE_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gny/formulae.hpp"
#include "gny/rules.hpp"

namespace gny {

struct EngineConfig {
  int max_belief_depth = 3;
  int max_iterations = 10000;
  bool r6_enabled = false;
  bool commutative_asym = false;

  RuleOptions rule_options() const { return {r6_enabled, commutative_asym}; }
};

struct TraceNode {
  Statement statement;
  Justification why;
  std::vector<std::size_t> premises;  // indices of earlier nodes
};

// Nodes in derivation order; every premise index precedes its consumer.
struct ProofTrace {
  std::vector<TraceNode> nodes;

  std::optional<std::size_t> find(const Statement& s) const;
};

class IterationCapExceeded : public std::runtime_error {
 public:
  explicit IterationCapExceeded(int cap)
      : std::runtime_error("saturation did not converge within " + std::to_string(cap) + " rounds") {}
};

class NotInTrace : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Ground statements with first-derivation provenance. Lookups for rule
// premises go through an index keyed by the chain of statement kinds under
// the Believes prefix, refined by the subject formula when it is known.
class KnowledgeBase : public FactView {
 public:
  bool contains(const Statement& s) const override;
  void candidates(const Statement& pattern, const std::function<void(const Statement&)>& fn) const override;

  std::optional<std::size_t> find(const Statement& s) const;
  // Adds `s` unless present. Premises cited by `why` must already be present.
  // Returns true when the statement is new.
  bool add(const Statement& s, Justification why);

  std::size_t size() const { return trace_.nodes.size(); }
  const ProofTrace& trace() const { return trace_; }
  std::vector<Statement> statements() const;  // insertion order

 private:
  void index(std::size_t id);
  const std::vector<std::size_t>* bucket(const std::string& key) const;

  ProofTrace trace_;
  std::unordered_map<Statement, std::size_t> ids_;
  std::unordered_map<std::string, std::vector<std::size_t>> buckets_;
};

// Catalog rules (plus their Localize liftings within the depth cap) followed
// by the unlifted local rules, in the order saturation tries them.
std::vector<Rule> rule_schedule(const EngineConfig& config, const std::vector<Rule>& local_rules = {});

// Least fixed point of the schedule over `kb`, restricted to `universe`.
KnowledgeBase saturate(KnowledgeBase kb, const Universe& universe, const EngineConfig& config,
                       const std::vector<Rule>& local_rules = {});

// Backward slice proving `goal`, renumbered from 0; nothing if not derived.
std::optional<ProofTrace> holds_goal(const KnowledgeBase& kb, const Statement& goal);

// Indented derivation tree of `s`. Throws NotInTrace. `show` renders
// statements (plain rendering when empty).
std::string explain(const ProofTrace& trace, const Statement& s,
                    const std::function<std::string(const Statement&)>& show = {});

// Re-checks every rule node through instantiate(); returns one message per
// failing node (empty when the trace is sound).
std::vector<std::string> replay(const ProofTrace& trace, const Universe& universe, const EngineConfig& config,
                                const std::vector<Rule>& local_rules = {});

// Short provenance text: "J1", "T3+Localize", "assumed [ca.A]", ...
std::string describe(const Justification& why);

}  // namespace gny

#endif  // GNY_ENGINE_HPP_
