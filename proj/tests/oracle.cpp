#include "oracle.hpp"

namespace gny::testing {

std::set<Statement> brute_force_closure(std::set<Statement> facts, const Universe& universe,
                                        const RuleOptions& options, const std::vector<Rule>& local, int depth) {
  std::vector<Rule> rules;
  for (const auto& r : catalog().rules) {
    for (int l = 0; l <= depth; ++l) rules.push_back(lift(r, l));
  }
  rules.insert(rules.end(), local.begin(), local.end());
  while (true) {
    std::set<Statement> fresh;
    SetView view(facts);
    for (const auto& r : rules) {
      for (const auto& d : instantiate(r, view, universe, options)) {
        if (d.conclusion.belief_depth() <= depth && !facts.count(d.conclusion)) fresh.insert(d.conclusion);
      }
    }
    if (fresh.empty()) return facts;
    facts.insert(fresh.begin(), fresh.end());
  }
}

std::vector<std::set<Statement>> oracle_run(const ProtocolSpec& spec, int depth) {
  const Universe universe = build_universe(spec);
  const std::vector<Rule> local = local_rules(spec);
  const RuleOptions options{false, spec.commutative_asym};
  std::set<Statement> facts;
  for (const auto& [s, label] : precondition_facts(spec)) facts.insert(s);
  std::vector<std::set<Statement>> out;
  facts = brute_force_closure(std::move(facts), universe, options, local, depth);
  out.push_back(facts);
  for (std::size_t i = 0; i < spec.messages.size(); ++i) {
    const Message& m = spec.messages[i];
    bool own = false;
    for (std::size_t j = 0; j <= i; ++j) {
      own = own || (spec.messages[j].sender == m.receiver && spec.messages[j].term == m.term);
    }
    facts.insert(Statement::holds(m.sender, m.term));
    facts.insert(Statement::sees(m.receiver, own ? m.term : Term::starred(m.term)));
    facts = brute_force_closure(std::move(facts), universe, options, local, depth);
    out.push_back(facts);
  }
  return out;
}

std::vector<std::set<Statement>> engine_run(const ProtocolSpec& spec, int depth) {
  EngineConfig config;
  config.max_belief_depth = depth;
  auto run = run_to_completion(init_run(spec, config));
  std::vector<std::set<Statement>> out;
  for (std::size_t i = 0; i < run.checkpoints.size(); ++i) {
    auto known = run.known_after(i);
    out.emplace_back(known.begin(), known.end());
  }
  return out;
}

}  // namespace gny::testing
