#include "gny/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gny/dsl.hpp"

namespace gny {

std::optional<std::size_t> ProofTrace::find(const Statement& s) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].statement == s) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// KnowledgeBase

namespace {

// Walks the Believes chain; returns the core statement and the prefix key.
const Statement& core_of(const Statement& s, std::string& prefix) {
  const Statement* cur = &s;
  while (cur->is(StmtKind::Believes)) {
    prefix += "bel.";
    cur = &cur->inner();
  }
  return *cur;
}

}  // namespace

bool KnowledgeBase::contains(const Statement& s) const { return ids_.count(s) != 0; }

std::optional<std::size_t> KnowledgeBase::find(const Statement& s) const {
  auto it = ids_.find(s);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeBase::index(std::size_t id) {
  const Statement& s = trace_.nodes[id].statement;
  std::string prefix;
  const Statement& core = core_of(s, prefix);
  // Every Believes prefix gets a catch-all bucket for statement variables.
  std::string walk;
  buckets_[walk + "*"].push_back(id);
  for (std::size_t pos = 0; pos < prefix.size(); pos += 4) {
    walk += "bel.";
    buckets_[walk + "*"].push_back(id);
  }
  std::string full = prefix + to_string(core.kind());
  buckets_[full].push_back(id);
  if (const Term* subj = subject_term(core)) buckets_[full + "|" + subj->canonical_key()].push_back(id);
}

const std::vector<std::size_t>* KnowledgeBase::bucket(const std::string& key) const {
  auto it = buckets_.find(key);
  return it == buckets_.end() ? nullptr : &it->second;
}

void KnowledgeBase::candidates(const Statement& pattern,
                               const std::function<void(const Statement&)>& fn) const {
  std::string prefix;
  const Statement& core = core_of(pattern, prefix);
  std::string key;
  if (core.is(StmtKind::MetaStmt)) {
    key = prefix + "*";
  } else {
    key = prefix + to_string(core.kind());
    const Term* subj = subject_term(core);
    if (subj && subj->is_ground()) key += "|" + subj->canonical_key();
  }
  const auto* ids = bucket(key);
  if (!ids) return;
  // The bucket may grow while callers react; iterate a fixed extent.
  std::size_t n = ids->size();
  for (std::size_t i = 0; i < n; ++i) fn(trace_.nodes[(*ids)[i]].statement);
}

bool KnowledgeBase::add(const Statement& s, Justification why) {
  if (ids_.count(s)) return false;
  TraceNode node;
  node.statement = s;
  for (const auto& p : why.premises) {
    auto it = ids_.find(p);
    if (it == ids_.end()) throw std::logic_error("premise not in knowledge base: " + render(p));
    node.premises.push_back(it->second);
  }
  node.why = std::move(why);
  std::size_t id = trace_.nodes.size();
  trace_.nodes.push_back(std::move(node));
  ids_.emplace(s, id);
  index(id);
  return true;
}

std::vector<Statement> KnowledgeBase::statements() const {
  std::vector<Statement> out;
  out.reserve(trace_.nodes.size());
  for (const auto& n : trace_.nodes) out.push_back(n.statement);
  return out;
}

// ---------------------------------------------------------------------------
// Saturation

namespace {

int min_conclusion_depth(const Rule& r) {
  int d = 1 << 20;
  for (const auto& f : r.forms) {
    for (const auto& c : f.conclusions) d = std::min(d, c.pattern.belief_depth());
  }
  return d;
}

}  // namespace

std::vector<Rule> rule_schedule(const EngineConfig& config, const std::vector<Rule>& local_rules) {
  std::vector<Rule> out;
  const auto& cat = catalog();
  int max_lift = cat.localize_enabled ? config.max_belief_depth : 0;
  for (const auto& r : cat.rules) {
    int base = min_conclusion_depth(r);
    for (int l = 0; l <= max_lift && base + l <= config.max_belief_depth; ++l) out.push_back(lift(r, l));
  }
  for (const auto& r : local_rules) out.push_back(r);
  return out;
}

KnowledgeBase saturate(KnowledgeBase kb, const Universe& universe, const EngineConfig& config,
                       const std::vector<Rule>& local_rules) {
  const auto schedule = rule_schedule(config, local_rules);
  const RuleOptions options = config.rule_options();
  for (int round = 0; round < config.max_iterations; ++round) {
    bool changed = false;
    for (const auto& rule : schedule) {
      for (auto& d : instantiate(rule, kb, universe, options)) {
        if (d.conclusion.belief_depth() > config.max_belief_depth) continue;
        if (kb.add(d.conclusion, std::move(d.why))) changed = true;
      }
    }
    if (!changed) return kb;
  }
  throw IterationCapExceeded(config.max_iterations);
}

// ---------------------------------------------------------------------------
// Queries

std::optional<ProofTrace> holds_goal(const KnowledgeBase& kb, const Statement& goal) {
  auto root = kb.find(normalize(goal));
  if (!root) return std::nullopt;
  const auto& nodes = kb.trace().nodes;
  std::set<std::size_t> keep;
  std::vector<std::size_t> stack{*root};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    if (!keep.insert(id).second) continue;
    for (auto p : nodes[id].premises) stack.push_back(p);
  }
  std::map<std::size_t, std::size_t> renumber;
  ProofTrace out;
  for (auto id : keep) {
    renumber[id] = out.nodes.size();
    TraceNode n = nodes[id];
    for (auto& p : n.premises) p = renumber.at(p);
    out.nodes.push_back(std::move(n));
  }
  return out;
}

std::string describe(const Justification& why) {
  switch (why.origin) {
    case Origin::Precondition: return "assumed [" + why.label + "]";
    case Origin::Receipt: return "received " + why.label;
    case Origin::Author: return "authored " + why.label;
    case Origin::Rule: return "by " + display_name(why.rule, why.lift);
  }
  return {};
}

std::string explain(const ProofTrace& trace, const Statement& s,
                    const std::function<std::string(const Statement&)>& show) {
  auto text = [&](const Statement& x) { return show ? show(x) : render(x); };
  auto root = trace.find(normalize(s));
  if (!root) throw NotInTrace("not in trace: " + text(s));
  std::ostringstream out;
  std::set<std::size_t> shown;
  std::function<void(std::size_t, int)> walk = [&](std::size_t id, int depth) {
    const auto& n = trace.nodes[id];
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << text(n.statement);
    if (!shown.insert(id).second && !n.premises.empty()) {
      out << "  (see above)\n";
      return;
    }
    out << "  -- " << describe(n.why) << "\n";
    for (auto p : n.premises) walk(p, depth + 1);
  };
  walk(*root, 0);
  return out.str();
}

std::vector<std::string> replay(const ProofTrace& trace, const Universe& universe, const EngineConfig& config,
                                const std::vector<Rule>& local_rules) {
  std::vector<std::string> errors;
  const RuleOptions options = config.rule_options();
  std::map<std::pair<std::string, int>, Rule> lifted;
  auto rule_for = [&](const std::string& name, int l) -> const Rule* {
    auto key = std::make_pair(name, l);
    auto it = lifted.find(key);
    if (it != lifted.end()) return &it->second;
    const Rule* base = nullptr;
    if (catalog().contains(name)) {
      base = &catalog().lookup(name);
    } else {
      for (const auto& r : local_rules) {
        if (r.name == name) base = &r;
      }
    }
    if (!base) return nullptr;
    return &lifted.emplace(key, lift(*base, l)).first->second;
  };

  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    const auto& n = trace.nodes[i];
    std::string where = "node " + std::to_string(i) + " (" + render(n.statement) + ")";
    if (n.premises.size() != n.why.premises.size()) {
      errors.push_back(where + ": premise count mismatch");
      continue;
    }
    bool ordered = true;
    for (std::size_t k = 0; k < n.premises.size(); ++k) {
      if (n.premises[k] >= i || trace.nodes[n.premises[k]].statement != n.why.premises[k]) ordered = false;
    }
    if (!ordered) {
      errors.push_back(where + ": premise does not precede its consumer");
      continue;
    }
    if (n.why.origin != Origin::Rule) continue;
    const Rule* rule = rule_for(n.why.rule, n.why.lift);
    if (!rule) {
      errors.push_back(where + ": unknown rule " + n.why.rule);
      continue;
    }
    std::set<Statement> facts(n.why.premises.begin(), n.why.premises.end());
    SetView view(facts);
    bool found = false;
    for (const auto& d : instantiate(*rule, view, universe, options)) {
      if (d.conclusion == n.statement) {
        found = true;
        break;
      }
    }
    if (!found) errors.push_back(where + ": " + display_name(n.why.rule, n.why.lift) + " does not reproduce it");
  }
  return errors;
}

}  // namespace gny
