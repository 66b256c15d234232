// gny: check protocol specifications against their goals.
//
// Exit codes: 0 all goals proved, 1 some goal unproved (or statement not
// derived), 2 usage or parse error, 3 internal error.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gny/dsl.hpp"
#include "gny/engine.hpp"
#include "gny/protocol.hpp"
#include "gny/rules.hpp"

namespace {

constexpr int kProved = 0;
constexpr int kUnproved = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string source;
  std::string attack;
  std::string trace_file;
  std::string format = "text";
  int max_depth = 3;
  bool enable_r6 = false;
  bool no_commutative = false;
};

bool use_color() {
  const char* env = std::getenv("GNY_COLOR");
  std::string mode = env ? env : "auto";
  if (mode == "always") return true;
  if (mode == "never") return false;
  return isatty(fileno(stdout)) != 0;
}

std::string colorize(std::string text) {
  if (!use_color()) return text;
  auto paint = [&](const std::string& word, const char* code) {
    for (std::size_t pos = text.find(word); pos != std::string::npos; pos = text.find(word, pos)) {
      std::string painted = std::string(code) + word + "\033[0m";
      text.replace(pos, word.size(), painted);
      pos += painted.size();
    }
  };
  paint("UNPROVED", "\033[31m");
  paint("proved    ", "\033[32m");
  return text;
}

gny::ProtocolSpec load(const std::string& source) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) {
    try {
      return gny::fixture(source.substr(prefix.size()));
    } catch (const std::out_of_range& e) {
      throw UsageError(e.what());
    }
  }
  std::ifstream in(source);
  if (!in) throw UsageError("cannot read " + source);
  std::stringstream buf;
  buf << in.rdbuf();
  auto parsed = gny::parse_spec(buf.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << gny::format_error(e, source) << "\n";
    throw UsageError(std::to_string(parsed.errors.size()) + " error(s) in " + source);
  }
  return *parsed.spec;
}

gny::TraceFormat trace_format(const std::string& name) {
  return name == "structured" ? gny::TraceFormat::Structured : gny::TraceFormat::DerivationText;
}

gny::RunState run(const RunOptions& o, gny::ProtocolSpec& spec) {
  spec = load(o.source);
  if (!o.attack.empty()) {
    try {
      spec = gny::apply_attack(spec, gny::named_attack(spec, o.attack));
    } catch (const std::out_of_range& e) {
      throw UsageError(e.what());
    }
  }
  if (o.no_commutative) spec.commutative_asym = false;
  gny::EngineConfig config;
  config.max_belief_depth = o.max_depth;
  config.r6_enabled = o.enable_r6;
  try {
    return gny::run_to_completion(gny::init_run(spec, config));
  } catch (const gny::SpecError& e) {
    throw UsageError(e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

int cmd_check(const RunOptions& o) {
  gny::ProtocolSpec spec;
  auto state = run(o, spec);
  gny::Renderer renderer(spec);
  auto report = gny::check_goals(state);
  auto fmt = trace_format(o.format);
  std::string text = gny::export_report(report, fmt, renderer);
  std::cout << (fmt == gny::TraceFormat::Structured ? text : colorize(text));
  if (!o.trace_file.empty()) write_file(o.trace_file, gny::export_trace(state.kb.trace(), fmt, renderer));
  return report.all_proved() ? kProved : kUnproved;
}

int cmd_trace(const RunOptions& o) {
  gny::ProtocolSpec spec;
  auto state = run(o, spec);
  gny::Renderer renderer(spec);
  std::string text = gny::export_trace(state.kb.trace(), trace_format(o.format), renderer);
  if (o.trace_file.empty()) {
    std::cout << text;
  } else {
    write_file(o.trace_file, text);
  }
  return kProved;
}

int cmd_explain(const RunOptions& o, const std::string& statement) {
  gny::ProtocolSpec spec;
  auto state = run(o, spec);
  auto parsed = gny::parse_statement(statement, spec);
  if (!parsed.statement) {
    for (const auto& e : parsed.errors) std::cerr << gny::format_error(e, "<statement>") << "\n";
    return kUsage;
  }
  gny::Renderer renderer(spec);
  auto proof = gny::holds_goal(state.kb, *parsed.statement);
  if (!proof) {
    std::cerr << "not derivable: " << renderer.statement(*parsed.statement) << "\n";
    return kUnproved;
  }
  std::cout << gny::explain(*proof, *parsed.statement, renderer.as_function());
  return kProved;
}

int cmd_list(const std::string& what) {
  if (what == "rules") {
    for (const auto& r : gny::catalog().rules) {
      std::cout << r.name << ": ";
      for (std::size_t i = 0; i < r.premises.size(); ++i) std::cout << (i ? ", " : "") << gny::render(r.premises[i]);
      std::cout << "  |-  ";
      for (std::size_t i = 0; i < r.conclusions.size(); ++i) {
        std::cout << (i ? ", " : "") << gny::render(r.conclusions[i]);
      }
      std::cout << "\n";
    }
    if (gny::catalog().localize_enabled) std::cout << "Localize: any rule may be applied under a prefix P believes\n";
    return kProved;
  }
  if (what == "fixtures") {
    for (const auto& f : gny::fixtures()) {
      std::cout << f.name << "  (" << f.messages.size() << " messages, " << f.goals.size() << " goals)\n";
    }
    return kProved;
  }
  if (what == "attacks") {
    for (const auto& a : gny::attack_names()) std::cout << a << "\n";
    return kProved;
  }
  std::cerr << "unknown list '" << what << "' (expected rules, fixtures or attacks)\n";
  return kUsage;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool with_attack) {
  cmd->add_option("source", o.source, "spec file or builtin:NAME")->required();
  if (with_attack) cmd->add_option("--attack", o.attack, "apply a named attack before running");
  cmd->add_option("--format", o.format, "text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  cmd->add_option("--max-belief-depth", o.max_depth, "belief nesting cap")->check(CLI::Range(0, 8));
  cmd->add_flag("--enable-r6", o.enable_r6, "enable the hash-recognition rule R6");
  cmd->add_flag("--no-commutative-asym", o.no_commutative, "ignore the spec's commutative-asym option");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-logic verification of authentication protocols"};
  app.require_subcommand(1);

  RunOptions o;
  std::string statement;
  std::string attack_name;
  std::string list_what;

  auto* check = app.add_subcommand("check", "run a protocol and report its goals");
  add_run_options(check, o, true);
  check->add_option("--trace", o.trace_file, "also write the full derivation trace to FILE");

  auto* trace = app.add_subcommand("trace", "print the full derivation trace");
  add_run_options(trace, o, true);
  trace->add_option("--output", o.trace_file, "write to FILE instead of stdout");

  auto* explain = app.add_subcommand("explain", "show how a statement was derived");
  add_run_options(explain, o, true);
  explain->add_option("statement", statement, "statement in spec syntax")->required();

  auto* attack = app.add_subcommand("attack", "run a protocol under a named attack");
  add_run_options(attack, o, false);
  attack->add_option("name", attack_name, "attack name")->required();

  auto* list = app.add_subcommand("list", "list rules, fixtures or attacks");
  list->add_option("what", list_what, "rules, fixtures or attacks")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kProved : kUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*trace) return cmd_trace(o);
    if (*explain) return cmd_explain(o, statement);
    if (*attack) {
      o.attack = attack_name;
      return cmd_check(o);
    }
    if (*list) return cmd_list(list_what);
  } catch (const UsageError& e) {
    std::cerr << "gny: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "gny: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
