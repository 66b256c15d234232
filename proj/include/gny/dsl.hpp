// The .gny text format, statement rendering and trace export.
//
//   protocol NAME
//   options commutative-asym
//   principals A B C
//   declare
//     nonce N_A            (also: timestamp, key, tag, literal, keypair)
//     derive K_AB = F((N_A, T_A), N'_A)
//   assume
//     [label] A holds pub(K_C)
//     [label] when A sees pub(?K) then A believes fresh(pub(?K))
//   messages
//     M1: A -> B : (N_A, T_A)
//   goals
//     [label] A believes A shares K_AB with B
//
// `#` starts a comment; a trailing `\` joins the next line.

#ifndef GNY_DSL_HPP_
#define GNY_DSL_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gny/engine.hpp"
#include "gny/formulae.hpp"
#include "gny/protocol.hpp"

namespace gny {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 1;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;
};

// "3:14: expected ')' (expected: ')', ',')"
std::string format_error(const ParseError& e, const std::string& file = {});

struct ParseResult {
  std::optional<ProtocolSpec> spec;
  std::vector<ParseError> errors;
  bool ok() const { return spec.has_value(); }
};

ParseResult parse_spec(const std::string& text);

// Terms and statements against the declarations of `spec`; `*X` is accepted
// here (it appears in engine output) but not inside spec files.
struct StatementResult {
  std::optional<Statement> statement;
  std::vector<ParseError> errors;
};
struct TermResult {
  std::optional<Term> term;
  std::vector<ParseError> errors;
};
StatementResult parse_statement(const std::string& text, const ProtocolSpec& spec);
TermResult parse_term(const std::string& text, const ProtocolSpec& spec);

// Plain rendering, no abbreviations.
std::string render(const Term& t);
std::string render(const Statement& s);

// Rendering that folds `derive` abbreviations back into their names.
class Renderer {
 public:
  Renderer() = default;
  explicit Renderer(const ProtocolSpec& spec);

  std::string term(const Term& t) const;
  std::string statement(const Statement& s) const;
  std::function<std::string(const Statement&)> as_function() const;

 private:
  friend std::string render_spec(const ProtocolSpec& spec);
  std::string term(const Term& t, std::size_t alias_limit) const;
  std::vector<std::pair<Term, std::string>> aliases_;
};

std::string render_spec(const ProtocolSpec& spec);

enum class TraceFormat { Structured, DerivationText };

std::string export_trace(const ProofTrace& trace, TraceFormat format, const Renderer& renderer = {});
std::string export_report(const GoalReport& report, TraceFormat format, const Renderer& renderer = {});

// Reads a structured export back; throws std::invalid_argument on malformed
// input.
ProofTrace import_trace(const std::string& json_text, const ProtocolSpec& spec);

}  // namespace gny

#endif  // GNY_DSL_HPP_
