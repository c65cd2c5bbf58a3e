#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ram/model.hpp"

namespace ram {

struct SourceSpan {
  std::string file;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  int length = 1;

  auto operator<=>(const SourceSpan&) const = default;
};

struct ParseDiagnostic {
  SourceSpan span;
  Severity severity = Severity::Error;
  std::string message;

  auto operator<=>(const ParseDiagnostic&) const = default;
};

std::string format_diagnostic(const ParseDiagnostic& d);

struct ParseResult {
  std::optional<CausalFactorModel> model;  // engaged iff no error diagnostics
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

/// Parse a `.ram` model file. Deterministic; accepts LF and CRLF input and
/// `#` line comments. On success the returned model passes validate().
ParseResult parse_model(std::string_view text, std::string file = "<input>");

/// Canonical text form: header comment, then declarations sorted by id,
/// one per line, LF endings. parse_model(serialize_model(m)) is
/// structurally equal to m. Throws std::invalid_argument when the model
/// does not validate.
std::string serialize_model(const CausalFactorModel& model);

struct ProcessParseResult {
  ProcessPtr expr;  // null when diagnostics contain an error
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return expr != nullptr; }
};

/// Parse a process expression. Without a model every leaf is an Atom; the
/// model-aware overload turns leaves naming declared processes into Refs
/// and reports unknown names.
ProcessParseResult parse_process_expr(std::string_view text, std::string file = "<expr>");
ProcessParseResult parse_process_expr(std::string_view text, const CausalFactorModel& model,
                                      std::string file = "<expr>");

/// Canonical text of an expression (ASCII operators, minimal parentheses).
std::string process_text(const ProcessPtr& expr);

}  // namespace ram
