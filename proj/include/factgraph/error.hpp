#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace factgraph {

// Error vocabulary shared by every layer. The service and CLI render these
// codes verbatim, so the string names are part of the wire contract.
enum class ErrorCode {
  bad_request,
  syntax_error,
  missing_atom,
  atom_cap_exceeded,
  not_implication,
  antecedent_mismatch,
  dangling_reference,
  cycle_detected,
  malformed_proof,
  malformed_node,
  invalid_graph,
  not_a_node,
  unknown_author,
  unknown_user,
  unknown_message,
  unknown_target,
  unknown_premise,
  unknown_member,
  handle_taken,
  out_of_range,
  permission_denied,
  corrupt_event,
  io_error,
  not_found,
  internal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_request: return "bad_request";
    case ErrorCode::syntax_error: return "syntax_error";
    case ErrorCode::missing_atom: return "missing_atom";
    case ErrorCode::atom_cap_exceeded: return "atom_cap_exceeded";
    case ErrorCode::not_implication: return "not_implication";
    case ErrorCode::antecedent_mismatch: return "antecedent_mismatch";
    case ErrorCode::dangling_reference: return "dangling_reference";
    case ErrorCode::cycle_detected: return "cycle_detected";
    case ErrorCode::malformed_proof: return "malformed_proof";
    case ErrorCode::malformed_node: return "malformed_node";
    case ErrorCode::invalid_graph: return "invalid_graph";
    case ErrorCode::not_a_node: return "not_a_node";
    case ErrorCode::unknown_author: return "unknown_author";
    case ErrorCode::unknown_user: return "unknown_user";
    case ErrorCode::unknown_message: return "unknown_message";
    case ErrorCode::unknown_target: return "unknown_target";
    case ErrorCode::unknown_premise: return "unknown_premise";
    case ErrorCode::unknown_member: return "unknown_member";
    case ErrorCode::handle_taken: return "handle_taken";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::permission_denied: return "permission_denied";
    case ErrorCode::corrupt_event: return "corrupt_event";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

/// Inverse of to_string; unknown names map to internal.
constexpr ErrorCode error_code_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::internal); ++i) {
    if (to_string(static_cast<ErrorCode>(i)) == name) return static_cast<ErrorCode>(i);
  }
  return ErrorCode::internal;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }

  /// Name of the offending input field, empty when not attributable.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

/// Formula text that does not match the grammar. `offset` is the byte
/// position of the first token that could not be consumed.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::syntax_error,
              "syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// An error tied to a 1-based line of some line-oriented input (linear proof
/// text, event log).
class LineError : public Error {
 public:
  LineError(ErrorCode code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace factgraph
