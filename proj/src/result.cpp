#include "acnkit/result.hpp"

namespace acnkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kValueTooWide: return "value-too-wide";
    case ErrorCode::kConstraint: return "constraint-violation";
    case ErrorCode::kDecodeConstraint: return "decode-constraint";
    case ErrorCode::kCharOutOfRange: return "char-out-of-range";
    case ErrorCode::kStringTooLong: return "string-too-long";
    case ErrorCode::kNullPatternCollision: return "null-pattern-collision";
    case ErrorCode::kMissingTerminator: return "missing-terminator";
    case ErrorCode::kCharNotInAlphabet: return "char-not-in-alphabet";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kDeterminant: return "determinant";
    case ErrorCode::kInsufficientBuffer: return "insufficient-buffer";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kResolve: return "resolve";
    case ErrorCode::kCompile: return "compile";
    case ErrorCode::kPlanFormat: return "plan-format";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  if (file.empty()) return cat(d.span.line, ':', d.span.column, ": ", d.message);
  return cat(file, ':', d.span.line, ':', d.span.column, ": ", d.message);
}

Error& Error::with_source(SourceKind kind) {
  for (auto& d : diagnostics) {
    if (d.source == SourceKind::kNone) d.source = kind;
  }
  return *this;
}

std::string Error::describe() const {
  std::string out = cat(to_string(code), ": ", message);
  for (const auto& d : diagnostics) out += cat("\n  ", format_diagnostic(d));
  return out;
}

}  // namespace acnkit
