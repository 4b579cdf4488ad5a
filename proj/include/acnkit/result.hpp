#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace acnkit {

enum class ErrorCode {
  kCapacity,
  kBounds,
  kValueTooWide,
  kConstraint,
  kDecodeConstraint,
  kCharOutOfRange,
  kStringTooLong,
  kNullPatternCollision,
  kMissingTerminator,
  kCharNotInAlphabet,
  kLengthMismatch,
  kShapeMismatch,
  kDeterminant,
  kInsufficientBuffer,
  kSyntax,
  kResolve,
  kCompile,
  kPlanFormat,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Position inside a source text. Lines and columns are 1-based.
struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
};

// Which input a diagnostic points into.
enum class SourceKind { kNone, kAsn1, kAcn, kValue, kPlan };

struct Diagnostic {
  SourceSpan span;
  std::string message;
  SourceKind source = SourceKind::kNone;
};

// "line:col: message", prefixed with `file:` when file is non-empty.
std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

struct Error {
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
  std::vector<Diagnostic> diagnostics;

  std::string describe() const;
  Error& with_source(SourceKind kind);
};

template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << std::forward<Args>(args));
  return os.str();
}

template <typename... Args>
Error make_error(ErrorCode code, Args&&... args) {
  return Error{code, cat(std::forward<Args>(args)...), {}};
}

// Value-or-error. Operations never throw; failures travel as Error values.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : data_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : data_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<0>(data_); }
  const T& value() const& { return std::get<0>(data_); }
  T&& value() && { return std::get<0>(std::move(data_)); }

  const Error& error() const& { return std::get<1>(data_); }
  Error&& error() && { return std::get<1>(std::move(data_)); }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, Error> data_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)) {}

  bool ok() const { return !error_.has_value(); }
  explicit operator bool() const { return ok(); }

  const Error& error() const& { return *error_; }
  Error&& error() && { return std::move(*error_); }

 private:
  std::optional<Error> error_;
};

using Status = Result<void>;

}  // namespace acnkit

#define ACNKIT_CONCAT_INNER(a, b) a##b
#define ACNKIT_CONCAT(a, b) ACNKIT_CONCAT_INNER(a, b)

#define ACNKIT_TRY(expr)                      \
  do {                                        \
    auto acnkit_try_status_ = (expr);         \
    if (!acnkit_try_status_.ok()) {           \
      return std::move(acnkit_try_status_).error(); \
    }                                         \
  } while (0)

#define ACNKIT_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                                 \
  if (!tmp.ok()) return std::move(tmp).error();      \
  lhs = std::move(tmp).value()

#define ACNKIT_ASSIGN_OR_RETURN(lhs, expr) \
  ACNKIT_ASSIGN_OR_RETURN_IMPL(ACNKIT_CONCAT(acnkit_result_, __LINE__), lhs, expr)
