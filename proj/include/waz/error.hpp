#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace waz {

enum class ErrorKind {
  DomainViolation,
  NonFinite,
  SingularJacobian,
  NotDifferentiable,
  SyntaxError,
  ArityError,
  UnknownIdentifier,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the cause.
/// Parse errors carry a byte offset into the source text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(what), kind_(kind), offset_(offset) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
};

}  // namespace waz
