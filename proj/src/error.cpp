#include "waz/error.hpp"

namespace waz {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NotDifferentiable: return "NotDifferentiable";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace waz
