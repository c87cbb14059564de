#include "cartan/errors.hpp"

namespace cartan {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::Arity: return "ArityError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::NotRiemannian: return "NotRiemannian";
    case ErrorKind::ValenceMismatch: return "ValenceMismatch";
    case ErrorKind::SamplingExhausted: return "SamplingExhausted";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

SyntaxError::SyntaxError(std::size_t offset, const std::string& message)
    : Error(ErrorKind::Syntax,
            "syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

UnknownIdentifier::UnknownIdentifier(std::string name, std::size_t offset)
    : Error(ErrorKind::UnknownIdentifier,
            "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
      name_(std::move(name)),
      offset_(offset) {}

IndexOutOfRange::IndexOutOfRange(std::string name, int dim, std::size_t offset)
    : Error(ErrorKind::IndexOutOfRange,
            "coordinate '" + name + "' out of range for n = " + std::to_string(dim)),
      name_(std::move(name)),
      dim_(dim),
      offset_(offset) {}

ArityError::ArityError(std::string func, int expected, int got, std::size_t offset)
    : Error(ErrorKind::Arity,
            func + " expects " + std::to_string(expected) + " argument(s), got " +
                std::to_string(got) + " at offset " + std::to_string(offset)),
      func_(std::move(func)) {}

NotPositiveDefinite::NotPositiveDefinite(double tau, double bound)
    : Error(ErrorKind::NotPositiveDefinite,
            "lifted metric not positive definite at tau = " + std::to_string(tau) +
                " (alpha + 2 tau v vanishes at tau = " + std::to_string(bound) + ")"),
      tau_(tau),
      bound_(bound) {}

}  // namespace cartan
