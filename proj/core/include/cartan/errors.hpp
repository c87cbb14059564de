#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cartan {

enum class ErrorKind {
  Syntax,
  UnknownIdentifier,
  IndexOutOfRange,
  Arity,
  Domain,
  DivisionByZero,
  SingularMetric,
  NotPositiveDefinite,
  NotApplicable,
  NotRiemannian,
  ValenceMismatch,
  SamplingExhausted,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse diagnostics carry the 0-based byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string name, std::size_t offset);
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class IndexOutOfRange : public Error {
 public:
  IndexOutOfRange(std::string name, int dim, std::size_t offset);
  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  int dim_;
  std::size_t offset_;
};

class ArityError : public Error {
 public:
  ArityError(std::string func, int expected, int got, std::size_t offset);
  const std::string& func() const noexcept { return func_; }

 private:
  std::string func_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error(ErrorKind::DivisionByZero, "division by zero") {}
};

class SingularMetric : public Error {
 public:
  explicit SingularMetric(const std::string& what)
      : Error(ErrorKind::SingularMetric, what) {}
};

// Raised when alpha + 2*tau*v <= 0, i.e. the lifted metric leaves the
// positive cone (outside the tube when c > 0). bound is the tau at which
// alpha + 2*tau*v vanishes.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(double tau, double bound);
  double tau() const noexcept { return tau_; }
  double bound() const noexcept { return bound_; }

 private:
  double tau_;
  double bound_;
};

class NotApplicable : public Error {
 public:
  explicit NotApplicable(const std::string& what)
      : Error(ErrorKind::NotApplicable, what) {}
};

class NotRiemannian : public Error {
 public:
  explicit NotRiemannian(double max_cartan)
      : Error(ErrorKind::NotRiemannian,
              "Cartan tensor does not vanish (max |C| = " +
                  std::to_string(max_cartan) + ")"),
        max_cartan_(max_cartan) {}
  double max_cartan() const noexcept { return max_cartan_; }

 private:
  double max_cartan_;
};

class ValenceMismatch : public Error {
 public:
  explicit ValenceMismatch(const std::string& what)
      : Error(ErrorKind::ValenceMismatch, what) {}
};

class SamplingExhausted : public Error {
 public:
  explicit SamplingExhausted(long rejections)
      : Error(ErrorKind::SamplingExhausted,
              "sampling exhausted after " + std::to_string(rejections) +
                  " consecutive rejections") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace cartan
