#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/errors.hpp"
#include "cartan/jet.hpp"
#include "cartan/point.hpp"

namespace cartan {

enum class NodeKind { Literal, Coord, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class CoordFamily { X, P };
enum class Func { Sqrt, Exp, Log, Sin, Cos, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Literal;
  double value = 0.0;                  // Literal
  CoordFamily family = CoordFamily::X;  // Coord
  int index = 0;                       // Coord, 0-based
  Func func = Func::Sqrt;              // Call
  std::vector<NodePtr> args;           // operands
  std::size_t offset = 0;              // byte offset in the source
};

/// Immutable parsed fundamental function over x1..xn, p1..pn.
class Expr {
 public:
  Expr(NodePtr root, int dim) : root_(std::move(root)), dim_(dim) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int dim() const noexcept { return dim_; }

 private:
  NodePtr root_;
  int dim_;
};

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+') factor | atom ('^' factor)?
///   atom   := number | x<k> | p<k> | func '(' expr (',' expr)* ')' | '(' expr ')'
Expr parse(std::string_view source, int n);

/// Fully parenthesised text that reparses to a structurally identical tree.
std::string to_string(const Expr& e);
bool structurally_equal(const Node& a, const Node& b);

/// K^2 from K. A top-level sqrt(q) is unwrapped to q so K^2 stays smooth
/// where the jets need it; otherwise the tree is K*K.
Expr square(const Expr& k);

template <class S>
struct EvalEnv {
  std::vector<S> x;
  std::vector<S> p;
};

namespace detail {

inline double checked_sqrt(double v) {
  if (!(v > 0.0)) throw DomainError("sqrt of non-positive value");
  return std::sqrt(v);
}
inline double checked_log(double v) {
  if (!(v > 0.0)) throw DomainError("log of non-positive value");
  return std::log(v);
}
inline double checked_div(double a, double b) {
  if (b == 0.0) throw DivisionByZero();
  return a / b;
}
inline double checked_pow(double a, double e) {
  if (std::nearbyint(e) == e && std::abs(e) <= 64.0) {
    if (e < 0 && a == 0.0) throw DivisionByZero();
    double r = 1.0;
    double b = a;
    auto k = static_cast<unsigned>(std::abs(e));
    while (k) {
      if (k & 1u) r *= b;
      k >>= 1u;
      if (k) b *= b;
    }
    return e < 0 ? 1.0 / r : r;
  }
  if (!(a > 0.0)) throw DomainError("non-integer power of non-positive value");
  return std::pow(a, e);
}

inline double lift(const double&, double v) { return v; }
inline Jet lift(const Jet& proto, double v) { return proto.constant(v); }

inline double s_sqrt(const double& v) { return checked_sqrt(v); }
inline double s_exp(const double& v) { return std::exp(v); }
inline double s_log(const double& v) { return checked_log(v); }
inline double s_sin(const double& v) { return std::sin(v); }
inline double s_cos(const double& v) { return std::cos(v); }
inline double s_div(const double& a, const double& b) { return checked_div(a, b); }
inline double s_pow_const(const double& a, double e) { return checked_pow(a, e); }
inline double s_pow(const double& a, const double& e) {
  if (!(a > 0.0)) throw DomainError("power with non-positive base");
  return std::pow(a, e);
}

inline Jet s_sqrt(const Jet& v) { return sqrt(v); }
inline Jet s_exp(const Jet& v) { return exp(v); }
inline Jet s_log(const Jet& v) { return log(v); }
inline Jet s_sin(const Jet& v) { return sin(v); }
inline Jet s_cos(const Jet& v) { return cos(v); }
inline Jet s_div(const Jet& a, const Jet& b) { return a / b; }
inline Jet s_pow_const(const Jet& a, double e) { return pow(a, e); }
inline Jet s_pow(const Jet& a, const Jet& e) { return pow(a, e); }

inline bool constant_exponent(const Node& e, double& out) {
  if (e.kind == NodeKind::Literal) {
    out = e.value;
    return true;
  }
  if (e.kind == NodeKind::Neg && e.args[0]->kind == NodeKind::Literal) {
    out = -e.args[0]->value;
    return true;
  }
  return false;
}

template <class S>
S eval_node(const Node& node, const EvalEnv<S>& env, const S& proto) {
  switch (node.kind) {
    case NodeKind::Literal:
      return lift(proto, node.value);
    case NodeKind::Coord:
      return node.family == CoordFamily::X ? env.x[node.index] : env.p[node.index];
    case NodeKind::Neg:
      return -eval_node(*node.args[0], env, proto);
    case NodeKind::Add:
      return eval_node(*node.args[0], env, proto) + eval_node(*node.args[1], env, proto);
    case NodeKind::Sub:
      return eval_node(*node.args[0], env, proto) - eval_node(*node.args[1], env, proto);
    case NodeKind::Mul:
      return eval_node(*node.args[0], env, proto) * eval_node(*node.args[1], env, proto);
    case NodeKind::Div:
      return s_div(eval_node(*node.args[0], env, proto), eval_node(*node.args[1], env, proto));
    case NodeKind::Pow: {
      const Node& e = *node.args[1];
      double k = 0.0;
      if (constant_exponent(e, k)) return s_pow_const(eval_node(*node.args[0], env, proto), k);
      return s_pow(eval_node(*node.args[0], env, proto), eval_node(e, env, proto));
    }
    case NodeKind::Call: {
      const S a = eval_node(*node.args[0], env, proto);
      switch (node.func) {
        case Func::Sqrt: return s_sqrt(a);
        case Func::Exp: return s_exp(a);
        case Func::Log: return s_log(a);
        case Func::Sin: return s_sin(a);
        case Func::Cos: return s_cos(a);
        case Func::Pow: {
          const Node& e = *node.args[1];
          double k = 0.0;
          if (constant_exponent(e, k)) return s_pow_const(a, k);
          return s_pow(a, eval_node(e, env, proto));
        }
      }
    }
  }
  throw std::logic_error("eval: unreachable node kind");
}

}  // namespace detail

/// Evaluates `e` over any scalar field with the arithmetic of double or Jet.
template <class S>
S eval(const Expr& e, const EvalEnv<S>& env) {
  if (static_cast<int>(env.x.size()) != e.dim() || static_cast<int>(env.p.size()) != e.dim()) {
    throw std::invalid_argument("eval: environment dimension mismatch");
  }
  return detail::eval_node(e.root(), env, env.x.front());
}

double eval(const Expr& e, std::span<const double> x, std::span<const double> p);

struct HomogeneityReport {
  int degree = 1;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

/// max |K(x, l p) - l^degree K(x, p)| for l drawn from [0.5, 2] with a
/// fixed-seed generator, one draw per sample.
HomogeneityReport check_homogeneity(const Expr& k, int degree,
                                    std::span<const CotangentPoint> samples, double tol,
                                    std::uint64_t seed = 0x9e3779b97f4a7c15ull);

}  // namespace cartan
