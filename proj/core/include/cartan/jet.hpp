#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cartan {

/// Monomial bookkeeping for truncated Taylor expansions in `vars` variables.
///
/// Monomials are enumerated in graded order (all degree-0 terms, then
/// degree 1, ...), so the coefficients of an order-k jet are a prefix of the
/// coefficients of any higher-order jet over the same variables. The product
/// table is sorted by the degree of the output monomial for the same reason.
/// Layouts are interned and live for the lifetime of the process.
class JetLayout {
 public:
  static constexpr int kMaxOrder = 6;

  struct ProductTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };

  static const JetLayout& get(int vars, int max_order = kMaxOrder);

  int vars() const noexcept { return vars_; }
  int max_order() const noexcept { return max_order_; }

  /// Number of monomials of total degree <= order.
  std::size_t size(int order) const { return prefix_size_[order]; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exponents_.data() + idx * vars_, static_cast<std::size_t>(vars_)};
  }
  /// Index of the monomial with exponent vector `exps`, or -1.
  std::ptrdiff_t index_of(std::span<const std::uint8_t> exps) const;
  /// Index of alpha + e_var for monomial `idx`, or -1 past max_order.
  std::int32_t raised(std::size_t idx, int var) const {
    return raised_[idx * vars_ + var];
  }
  /// alpha! for the monomial at `idx`.
  double factorial(std::size_t idx) const { return factorial_[idx]; }
  /// Product terms whose output has degree <= order.
  std::span<const ProductTerm> products(int order) const {
    return {products_.data(), product_prefix_[order]};
  }

 private:
  JetLayout(int vars, int max_order);

  int vars_;
  int max_order_;
  std::vector<std::size_t> prefix_size_;
  std::vector<int> degree_;
  std::vector<std::uint8_t> exponents_;
  std::vector<std::int32_t> raised_;
  std::vector<double> factorial_;
  std::vector<ProductTerm> products_;
  std::vector<std::size_t> product_prefix_;
};

/// Truncated multivariate Taylor value.
///
/// Coefficient `c[alpha]` is the Taylor coefficient d^alpha f / alpha!, so a
/// mixed partial is `c[alpha] * alpha!`. Arithmetic between jets of different
/// order truncates to the smaller order; differentiation lowers the order by
/// one, which is what lets nested frame derivatives compose to any depth the
/// seed order allows.
class Jet {
 public:
  Jet() = default;
  Jet(const JetLayout& layout, int order, double value = 0.0);

  /// Coordinate seed: value `at` plus a unit first-order coefficient on `var`.
  static Jet variable(const JetLayout& layout, int order, int var, double at);

  const JetLayout& layout() const { return *layout_; }
  bool valid() const noexcept { return layout_ != nullptr; }
  int order() const noexcept { return order_; }
  int vars() const { return layout_->vars(); }

  double value() const { return c_[0]; }
  std::span<const double> coefficients() const { return c_; }
  std::span<double> coefficients() { return c_; }

  /// Mixed partial given as a list of differentiation directions; the
  /// order of directions is irrelevant.
  double partial(std::span<const int> directions) const;
  /// Jet of the partial derivative along `var` (order drops by one).
  Jet derivative(int var) const;
  Jet truncated(int order) const;
  /// Same layout and order, constant value.
  Jet constant(double value) const { return Jet(*layout_, order_, value); }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

 private:
  friend Jet compose(const Jet& x, std::span<const double> derivs);

  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

/// f(x) for univariate f given f, f', f'', ... at x.value(); `derivs` must
/// hold at least order+1 entries.
Jet compose(const Jet& x, std::span<const double> derivs);

Jet sqrt(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet pow(const Jet& x, double exponent);
Jet pow(const Jet& x, int exponent);
Jet pow(const Jet& x, const Jet& exponent);

/// Maximum absolute coefficient difference over the common prefix.
double max_abs_diff(const Jet& a, const Jet& b);

}  // namespace cartan
