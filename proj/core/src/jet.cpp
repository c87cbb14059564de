#include "cartan/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "cartan/errors.hpp"

namespace cartan {
namespace {

void enumerate_degree(int vars, int degree, std::vector<std::uint8_t>& current, int var,
                      std::vector<std::vector<std::uint8_t>>& out) {
  if (var == vars - 1) {
    current[var] = static_cast<std::uint8_t>(degree);
    out.push_back(current);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    current[var] = static_cast<std::uint8_t>(k);
    enumerate_degree(vars, degree - k, current, var + 1, out);
  }
}

double factorial_of(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

JetLayout::JetLayout(int vars, int max_order) : vars_(vars), max_order_(max_order) {
  std::vector<std::vector<std::uint8_t>> monomials;
  std::vector<std::uint8_t> current(static_cast<std::size_t>(vars), 0);
  prefix_size_.resize(static_cast<std::size_t>(max_order) + 1);
  for (int d = 0; d <= max_order; ++d) {
    enumerate_degree(vars, d, current, 0, monomials);
    prefix_size_[d] = monomials.size();
  }

  std::map<std::vector<std::uint8_t>, std::int32_t> index;
  const std::size_t count = monomials.size();
  degree_.resize(count);
  factorial_.resize(count);
  exponents_.reserve(count * vars);
  for (std::size_t i = 0; i < count; ++i) {
    int deg = 0;
    double fact = 1.0;
    for (auto e : monomials[i]) {
      deg += e;
      fact *= factorial_of(e);
    }
    degree_[i] = deg;
    factorial_[i] = fact;
    exponents_.insert(exponents_.end(), monomials[i].begin(), monomials[i].end());
    index.emplace(monomials[i], static_cast<std::int32_t>(i));
  }

  raised_.assign(count * vars, -1);
  for (std::size_t i = 0; i < count; ++i) {
    if (degree_[i] == max_order) continue;
    for (int v = 0; v < vars; ++v) {
      auto up = monomials[i];
      ++up[v];
      raised_[i * vars + v] = index.at(up);
    }
  }

  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      if (degree_[a] + degree_[b] > max_order) continue;
      std::vector<std::uint8_t> sum(monomials[a]);
      for (int v = 0; v < vars; ++v) sum[v] = static_cast<std::uint8_t>(sum[v] + monomials[b][v]);
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(index.at(sum))});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [this](const ProductTerm& x, const ProductTerm& y) {
                     return degree_[x.out] < degree_[y.out];
                   });
  product_prefix_.assign(static_cast<std::size_t>(max_order) + 1, 0);
  for (const auto& t : products_) {
    for (int d = degree_[t.out]; d <= max_order; ++d) ++product_prefix_[d];
  }
}

const JetLayout& JetLayout::get(int vars, int max_order) {
  if (vars < 1 || max_order < 0 || max_order > kMaxOrder) {
    throw std::invalid_argument("JetLayout: unsupported (vars, order)");
  }
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{vars, max_order}];
  if (!slot) slot.reset(new JetLayout(vars, max_order));
  return *slot;
}

std::ptrdiff_t JetLayout::index_of(std::span<const std::uint8_t> exps) const {
  if (static_cast<int>(exps.size()) != vars_) return -1;
  int deg = 0;
  for (auto e : exps) deg += e;
  if (deg > max_order_) return -1;
  const std::size_t lo = deg == 0 ? 0 : prefix_size_[deg - 1];
  for (std::size_t i = lo; i < prefix_size_[deg]; ++i) {
    if (std::equal(exps.begin(), exps.end(), exponents_.begin() + i * vars_)) {
      return static_cast<std::ptrdiff_t>(i);
    }
  }
  return -1;
}

Jet::Jet(const JetLayout& layout, int order, double value)
    : layout_(&layout), order_(order), c_(layout.size(order), 0.0) {
  if (order < 0 || order > layout.max_order()) {
    throw std::invalid_argument("Jet: order exceeds layout");
  }
  c_[0] = value;
}

Jet Jet::variable(const JetLayout& layout, int order, int var, double at) {
  Jet j(layout, order, at);
  if (order >= 1) j.c_[1 + var] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> directions) const {
  std::vector<std::uint8_t> exps(static_cast<std::size_t>(vars()), 0);
  for (int d : directions) {
    if (d < 0 || d >= vars()) throw std::out_of_range("Jet::partial: direction");
    ++exps[d];
  }
  if (static_cast<int>(directions.size()) > order_) {
    throw std::out_of_range("Jet::partial: derivative order exceeds jet order");
  }
  const auto idx = layout_->index_of(exps);
  return c_[idx] * layout_->factorial(idx);
}

Jet Jet::derivative(int var) const {
  if (order_ == 0) throw std::logic_error("Jet::derivative: order-0 jet");
  Jet out(*layout_, order_ - 1);
  const std::size_t n = out.c_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto up = layout_->raised(i, var);
    out.c_[i] = (layout_->exponents(i)[var] + 1) * c_[up];
  }
  return out;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet out(*layout_, order);
  std::copy_n(c_.begin(), out.c_.size(), out.c_.begin());
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  if (s == 0.0) throw DivisionByZero();
  for (auto& v : c_) v /= s;
  return *this;
}

Jet operator-(Jet a) {
  for (auto& v : a.c_) v = -v;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.layout_ != b.layout_) throw std::logic_error("Jet: layout mismatch");
  const int order = std::min(a.order_, b.order_);
  Jet out(*a.layout_, order);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  double* po = out.c_.data();
  for (const auto& t : a.layout_->products(order)) po[t.out] += pa[t.lhs] * pb[t.rhs];
  return out;
}

Jet operator/(double s, const Jet& a) {
  const double x0 = a.value();
  if (x0 == 0.0) throw DivisionByZero();
  std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
  double inv = 1.0 / x0;
  double pw = inv;
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= -k;
    d[k] = s * fact * pw;
    pw *= inv;
  }
  return compose(a, d);
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet compose(const Jet& x, std::span<const double> derivs) {
  const int r = x.order();
  Jet h = x;
  h.c_[0] = 0.0;
  Jet acc(*x.layout_, r, derivs[r] / factorial_of(r));
  for (int k = r - 1; k >= 0; --k) {
    acc = acc * h;
    acc.c_[0] += derivs[k] / factorial_of(k);
  }
  return acc;
}

namespace {

// Derivatives of t -> t^a at t = x0.
std::vector<double> power_derivatives(double x0, double a, int order) {
  std::vector<double> d(static_cast<std::size_t>(order) + 1);
  double coef = 1.0;
  for (int k = 0; k <= order; ++k) {
    d[k] = coef * std::pow(x0, a - k);
    coef *= (a - k);
  }
  return d;
}

}  // namespace

Jet sqrt(const Jet& x) {
  if (!(x.value() > 0.0)) throw DomainError("sqrt of non-positive value");
  return compose(x, power_derivatives(x.value(), 0.5, x.order()));
}

Jet exp(const Jet& x) {
  std::vector<double> d(static_cast<std::size_t>(x.order()) + 1, std::exp(x.value()));
  return compose(x, d);
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw DomainError("log of non-positive value");
  std::vector<double> d(static_cast<std::size_t>(x.order()) + 1);
  d[0] = std::log(x0);
  double fact = 1.0;
  for (int k = 1; k <= x.order(); ++k) {
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(x0, k);
    fact *= k;
  }
  return compose(x, d);
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> d(static_cast<std::size_t>(x.order()) + 1);
  for (int k = 0; k <= x.order(); ++k) d[k] = cycle[k % 4];
  return compose(x, d);
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value());
  const double c = std::cos(x.value());
  const double cycle[4] = {c, -s, -c, s};
  std::vector<double> d(static_cast<std::size_t>(x.order()) + 1);
  for (int k = 0; k <= x.order(); ++k) d[k] = cycle[k % 4];
  return compose(x, d);
}

Jet pow(const Jet& x, int exponent) {
  if (exponent < 0) {
    if (x.value() == 0.0) throw DivisionByZero();
    return 1.0 / pow(x, -exponent);
  }
  Jet result = x.constant(1.0);
  Jet base = x;
  unsigned e = static_cast<unsigned>(exponent);
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

Jet pow(const Jet& x, double exponent) {
  if (std::nearbyint(exponent) == exponent && std::abs(exponent) <= 64.0) {
    return pow(x, static_cast<int>(exponent));
  }
  if (!(x.value() > 0.0)) throw DomainError("non-integer power of non-positive value");
  return compose(x, power_derivatives(x.value(), exponent, x.order()));
}

Jet pow(const Jet& x, const Jet& exponent) { return exp(exponent * log(x)); }

double max_abs_diff(const Jet& a, const Jet& b) {
  const auto ca = a.coefficients();
  const auto cb = b.coefficients();
  const std::size_t n = std::min(ca.size(), cb.size());
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
  return m;
}

}  // namespace cartan
