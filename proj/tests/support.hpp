#pragma once

// Finite-difference oracles and random test expressions. Nothing in here
// touches the jet arithmetic: derivatives are taken from plain double
// evaluation only.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cartan/cartan_space.hpp"
#include "cartan/expr.hpp"

namespace oracle {

using Fn = std::function<double(const std::vector<double>&)>;

// f over the 2n coordinates (x, p) of `pt`, through double evaluation.
inline Fn as_function(const cartan::Expr& e) {
  return [e](const std::vector<double>& z) {
    const int n = e.dim();
    std::vector<double> x(z.begin(), z.begin() + n), p(z.begin() + n, z.end());
    return cartan::eval(e, x, p);
  };
}

inline std::vector<double> flatten(const cartan::CotangentPoint& pt) {
  std::vector<double> z = pt.x;
  z.insert(z.end(), pt.p.begin(), pt.p.end());
  return z;
}

// Nested central differences along `dirs` with a single step.
inline double central(const Fn& f, std::vector<double> z, const std::vector<int>& dirs, double h,
                      std::size_t depth = 0) {
  if (depth == dirs.size()) return f(z);
  const int d = dirs[depth];
  const double z0 = z[d];
  z[d] = z0 + h;
  const double up = central(f, z, dirs, h, depth + 1);
  z[d] = z0 - h;
  const double dn = central(f, z, dirs, h, depth + 1);
  return (up - dn) / (2.0 * h);
}

// One Richardson step on top of central(): error O(h^4).
inline double richardson(const Fn& f, const std::vector<double>& z, const std::vector<int>& dirs,
                         double h) {
  const double coarse = central(f, z, dirs, h);
  const double fine = central(f, z, dirs, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

inline double step_for(std::size_t order) { return order <= 1 ? 1e-3 : 1e-2; }

// FD tolerance for AD-vs-FD comparisons at orders 1 to 3.
inline double fd_tolerance(double value) { return std::max(1e-6, 1e-3 * std::abs(value)); }

// Every multiset of directions of size `order` over `vars` variables.
inline std::vector<std::vector<int>> multisets(int vars, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(cur.size()) == order) {
      out.push_back(cur);
      return;
    }
    for (int v = from; v < vars; ++v) {
      cur.push_back(v);
      rec(v);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

// Random smooth expressions in x1, x2, p1, p2 that stay inside every
// primitive's domain on the box |x| <= 1.5, |p| <= 2.
class ExprGen {
 public:
  explicit ExprGen(unsigned seed) : rng_(seed) {}

  std::string next(int depth = 3) { return node(depth); }

 private:
  std::string leaf() {
    static const char* vars[] = {"x1", "x2", "p1", "p2"};
    std::uniform_int_distribution<int> pick(0, 4);
    const int k = pick(rng_);
    if (k == 4) {
      std::uniform_real_distribution<double> c(0.2, 1.5);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", c(rng_));
      return buf;
    }
    return vars[k];
  }

  std::string node(int depth) {
    if (depth == 0) return leaf();
    std::uniform_int_distribution<int> pick(0, 10);
    const std::string a = node(depth - 1);
    switch (pick(rng_)) {
      case 0: return "(" + a + "+" + node(depth - 1) + ")";
      case 1: return "(" + a + "-" + node(depth - 1) + ")";
      case 2: return "(" + a + "*" + node(depth - 1) + ")";
      case 3: return "(" + a + "/(2+sin(" + node(depth - 1) + ")))";
      case 4: return "sqrt(1+(" + a + ")^2)";
      case 5: return "exp(0.3*sin(" + a + "))";
      case 6: return "log(2+cos(" + a + "))";
      case 7: return "sin(" + a + ")";
      case 8: return "cos(" + a + ")";
      case 9: return "(1.5+cos(" + a + "))^1.5";
      default: return "(" + a + ")^2";
    }
  }

  std::mt19937 rng_;
};

inline cartan::CotangentPoint random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> ux(-1.0, 1.0), up(0.4, 1.5);
  return {{ux(rng), ux(rng)}, {up(rng), up(rng)}};
}

}  // namespace oracle
