#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cartan/cartan_space.hpp"
#include "cartan/expr.hpp"
#include "cartan/jet.hpp"
#include "support.hpp"

using cartan::CotangentPoint;
using cartan::Expr;
using cartan::Jet;
using cartan::JetLayout;
using cartan::parse;

namespace {

double jet_partial(const Expr& e, const CotangentPoint& pt, const std::vector<int>& dirs) {
  return cartan::partial(e, pt, dirs);
}

}  // namespace

TEST(JetLayout, SlotCounts) {
  const auto& l4 = JetLayout::get(4);
  EXPECT_EQ(l4.size(0), 1u);
  EXPECT_EQ(l4.size(1), 5u);
  EXPECT_EQ(l4.size(6) - 1, 209u);
  EXPECT_EQ(JetLayout::get(6).size(6), 924u);
}

TEST(JetLayout, GradedPrefix) {
  const auto& l = JetLayout::get(4);
  for (int k = 1; k <= 6; ++k) {
    for (std::size_t i = l.size(k - 1); i < l.size(k); ++i) EXPECT_EQ(l.degree(i), k);
  }
}

TEST(Seed, OrderOneUnitCoefficients) {
  const auto env = cartan::seed({{0.0, 1.0}, {1.0, 0.0}}, 1);
  std::vector<Jet> all = env.x;
  all.insert(all.end(), env.p.begin(), env.p.end());
  ASSERT_EQ(all.size(), 4u);
  for (int v = 0; v < 4; ++v) {
    const auto c = all[v].coefficients();
    ASSERT_EQ(c.size(), 5u);
    for (int d = 0; d < 4; ++d) EXPECT_EQ(c[1 + d], d == v ? 1.0 : 0.0);
  }
  EXPECT_EQ(all[1].value(), 1.0);
  EXPECT_EQ(all[2].value(), 1.0);
}

TEST(Seed, OrderZeroIsPlainValue) {
  const auto env = cartan::seed({{0.3, 1.0}, {1.0, 0.5}}, 0);
  EXPECT_EQ(env.x[0].coefficients().size(), 1u);
  EXPECT_EQ(env.x[0].value(), 0.3);
}

TEST(Seed, OrderSixSlots) {
  const auto env = cartan::seed({{0.0, 1.0}, {1.0, 0.0}}, 6);
  EXPECT_EQ(env.p[1].coefficients().size() - 1, 209u);
}

TEST(Partial, QuadraticExamples) {
  const Expr k2 = parse("p1^2+p2^2", 2);
  const CotangentPoint pt{{0.4, -0.2}, {0.7, 1.1}};
  EXPECT_DOUBLE_EQ(jet_partial(k2, pt, {2, 2}), 2.0);
  EXPECT_EQ(jet_partial(k2, pt, {2, 3, 2}), 0.0);
}

TEST(Partial, HyperbolicAgainstFiniteDifferences) {
  const Expr k2 = parse("x2^2*(p1^2+p2^2)", 2);
  const CotangentPoint pt{{0.0, 2.0}, {1.0, 0.0}};
  const double ad = jet_partial(k2, pt, {2, 2});
  EXPECT_DOUBLE_EQ(ad, 8.0);
  const double fd = oracle::central(oracle::as_function(k2), oracle::flatten(pt), {2, 2}, 1e-4);
  EXPECT_NEAR(ad, fd, 1e-6);
}

TEST(Partial, FrozenMixedValues) {
  // Hand-derived: d^3/dx1 dp1^2 of exp(x1) p1^2 = 2 exp(x1)
  const Expr f = parse("exp(x1)*p1^2", 2);
  const CotangentPoint pt{{0.5, 0.0}, {1.0, 1.0}};
  EXPECT_NEAR(jet_partial(f, pt, {0, 2, 2}), 2.0 * std::exp(0.5), 1e-14);
  // d^6/dx1^6 sin(x1) = -sin(x1)
  const Expr s = parse("sin(x1)", 2);
  EXPECT_NEAR(jet_partial(s, pt, {0, 0, 0, 0, 0, 0}), -std::sin(0.5), 1e-13);
  // d^4/dp2^4 of 1/p2 = 24/p2^5
  const Expr r = parse("1/p2", 2);
  const CotangentPoint q{{0.0, 0.0}, {1.0, 2.0}};
  EXPECT_NEAR(jet_partial(r, q, {3, 3, 3, 3}), 24.0 / 32.0, 1e-14);
}

TEST(Partial, EveryPrimitiveMatchesFiniteDifferences) {
  const char* prims[] = {"p1+x2", "p1-x2", "p1*x2", "p1/(x2+2)", "sqrt(p1)",   "exp(x1*p2)",
                         "log(p2)", "sin(x1*p1)", "cos(x2+p2)", "p1^2.5", "pow(p2,-1.5)",
                         "p1^x1", "-p2^3"};
  const CotangentPoint pt{{0.3, -0.4}, {1.2, 0.8}};
  for (const char* src : prims) {
    const Expr e = parse(src, 2);
    const auto f = oracle::as_function(e);
    for (int order = 1; order <= 3; ++order) {
      for (const auto& dirs : oracle::multisets(4, order)) {
        const double ad = jet_partial(e, pt, dirs);
        const double fd = oracle::richardson(f, oracle::flatten(pt), dirs, oracle::step_for(order));
        EXPECT_NEAR(ad, fd, oracle::fd_tolerance(ad)) << src << " order " << order;
      }
    }
  }
}

TEST(Partial, RandomExpressionsOrdersOneToThree) {
  oracle::ExprGen gen(20240611);
  std::mt19937 rng(7);
  for (int e = 0; e < 20; ++e) {
    const std::string src = gen.next();
    const Expr ex = parse(src, 2);
    const CotangentPoint pt = oracle::random_point(rng);
    const auto f = oracle::as_function(ex);
    const Jet j = cartan::eval(ex, cartan::seed(pt, 3));
    for (int order = 1; order <= 3; ++order) {
      for (const auto& dirs : oracle::multisets(4, order)) {
        const double ad = j.partial(dirs);
        const double fd = oracle::richardson(f, oracle::flatten(pt), dirs, oracle::step_for(order));
        EXPECT_NEAR(ad, fd, oracle::fd_tolerance(ad)) << src;
      }
    }
  }
}

TEST(Partial, RandomExpressionsOrdersFourToSix) {
  // Differences of exact third derivatives; tolerance 1e-4.
  oracle::ExprGen gen(99);
  std::mt19937 rng(11);
  for (int e = 0; e < 6; ++e) {
    const Expr ex = parse(gen.next(2), 2);
    const CotangentPoint pt = oracle::random_point(rng);
    const Jet j6 = cartan::eval(ex, cartan::seed(pt, 6));
    const std::vector<std::vector<int>> picks{{0, 1, 2, 3}, {2, 2, 3, 3, 0}, {0, 0, 1, 2, 2, 3},
                                              {3, 3, 3, 3, 3, 3}, {1, 1, 1, 0}};
    for (const auto& dirs : picks) {
      const std::vector<int> inner(dirs.begin(), dirs.begin() + 3);
      const std::vector<int> outer(dirs.begin() + 3, dirs.end());
      const oracle::Fn third = [&](const std::vector<double>& z) {
        const CotangentPoint q{{z[0], z[1]}, {z[2], z[3]}};
        return cartan::eval(ex, cartan::seed(q, 3)).partial(inner);
      };
      const double fd = oracle::richardson(third, oracle::flatten(pt), outer, 1e-2);
      EXPECT_NEAR(j6.partial(dirs), fd, 1e-4);
    }
  }
}

TEST(Partial, SeedingOrderIsStructural) {
  // Swap which jet direction carries x1 and p2. Coefficients are summed in
  // a different order, so equality holds to rounding only.
  const Expr e = parse("exp(x1*p2)*sin(x2+p1^2)/(2+cos(p2))", 2);
  const CotangentPoint pt{{0.2, -0.7}, {0.9, 1.3}};
  const auto& layout = JetLayout::get(4);
  cartan::EvalEnv<Jet> a, b;
  a.x = {Jet::variable(layout, 4, 0, 0.2), Jet::variable(layout, 4, 1, -0.7)};
  a.p = {Jet::variable(layout, 4, 2, 0.9), Jet::variable(layout, 4, 3, 1.3)};
  b.x = {Jet::variable(layout, 4, 3, 0.2), Jet::variable(layout, 4, 1, -0.7)};
  b.p = {Jet::variable(layout, 4, 2, 0.9), Jet::variable(layout, 4, 0, 1.3)};
  const Jet ja = cartan::eval(e, a), jb = cartan::eval(e, b);
  const int swap[] = {3, 1, 2, 0};
  for (int order = 1; order <= 4; ++order) {
    for (const auto& dirs : oracle::multisets(4, order)) {
      std::vector<int> mapped;
      for (int d : dirs) mapped.push_back(swap[d]);
      EXPECT_NEAR(ja.partial(dirs), jb.partial(mapped), 1e-13 * std::max(1.0, std::abs(ja.partial(dirs))));
      std::vector<int> rev(dirs.rbegin(), dirs.rend());
      EXPECT_EQ(ja.partial(dirs), ja.partial(rev));
    }
  }
}

TEST(Partial, Linearity) {
  const char* f = "sqrt(1+x1^2*p2^2)";
  const char* g = "log(2+sin(x2*p1))";
  const Expr ef = parse(f, 2), eg = parse(g, 2);
  const Expr sum = parse(std::string("(") + f + ")+(" + g + ")", 2);
  const CotangentPoint pt{{0.6, -0.3}, {1.1, 0.5}};
  for (const auto& dirs : oracle::multisets(4, 3)) {
    const double lhs = jet_partial(sum, pt, dirs);
    const double rhs = jet_partial(ef, pt, dirs) + jet_partial(eg, pt, dirs);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Jet, ValuePartMatchesDoubleBitForBit) {
  oracle::ExprGen gen(5);
  std::mt19937 rng(3);
  for (int e = 0; e < 20; ++e) {
    const Expr ex = parse(gen.next(), 2);
    const CotangentPoint pt = oracle::random_point(rng);
    EXPECT_EQ(cartan::eval(ex, cartan::seed(pt, 0)).value(), cartan::eval(ex, pt.x, pt.p));
  }
}

TEST(Jet, DerivativeLowersOrder) {
  const auto env = cartan::seed({{0.1, 0.2}, {0.3, 0.4}}, 4);
  const Jet f = env.x[0] * env.x[0] * env.p[1];
  const Jet d = f.derivative(0);
  EXPECT_EQ(d.order(), 3);
  EXPECT_NEAR(d.value(), 2 * 0.1 * 0.4, 1e-15);
  EXPECT_NEAR(d.derivative(0).value(), 0.8, 1e-15);
}

TEST(Jet, SqrtAndLogDomain) {
  const auto env = cartan::seed({{0.0, 0.0}, {0.0, 1.0}}, 2);
  EXPECT_THROW(cartan::sqrt(env.p[0]), cartan::DomainError);
  EXPECT_THROW(cartan::log(env.p[0] - 1.0), cartan::DomainError);
  EXPECT_NO_THROW(cartan::sqrt(env.p[1]));
}
