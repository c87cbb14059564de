#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cartan/kahler_lift.hpp"

using cartan::CotangentPoint;
using cartan::Expr;
using cartan::FrameVector;
using cartan::LiftParams;
using cartan::parse;

namespace {

const char* kEuclid = "sqrt(p1^2+p2^2)";
const char* kHyper = "sqrt(x2^2*(p1^2+p2^2))";
const char* kRanders = "sqrt(p1^2+p2^2)+0.3*p1";

std::vector<CotangentPoint> hyper_points(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.5, 2.0), up(-1.5, 1.5);
  std::vector<CotangentPoint> out;
  while (static_cast<int>(out.size()) < count) {
    CotangentPoint pt{{ux(rng), uy(rng)}, {up(rng), up(rng)}};
    if (std::hypot(pt.p[0], pt.p[1]) > 0.4) out.push_back(pt);
  }
  return out;
}

FrameVector random_vector(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  FrameVector x = FrameVector::zero(n);
  for (auto& v : x.h) v = g(rng);
  for (auto& v : x.v) v = g(rng);
  return x;
}

double dist(const FrameVector& a, const FrameVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    m = std::max(m, std::abs(a.h[i] - b.h[i]));
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  }
  return m;
}

double max_norm(const FrameVector& a) { return dist(a, FrameVector::zero(static_cast<int>(a.h.size()))); }

}  // namespace

TEST(LiftParams, LinkedAndValidation) {
  const auto p = LiftParams::make_linked(1.0, 1.0, -1.0);
  EXPECT_EQ(p.v, 1.0);
  EXPECT_TRUE(p.linked);
  EXPECT_EQ(p.integrable_curvature(), -1.0);
  EXPECT_FALSE(std::signbit(LiftParams::make_linked(1.0, 1.0, 0.0).v));
  EXPECT_DOUBLE_EQ(LiftParams::make_linked(2.0, 0.5, 1.0).v, -0.5);
  EXPECT_THROW(LiftParams::make_linked(0.0, 1.0, 1.0), cartan::ConfigError);
  EXPECT_THROW(LiftParams::make_explicit(1.0, -1.0, 0.0, 0.0), cartan::ConfigError);
  EXPECT_FALSE(LiftParams::make_explicit(1.0, 1.0, 0.0, -1.0).linked);
}

TEST(LiftedMetric, EuclideanIdentity) {
  const auto ctx = cartan::build_context(parse(kEuclid, 2), {{0.1, 0.2}, {0.6, -0.8}});
  const auto g = cartan::lifted_metric(ctx, LiftParams::make_explicit(1, 1, 0, 0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(g.lower(i, j), i == j ? 1.0 : 0.0);
      EXPECT_EQ(g.upper(i, j), i == j ? 1.0 : 0.0);
    }
}

TEST(LiftedMetric, RankOneUpdate) {
  const auto ctx = cartan::build_context(parse(kEuclid, 2), {{0, 0}, {1, 0}});
  const auto g = cartan::lifted_metric(ctx, LiftParams::make_explicit(1, 1, 1, 0));
  EXPECT_DOUBLE_EQ(g.tau, 0.5);
  EXPECT_DOUBLE_EQ(g.lower(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(g.lower(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(g.upper(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.upper(1, 1), 1.0);
  EXPECT_EQ(g.lower(0, 1), 0.0);
}

TEST(LiftedMetric, ClosedFormInverseMatchesLU) {
  const Expr k = parse(kRanders, 2);
  for (const auto& pt : hyper_points(20, 4)) {
    const auto ctx = cartan::build_context(k, pt);
    const auto g = cartan::lifted_metric(ctx, LiftParams::make_explicit(1.3, 0.7, 0.4, 0.0));
    EXPECT_LE(cartan::max_abs_diff(cartan::invert_lu(g.lower), g.upper), 1e-10);
  }
}

TEST(LiftedMetric, NotPositiveDefinite) {
  // sphere-like: c = 1, beta = 1, v = -1; K^2 = 2 gives alpha + 2 tau v = -1
  const auto ctx = cartan::build_context(parse(kEuclid, 2), {{0, 0}, {std::sqrt(2.0), 0}});
  const auto params = LiftParams::make_linked(1, 1, 1);
  try {
    cartan::lifted_metric(ctx, params);
    FAIL() << "expected NotPositiveDefinite";
  } catch (const cartan::NotPositiveDefinite& e) {
    EXPECT_NEAR(e.tau(), 1.0, 1e-15);
    EXPECT_NEAR(e.bound(), 0.5, 1e-15);
  }
  EXPECT_FALSE(cartan::tube_predicate(ctx, params));
}

TEST(ComplexStructure, EuclideanBlocks) {
  const auto ctx = cartan::build_context(parse(kEuclid, 2), {{0, 0}, {0.6, 0.8}});
  const auto g = cartan::lifted_metric(ctx, LiftParams::make_explicit(1, 1, 0, 0));
  const auto jd = cartan::apply_J(g, FrameVector::horizontal(2, 0));
  EXPECT_LE(dist(jd, FrameVector::vertical(2, 0)), 0.0);
  const auto jv = cartan::apply_J(g, FrameVector::vertical(2, 0));
  FrameVector want = FrameVector::zero(2);
  want.h[0] = -1.0;
  EXPECT_LE(dist(jv, want), 0.0);
}

TEST(ComplexStructure, AlgebraicIdentities) {
  std::mt19937 rng(8);
  const Expr k = parse(kRanders, 2);
  for (const auto& pt : hyper_points(10, 12)) {
    const auto g = cartan::lifted_metric(cartan::build_context(k, pt), LiftParams::make_explicit(1.2, 0.8, 0.3, 0));
    for (int r = 0; r < 10; ++r) {
      const FrameVector x = random_vector(rng, 2), y = random_vector(rng, 2);
      FrameVector neg = x;
      for (auto& v : neg.h) v = -v;
      for (auto& v : neg.v) v = -v;
      EXPECT_LE(dist(cartan::apply_J(g, cartan::apply_J(g, x)), neg), 1e-12);
      EXPECT_NEAR(cartan::inner(g, cartan::apply_J(g, x), cartan::apply_J(g, y)), cartan::inner(g, x, y), 1e-12);
      EXPECT_NEAR(cartan::fundamental_form(g, x, y) + cartan::fundamental_form(g, y, x), 0.0, 1e-12);
    }
  }
}

TEST(FundamentalForm, Pairings) {
  const auto ctx = cartan::build_context(parse(kHyper, 2), {{0.1, 1.3}, {0.4, -0.9}});
  const auto g = cartan::lifted_metric(ctx, LiftParams::make_linked(1, 1, -1));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(cartan::fundamental_form(g, FrameVector::vertical(2, i), FrameVector::horizontal(2, j)),
                  i == j ? 1.0 : 0.0, 1e-12);
      EXPECT_NEAR(cartan::fundamental_form(g, FrameVector::horizontal(2, i), FrameVector::horizontal(2, j)), 0.0,
                  1e-15);
    }
}

TEST(Obstruction, Examples) {
  const auto flat = cartan::obstruction_tensors(parse(kEuclid, 2), {{0, 0}, {1, 0.5}}, LiftParams::make_linked(1, 1, 0));
  EXPECT_EQ(cartan::max_abs(flat.A), 0.0);

  const Expr hyp = parse(kHyper, 2);
  for (const auto& pt : hyper_points(50, 6)) {
    EXPECT_LE(cartan::max_abs(cartan::obstruction_tensors(hyp, pt, LiftParams::make_linked(1, 1, -1)).A), 1e-8);
  }

  const Expr rnd = parse(kRanders, 2);
  for (const auto& pt : hyper_points(20, 7)) {
    const auto t = cartan::obstruction_tensors(rnd, pt, LiftParams::make_explicit(1, 1, 0.7, 0));
    EXPECT_LE(cartan::max_abs_diff(t.B_direct, t.B_closed), 1e-8);
  }
}

TEST(Nijenhuis, EuclideanVanishes) {
  const Expr k = parse(kEuclid, 2);
  const auto params = LiftParams::make_linked(1, 1, 0);
  const CotangentPoint pt{{0.2, 0.1}, {0.8, -0.3}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto x = a < 2 ? FrameVector::horizontal(2, a) : FrameVector::vertical(2, a - 2);
      const auto y = b < 2 ? FrameVector::horizontal(2, b) : FrameVector::vertical(2, b - 2);
      EXPECT_LE(max_norm(cartan::nijenhuis(k, pt, params, x, y)), 1e-10);
    }
}

TEST(Nijenhuis, HyperbolicLinkedAndContrast) {
  const Expr k = parse(kHyper, 2);
  double linked = 0.0, zero = 0.0;
  for (const auto& pt : hyper_points(100, 42)) {
    const auto base = cartan::CartanJets::build(k, pt, 4);
    const cartan::AdaptedFrame frame(base);
    linked = std::max(linked, cartan::max_abs(cartan::nijenhuis_tensor(frame, LiftParams::make_linked(1, 1, -1))));
    zero = std::max(zero, cartan::max_abs(cartan::nijenhuis_tensor(frame, LiftParams::make_explicit(1, 1, 0, -1))));
  }
  EXPECT_LE(linked, 1e-7);
  EXPECT_GT(zero, 1e-3);
}

TEST(Nijenhuis, FrameRouteMatchesObstructionRoute) {
  const Expr k = parse(kRanders, 2);
  for (const auto& pt : hyper_points(10, 3)) {
    const auto base = cartan::CartanJets::build(k, pt, 4);
    const auto params = LiftParams::make_explicit(1.1, 0.9, 0.6, 0);
    const auto frame_route = cartan::nijenhuis_tensor(cartan::AdaptedFrame(base), params);
    const auto obstruction_route = cartan::nijenhuis_from_obstructions(base, params);
    // obstruction route covers the (delta, delta) block
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int f = 0; f < 4; ++f) EXPECT_NEAR(frame_route(i, j, f), obstruction_route(i, j, f), 1e-8);
  }
}

TEST(Nijenhuis, Antisymmetric) {
  const Expr k = parse(kHyper, 2);
  const auto base = cartan::CartanJets::build(k, {{0.3, 1.1}, {0.5, 0.7}}, 4);
  const auto n = cartan::nijenhuis_tensor(cartan::AdaptedFrame(base), LiftParams::make_explicit(1, 1, 0.3, 0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int f = 0; f < 4; ++f) EXPECT_NEAR(n(a, b, f), -n(b, a, f), 1e-12);
}

TEST(ConstantCurvature, Examples) {
  const auto flat = cartan::build_context(parse(kEuclid, 2), {{0, 0}, {1, 0.5}});
  EXPECT_EQ(cartan::constant_curvature_residual(flat, 0.0).max_abs(), 0.0);

  const Expr k = parse(kHyper, 2);
  double right = 0.0, wrong = 0.0;
  for (const auto& pt : hyper_points(100, 2)) {
    const auto ctx = cartan::build_context(k, pt);
    right = std::max(right, cartan::constant_curvature_residual(ctx, -1.0).max_abs());
    wrong = std::max(wrong, cartan::constant_curvature_residual(ctx, 1.0).max_abs());
  }
  EXPECT_LE(right, 1e-8);
  EXPECT_GT(wrong, 0.1);
}

TEST(Tube, Predicate) {
  EXPECT_TRUE(cartan::tube_predicate(0.5, LiftParams::make_linked(1, 1, 1)));
  EXPECT_FALSE(cartan::tube_predicate(2.0, LiftParams::make_linked(1, 1, 1)));
  EXPECT_TRUE(cartan::tube_predicate(0.9, LiftParams::make_linked(1, 0.5, 4)));
  EXPECT_FALSE(cartan::tube_predicate(1.0, LiftParams::make_linked(1, 0.5, 4)));
  EXPECT_THROW(cartan::tube_predicate(0.5, LiftParams::make_linked(1, 1, -1)), cartan::NotApplicable);
}

TEST(VerifyKahler, HyperbolicLinkedPasses) {
  const auto s = cartan::verify_kahler(parse(kHyper, 2), hyper_points(30, 1), LiftParams::make_linked(1, 1, -1));
  for (const auto& c : s) EXPECT_TRUE(c.pass) << c.name << " " << c.max_abs_residual;
  const auto* nij = cartan::find_check(s, "kahler.nijenhuis");
  ASSERT_NE(nij, nullptr);
  EXPECT_EQ(nij->kind, cartan::CheckKind::Hard);
  EXPECT_EQ(nij->n_points, 30u);
}

TEST(VerifyKahler, WrongVIsExpectedNegative) {
  const auto s = cartan::verify_kahler(parse(kHyper, 2), hyper_points(30, 1), LiftParams::make_explicit(1, 1, 0, -1));
  const auto* nij = cartan::find_check(s, "kahler.nijenhuis");
  ASSERT_NE(nij, nullptr);
  EXPECT_EQ(nij->kind, cartan::CheckKind::ExpectedNegative);
  EXPECT_TRUE(nij->pass);
  EXPECT_GT(nij->max_abs_residual, 1e-3);
}

TEST(VerifyKahler, SeedDeterminism) {
  const auto pts = hyper_points(5, 9);
  const auto a = cartan::verify_kahler(parse(kRanders, 2), pts, LiftParams::make_linked(1, 1, 0), 42);
  const auto b = cartan::verify_kahler(parse(kRanders, 2), pts, LiftParams::make_linked(1, 1, 0), 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].max_abs_residual, b[i].max_abs_residual);
}
