#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cartan/expr.hpp"
#include "support.hpp"

using cartan::Expr;
using cartan::NodeKind;
using cartan::parse;

namespace {

double ev(const Expr& e, std::vector<double> x, std::vector<double> p) { return cartan::eval(e, x, p); }

template <class E>
E expect_throw(const char* src, int n) {
  try {
    parse(src, n);
  } catch (const E& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << src;
  throw std::runtime_error("unreachable");
}

}  // namespace

TEST(Parse, NormTree) {
  const Expr e = parse("sqrt(p1^2+p2^2)", 2);
  const auto& root = e.root();
  ASSERT_EQ(root.kind, NodeKind::Call);
  EXPECT_EQ(root.func, cartan::Func::Sqrt);
  const auto& add = *root.args[0];
  ASSERT_EQ(add.kind, NodeKind::Add);
  ASSERT_EQ(add.args[0]->kind, NodeKind::Pow);
  EXPECT_EQ(add.args[0]->args[0]->kind, NodeKind::Coord);
  EXPECT_EQ(add.args[0]->args[0]->family, cartan::CoordFamily::P);
  EXPECT_EQ(add.args[0]->args[0]->index, 0);
  EXPECT_EQ(add.args[0]->args[1]->value, 2.0);
  EXPECT_EQ(add.args[1]->args[0]->index, 1);
}

TEST(Parse, HyperbolicNorm) { EXPECT_NO_THROW(parse("sqrt(x2^2*(p1^2+p2^2))", 2)); }

TEST(Parse, Precedence) {
  const Expr e = parse("2+3*x1^2^0.5-p1/4", 1);
  EXPECT_NEAR(ev(e, {4.0}, {8.0}), 2.0 + 3.0 * std::pow(4.0, std::pow(2.0, 0.5)) - 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(ev(parse("-x1^2", 1), {3.0}, {1.0}), -9.0);
  EXPECT_DOUBLE_EQ(ev(parse("1.5e1*p1", 1), {0.0}, {2.0}), 30.0);
}

TEST(Parse, Errors) {
  const auto oor = expect_throw<cartan::IndexOutOfRange>("x3", 2);
  EXPECT_EQ(oor.name(), "x3");
  EXPECT_EQ(oor.dim(), 2);
  EXPECT_EQ(expect_throw<cartan::SyntaxError>("p1+", 2).offset(), 3u);
  EXPECT_EQ(expect_throw<cartan::SyntaxError>("(p1", 2).offset(), 3u);
  EXPECT_EQ(expect_throw<cartan::SyntaxError>("p1 p2", 2).offset(), 3u);
  EXPECT_EQ(expect_throw<cartan::SyntaxError>("", 2).offset(), 0u);
  const auto unk = expect_throw<cartan::UnknownIdentifier>("p1+y1", 2);
  EXPECT_EQ(unk.name(), "y1");
  EXPECT_EQ(unk.offset(), 3u);
  EXPECT_EQ(expect_throw<cartan::ArityError>("sqrt(p1,p2)", 2).func(), "sqrt");
  EXPECT_EQ(expect_throw<cartan::ArityError>("pow(p1)", 2).func(), "pow");
  expect_throw<cartan::IndexOutOfRange>("p0", 2);
}

TEST(Parse, RoundTrip) {
  oracle::ExprGen gen(17);
  std::vector<std::string> sources{"sqrt(p1^2+p2^2)", "-x1^-2*p1", "pow(p1,3)/(1+x2)", "2^-x1"};
  for (int i = 0; i < 30; ++i) sources.push_back(gen.next(4));
  for (const auto& src : sources) {
    const Expr a = parse(src, 2);
    const std::string printed = cartan::to_string(a);
    const Expr b = parse(printed, 2);
    EXPECT_TRUE(cartan::structurally_equal(a.root(), b.root())) << src << " -> " << printed;
    EXPECT_EQ(cartan::to_string(b), printed);
  }
}

TEST(Eval, Examples) {
  const Expr norm = parse("sqrt(p1^2+p2^2)", 2);
  EXPECT_EQ(ev(norm, {0, 0}, {3, 4}), 5.0);
  EXPECT_EQ(ev(parse("x2^2*(p1^2+p2^2)", 2), {0, 2}, {1, 0}), 4.0);
  EXPECT_THROW(ev(norm, {0, 0}, {0, 0}), cartan::DomainError);
  EXPECT_THROW(ev(parse("p1/x1", 2), {0, 0}, {1, 0}), cartan::DivisionByZero);
  EXPECT_THROW(ev(parse("log(x1)", 2), {0, 0}, {1, 0}), cartan::DomainError);
}

TEST(Square, UnwrapsTopLevelSqrt) {
  const Expr k = parse("sqrt(x2^2*(p1^2+p2^2))", 2);
  const Expr k2 = cartan::square(k);
  EXPECT_NE(k2.root().kind, NodeKind::Call);
  EXPECT_DOUBLE_EQ(ev(k2, {0, 2}, {1, 0}), 4.0);
  const Expr r = parse("sqrt(p1^2+p2^2)+0.3*p1", 2);
  const double kv = ev(r, {0, 0}, {0.6, 0.8});
  EXPECT_NEAR(ev(cartan::square(r), {0, 0}, {0.6, 0.8}), kv * kv, 1e-15);
}

TEST(Homogeneity, Examples) {
  std::mt19937 rng(1);
  std::vector<cartan::CotangentPoint> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(oracle::random_point(rng));

  const auto norm = cartan::check_homogeneity(parse("sqrt(p1^2+p2^2)", 2), 1, pts, 1e-12);
  EXPECT_TRUE(norm.pass);
  EXPECT_LE(norm.max_residual, 1e-15);

  const auto quad = cartan::check_homogeneity(parse("p1^2", 2), 1, pts, 1e-12);
  EXPECT_FALSE(quad.pass);
  EXPECT_GT(quad.max_residual, 1e-3);

  const auto randers = cartan::check_homogeneity(parse("sqrt(p1^2+p2^2)+0.3*p1", 2), 1, pts, 1e-12);
  EXPECT_TRUE(randers.pass);
  EXPECT_EQ(randers.samples, 100u);
}
