#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"
#include "cartan/jet.hpp"
#include "cartan/point.hpp"
#include "cartan/report.hpp"
#include "cartan/tensor.hpp"

namespace cartan {

using JetTensor = Tensor<Jet>;

/// Per-coordinate [lo, hi] bounds for x.
struct ChartBox {
  std::vector<std::pair<double, double>> bounds;

  bool contains(std::span<const double> x) const;
};

/// Environment over jets: x_i seeded on direction i, p_i on direction n+i.
EvalEnv<Jet> seed(const CotangentPoint& pt, int order);

/// Mixed partial of `f` at `pt`; `directions` lists coordinate directions
/// (0..n-1 for x, n..2n-1 for p), repeats allowed.
double partial(const Expr& f, const CotangentPoint& pt, std::span<const int> directions);

/// Gauss-Jordan inverse over jets, pivoting on the value part.
JetTensor invert(const JetTensor& m);

RealTensor values(const JetTensor& t);

/// Base tensors of a Cartan space at one point, carried as jets so that
/// frame derivatives of every quantity stay available.
///
/// With K^2 seeded at order m the fields carry: p^i m-1, g^ij and g_ij m-2,
/// C and gamma and N m-3, H, P and R m-4.
///
/// Index conventions:
///   cartan(i,j,k)        = C^ijk
///   cartan_mixed(j,k,i)  = C^jk_i = g_is C^sjk
///   christoffel(i,j,k)   = gamma^i_jk
///   H(i,j,k)             = H^i_jk,  P(i,j,k) = P^i_jk
///   R(k,i,j)             = R_kij, the coefficient in [delta_i, delta_j] = R_kij dp^k
struct CartanJets {
  int n = 0;
  int order = 0;
  CotangentPoint point;

  Jet K2;
  JetTensor p_lower;
  JetTensor p_upper;
  JetTensor g_upper;
  JetTensor g_lower;
  JetTensor cartan;
  JetTensor cartan_mixed;
  JetTensor christoffel;
  JetTensor N;
  JetTensor H;
  JetTensor P;
  JetTensor R;
  JetTensor mean_torsion;

  static CartanJets build(const Expr& k, const CotangentPoint& pt, int order);

  /// d/dx^i
  Jet dx(const Jet& f, int i) const { return f.derivative(i); }
  /// d/dp_i
  Jet dp(const Jet& f, int i) const { return f.derivative(n + i); }
  /// delta_i f = d_i f + N_ij d^j f
  Jet delta(const Jet& f, int i) const;
};

/// Value-level snapshot of the base tensors at a point.
struct CartanContext {
  int n = 0;
  CotangentPoint point;
  double K2 = 0.0;
  double tau = 0.0;
  RealTensor p_lower;
  RealTensor p_upper;
  RealTensor g_upper;
  RealTensor g_lower;
  RealTensor cartan;
  RealTensor cartan_mixed;
  RealTensor christoffel;
  RealTensor N;
  RealTensor H;
  RealTensor P;
  RealTensor R;
  RealTensor mean_torsion;
};

CartanContext to_context(const CartanJets& jets);
CartanContext build_context(const Expr& k, const CotangentPoint& pt);

enum class FieldId { K2, PLower, PUpper, GUpper, GLower, N, Cartan };

struct FieldRef {
  FieldId id = FieldId::K2;
  std::vector<int> indices;
};

/// delta_i of a named base field component, or of an arbitrary expression.
double adapted_derivative(const Expr& k, const CotangentPoint& pt, const FieldRef& f, int i);
double adapted_derivative(const Expr& k, const CotangentPoint& pt, const Expr& f, int i);

enum class Slot { Upper, Lower };
using Valence = std::vector<Slot>;

/// h-covariant derivative with the canonical metrical connection. The
/// result has one more (trailing, lower) index than the field.
RealTensor h_covariant(const CartanJets& jets, const JetTensor& field, const Valence& valence);
/// Named-field variant: the declared valence must match the field's.
RealTensor h_covariant(const CartanJets& jets, FieldId field, const Valence& valence);

/// Residual checks for the structural identities of the canonical metrical
/// connection, maximised over the samples. Tolerances are multiplied by
/// tol_scale.
Section verify_base_identities(const Expr& k, std::span<const CotangentPoint> samples,
                               double tol_scale = 1.0);

}  // namespace cartan
