#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cartan/cartan_space.hpp"
#include "cartan/report.hpp"
#include "cartan/tensor.hpp"

namespace cartan {

/// Constants of the lift. In linked mode v = -c alpha beta^2.
struct LiftParams {
  double alpha = 1.0;
  double beta = 1.0;
  double v = 0.0;
  double c = 0.0;
  bool linked = true;

  static LiftParams make_linked(double alpha, double beta, double c);
  static LiftParams make_explicit(double alpha, double beta, double v, double c);

  /// alpha + 2 tau v; the lifted metric is positive definite iff this is > 0.
  double positivity(double tau) const { return alpha + 2.0 * tau * v; }
  /// The curvature constant for which v is the integrable choice.
  double integrable_curvature() const { return -v / (alpha * beta * beta); }
};

/// Horizontal block G_ij (on delta_i) and vertical block G^ij (on dp^i).
struct LiftedFrameMetric {
  int n = 0;
  double tau = 0.0;
  RealTensor lower;  // G_ij
  RealTensor upper;  // G^ij
};

/// Components on the adapted frame: h on delta_i, v on dp^i.
struct FrameVector {
  std::vector<double> h;
  std::vector<double> v;

  static FrameVector zero(int n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
  static FrameVector horizontal(int n, int i);
  static FrameVector vertical(int n, int i);
};

LiftedFrameMetric lifted_metric(const CartanContext& ctx, const LiftParams& params);
/// G^ij by LU inversion of G_ij, for cross-checking the closed form.
RealTensor invert_lu(const RealTensor& m);

double inner(const LiftedFrameMetric& g, const FrameVector& x, const FrameVector& y);
FrameVector apply_J(const LiftedFrameMetric& g, const FrameVector& x);
/// theta(X, Y) = G(X, JY)
double fundamental_form(const LiftedFrameMetric& g, const FrameVector& x, const FrameVector& y);

/// Jet-valued G_ij and G^ij.
struct LiftJets {
  JetTensor lower;
  JetTensor upper;
};
LiftJets lift_jets(const CartanJets& base, const LiftParams& params);

/// Adapted frame E_A = (delta_1..delta_n, dp^1..dp^n) with its structure
/// functions [E_A, E_B] = c^C_AB E_C:
///   [delta_i, delta_j] = R_kij dp^k
///   [delta_i, dp^j]    = -(dp^j N_ik) dp^k
///   [dp^i, dp^j]       = 0
class AdaptedFrame {
 public:
  explicit AdaptedFrame(CartanJets base);

  const CartanJets& base() const { return base_; }
  int n() const { return base_.n; }
  int dim() const { return 2 * base_.n; }

  /// E_A f
  Jet derivative(const Jet& f, int a) const;
  /// structure()(A, B, C) = c^C_AB
  const JetTensor& structure() const { return structure_; }

 private:
  CartanJets base_;
  JetTensor structure_;
};

struct ObstructionTensors {
  RealTensor A;         // A(k, i, j) = A_kij
  RealTensor B_direct;  // G_ir dp^r G_jk - G_jr dp^r G_ik
  RealTensor B_closed;  // v/(alpha beta^2) (g_ik p_j - g_jk p_i)
};

ObstructionTensors obstruction_tensors(const Expr& k, const CotangentPoint& pt,
                                       const LiftParams& params);
ObstructionTensors obstruction_tensors(const CartanJets& base, const LiftParams& params);

/// Nijenhuis tensor of J on the frame: result(A, B, F) is the E_F component
/// of N_J(E_A, E_B), computed from the frame brackets and frame derivatives
/// of the components of J.
RealTensor nijenhuis_tensor(const AdaptedFrame& frame, const LiftParams& params);
/// The same tensor on the (delta, delta) block from A, B and R:
/// N_J(delta_i, delta_j) = A_hij G^hk delta_k + (B_kij - R_kij) dp^k.
RealTensor nijenhuis_from_obstructions(const CartanJets& base, const LiftParams& params);

/// N_J(X, Y) for constant-coefficient frame vectors.
FrameVector nijenhuis(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                      const FrameVector& x, const FrameVector& y);

struct ConstantCurvatureResidual {
  RealTensor components;  // R_kij - c (g_jk p_i - g_ik p_j), indexed (k, i, j)
  RealTensor contracted;  // R_hjk p^j - c (K^2 g_hk - p_h p_k), indexed (h, k)
  double max_abs() const { return std::max(cartan::max_abs(components), cartan::max_abs(contracted)); }
};

ConstantCurvatureResidual constant_curvature_residual(const CartanContext& ctx, double c);

/// 2 tau = K^2 < 1/(c beta^2). Only meaningful for c > 0.
bool tube_predicate(const CartanContext& ctx, const LiftParams& params);
bool tube_predicate(double K2, const LiftParams& params);

/// Per-point residuals of the lift checks (unfinalised). `seed` drives the
/// random frame vectors used for the pointwise algebraic identities.
Section kahler_point_checks(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                            std::uint64_t seed, double tol_scale = 1.0);
/// Merges per-point sections and settles pass/fail, including whether the
/// Nijenhuis check is a vanishing or an expected-nonvanishing one.
Section finalize_kahler(std::span<const Section> per_point, double tol_scale = 1.0);

Section verify_kahler(const Expr& k, std::span<const CotangentPoint> samples,
                      const LiftParams& params, std::uint64_t seed = 42, double tol_scale = 1.0);

}  // namespace cartan
