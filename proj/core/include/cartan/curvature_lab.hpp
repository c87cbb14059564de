#pragma once

#include <span>

#include "cartan/kahler_lift.hpp"

namespace cartan {

/// Horizontal (delta) or vertical (dp) half of the adapted frame.
enum class Part { H, V };

/// Levi-Civita connection of the lifted metric on the adapted frame.
/// gamma(A, B, F) is the E_F component of nabla_{E_A} E_B, frame index
/// i for delta_i and n+i for dp^i.
struct ConnectionBlocks {
  int n = 0;
  RealTensor gamma;

  /// block(a, b, out)(i, j, h): `out`-component h of nabla_{E_a i} E_b j.
  RealTensor block(Part a, Part b, Part out) const;
};

/// curv(A, B, C, F) is the E_F component of K(E_A, E_B) E_C.
struct CurvatureBlocks {
  int n = 0;
  RealTensor curv;

  RealTensor block(Part a, Part b, Part c, Part out) const;
};

/// Symmetric 2n x 2n Ricci matrix on the adapted frame.
using RicciMatrix = RealTensor;

/// Frame metric, connection and curvature of the lift at one point, all
/// carried as jets. Seed order 4 gives the connection, 5 the curvature, 6
/// its covariant derivative.
class LiftGeometry {
 public:
  LiftGeometry(const Expr& k, const CotangentPoint& pt, const LiftParams& params, int order);

  const AdaptedFrame& frame() const { return frame_; }
  const LiftParams& params() const { return params_; }
  int n() const { return frame_.n(); }
  int dim() const { return frame_.dim(); }
  int order() const { return order_; }

  /// G_AB and its inverse, block diagonal.
  const JetTensor& metric() const { return metric_; }
  const JetTensor& metric_inverse() const { return metric_inverse_; }
  const JetTensor& connection() const { return connection_; }

  /// Needs order >= 5.
  JetTensor curvature() const;
  /// (nabla_{E_D} K)(E_A, E_B) E_C, indexed (D, A, B, C, F). Needs order >= 6
  /// and `curv` from curvature().
  RealTensor nabla_curvature(const JetTensor& curv) const;

  ConnectionBlocks connection_values() const { return {n(), values(connection_)}; }

 private:
  LiftParams params_;
  int order_;
  AdaptedFrame frame_;
  JetTensor metric_;
  JetTensor metric_inverse_;
  JetTensor connection_;
};

ConnectionBlocks connection_koszul(const Expr& k, const CotangentPoint& pt, const LiftParams& params);
ConnectionBlocks connection_closed_form(const CartanContext& ctx, const LiftParams& params);
ConnectionBlocks connection_closed_form(const Expr& k, const CotangentPoint& pt,
                                        const LiftParams& params);

CurvatureBlocks curvature(const Expr& k, const CotangentPoint& pt, const LiftParams& params);

/// Largest |C^ijk| above which a context counts as non-Riemannian.
inline constexpr double kRiemannianCartanBound = 1e-8;
double max_cartan(const CartanContext& ctx);

/// Constant-curvature Riemannian reduction of the frame curvature.
/// Throws NotRiemannian when max |C^ijk| > kRiemannianCartanBound.
CurvatureBlocks riemannian_closed_forms(const CartanContext& ctx, const LiftParams& params);

/// Ric(E_Y, E_Z) = sum G^AH G(K(E_A, E_Y) E_Z, E_H).
RicciMatrix ricci(const CurvatureBlocks& curv, const LiftedFrameMetric& g);
RicciMatrix ricci(const Expr& k, const CotangentPoint& pt, const LiftParams& params);

struct NablaCurvature {
  RealTensor full;        // (D, A, B, C, F)
  RealTensor contracted;  // (u, k, s): p^j p_i M^{uiks}_j - 2(1 - c beta^2 tau) C^{kus}
};
NablaCurvature nabla_curvature(const Expr& k, const CotangentPoint& pt, const LiftParams& params);

/// Which curvature-side suites to evaluate.
struct CurvatureSuites {
  bool connection = false;
  bool curvature = false;
  bool einstein = false;
  bool symmetry = false;

  bool any() const { return connection || curvature || einstein || symmetry; }
  int jet_order() const { return symmetry ? 6 : (curvature || einstein) ? 5 : 4; }
};

/// Per-point residuals for the selected suites (unfinalised).
Section curvature_point_checks(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                               const CurvatureSuites& suites, double tol_scale = 1.0);
/// Merge per-point sections and settle check kinds from the run-wide
/// geometry statistics (Riemannian, constant curvature, linked).
Section finalize_curvature(std::span<const Section> per_point, const LiftParams& params,
                           double tol_scale = 1.0);

/// Einstein suite over samples: Ric - c n beta G and the mean torsion I^j.
Section einstein_residual(const Expr& k, std::span<const CotangentPoint> samples,
                          const LiftParams& params, double tol_scale = 1.0);

}  // namespace cartan
