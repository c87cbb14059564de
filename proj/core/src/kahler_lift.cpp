#include "cartan/kahler_lift.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cartan/errors.hpp"

namespace cartan {

LiftParams LiftParams::make_linked(double alpha, double beta, double c) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("alpha and beta must be positive");
  return {alpha, beta, -c * alpha * beta * beta + 0.0, c, true};
}

LiftParams LiftParams::make_explicit(double alpha, double beta, double v, double c) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("alpha and beta must be positive");
  return {alpha, beta, v, c, false};
}

FrameVector FrameVector::horizontal(int n, int i) {
  auto x = zero(n);
  x.h.at(i) = 1.0;
  return x;
}

FrameVector FrameVector::vertical(int n, int i) {
  auto x = zero(n);
  x.v.at(i) = 1.0;
  return x;
}

LiftedFrameMetric lifted_metric(const CartanContext& ctx, const LiftParams& params) {
  const double pos = params.positivity(ctx.tau);
  if (!(pos > 0.0)) {
    // bound on tau: alpha + 2 tau v = 0
    const double bound = params.v != 0.0 ? -params.alpha / (2.0 * params.v) : INFINITY;
    throw NotPositiveDefinite(ctx.tau, bound);
  }
  const int n = ctx.n;
  const double a = params.alpha, b = params.beta, v = params.v;
  LiftedFrameMetric m;
  m.n = n;
  m.tau = ctx.tau;
  m.lower = RealTensor(n, 2);
  m.upper = RealTensor(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m.lower(i, j) = ctx.g_lower(i, j) / b + v / (a * b) * ctx.p_lower(i) * ctx.p_lower(j);
      m.upper(i, j) = b * ctx.g_upper(i, j) - v * b / pos * ctx.p_upper(i) * ctx.p_upper(j);
    }
  }
  return m;
}

RealTensor invert_lu(const RealTensor& m) {
  const int n = m.dim();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = m(i, j);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw SingularMetric("matrix is not invertible");
  const Eigen::MatrixXd inv = lu.inverse();
  RealTensor out(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = inv(i, j);
  }
  return out;
}

double inner(const LiftedFrameMetric& g, const FrameVector& x, const FrameVector& y) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      s += g.lower(i, j) * x.h[i] * y.h[j] + g.upper(i, j) * x.v[i] * y.v[j];
    }
  }
  return s;
}

FrameVector apply_J(const LiftedFrameMetric& g, const FrameVector& x) {
  // J delta_i = G_ik dp^k, J dp^i = -G^ik delta_k
  auto out = FrameVector::zero(g.n);
  for (int i = 0; i < g.n; ++i) {
    for (int k = 0; k < g.n; ++k) {
      out.v[k] += g.lower(i, k) * x.h[i];
      out.h[k] -= g.upper(i, k) * x.v[i];
    }
  }
  return out;
}

double fundamental_form(const LiftedFrameMetric& g, const FrameVector& x, const FrameVector& y) {
  return inner(g, x, apply_J(g, y));
}

LiftJets lift_jets(const CartanJets& b, const LiftParams& params) {
  const int n = b.n;
  const double a = params.alpha, be = params.beta, v = params.v;
  const Jet pos = params.alpha + v * b.K2;
  if (!(pos.value() > 0.0)) {
    const double bound = v != 0.0 ? -a / (2.0 * v) : INFINITY;
    throw NotPositiveDefinite(0.5 * b.K2.value(), bound);
  }
  const Jet zero = b.g_lower(0, 0).constant(0.0);
  LiftJets out{JetTensor(n, 2, zero), JetTensor(n, 2, zero)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.lower(i, j) = b.g_lower(i, j) / be + (v / (a * be)) * b.p_lower(i) * b.p_lower(j);
      out.upper(i, j) = be * b.g_upper(i, j) - (v * be) * b.p_upper(i) * b.p_upper(j) / pos;
    }
  }
  return out;
}

AdaptedFrame::AdaptedFrame(CartanJets base) : base_(std::move(base)) {
  const int n = base_.n;
  const Jet zero = base_.R(0, 0, 0).constant(0.0);
  structure_ = JetTensor(2 * n, 3, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        structure_(i, j, n + k) = base_.R(k, i, j);
        const Jet dn = base_.dp(base_.N(i, k), j);
        structure_(i, n + j, n + k) = -dn;
        structure_(n + j, i, n + k) = dn;
      }
    }
  }
}

Jet AdaptedFrame::derivative(const Jet& f, int a) const {
  const int n = base_.n;
  return a < n ? base_.delta(f, a) : base_.dp(f, a - n);
}

ObstructionTensors obstruction_tensors(const Expr& k, const CotangentPoint& pt,
                                       const LiftParams& params) {
  return obstruction_tensors(CartanJets::build(k, pt, 4), params);
}

ObstructionTensors obstruction_tensors(const CartanJets& b, const LiftParams& params) {
  const int n = b.n;
  const auto G = lift_jets(b, params).lower;
  const double scale = params.v / (params.alpha * params.beta * params.beta);

  ObstructionTensors out{RealTensor(n, 3), RealTensor(n, 3), RealTensor(n, 3)};
  for (int kk = 0; kk < n; ++kk) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double a = b.delta(G(j, kk), i).value() - b.delta(G(i, kk), j).value();
        double bd = 0.0;
        for (int r = 0; r < n; ++r) {
          a += G(i, r).value() * b.dp(b.N(j, kk), r).value() -
               G(j, r).value() * b.dp(b.N(i, kk), r).value();
          bd += G(i, r).value() * b.dp(G(j, kk), r).value() -
                G(j, r).value() * b.dp(G(i, kk), r).value();
        }
        out.A(kk, i, j) = a;
        out.B_direct(kk, i, j) = bd;
        out.B_closed(kk, i, j) = scale * (b.g_lower(i, kk).value() * b.p_lower(j).value() -
                                          b.g_lower(j, kk).value() * b.p_lower(i).value());
      }
    }
  }
  return out;
}

RealTensor nijenhuis_tensor(const AdaptedFrame& frame, const LiftParams& params) {
  const int n = frame.n();
  const int d = frame.dim();
  const auto lift = lift_jets(frame.base(), params);
  const auto& c = frame.structure();

  // J(a, f): E_f component of J E_a
  const Jet zero = lift.lower(0, 0).constant(0.0);
  JetTensor J(d, 2, zero);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      J(i, n + k) = lift.lower(i, k);
      J(n + i, k) = -lift.upper(i, k);
    }
  }
  RealTensor Jv = values(J);
  RealTensor cv = values(c);
  // dJ(e, a, f) = E_e J(a, f)
  RealTensor dJ(d, 3);
  for (int e = 0; e < d; ++e) {
    for (int a = 0; a < d; ++a) {
      for (int f = 0; f < d; ++f) dJ(e, a, f) = frame.derivative(J(a, f), e).value();
    }
  }

  RealTensor out(d, 3);
  std::vector<double> jj(d), jx(d), xj(d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int f = 0; f < d; ++f) {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (int e = 0; e < d; ++e) {
          s1 += Jv(a, e) * dJ(e, b, f) - Jv(b, e) * dJ(e, a, f);
          s2 += Jv(a, e) * cv(e, b, f);
          s3 += Jv(b, e) * cv(a, e, f);
          for (int g = 0; g < d; ++g) s1 += Jv(a, e) * Jv(b, g) * cv(e, g, f);
        }
        jj[f] = s1;                     // [JA, JB]
        jx[f] = s2 - dJ(b, a, f);       // [JA, B]
        xj[f] = s3 + dJ(a, b, f);       // [A, JB]
      }
      for (int f = 0; f < d; ++f) {
        double s = jj[f] - cv(a, b, f);
        for (int g = 0; g < d; ++g) s -= Jv(g, f) * (jx[g] + xj[g]);
        out(a, b, f) = s;
      }
    }
  }
  return out;
}

RealTensor nijenhuis_from_obstructions(const CartanJets& b, const LiftParams& params) {
  const int n = b.n;
  const auto obs = obstruction_tensors(b, params);
  const auto GU = values(lift_jets(b, params).upper);
  RealTensor out(2 * n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kk = 0; kk < n; ++kk) {
        double h = 0.0;
        for (int m = 0; m < n; ++m) h += obs.A(m, i, j) * GU(m, kk);
        out(i, j, kk) = h;
        out(i, j, n + kk) = obs.B_direct(kk, i, j) - b.R(kk, i, j).value();
      }
    }
  }
  return out;
}

FrameVector nijenhuis(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                      const FrameVector& x, const FrameVector& y) {
  const AdaptedFrame frame(CartanJets::build(k, pt, 4));
  const int n = frame.n();
  const auto N = nijenhuis_tensor(frame, params);
  auto comp = [n](const FrameVector& u, int a) { return a < n ? u.h[a] : u.v[a - n]; };
  auto out = FrameVector::zero(n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) {
      const double w = comp(x, a) * comp(y, b);
      if (w == 0.0) continue;
      for (int f = 0; f < n; ++f) {
        out.h[f] += w * N(a, b, f);
        out.v[f] += w * N(a, b, n + f);
      }
    }
  }
  return out;
}

ConstantCurvatureResidual constant_curvature_residual(const CartanContext& ctx, double c) {
  const int n = ctx.n;
  ConstantCurvatureResidual out{RealTensor(n, 3), RealTensor(n, 2)};
  for (int kk = 0; kk < n; ++kk) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        out.components(kk, i, j) =
            ctx.R(kk, i, j) - c * (ctx.g_lower(j, kk) * ctx.p_lower(i) -
                                   ctx.g_lower(i, kk) * ctx.p_lower(j));
      }
    }
  }
  for (int h = 0; h < n; ++h) {
    for (int kk = 0; kk < n; ++kk) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += ctx.R(h, j, kk) * ctx.p_upper(j);
      out.contracted(h, kk) =
          s - c * (ctx.K2 * ctx.g_lower(h, kk) - ctx.p_lower(h) * ctx.p_lower(kk));
    }
  }
  return out;
}

bool tube_predicate(double K2, const LiftParams& params) {
  if (!(params.c > 0.0)) throw NotApplicable("tube condition needs c > 0");
  return K2 < 1.0 / (params.c * params.beta * params.beta);
}

bool tube_predicate(const CartanContext& ctx, const LiftParams& params) {
  return tube_predicate(ctx.K2, params);
}

namespace {

constexpr double kIntegrableGate = 1e-8;
constexpr double kNonIntegrableGate = 1e-3;

FrameVector random_vector(int n, std::mt19937_64& rng) {
  auto u = [&] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
  auto x = FrameVector::zero(n);
  for (int i = 0; i < n; ++i) x.h[i] = u();
  for (int i = 0; i < n; ++i) x.v[i] = u();
  return x;
}

}  // namespace

Section kahler_point_checks(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                            std::uint64_t seed, double tol_scale) {
  const double alg = 1e-12 * tol_scale;
  const double diff = 1e-8 * tol_scale;

  Check inverse("kahler.metric_inverse", "G_ij G^jk = delta_i^k", alg);
  Check closed_inverse("kahler.inverse_closed_form",
                       "G^kl = beta g^kl - v beta/(alpha+2 tau v) p^k p^l", 1e-10 * tol_scale);
  Check hermitian("kahler.hermitian", "G(JX,JY) = G(X,Y)", alg);
  Check j_squared("kahler.J_squared", "J^2 = -Id", alg);
  Check pairing("kahler.symplectic_pairing",
                "theta(dp^i,delta_j) = delta^i_j, theta(delta,delta) = theta(dp,dp) = 0", alg);
  Check antisym("kahler.form_antisymmetry", "theta(X,Y) = -theta(Y,X)", alg);
  Check a_vanish("kahler.A_vanishes",
                 "A_kij = delta_i G_jk - delta_j G_ik + G_ir dp^r N_jk - G_jr dp^r N_ik = 0", diff);
  Check b_closed("kahler.B_closed_form", "B_kij = v/(alpha beta^2) (g_ik p_j - g_jk p_i)", diff);
  Check routes("kahler.nijenhuis_routes",
               "N_J(delta_i,delta_j) = A_hij G^hk delta_k + (B_kij - R_kij) dp^k", diff);
  Check nij("kahler.nijenhuis", "N_J(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y]", 1e-7 * tol_scale);
  Check predictor("kahler.integrable_curvature_residual",
                  "R_kij - c_v (g_jk p_i - g_ik p_j), c_v = -v/(alpha beta^2)", 0.0,
                  CheckKind::Informational);
  Check curvature("kahler.constant_curvature",
                  "R_kij = c (g_jk p_i - g_ik p_j), R_hjk p^j = c (K^2 g_hk - p_h p_k)", 0.0,
                  CheckKind::Informational);

  const AdaptedFrame frame(CartanJets::build(k, pt, 4));
  const auto& b = frame.base();
  const auto ctx = to_context(b);
  const int n = ctx.n;
  const auto G = lifted_metric(ctx, params);

  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += G.lower(i, j) * G.upper(j, l);
      inverse.absorb(s - (i == l ? 1.0 : 0.0));
    }
  }
  closed_inverse.absorb(max_abs_diff(G.upper, invert_lu(G.lower)));

  std::mt19937_64 rng(seed);
  for (int t = 0; t < 4; ++t) {
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    const auto jx = apply_J(G, x);
    const auto jy = apply_J(G, y);
    hermitian.absorb(inner(G, jx, jy) - inner(G, x, y));
    const auto jjx = apply_J(G, jx);
    for (int i = 0; i < n; ++i) {
      j_squared.absorb(jjx.h[i] + x.h[i]);
      j_squared.absorb(jjx.v[i] + x.v[i]);
    }
    antisym.absorb(fundamental_form(G, x, y) + fundamental_form(G, y, x));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto hi = FrameVector::horizontal(n, i), hj = FrameVector::horizontal(n, j);
      const auto vi = FrameVector::vertical(n, i), vj = FrameVector::vertical(n, j);
      pairing.absorb(fundamental_form(G, vi, hj) - (i == j ? 1.0 : 0.0));
      pairing.absorb(fundamental_form(G, hi, hj));
      pairing.absorb(fundamental_form(G, vi, vj));
    }
  }

  const auto obs = obstruction_tensors(b, params);
  a_vanish.absorb(max_abs(obs.A));
  b_closed.absorb(max_abs_diff(obs.B_direct, obs.B_closed));

  const auto N = nijenhuis_tensor(frame, params);
  const auto via = nijenhuis_from_obstructions(b, params);
  double route = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int f = 0; f < 2 * n; ++f) route = std::max(route, std::abs(N(i, j, f) - via(i, j, f)));
    }
  }
  routes.absorb(route);
  nij.absorb(max_abs(N));

  predictor.absorb(constant_curvature_residual(ctx, params.integrable_curvature()).max_abs());
  curvature.absorb(constant_curvature_residual(ctx, params.c).max_abs());

  Section out{inverse, closed_inverse, hermitian, j_squared, pairing, antisym, a_vanish,
              b_closed, routes, nij, predictor, curvature};

  if (params.linked && params.c > 0.0) {
    Check tube("kahler.tube_equals_positivity",
               "2 tau = K^2 < 1/(c beta^2) iff alpha + 2 tau v > 0", 0.0);
    tube.absorb(tube_predicate(ctx, params) == (params.positivity(ctx.tau) > 0.0) ? 0.0 : 1.0);
    out.push_back(tube);
  }
  return out;
}

Section finalize_kahler(std::span<const Section> per_point, double tol_scale) {
  Section out = merge_sections(per_point);
  Check* nij = find_check(out, "kahler.nijenhuis");
  const Check* predictor = find_check(out, "kahler.integrable_curvature_residual");
  if (nij && predictor) {
    if (predictor->max_abs_residual <= kIntegrableGate * tol_scale) {
      nij->kind = CheckKind::Hard;
      nij->tolerance = 1e-7 * tol_scale;
    } else if (predictor->max_abs_residual > kNonIntegrableGate) {
      nij->kind = CheckKind::ExpectedNegative;
      nij->tolerance = kNonIntegrableGate;
    } else {
      nij->kind = CheckKind::Informational;
    }
  }
  for (auto& c : out) c.finalize();
  return out;
}

Section verify_kahler(const Expr& k, std::span<const CotangentPoint> samples,
                      const LiftParams& params, std::uint64_t seed, double tol_scale) {
  if (samples.empty()) throw std::invalid_argument("verify_kahler: no samples");
  std::vector<Section> parts;
  parts.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    parts.push_back(kahler_point_checks(k, samples[i], params, seed + i, tol_scale));
  }
  return finalize_kahler(parts, tol_scale);
}

}  // namespace cartan
