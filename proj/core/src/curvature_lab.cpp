#include "cartan/curvature_lab.hpp"

#include <cmath>
#include <stdexcept>

#include "cartan/errors.hpp"

namespace cartan {

namespace {

int offset(Part p, int n) { return p == Part::H ? 0 : n; }

}  // namespace

RealTensor ConnectionBlocks::block(Part a, Part b, Part out) const {
  RealTensor t(n, 3);
  const int oa = offset(a, n), ob = offset(b, n), oo = offset(out, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int h = 0; h < n; ++h) t(i, j, h) = gamma(oa + i, ob + j, oo + h);
    }
  }
  return t;
}

RealTensor CurvatureBlocks::block(Part a, Part b, Part c, Part out) const {
  RealTensor t(n, 4);
  const int oa = offset(a, n), ob = offset(b, n), oc = offset(c, n), oo = offset(out, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) t(i, j, k, s) = curv(oa + i, ob + j, oc + k, oo + s);
      }
    }
  }
  return t;
}

LiftGeometry::LiftGeometry(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                           int order)
    : params_(params), order_(order), frame_(CartanJets::build(k, pt, order)) {
  const int n = frame_.n();
  const int d = frame_.dim();
  const auto lift = lift_jets(frame_.base(), params);
  const Jet zero = lift.lower(0, 0).constant(0.0);

  metric_ = JetTensor(d, 2, zero);
  metric_inverse_ = JetTensor(d, 2, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      metric_(i, j) = lift.lower(i, j);
      metric_(n + i, n + j) = lift.upper(i, j);
      metric_inverse_(i, j) = lift.upper(i, j);
      metric_inverse_(n + i, n + j) = lift.lower(i, j);
    }
  }

  // dG(e, b, c) = E_e G_bc
  const Jet dzero = zero.truncated(order - 3);
  JetTensor dG(d, 3, dzero);
  for (int e = 0; e < d; ++e) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        dG(e, b, c) = frame_.derivative(metric_(b, c), e);
        dG(e, n + b, n + c) = frame_.derivative(metric_(n + b, n + c), e);
      }
    }
  }

  // 2 G(nabla_A E_B, E_C) = E_A G_BC + E_B G_AC - E_C G_AB
  //                        + G([A,B],C) - G([A,C],B) - G([B,C],A)
  const auto& cs = frame_.structure();
  auto bracket_dot = [&](int a, int b, int c) {
    Jet s = cs(a, b, 0).constant(0.0);
    for (int e = 0; e < d; ++e) s += cs(a, b, e) * metric_(e, c);
    return s;
  };
  JetTensor lower(d, 3, cs(0, 0, 0).constant(0.0));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        lower(a, b, c) = 0.5 * (dG(a, b, c) + dG(b, a, c) - dG(c, a, b) + bracket_dot(a, b, c) -
                                bracket_dot(a, c, b) - bracket_dot(b, c, a));
      }
    }
  }
  connection_ = JetTensor(d, 3, lower(0, 0, 0).constant(0.0));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int f = 0; f < d; ++f) {
        Jet s = connection_(a, b, f);
        for (int c = 0; c < d; ++c) s += lower(a, b, c) * metric_inverse_(c, f);
        connection_(a, b, f) = s;
      }
    }
  }
}

JetTensor LiftGeometry::curvature() const {
  if (order_ < 5) throw std::logic_error("curvature needs jets of order 5");
  const int d = dim();
  const auto& g = connection_;
  const auto& cs = frame_.structure();

  // dg(e, a, b, f) = E_e gamma(a, b, f)
  JetTensor dg(d, 4, g(0, 0, 0).truncated(order_ - 5));
  for (int e = 0; e < d; ++e) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int f = 0; f < d; ++f) dg(e, a, b, f) = frame_.derivative(g(a, b, f), e);
      }
    }
  }

  JetTensor curv(d, 4, dg(0, 0, 0, 0).constant(0.0));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int c = 0; c < d; ++c) {
        for (int f = 0; f < d; ++f) {
          Jet s = dg(a, b, c, f) - dg(b, a, c, f);
          for (int e = 0; e < d; ++e) {
            s += g(b, c, e) * g(a, e, f) - g(a, c, e) * g(b, e, f) - cs(a, b, e) * g(e, c, f);
          }
          curv(a, b, c, f) = s;
        }
      }
    }
  }
  return curv;
}

RealTensor LiftGeometry::nabla_curvature(const JetTensor& curv) const {
  if (order_ < 6) throw std::logic_error("covariant derivative of curvature needs jets of order 6");
  const int d = dim();
  const auto g = values(connection_);
  const auto K = values(curv);
  RealTensor out(d, 5);
  for (int e = 0; e < d; ++e) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) {
          for (int f = 0; f < d; ++f) {
            double s = frame_.derivative(curv(a, b, c, f), e).value();
            for (int x = 0; x < d; ++x) {
              s += K(a, b, c, x) * g(e, x, f) - g(e, a, x) * K(x, b, c, f) -
                   g(e, b, x) * K(a, x, c, f) - g(e, c, x) * K(a, b, x, f);
            }
            out(e, a, b, c, f) = s;
          }
        }
      }
    }
  }
  return out;
}

ConnectionBlocks connection_koszul(const Expr& k, const CotangentPoint& pt, const LiftParams& params) {
  return LiftGeometry(k, pt, params, 4).connection_values();
}

ConnectionBlocks connection_closed_form(const CartanContext& ctx, const LiftParams& params) {
  const int n = ctx.n;
  const auto G = lifted_metric(ctx, params);
  const double be = params.beta, c = params.c;
  const auto& gu = ctx.g_upper;
  const auto& gl = ctx.g_lower;
  const auto& P = ctx.P;
  const auto& H = ctx.H;
  const auto& Cm = ctx.cartan_mixed;
  const auto& p = ctx.p_lower;

  // C_ijh with all indices lowered
  RealTensor Cl(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int h = 0; h < n; ++h) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) {
            for (int e = 0; e < n; ++e) s += gl(i, a) * gl(j, b) * gl(h, e) * ctx.cartan(a, b, e);
          }
        }
        Cl(i, j, h) = s;
      }
    }
  }

  ConnectionBlocks out{n, RealTensor(2 * n, 3)};
  auto& gm = out.gamma;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int h = 0; h < n; ++h) {
        // nabla_{dp^i} dp^j
        double s = 0.0;
        for (int kk = 0; kk < n; ++kk) {
          for (int r = 0; r < n; ++r) {
            s += (P(i, kk, r) * gu(r, j) + P(j, kk, r) * gu(r, i)) * gu(h, kk);
          }
        }
        gm(n + i, n + j, h) = 0.5 * be * be * s;
        gm(n + i, n + j, n + h) = -Cm(i, j, h) + c * be * G.upper(i, j) * p(h);

        // nabla_{delta_i} dp^j
        double pg = 0.0;
        for (int kk = 0; kk < n; ++kk) {
          for (int r = 0; r < n; ++r) pg += P(kk, i, r) * G.upper(r, j) * G.lower(kk, h);
        }
        gm(i, n + j, h) = Cm(j, h, i) - c * be * G.upper(j, h) * p(i);
        gm(i, n + j, n + h) = 0.5 * P(j, i, h) - 0.5 * pg - H(j, i, h);

        // nabla_{dp^i} delta_j
        double pg2 = 0.0;
        for (int kk = 0; kk < n; ++kk) {
          for (int r = 0; r < n; ++r) pg2 += P(kk, j, r) * G.upper(r, i) * G.lower(kk, h);
        }
        gm(n + i, j, h) = Cm(i, h, j) - c * be * G.upper(i, h) * p(j);
        gm(n + i, j, n + h) = -0.5 * (P(i, j, h) + pg2);

        // nabla_{delta_i} delta_j
        gm(i, j, h) = H(h, i, j);
        gm(i, j, n + h) = -Cl(i, j, h) / (be * be) + c * be * G.lower(h, j) * p(i);
      }
    }
  }
  return out;
}

ConnectionBlocks connection_closed_form(const Expr& k, const CotangentPoint& pt,
                                        const LiftParams& params) {
  return connection_closed_form(build_context(k, pt), params);
}

CurvatureBlocks curvature(const Expr& k, const CotangentPoint& pt, const LiftParams& params) {
  const LiftGeometry geo(k, pt, params, 5);
  return {geo.n(), values(geo.curvature())};
}

double max_cartan(const CartanContext& ctx) { return max_abs(ctx.cartan); }

CurvatureBlocks riemannian_closed_forms(const CartanContext& ctx, const LiftParams& params) {
  const double cm = max_cartan(ctx);
  if (cm > kRiemannianCartanBound) throw NotRiemannian(cm);
  const int n = ctx.n;
  const auto G = lifted_metric(ctx, params);
  const double c = params.c, cb = params.c * params.beta;
  auto kd = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  CurvatureBlocks out{n, RealTensor(2 * n, 4)};
  auto& K = out.curv;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int s = 0; s < n; ++s) {
          // K(delta_i, delta_j) delta_k
          K(i, j, k, s) = cb * (G.lower(k, j) * kd(s, i) - G.lower(k, i) * kd(s, j));
          // K(dp^i, delta_j) delta_k and its antisymmetric partner
          K(n + i, j, k, n + s) = cb * G.lower(s, k) * kd(i, j);
          K(j, n + i, k, n + s) = -K(n + i, j, k, n + s);
          // K(dp^i, dp^j) dp^k
          K(n + i, n + j, n + k, n + s) =
              cb * (G.upper(j, k) * kd(i, s) - G.upper(i, k) * kd(j, s));
          // K(delta_i, dp^j) dp^k and K(dp^j, delta_i) dp^k
          K(i, n + j, n + k, s) = cb * G.upper(k, s) * kd(j, i);
          K(n + j, i, n + k, s) = -cb * G.upper(k, s) * kd(j, i);
          // K(delta_i, delta_j) dp^k, with R^k_sij = c (g_si delta^k_j - g_sj delta^k_i).
          // R here is the bracket coefficient of [delta_i, delta_j], which enters
          // with a minus sign.
          double rg = 0.0;
          for (int h = 0; h < n; ++h) rg += ctx.R(h, i, j) * G.upper(h, k);
          K(i, j, n + k, n + s) =
              c * (ctx.g_lower(s, i) * kd(k, j) - ctx.g_lower(s, j) * kd(k, i)) -
              cb * rg * ctx.p_lower(s);
          // K(dp^i, dp^j) delta_k
          K(n + i, n + j, k, s) = cb * (G.upper(i, s) * kd(j, k) - G.upper(j, s) * kd(i, k));
        }
      }
    }
  }
  return out;
}

RicciMatrix ricci(const CurvatureBlocks& curv, const LiftedFrameMetric& g) {
  const int n = curv.n;
  const int d = 2 * n;
  // frame metric and inverse as 2n x 2n
  RealTensor G(d, 2), Gi(d, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      G(i, j) = g.lower(i, j);
      G(n + i, n + j) = g.upper(i, j);
      Gi(i, j) = g.upper(i, j);
      Gi(n + i, n + j) = g.lower(i, j);
    }
  }
  RicciMatrix ric(d, 2);
  for (int y = 0; y < d; ++y) {
    for (int z = 0; z < d; ++z) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        for (int h = 0; h < d; ++h) {
          if (Gi(a, h) == 0.0) continue;
          double kz = 0.0;
          for (int f = 0; f < d; ++f) kz += curv.curv(a, y, z, f) * G(f, h);
          s += Gi(a, h) * kz;
        }
      }
      ric(y, z) = s;
    }
  }
  return ric;
}

RicciMatrix ricci(const Expr& k, const CotangentPoint& pt, const LiftParams& params) {
  const LiftGeometry geo(k, pt, params, 5);
  const CurvatureBlocks cb{geo.n(), values(geo.curvature())};
  return ricci(cb, lifted_metric(to_context(geo.frame().base()), params));
}

namespace {

RealTensor contracted_identity(const CartanContext& ctx, const LiftParams& params,
                               const RealTensor& full) {
  const int n = ctx.n;
  const double factor = 2.0 * (1.0 - params.c * params.beta * params.beta * ctx.tau);
  RealTensor out(n, 3);
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < n; ++k) {
      for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            sum += ctx.p_upper(j) * ctx.p_lower(i) * full(n + u, n + i, j, n + k, s);
          }
        }
        out(u, k, s) = sum - factor * ctx.cartan(k, u, s);
      }
    }
  }
  return out;
}

}  // namespace

NablaCurvature nabla_curvature(const Expr& k, const CotangentPoint& pt, const LiftParams& params) {
  const LiftGeometry geo(k, pt, params, 6);
  NablaCurvature out;
  out.full = geo.nabla_curvature(geo.curvature());
  out.contracted = contracted_identity(to_context(geo.frame().base()), params, out.full);
  return out;
}

namespace {

constexpr double kContrast = 1e-3;

bool kahler_linked(const LiftParams& p) {
  const double want = -p.c * p.alpha * p.beta * p.beta;
  return std::abs(p.v - want) <= 1e-12 * std::max(1.0, std::abs(want));
}

}  // namespace

Section curvature_point_checks(const Expr& k, const CotangentPoint& pt, const LiftParams& params,
                               const CurvatureSuites& suites, double tol_scale) {
  Section out;
  if (!suites.any()) return out;

  const LiftGeometry geo(k, pt, params, suites.jet_order());
  const auto& frame = geo.frame();
  const auto ctx = to_context(frame.base());
  const int n = ctx.n;
  const int d = 2 * n;
  const auto G = lifted_metric(ctx, params);

  Check cartan_max("geometry.cartan_max", "C^ijk = 0 iff Riemannian", 0.0, CheckKind::Informational);
  cartan_max.absorb(max_cartan(ctx));
  Check const_curv("geometry.constant_curvature", "R_kij = c (g_jk p_i - g_ik p_j)", 0.0,
                   CheckKind::Informational);
  const_curv.absorb(constant_curvature_residual(ctx, params.c).max_abs());
  Check mean_torsion("geometry.mean_torsion", "I^j = C^jk_k", 0.0, CheckKind::Informational);
  mean_torsion.absorb(max_abs(ctx.mean_torsion));
  out.insert(out.end(), {cartan_max, const_curv, mean_torsion});

  const auto gamma = values(geo.connection());
  const auto cs = values(frame.structure());

  if (suites.connection) {
    Check torsion("connection.torsion_free", "nabla_X Y - nabla_Y X - [X,Y] = 0", 1e-9 * tol_scale);
    Check metric("connection.metric", "nabla G = 0", 1e-9 * tol_scale);
    Check closed("connection.closed_form",
                 "nabla_{dp}dp, nabla_{delta}dp, nabla_{dp}delta, nabla_{delta}delta closed forms "
                 "= Koszul",
                 1e-8 * tol_scale);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int f = 0; f < d; ++f) torsion.absorb(gamma(a, b, f) - gamma(b, a, f) - cs(a, b, f));
      }
    }
    const auto& Gj = geo.metric();
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) {
          double s = frame.derivative(Gj(b, c), a).value();
          for (int e = 0; e < d; ++e) {
            s -= gamma(a, b, e) * Gj(e, c).value() + gamma(a, c, e) * Gj(b, e).value();
          }
          metric.absorb(s);
        }
      }
    }
    closed.absorb(max_abs_diff(connection_closed_form(ctx, params).gamma, gamma));
    out.insert(out.end(), {torsion, metric, closed});
  }

  if (!(suites.curvature || suites.einstein || suites.symmetry)) return out;

  const JetTensor curv_j = geo.curvature();
  const CurvatureBlocks curv{n, values(curv_j)};
  const bool riemannian_here = max_cartan(ctx) <= kRiemannianCartanBound;

  if (suites.curvature) {
    Check antisym("curvature.antisymmetry", "K(X,Y)Z = -K(Y,X)Z", 1e-9 * tol_scale);
    Check bianchi("curvature.bianchi", "K(X,Y)Z + K(Y,Z)X + K(Z,X)Y = 0", 1e-8 * tol_scale);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        for (int c = 0; c < d; ++c) {
          for (int f = 0; f < d; ++f) {
            antisym.absorb(curv.curv(a, b, c, f) + curv.curv(b, a, c, f));
            bianchi.absorb(curv.curv(a, b, c, f) + curv.curv(b, c, a, f) + curv.curv(c, a, b, f));
          }
        }
      }
    }
    out.insert(out.end(), {antisym, bianchi});
    if (riemannian_here) {
      Check closed("curvature.riemannian_closed_form",
                   "K(delta_i,delta_j)delta_k = c beta (G_kj delta^s_i - G_ki delta^s_j) delta_s, ...",
                   1e-7 * tol_scale);
      closed.absorb(max_abs_diff(riemannian_closed_forms(ctx, params).curv, curv.curv));
      out.push_back(closed);
    }
  }

  if (suites.einstein) {
    Check residual("einstein.residual", "Ric(X,Y) = c n beta G(X,Y)", 1e-6 * tol_scale);
    Check symmetric("einstein.ricci_symmetry", "Ric(X,Y) = Ric(Y,X)", 1e-9 * tol_scale);
    Check mixed("einstein.mixed_blocks", "Ric(delta_j, dp^k) = 0", 1e-8 * tol_scale);
    const auto ric = ricci(curv, G);
    const double lambda = params.c * n * params.beta;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        residual.absorb(ric(i, j) - lambda * G.lower(i, j));
        residual.absorb(ric(n + i, n + j) - lambda * G.upper(i, j));
        residual.absorb(ric(i, n + j));
        residual.absorb(ric(n + i, j));
        mixed.absorb(ric(i, n + j));
        mixed.absorb(ric(n + i, j));
      }
    }
    for (int y = 0; y < d; ++y) {
      for (int z = 0; z < d; ++z) symmetric.absorb(ric(y, z) - ric(z, y));
    }
    out.insert(out.end(), {residual, symmetric, mixed});
  }

  if (suites.symmetry) {
    Check nabla("symmetry.nabla_curvature", "nabla K = 0", 1e-5 * tol_scale);
    Check identity("symmetry.contracted_identity",
                   "p^j p_i M^{uiks}_j = 2(1 - c beta^2 tau) C^{kus}", 1e-5 * tol_scale);
    const auto full = geo.nabla_curvature(curv_j);
    nabla.absorb(max_abs(full));
    identity.absorb(max_abs(contracted_identity(ctx, params, full)));
    out.insert(out.end(), {nabla, identity});
  }
  return out;
}

Section finalize_curvature(std::span<const Section> per_point, const LiftParams& params,
                           double tol_scale) {
  Section out = merge_sections(per_point);
  auto stat = [&](const char* name) {
    const Check* c = find_check(out, name);
    return c ? c->max_abs_residual : INFINITY;
  };
  const bool riemannian = stat("geometry.cartan_max") <= kRiemannianCartanBound;
  const bool kahler = kahler_linked(params) && stat("geometry.constant_curvature") <= 1e-8 * tol_scale;
  const bool theorem = kahler && riemannian;

  auto set = [&](const char* name, CheckKind kind, double tol = 0.0) {
    if (Check* c = find_check(out, name)) {
      c->kind = kind;
      if (kind == CheckKind::ExpectedNegative) c->tolerance = tol;
    }
  };
  if (!kahler) set("connection.closed_form", CheckKind::Informational);
  if (!theorem) {
    set("curvature.riemannian_closed_form", CheckKind::Informational);
    set("einstein.mixed_blocks", CheckKind::Informational);
    if (stat("geometry.mean_torsion") > kContrast) {
      set("einstein.residual", CheckKind::ExpectedNegative, kContrast);
    } else {
      set("einstein.residual", CheckKind::Informational);
    }
    if (stat("geometry.cartan_max") > kContrast) {
      set("symmetry.nabla_curvature", CheckKind::ExpectedNegative, kContrast);
    } else {
      set("symmetry.nabla_curvature", CheckKind::Informational);
    }
  }
  if (!kahler) set("symmetry.contracted_identity", CheckKind::Informational);
  for (auto& c : out) c.finalize();
  return out;
}

Section einstein_residual(const Expr& k, std::span<const CotangentPoint> samples,
                          const LiftParams& params, double tol_scale) {
  if (samples.empty()) throw std::invalid_argument("einstein_residual: no samples");
  CurvatureSuites suites;
  suites.einstein = true;
  std::vector<Section> parts;
  parts.reserve(samples.size());
  for (const auto& pt : samples) parts.push_back(curvature_point_checks(k, pt, params, suites, tol_scale));
  return finalize_curvature(parts, params, tol_scale);
}

}  // namespace cartan
