#include "cartan/cartan_space.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "cartan/errors.hpp"

namespace cartan {

bool ChartBox::contains(std::span<const double> x) const {
  if (bounds.size() != x.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < bounds[i].first || x[i] > bounds[i].second) return false;
  }
  return true;
}

EvalEnv<Jet> seed(const CotangentPoint& pt, int order) {
  const int n = pt.dim();
  if (static_cast<int>(pt.p.size()) != n || n < 1) {
    throw std::invalid_argument("seed: malformed point");
  }
  const auto& layout = JetLayout::get(2 * n);
  EvalEnv<Jet> env;
  for (int i = 0; i < n; ++i) env.x.push_back(Jet::variable(layout, order, i, pt.x[i]));
  for (int i = 0; i < n; ++i) env.p.push_back(Jet::variable(layout, order, n + i, pt.p[i]));
  return env;
}

double partial(const Expr& f, const CotangentPoint& pt, std::span<const int> directions) {
  const int order = static_cast<int>(directions.size());
  if (order > JetLayout::kMaxOrder) throw std::out_of_range("partial: order above 6");
  return eval(f, seed(pt, order)).partial(directions);
}

JetTensor invert(const JetTensor& m) {
  const int n = m.dim();
  JetTensor a = m;
  const Jet& proto = m(0, 0);
  JetTensor inv(n, 2, proto.constant(0.0));
  for (int i = 0; i < n; ++i) inv(i, i) = proto.constant(1.0);

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col).value()) > std::abs(a(pivot, col).value())) pivot = r;
    }
    if (a(pivot, col).value() == 0.0) throw SingularMetric("singular jet matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    }
    const Jet scale = 1.0 / a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) * scale;
      inv(col, c) = inv(col, c) * scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a(r, col);
      for (int c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

RealTensor values(const JetTensor& t) {
  RealTensor out(t.dim(), t.rank());
  for (std::size_t i = 0; i < t.size(); ++i) out.flat(i) = t.flat(i).value();
  return out;
}

namespace {

void require_positive_definite(const JetTensor& g_upper) {
  const int n = g_upper.dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = g_upper(i, j).value();
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw SingularMetric("fiber Hessian is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success) throw SingularMetric("fiber Hessian is not positive definite");
}

}  // namespace

Jet CartanJets::delta(const Jet& f, int i) const {
  Jet out = f.derivative(i);
  for (int j = 0; j < n; ++j) out += N(i, j) * f.derivative(n + j);
  return out;
}

CartanJets CartanJets::build(const Expr& k, const CotangentPoint& pt, int order) {
  if (order < 4) throw std::invalid_argument("CartanJets: order must be at least 4");
  const int n = k.dim();
  if (pt.dim() != n) throw std::invalid_argument("CartanJets: point dimension mismatch");

  CartanJets b;
  b.n = n;
  b.order = order;
  b.point = pt;

  const auto env = seed(pt, order);
  b.K2 = eval(square(k), env);
  const Jet zero = b.K2.constant(0.0);

  b.p_lower = JetTensor(n, 1, zero);
  b.p_upper = JetTensor(n, 1, zero);
  for (int i = 0; i < n; ++i) {
    b.p_lower(i) = env.p[i];
    b.p_upper(i) = 0.5 * b.K2.derivative(n + i);
  }

  b.g_upper = JetTensor(n, 2, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      b.g_upper(i, j) = b.p_upper(i).derivative(n + j);
      b.g_upper(j, i) = b.g_upper(i, j);
    }
  }
  require_positive_definite(b.g_upper);
  b.g_lower = invert(b.g_upper);

  b.cartan = JetTensor(n, 3, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) b.cartan(i, j, l) = -0.5 * b.g_upper(i, j).derivative(n + l);
    }
  }
  b.cartan_mixed = JetTensor(n, 3, zero);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        Jet s = zero.truncated(order - 3);
        for (int m = 0; m < n; ++m) s += b.g_lower(i, m) * b.cartan(m, j, l);
        b.cartan_mixed(j, l, i) = s;
      }
    }
  }
  b.mean_torsion = JetTensor(n, 1, zero);
  for (int j = 0; j < n; ++j) {
    Jet s = zero.truncated(order - 3);
    for (int m = 0; m < n; ++m) s += b.cartan_mixed(j, m, m);
    b.mean_torsion(j) = s;
  }

  // x-derivatives of g_ij: dg(s, j, l) = d_s g_jl
  JetTensor dg(n, 3, zero);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) dg(s, j, l) = b.g_lower(j, l).derivative(s);
    }
  }
  b.christoffel = JetTensor(n, 3, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = j; l < n; ++l) {
        Jet s = zero.truncated(order - 3);
        for (int m = 0; m < n; ++m) {
          s += b.g_upper(i, m) * (dg(l, j, m) + dg(j, m, l) - dg(m, j, l));
        }
        b.christoffel(i, j, l) = 0.5 * s;
        b.christoffel(i, l, j) = b.christoffel(i, j, l);
      }
    }
  }

  // Nonlinear connection N_ij = gamma°_ij - 1/2 gamma°_h° d^h g_ij
  JetTensor gamma0(n, 2, zero);  // gamma^k_ij p_k
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Jet s = zero.truncated(order - 3);
      for (int m = 0; m < n; ++m) s += b.christoffel(m, i, j) * b.p_lower(m);
      gamma0(i, j) = s;
    }
  }
  JetTensor gamma00(n, 1, zero);  // gamma^k_hl p_k p^l
  for (int h = 0; h < n; ++h) {
    Jet s = zero.truncated(order - 3);
    for (int l = 0; l < n; ++l) s += gamma0(h, l) * b.p_upper(l);
    gamma00(h) = s;
  }
  b.N = JetTensor(n, 2, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Jet s = gamma0(i, j);
      for (int h = 0; h < n; ++h) s -= 0.5 * gamma00(h) * b.g_lower(i, j).derivative(n + h);
      b.N(i, j) = s;
      b.N(j, i) = s;
    }
  }

  // Canonical metrical connection H^i_jk = 1/2 g^is (delta_j g_sk + delta_k g_js - delta_s g_jk)
  JetTensor dg_h(n, 3, zero);  // dg_h(s, j, l) = delta_s g_jl
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < n; ++j) {
      for (int l = j; l < n; ++l) {
        dg_h(s, j, l) = b.delta(b.g_lower(j, l), s);
        dg_h(s, l, j) = dg_h(s, j, l);
      }
    }
  }
  b.H = JetTensor(n, 3, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        Jet s = zero.truncated(order - 4);
        for (int m = 0; m < n; ++m) {
          s += b.g_upper(i, m) * (dg_h(j, m, l) + dg_h(l, j, m) - dg_h(m, j, l));
        }
        b.H(i, j, l) = 0.5 * s;
      }
    }
  }

  b.P = JetTensor(n, 3, zero);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) b.P(i, j, l) = b.H(i, j, l) - b.N(j, l).derivative(n + i);
    }
  }

  // [delta_i, delta_j] = (delta_i N_jk - delta_j N_ik) dp^k
  JetTensor dN(n, 3, zero);  // dN(i, j, k) = delta_i N_jk
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) dN(i, j, l) = b.delta(b.N(j, l), i);
    }
  }
  b.R = JetTensor(n, 3, zero);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b.R(l, i, j) = dN(i, j, l) - dN(j, i, l);
    }
  }
  return b;
}

CartanContext to_context(const CartanJets& b) {
  CartanContext c;
  c.n = b.n;
  c.point = b.point;
  c.K2 = b.K2.value();
  c.tau = 0.5 * c.K2;
  c.p_lower = values(b.p_lower);
  c.p_upper = values(b.p_upper);
  c.g_upper = values(b.g_upper);
  c.g_lower = values(b.g_lower);
  c.cartan = values(b.cartan);
  c.cartan_mixed = values(b.cartan_mixed);
  c.christoffel = values(b.christoffel);
  c.N = values(b.N);
  c.H = values(b.H);
  c.P = values(b.P);
  c.R = values(b.R);
  c.mean_torsion = values(b.mean_torsion);
  return c;
}

CartanContext build_context(const Expr& k, const CotangentPoint& pt) {
  return to_context(CartanJets::build(k, pt, 4));
}

namespace {

Jet field_component(const CartanJets& b, const FieldRef& f) {
  auto at = [&](std::size_t count) {
    if (f.indices.size() != count) throw std::invalid_argument("field index count mismatch");
    for (int i : f.indices) {
      if (i < 0 || i >= b.n) throw std::out_of_range("field index out of range");
    }
  };
  switch (f.id) {
    case FieldId::K2: at(0); return b.K2;
    case FieldId::PLower: at(1); return b.p_lower(f.indices[0]);
    case FieldId::PUpper: at(1); return b.p_upper(f.indices[0]);
    case FieldId::GUpper: at(2); return b.g_upper(f.indices[0], f.indices[1]);
    case FieldId::GLower: at(2); return b.g_lower(f.indices[0], f.indices[1]);
    case FieldId::N: at(2); return b.N(f.indices[0], f.indices[1]);
    case FieldId::Cartan: at(3); return b.cartan(f.indices[0], f.indices[1], f.indices[2]);
  }
  throw std::logic_error("unknown field");
}

}  // namespace

double adapted_derivative(const Expr& k, const CotangentPoint& pt, const FieldRef& f, int i) {
  const auto b = CartanJets::build(k, pt, 4);
  return b.delta(field_component(b, f), i).value();
}

double adapted_derivative(const Expr& k, const CotangentPoint& pt, const Expr& f, int i) {
  const auto b = CartanJets::build(k, pt, 4);
  return b.delta(eval(f, seed(pt, 4)), i).value();
}

RealTensor h_covariant(const CartanJets& b, const JetTensor& field, const Valence& valence) {
  if (static_cast<int>(valence.size()) != field.rank()) {
    throw ValenceMismatch("valence has " + std::to_string(valence.size()) +
                          " slots, field has rank " + std::to_string(field.rank()));
  }
  const int n = b.n;
  const int rank = field.rank();
  RealTensor out(n, rank + 1);
  std::vector<int> idx(static_cast<std::size_t>(rank));

  auto field_at = [&](const std::vector<int>& ix) -> const Jet& {
    std::size_t off = 0;
    for (int v : ix) off = off * n + v;
    return field.flat(off);
  };

  for (std::size_t flat = 0; flat < field.size(); ++flat) {
    std::size_t rem = flat;
    for (int s = rank - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % n);
      rem /= n;
    }
    for (int kk = 0; kk < n; ++kk) {
      double v = b.delta(field.flat(flat), kk).value();
      for (int s = 0; s < rank; ++s) {
        auto moved = idx;
        for (int m = 0; m < n; ++m) {
          moved[s] = m;
          const double t = field_at(moved).value();
          if (valence[s] == Slot::Upper) {
            v += b.H(idx[s], m, kk).value() * t;
          } else {
            v -= b.H(m, idx[s], kk).value() * t;
          }
        }
      }
      out.flat(flat * n + kk) = v;
    }
  }
  return out;
}

RealTensor h_covariant(const CartanJets& b, FieldId field, const Valence& valence) {
  auto require = [&](const Valence& natural) {
    if (valence != natural) throw ValenceMismatch("declared valence does not match field");
  };
  switch (field) {
    case FieldId::K2: {
      require({});
      JetTensor t(b.n, 0, b.K2);
      return h_covariant(b, t, valence);
    }
    case FieldId::PLower: require({Slot::Lower}); return h_covariant(b, b.p_lower, valence);
    case FieldId::PUpper: require({Slot::Upper}); return h_covariant(b, b.p_upper, valence);
    case FieldId::GUpper:
      require({Slot::Upper, Slot::Upper});
      return h_covariant(b, b.g_upper, valence);
    case FieldId::GLower:
      require({Slot::Lower, Slot::Lower});
      return h_covariant(b, b.g_lower, valence);
    case FieldId::N:
      require({Slot::Lower, Slot::Lower});
      return h_covariant(b, b.N, valence);
    case FieldId::Cartan:
      require({Slot::Upper, Slot::Upper, Slot::Upper});
      return h_covariant(b, b.cartan, valence);
  }
  throw std::logic_error("unknown field");
}

Section verify_base_identities(const Expr& k, std::span<const CotangentPoint> samples,
                               double tol_scale) {
  if (samples.empty()) throw std::invalid_argument("verify_base_identities: no samples");
  const double ad = 1e-10 * tol_scale;
  const double composed = 1e-8 * tol_scale;

  Check metric_inverse("base.metric_inverse", "g^ij g_jk = delta^i_k", 1e-12 * tol_scale);
  Check momentum_norm("base.momentum_norm", "K^2 = g^ij p_i p_j = p_i p^i", ad);
  Check cartan_contraction("base.cartan_contraction", "C^ijk p_k = 0", ad);
  Check mean_torsion("base.mean_torsion_contraction", "I^j p_j = 0", ad);
  Check n_symmetry("base.nonlinear_symmetry", "N_ij = N_ji", ad);
  Check delta_k2("base.delta_K2", "delta_j K^2 = 0", ad);
  Check delta_p("base.delta_momentum", "delta_i p_k = N_ik", ad);
  Check vertical_k2("base.vertical_K2", "K^2|^j = 2 p^j", ad);
  Check momentum_parallel("base.momentum_parallel", "p_i|j = p^i_|j = 0", ad);
  Check deflection("base.deflection", "N_ij - p_k H^k_ij = 0", composed);
  Check r_contraction("base.R_contraction", "R_kij p^k = 0", composed);
  Check p_contraction("base.P_contraction", "P^i_jk p^j = 0", composed);
  Check p_lower_contraction("base.P_lower_contraction", "p_i P^i_jk = 0", composed);
  Check metricity("base.metricity", "g^ij_|k = 0", 1e-9 * tol_scale);
  Check compat("base.metric_compatibility", "delta_i g_jk = H^s_ji g_sk + H^s_ki g_js", composed);
  Check h_torsion("base.h_torsion", "H^i_jk - H^i_kj = 0", composed);
  Check v_torsion("base.v_torsion", "C^jk_i - C^kj_i = 0", composed);

  for (const auto& pt : samples) {
    const auto b = CartanJets::build(k, pt, 4);
    const auto c = to_context(b);
    const int n = b.n;

    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += c.g_upper(i, j) * c.g_lower(j, l);
        metric_inverse.absorb(s - (i == l ? 1.0 : 0.0));
        n_symmetry.absorb(c.N(i, l) - c.N(l, i));
        delta_p.absorb(b.delta(b.p_lower(l), i).value() - c.N(i, l));
      }
    }
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += c.p_lower(i) * c.p_upper(i);
    momentum_norm.absorb(norm - c.K2);

    double ip = 0.0;
    for (int j = 0; j < n; ++j) ip += c.mean_torsion(j) * c.p_lower(j);
    mean_torsion.absorb(ip);

    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += c.cartan(i, j, l) * c.p_lower(l);
        cartan_contraction.absorb(s);
      }
      delta_k2.absorb(b.delta(b.K2, i).value());
      vertical_k2.absorb(b.dp(b.K2, i).value() - 2.0 * c.p_upper(i));
    }

    const auto p_lower_cov = h_covariant(b, FieldId::PLower, {Slot::Lower});
    const auto p_upper_cov = h_covariant(b, FieldId::PUpper, {Slot::Upper});
    for (double v : p_lower_cov) momentum_parallel.absorb(v);
    for (double v : p_upper_cov) momentum_parallel.absorb(v);
    for (double v : h_covariant(b, FieldId::GUpper, {Slot::Upper, Slot::Upper})) metricity.absorb(v);

    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double defl = c.N(i, j);
        for (int l = 0; l < n; ++l) defl -= c.p_lower(l) * c.H(l, i, j);
        deflection.absorb(defl);

        double rp = 0.0;
        for (int l = 0; l < n; ++l) rp += c.R(l, i, j) * c.p_upper(l);
        r_contraction.absorb(rp);

        for (int l = 0; l < n; ++l) {
          double pp = 0.0;
          for (int m = 0; m < n; ++m) pp += c.P(i, m, l) * c.p_upper(m);
          p_contraction.absorb(pp);

          double lp = 0.0;
          for (int m = 0; m < n; ++m) lp += c.p_lower(m) * c.P(m, j, l);
          p_lower_contraction.absorb(lp);

          double rhs = 0.0;
          for (int s = 0; s < n; ++s) {
            rhs += c.H(s, j, i) * c.g_lower(s, l) + c.H(s, l, i) * c.g_lower(j, s);
          }
          compat.absorb(b.delta(b.g_lower(j, l), i).value() - rhs);
          h_torsion.absorb(c.H(i, j, l) - c.H(i, l, j));
          v_torsion.absorb(c.cartan_mixed(j, l, i) - c.cartan_mixed(l, j, i));
        }
      }
    }
  }

  Section out{metric_inverse, momentum_norm, cartan_contraction, mean_torsion, n_symmetry,
              delta_k2,       delta_p,       vertical_k2,        momentum_parallel,
              deflection,     r_contraction, p_contraction,      p_lower_contraction,
              metricity,      compat,        h_torsion,          v_torsion};
  for (auto& c : out) {
    c.n_points = samples.size();
    c.finalize();
  }
  return out;
}

}  // namespace cartan
