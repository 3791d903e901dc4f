#pragma once

// Heat semigroups of equivariant operators: supertrace index curves,
// base-vs-lift index comparison, kernel unfolding over finite quotients,
// Duhamel derivative check, long-time limits, and off-diagonal decay.

#include <functional>

#include "ghl/covering.hpp"
#include "ghl/operator.hpp"

namespace ghl {

inline EquivariantOperator heat_operator(const EquivariantOperator& t, double time) {
  if (!(time > 0.0)) throw std::invalid_argument("heat_operator: time must be positive");
  return apply_function(t, [time](double x) { return std::exp(-time * x * x); });
}

struct HeatCurve {
  enum class Kind { Trace, Supertrace, EtaIntegrand };
  Kind kind = Kind::Trace;
  std::vector<double> times;
  std::vector<Complex> values;

  double spread() const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : values) {
      lo = std::min(lo, v.real());
      hi = std::max(hi, v.real());
    }
    return values.empty() ? 0.0 : hi - lo;
  }
};

// str_Gamma(e^{-tD^2}) per time; flat in t with value ind_Gamma(D).
inline HeatCurve supertrace_curve(const GradedGraphDirac& d,
                                  const std::vector<double>& times) {
  HeatCurve curve;
  curve.kind = HeatCurve::Kind::Supertrace;
  curve.times = times;
  const int fp = d.op.fiber_plus();
  const int fm = d.op.fiber_minus();
  for (double t : times) {
    Matrix e = heat_operator(d.op, t).block(d.op.group().identity());
    curve.values.push_back(e.topLeftCorner(fp, fp).trace() -
                           e.bottomRightCorner(fm, fm).trace());
  }
  return curve;
}

inline VoltageGraph forget_voltages(const VoltageGraph& g) {
  VoltageGraph base;
  base.group = DeckGroup::trivial();
  base.vertices = g.vertices;
  base.potentials = g.potentials;
  for (const auto& e : g.edges)
    base.edges.push_back({e.tail, e.head, e.weight, base.group.identity()});
  return base;
}

struct AtiyahReport {
  double base_index = 0.0;
  double gamma_index_lift = 0.0;
  double cover_index = 0.0;  // classical index of the derived cover
  std::int64_t quotient_order = 0;
  int euler_characteristic = 0;
  bool equal = false;
  bool multiplicative = false;
};

// Base index vs Gamma-index of the lift at a finite quotient, both by dense
// singular-value ranks; also classical index of the cover (= d * base).
inline AtiyahReport atiyah_check(const VoltageGraph& g, const Quotient& q,
                                 double tol = 1e-9) {
  AtiyahReport r;
  r.quotient_order = q.target().size();
  GradedGraphDirac base = graph_dirac(forget_voltages(g));
  r.euler_characteristic = base.euler_characteristic();
  r.base_index = gamma_index(base.op).index;
  GradedGraphDirac lift = graph_dirac(g);
  r.gamma_index_lift = gamma_index(lift.op.at_quotient(q)).index;
  GradedGraphDirac cover = graph_dirac(derived_cover(g, q));
  r.cover_index = gamma_index(cover.op).index;
  r.equal = std::abs(r.base_index - r.gamma_index_lift) <= tol;
  r.multiplicative =
      std::abs(r.cover_index - r.quotient_order * r.base_index) <= tol;
  return r;
}

// Dense kernel P^l e^{-tP^2} for an ungrouped operator.
inline Matrix power_heat_kernel(const Matrix& dense, double time, int l) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
  Eigen::VectorXd f(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double lam = es.eigenvalues()[i];
    f[i] = std::pow(lam, l) * std::exp(-time * lam * lam);
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

// Unfolding over a finite quotient: base kernel entry (x,y) equals the sum of
// lifted kernel entries (x at sheet e, y over all sheets). Returns the
// maximum absolute residual over all base site pairs.
inline double unfolding_check(const VoltageGraph& g, const Quotient& q,
                              double time, int l) {
  GradedGraphDirac base = graph_dirac(forget_voltages(g));
  Matrix kb = power_heat_kernel(base.op.dense(), time, l);
  VoltageGraph covg = derived_cover(g, q);
  GradedGraphDirac cov = graph_dirac(covg);
  Matrix kc = power_heat_kernel(cov.op.dense(), time, l);
  const int nv = g.vertices;
  const int ne = static_cast<int>(g.edges.size());
  const int d = static_cast<int>(q.target().size());
  auto cover_site = [&](int base_site, int sheet) {
    return base_site < nv ? base_site * d + sheet
                          : nv * d + (base_site - nv) * d + sheet;
  };
  double res = 0.0;
  for (int x = 0; x < nv + ne; ++x)
    for (int y = 0; y < nv + ne; ++y) {
      Complex s = 0.0;
      for (int a = 0; a < d; ++a) s += kc(cover_site(x, 0), cover_site(y, a));
      res = std::max(res, std::abs(kb(x, y) - s));
    }
  return res;
}

namespace detail {
// Nodes/weights of Gauss-Legendre on [0,1], computed from the Jacobi matrix.
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    j(i, i - 1) = j(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
}
}  // namespace detail

// Central finite difference of u -> e^{-t T_u^2} against the Duhamel
// integral -int_0^t e^{-sT^2}(T'T + TT')e^{-(t-s)T^2} ds.
inline double duhamel_check(const std::function<EquivariantOperator(double)>& family,
                            double u0, double time, double step,
                            double quad_tol = 1e-10) {
  Matrix hp = heat_operator(family(u0 + step), time).dense();
  Matrix hm = heat_operator(family(u0 - step), time).dense();
  Matrix fd = (hp - hm) / (2.0 * step);

  Matrix t = family(u0).dense();
  Matrix tp = (family(u0 + step).dense() - family(u0 - step).dense()) / (2.0 * step);
  Matrix sym = tp * t + t * tp;
  Eigen::SelfAdjointEigenSolver<Matrix> es(t);
  auto heat_at = [&](double s) {
    Eigen::VectorXd f(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f[i] = std::exp(-s * es.eigenvalues()[i] * es.eigenvalues()[i]);
    return Matrix(es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint());
  };
  auto integral = [&](int nodes) {
    std::vector<double> x, w;
    detail::gauss_legendre_01(nodes, x, w);
    Matrix acc = Matrix::Zero(t.rows(), t.cols());
    for (int i = 0; i < nodes; ++i) {
      const double s = time * x[i];
      acc += (time * w[i]) * (heat_at(s) * sym * heat_at(time - s));
    }
    return Matrix(-acc);
  };
  Matrix i32 = integral(32);
  Matrix i48 = integral(48);
  const double qerr = (i48 - i32).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, i48.cwiseAbs().maxCoeff());
  if (qerr > quad_tol * scale)
    throw std::runtime_error("duhamel_check: quadrature did not converge");
  return (fd - i48).cwiseAbs().maxCoeff();
}

struct LongTimeReport {
  std::vector<double> times;
  std::vector<double> residuals;  // ||e^{-tT^2} - N(T)||
  std::vector<double> bounds;     // e^{-t gap^2} envelope
  double gap = 0.0;
  bool monotone = true;
  bool within_bound = true;
};

// Convergence of e^{-tT^2} to the kernel projection N(T) in operator norm.
inline LongTimeReport long_time_check(const EquivariantOperator& t,
                                      const std::vector<double>& times,
                                      double kernel_tol = 1e-10) {
  detail::require_selfadjoint(t);
  if (!t.group().is_finite())
    throw std::logic_error("long_time_check: finite deck groups only");
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.dense());
  LongTimeReport r;
  r.times = times;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i]) > kernel_tol)
      gap = std::min(gap, std::abs(es.eigenvalues()[i]));
  r.gap = std::isfinite(gap) ? gap : 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double time : times) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (std::abs(lam) > kernel_tol)
        norm = std::max(norm, std::exp(-time * lam * lam));
    }
    const double bound = std::exp(-time * r.gap * r.gap);
    r.residuals.push_back(norm);
    r.bounds.push_back(bound);
    if (norm > prev + 1e-14) r.monotone = false;
    if (norm > bound * (1.0 + 1e-12)) r.within_bound = false;
    prev = norm;
  }
  return r;
}

// Conservative propagation constant: twice the largest hopping amplitude.
inline double hopping_bound(const VoltageGraph& g) {
  double m = 0.0;
  for (const auto& e : g.edges) m = std::max(m, std::sqrt(e.weight));
  return 2.0 * m;
}

struct DecayReport {
  struct Row {
    int x, y, dist;
    double t;
    double magnitude;
    double bound;       // Gaussian envelope C e^{-d^2/(6c^2 t)}
    bool in_regime;     // d <= c t: bound asserted there
  };
  std::vector<Row> rows;
  double c = 0.0;
  double fitted_c0 = 0.0;          // diagonal fit constant
  bool in_regime_bound_holds = true;
  double out_regime_exponent = 0.0;  // fitted log-slope beyond the regime
};

// Vertex-kernel Gaussian decay of e^{-tD^2} on a trivial-group graph.
inline DecayReport gaussian_decay_check(const VoltageGraph& g,
                                        const std::vector<double>& times,
                                        double c = 0.0) {
  g.validate();
  if (!g.group.is_finite() || g.group.size() != 1)
    throw std::invalid_argument("gaussian_decay_check: trivial-group graph expected");
  GradedGraphDirac d = graph_dirac(g);
  DecayReport rep;
  rep.c = c > 0.0 ? c : hopping_bound(g);
  const int nv = g.vertices;
  std::vector<std::vector<int>> dist(nv);
  for (int v = 0; v < nv; ++v) dist[v] = bfs_distances(g, v);
  for (double t : times) {
    Matrix k = power_heat_kernel(d.op.dense(), t, 0);
    double c0 = 0.0;
    for (int v = 0; v < nv; ++v) c0 = std::max(c0, std::abs(k(v, v)));
    rep.fitted_c0 = std::max(rep.fitted_c0, c0);
    double worst_slope = 0.0;
    for (int x = 0; x < nv; ++x)
      for (int y = 0; y < nv; ++y) {
        if (dist[x][y] < 0) continue;
        const double dd = dist[x][y];
        const double mag = std::abs(k(x, y));
        const double bound = c0 * std::exp(-dd * dd / (6.0 * rep.c * rep.c * t));
        const bool in_regime = dd <= rep.c * t;
        if (in_regime && mag > bound * (1.0 + 1e-9) + 1e-300)
          rep.in_regime_bound_holds = false;
        if (!in_regime && mag > 1e-280 && dd > 0)
          worst_slope = std::max(worst_slope, std::log(mag / c0) / dd);
        rep.rows.push_back({x, y, dist[x][y], t, mag, bound, in_regime});
      }
    rep.out_regime_exponent = std::min(rep.out_regime_exponent, worst_slope);
  }
  return rep;
}

struct RelativeDecayReport {
  double difference = 0.0;
  double bound = 0.0;
  int radius = 0;
  bool in_regime = false;
  bool bound_holds = true;  // asserted only in-regime
};

namespace detail {
// Certificate that g1 and g2 induce identical balls of radius rho around x:
// same vertex indices, same edges with equal weights inside the ball.
inline void require_common_ball(const VoltageGraph& g1, const VoltageGraph& g2,
                                int x, int rho) {
  auto ball_edges = [&](const VoltageGraph& g) {
    auto d = bfs_distances(g, x);
    std::vector<std::tuple<int, int, double>> out;
    for (const auto& e : g.edges) {
      const bool tin = e.tail < static_cast<int>(d.size()) && d[e.tail] >= 0 && d[e.tail] < rho;
      const bool hin = e.head < static_cast<int>(d.size()) && d[e.head] >= 0 && d[e.head] < rho;
      if (tin && hin)
        out.emplace_back(std::min(e.tail, e.head), std::max(e.tail, e.head), e.weight);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  if (ball_edges(g1) != ball_edges(g2))
    throw std::invalid_argument("relative_decay_check: graphs disagree on the certified ball");
}
}  // namespace detail

// Diagonal heat-kernel insensitivity to changes outside a radius-rho ball.
inline RelativeDecayReport relative_decay_check(const VoltageGraph& g1,
                                                const VoltageGraph& g2, int x,
                                                int rho, double time,
                                                double c = 0.0) {
  g1.validate();
  g2.validate();
  detail::require_common_ball(g1, g2, x, rho);
  RelativeDecayReport r;
  r.radius = rho;
  const double cc = c > 0.0 ? c : std::max(hopping_bound(g1), hopping_bound(g2));
  Matrix k1 = power_heat_kernel(graph_dirac(g1).op.dense(), time, 0);
  Matrix k2 = power_heat_kernel(graph_dirac(g2).op.dense(), time, 0);
  double c0 = std::max(std::abs(k1(x, x)), std::abs(k2(x, x)));
  r.difference = std::abs(k1(x, x) - k2(x, x));
  const double reff = rho - 1.0;
  r.bound = 2.0 * c0 * std::exp(-reff * reff / (6.0 * cc * cc * time));
  r.in_regime = rho <= cc * time;
  if (r.in_regime) r.bound_holds = r.difference <= r.bound * (1.0 + 1e-9) + 1e-300;
  return r;
}

}  // namespace ghl
