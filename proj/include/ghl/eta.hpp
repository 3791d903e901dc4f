#pragma once

// Gamma-eta invariants: exact sign-sum oracle, heat-trace quadrature with a
// closed-form erfc tail, spectral-modification jump laws, and eta/heat/kernel
// convergence along residually finite towers over Z.

#include "ghl/covering.hpp"
#include "ghl/heat.hpp"
#include "ghl/operator.hpp"

namespace ghl {

inline double eta_spectral_of(const SpectralMeasure& mu, double zero_tol = 1e-10) {
  double s = 0.0;
  for (const auto& a : mu.atoms) {
    if (a.eigenvalue > zero_tol) s += a.gamma_multiplicity;
    else if (a.eigenvalue < -zero_tol) s -= a.gamma_multiplicity;
  }
  return s;
}

// Exact finite evaluation sum sign(lambda) * m_Gamma(lambda), lambda != 0.
inline double eta_spectral(const EquivariantOperator& t, double zero_tol = 1e-10,
                           int floquet_nodes = 0) {
  return eta_spectral_of(spectral_measure(t, floquet_nodes), zero_tol);
}

struct EtaResult {
  double value = 0.0;
  double oracle = 0.0;
  double kappa = 0.0;
  double delta = 0.0;            // small-t floor; 0 = plain limit reached
  double kappa_residual = 0.0;   // |value - recomputation at 2 kappa|
  double tail_bound = 0.0;       // magnitude of the erfc tail term
  int small_t_nodes = 0;
  int floquet_nodes = 0;
  bool regularized = false;      // finite dimension: always false
};

namespace detail {
// Adaptive Simpson on [a,b]; integrand smooth after the tau = sqrt(t)
// substitution, so plain recursion with absolute tolerance suffices.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double tol, int depth, int& nodes) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  nodes += 2;
  const double h = b - a;
  const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (depth <= 0) throw std::runtime_error("eta quadrature did not converge");
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1, nodes) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1, nodes);
}

inline double eta_from_measure(const SpectralMeasure& mu, double kappa,
                               double tol, int& nodes, double& tail_bound) {
  // small t: (1/sqrt(pi)) int_0^kappa t^{-1/2} sum(lam m e^{-t lam^2}) dt
  //        = (2/sqrt(pi)) int_0^sqrt(kappa) sum(lam m e^{-tau^2 lam^2}) dtau
  auto g = [&mu](double tau) {
    double s = 0.0;
    for (const auto& a : mu.atoms)
      s += a.eigenvalue * a.gamma_multiplicity *
           std::exp(-tau * tau * a.eigenvalue * a.eigenvalue);
    return s;
  };
  const double b = std::sqrt(kappa);
  const double fa = g(0.0), fm = g(0.5 * b), fb = g(b);
  nodes += 3;
  double small = adaptive_simpson(g, 0.0, b, fa, fm, fb, tol, 48, nodes);
  small *= 2.0 / std::sqrt(M_PI);
  // tail: per-atom closed form sign(lam) erfc(|lam| sqrt(kappa))
  double tail = 0.0;
  for (const auto& a : mu.atoms) {
    if (a.eigenvalue == 0.0) continue;
    const double term = a.gamma_multiplicity *
                        std::erfc(std::abs(a.eigenvalue) * std::sqrt(kappa));
    tail += a.eigenvalue > 0 ? term : -term;
    tail_bound += term;
  }
  return small + tail;
}
}  // namespace detail

// eta via the s = 0 heat integral, split at kappa: adaptive quadrature below
// (singularity removed by t = tau^2), per-atom erfc closed form above.
// kappa defaults to 1/gap^2; the value is checked for kappa-independence.
inline EtaResult eta_heat_integral(const EquivariantOperator& t, double kappa = 0.0,
                                   double tol = 1e-10, int floquet_nodes = 0) {
  detail::require_selfadjoint(t);
  SpectralMeasure mu = spectral_measure(t, floquet_nodes);
  EtaResult r;
  r.floquet_nodes = mu.quadrature_nodes;
  r.oracle = eta_spectral_of(mu);
  if (kappa <= 0.0) {
    const double gap = mu.min_abs_eigenvalue(1e-12);
    kappa = std::isfinite(gap) && gap > 0.0 ? 1.0 / (gap * gap) : 1.0;
  }
  r.kappa = kappa;
  r.value = detail::eta_from_measure(mu, kappa, tol, r.small_t_nodes, r.tail_bound);
  double tb2 = 0.0;
  int n2 = 0;
  const double v2 = detail::eta_from_measure(mu, 2.0 * kappa, tol, n2, tb2);
  r.kappa_residual = std::abs(r.value - v2);
  if (r.kappa_residual > 1e-7)
    throw std::runtime_error("eta_heat_integral: value not kappa-independent");
  return r;
}

// Spectral modification Q_u = (1 - Pi)D + u, Pi the spectral projection of D
// onto (-eps, eps). Finite deck groups (functional calculus is dense there).
inline EquivariantOperator eta_modified_operator(const EquivariantOperator& d,
                                                 double eps, double u) {
  EquivariantOperator q = apply_function(
      d, [eps](double x) { return std::abs(x) < eps ? 0.0 : x; });
  if (u != 0.0)
    q = q.plus(EquivariantOperator::identity(d.group(), d.fiber_plus(),
                                             d.fiber_minus())
                   .scaled(u));
  return q;
}

struct EtaJumpReport {
  double eta_0 = 0.0;        // eta(Q_0)
  double eta_u = 0.0;        // eta(Q_u)
  double eta_minus_u = 0.0;  // eta(Q_{-u})
  double projection_trace = 0.0;
  double jump_residual = 0.0;           // |(eta_u - eta_0) - sgn(u) tr(Pi)|
  double symmetrization_residual = 0.0; // |eta_0 - (eta_u + eta_{-u})/2|
};

inline EtaJumpReport eta_jump_check(const EquivariantOperator& d, double eps,
                                    double u) {
  if (!(eps > 0.0) || std::abs(u) >= eps || u == 0.0)
    throw std::invalid_argument("eta_jump_check: need 0 < |u| < eps");
  detail::require_selfadjoint(d);
  EtaJumpReport r;
  SpectralMeasure mu = spectral_measure(d);
  for (const auto& a : mu.atoms)
    if (std::abs(a.eigenvalue) < eps) r.projection_trace += a.gamma_multiplicity;
  r.eta_0 = eta_spectral(eta_modified_operator(d, eps, 0.0));
  r.eta_u = eta_spectral(eta_modified_operator(d, eps, u));
  r.eta_minus_u = eta_spectral(eta_modified_operator(d, eps, -u));
  const double sgn = u > 0 ? 1.0 : -1.0;
  r.jump_residual = std::abs((r.eta_u - r.eta_0) - sgn * r.projection_trace);
  r.symmetrization_residual =
      std::abs(r.eta_0 - 0.5 * (r.eta_u + r.eta_minus_u));
  return r;
}

// |eta(D) - eta(Q_0)| <= mu_{Gamma,D}((-eps,eps) \ {0}).
inline bool eta_modification_bound_check(const EquivariantOperator& d, double eps,
                                         double zero_tol = 1e-10) {
  detail::require_selfadjoint(d);
  SpectralMeasure mu = spectral_measure(d);
  double mass = 0.0;
  for (const auto& a : mu.atoms)
    if (std::abs(a.eigenvalue) < eps && std::abs(a.eigenvalue) > zero_tol)
      mass += a.gamma_multiplicity;
  const double lhs = std::abs(eta_spectral(d) -
                              eta_spectral(eta_modified_operator(d, eps, 0.0)));
  return lhs <= mass + 1e-10;
}

struct TowerReport {
  struct Level {
    std::int64_t d = 0;
    double eta = 0.0;          // classical eta of the quotient operator
    double ratio = 0.0;        // eta / d
    double gap_to_target = 0.0;
    double kernel_dim = 0.0;   // b_i
    double kernel_ratio = 0.0; // b_i / d_i
    double heat_ratio = 0.0;   // (1/d_i) tr e^{-t D_i^2} at the probe time
  };
  std::vector<Level> levels;
  double target = 0.0;         // eta_Gamma via Floquet heat integral
  double target_kernel = 0.0;  // b_Gamma
  double target_heat = 0.0;    // tr_Gamma e^{-t Dbar^2} at the probe time
  double probe_time = 1.0;
  int floquet_nodes = 0;
};

// Classical (undivided) sign-sum eta of a finite-group operator.
inline double classical_eta(const EquivariantOperator& t, double zero_tol = 1e-10) {
  return eta_spectral(t, zero_tol) * static_cast<double>(t.group().size());
}

inline TowerReport tower_eta_convergence(const DeckTower& tw,
                                         const EquivariantOperator& a,
                                         double probe_time = 1.0,
                                         double zero_tol = 1e-10) {
  detail::require_selfadjoint(a);
  if (!(a.group() == tw.base) || tw.base.is_finite() || tw.base.rank() != 1)
    throw std::invalid_argument("tower_eta_convergence: Z-equivariant operator expected");
  const std::int64_t dmax = tw.indices.back();
  const int nodes = static_cast<int>(std::max<std::int64_t>(4096, 16 * dmax));
  GapReport gap = fredholm_gap(a, 0.0, nodes);
  if (!gap.has_gap || gap.gap <= zero_tol)
    throw std::invalid_argument(
        "tower_eta_convergence: operator has no Floquet gap at 0");

  TowerReport rep;
  rep.floquet_nodes = nodes;
  rep.probe_time = probe_time;
  SpectralMeasure mu = spectral_measure(a, nodes);
  rep.target = eta_heat_integral(a, 0.0, 1e-10, nodes).value;
  for (const auto& atom : mu.atoms) {
    if (std::abs(atom.eigenvalue) <= zero_tol)
      rep.target_kernel += atom.gamma_multiplicity;
    rep.target_heat += atom.gamma_multiplicity *
                       std::exp(-probe_time * atom.eigenvalue * atom.eigenvalue);
  }
  for (std::size_t i = 0; i < tw.levels.size(); ++i) {
    EquivariantOperator ai = a.at_quotient(tw.levels[i]);
    SpectralMeasure mi = spectral_measure(ai);
    TowerReport::Level lv;
    lv.d = tw.indices[i];
    lv.eta = eta_spectral_of(mi, zero_tol) * lv.d;
    lv.ratio = lv.eta / lv.d;
    lv.gap_to_target = std::abs(lv.ratio - rep.target);
    for (const auto& atom : mi.atoms) {
      if (std::abs(atom.eigenvalue) <= zero_tol)
        lv.kernel_dim += atom.gamma_multiplicity * lv.d;
      lv.heat_ratio += atom.gamma_multiplicity *
                       std::exp(-probe_time * atom.eigenvalue * atom.eigenvalue);
    }
    lv.kernel_ratio = lv.kernel_dim / lv.d;
    rep.levels.push_back(lv);
  }
  return rep;
}

// Off-identity remainder of the tower difference: at each level the gap
// ratio_i - target equals (1/sqrt(pi)) int t^{-1/2} r_i(t) dt with
//   r_i(t) = sum_{0 != n} tr[ (Dbar e^{-t Dbar^2})_{gamma = n d_i} ],
// blocks recovered from the Floquet symbol by inverse transform.
struct TowerRemainder {
  std::vector<double> remainders;        // per level, integrated
  std::vector<double> integrand_at_t0;   // per level, at the probe time
};

inline TowerRemainder tower_difference_diagnostic(const DeckTower& tw,
                                                  const EquivariantOperator& a,
                                                  double probe_time = 1.0,
                                                  int nmax = 8) {
  detail::require_selfadjoint(a);
  const std::int64_t dmax = tw.indices.back();
  const int nodes = static_cast<int>(std::max<std::int64_t>(4096, 16 * dmax));
  // Eigen-decompose the symbol on the grid once.
  const auto grid = floquet_grid(1, nodes);
  std::vector<Eigen::VectorXd> evals(grid.size());
  std::vector<Matrix> evecs(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.floquet(grid[j]));
    evals[j] = es.eigenvalues();
    evecs[j] = es.eigenvectors();
  }
  // r_i(t) via trace of the gamma-block: tr(F(A)_gamma) =
  // (1/N) sum_j e^{-i gamma theta_j} tr F(A(theta_j)).
  auto remainder_integrand = [&](std::int64_t di, double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double trf = 0.0;
      for (Eigen::Index m = 0; m < evals[j].size(); ++m) {
        const double lam = evals[j][m];
        trf += lam * std::exp(-t * lam * lam);
      }
      double phase_sum = 0.0;  // sum over 0 != |n| <= nmax of cos(n d theta)
      for (int n = 1; n <= nmax; ++n)
        phase_sum += 2.0 * std::cos(n * di * grid[j][0]);
      s += trf * phase_sum;
    }
    return s / static_cast<double>(grid.size());
  };
  SpectralMeasure mu = spectral_measure(a, nodes);
  const double gap = mu.min_abs_eigenvalue(1e-12);
  const double kappa = gap > 0.0 && std::isfinite(gap) ? 1.0 / (gap * gap) : 1.0;
  TowerRemainder out;
  for (std::size_t i = 0; i < tw.levels.size(); ++i) {
    const std::int64_t di = tw.indices[i];
    auto g = [&](double tau) { return remainder_integrand(di, tau * tau); };
    int nquad = 3;
    const double b = std::sqrt(kappa);
    double small = detail::adaptive_simpson(g, 0.0, b, g(0.0), g(0.5 * b), g(b),
                                            1e-12, 48, nquad);
    small *= 2.0 / std::sqrt(M_PI);
    // tail beyond kappa: per grid sample version of the erfc closed form
    double tail = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double phase_sum = 0.0;
      for (int n = 1; n <= nmax; ++n)
        phase_sum += 2.0 * std::cos(n * di * grid[j][0]);
      double trf = 0.0;
      for (Eigen::Index m = 0; m < evals[j].size(); ++m) {
        const double lam = evals[j][m];
        if (lam == 0.0) continue;
        trf += (lam > 0 ? 1.0 : -1.0) * std::erfc(std::abs(lam) * std::sqrt(kappa));
      }
      tail += trf * phase_sum;
    }
    tail /= static_cast<double>(grid.size());
    out.remainders.push_back(small + tail);
    out.integrand_at_t0.push_back(remainder_integrand(di, probe_time));
  }
  return out;
}

}  // namespace ghl
