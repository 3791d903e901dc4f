#pragma once

// Discrete half-cylinders [0,R] with boundary operator A, optional glued
// interior graph, weight profile theta, spectral modifications D_{eps,u},
// weighted/extended kernel counts h+-, L2-index relations, essential-spectrum
// bottom, and the boundary-correction consistency experiment.
//
// Chirality-split discretization: the plus operator uses the forward
// difference (free at r=0, Dirichlet ghost past r=R), and the minus operator
// is assembled directly with the mirrored one-sided difference so that the
// far-end pin falls on the minus chirality. Each assembly keeps the adjoint
// pairing exact on its own grid; kernel counts per chirality come from their
// respective assemblies.

#include <optional>

#include "ghl/covering.hpp"
#include "ghl/eta.hpp"
#include "ghl/operator.hpp"

namespace ghl {

// Weight profile: 0 for r <= 2, r for r >= 3, the unique cubic with matching
// values and slopes in between.
inline double cyl_theta(double r) {
  if (r <= 2.0) return 0.0;
  if (r >= 3.0) return r;
  const double s = r - 2.0;
  return (-5.0 * s + 8.0) * s * s;
}

inline double cyl_vartheta(double r) {
  if (r <= 2.0) return 0.0;
  if (r >= 3.0) return 1.0;
  const double s = r - 2.0;
  return (-15.0 * s + 16.0) * s;
}

struct CylinderModel {
  EquivariantOperator boundary;        // selfadjoint, ungraded, fiber dim m
  std::optional<VoltageGraph> interior;
  std::vector<int> gluing;             // interior vertex per boundary fiber slot
  double R = 20.0;
  double h = 0.25;

  int fiber() const { return boundary.fiber_dim(); }
  int sites() const { return static_cast<int>(std::llround(R / h)); }

  void validate() const {
    detail::require_selfadjoint(boundary);
    if (!(R > 0.0) || !(h > 0.0) || sites() < 8)
      throw std::invalid_argument("CylinderModel: grid must cover [0,R] with several sites");
    if (interior) {
      interior->validate();
      if (!(interior->group == boundary.group()))
        throw std::invalid_argument("CylinderModel: interior group must match boundary");
      if (static_cast<int>(gluing.size()) != fiber())
        throw std::invalid_argument("CylinderModel: gluing must cover the boundary fiber");
      std::vector<int> sorted = gluing;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("CylinderModel: gluing vertices must be distinct");
      for (int v : gluing)
        if (v < 0 || v >= interior->vertices)
          throw std::invalid_argument("CylinderModel: gluing vertex out of range");
      if (!boundary.group().is_finite())
        throw std::invalid_argument("CylinderModel: glued interiors need a finite deck group");
    } else if (!gluing.empty()) {
      throw std::invalid_argument("CylinderModel: gluing without interior");
    }
  }
};

// Closed-form mode counts for a pure half-cylinder from the boundary
// spectrum: decay rates are lambda outside (-eps,eps) and u inside.
struct ModelCounts {
  double l2_plus = 0, ext_plus = 0;
  double l2_minus = 0, ext_minus = 0;
  double h_plus = 0, h_minus = 0;
};

inline ModelCounts model_solution_counts(const SpectralMeasure& mu, double eps,
                                         double u, double zero_tol = 1e-12) {
  ModelCounts c;
  for (const auto& a : mu.atoms) {
    const double lam = a.eigenvalue;
    const double m = a.gamma_multiplicity;
    const bool inside = eps > 0.0 ? std::abs(lam) < eps : std::abs(lam) <= zero_tol;
    const double rate = inside ? u : lam;  // plus-mode decay exponent
    if (rate > 0) {
      c.l2_plus += m;
      c.ext_plus += m;
    } else if (rate == 0.0) {
      c.ext_plus += m;
      c.h_plus += m;
    }
    if (rate < 0) {
      c.l2_minus += m;
      c.ext_minus += m;
    } else if (rate == 0.0) {
      c.ext_minus += m;
      c.h_minus += m;
    }
  }
  return c;
}

namespace detail {

// One dense assembly context: for finite deck groups the regular-representation
// realization (weight 1/|G|), for Z one context per Floquet node.
struct CylContext {
  double weight = 1.0;
  Matrix a;                 // boundary matrix
  Matrix k;                 // interior coboundary (rows = edges), may be 0 x v
  std::vector<int> gluing;  // boundary slot -> interior vertex (column index)
  int interior_vertices = 0;
  int interior_edges = 0;
};

inline Matrix spectral_projector_inside(const Matrix& a, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  Eigen::VectorXd f(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f[i] = std::abs(es.eigenvalues()[i]) < eps ? 1.0 : 0.0;
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

inline std::vector<CylContext> cylinder_contexts(const CylinderModel& c,
                                                 int floquet_nodes = 64) {
  c.validate();
  std::vector<CylContext> out;
  const int m = c.fiber();
  if (c.boundary.group().is_finite()) {
    CylContext ctx;
    const std::int64_t n = c.boundary.group().size();
    ctx.weight = 1.0 / static_cast<double>(n);
    ctx.a = c.boundary.dense();
    if (c.interior) {
      const int vi = c.interior->vertices;
      const int ei = static_cast<int>(c.interior->edges.size());
      GradedGraphDirac gd = graph_dirac(*c.interior);
      Matrix dd = gd.op.dense();
      // extract the dense coboundary block (edge rows, vertex cols)
      const int f = vi + ei;
      ctx.k = Matrix::Zero(ei * n, vi * n);
      for (std::int64_t a1 = 0; a1 < n; ++a1)
        for (std::int64_t a2 = 0; a2 < n; ++a2)
          for (int e = 0; e < ei; ++e)
            for (int v = 0; v < vi; ++v)
              ctx.k(a1 * ei + e, a2 * vi + v) = dd(a1 * f + vi + e, a2 * f + v);
      ctx.interior_vertices = vi * static_cast<int>(n);
      ctx.interior_edges = ei * static_cast<int>(n);
      ctx.gluing.resize(m * n);
      for (std::int64_t a1 = 0; a1 < n; ++a1)
        for (int s = 0; s < m; ++s)
          ctx.gluing[a1 * m + s] = static_cast<int>(a1 * vi) + c.gluing[s];
    } else {
      ctx.interior_vertices = static_cast<int>(m * n);
      ctx.gluing.resize(m * n);
      for (std::size_t i = 0; i < ctx.gluing.size(); ++i)
        ctx.gluing[i] = static_cast<int>(i);
      ctx.k = Matrix::Zero(0, ctx.interior_vertices);
    }
    out.push_back(std::move(ctx));
    return out;
  }
  // Z boundary: per-node symbols; interiors were rejected by validate().
  const auto grid = floquet_grid(c.boundary.group().rank(), floquet_nodes);
  for (const auto& th : grid) {
    CylContext ctx;
    ctx.weight = 1.0 / static_cast<double>(grid.size());
    ctx.a = c.boundary.floquet(th);
    ctx.interior_vertices = m;
    ctx.gluing.resize(m);
    for (int s = 0; s < m; ++s) ctx.gluing[s] = s;
    ctx.k = Matrix::Zero(0, m);
    out.push_back(std::move(ctx));
  }
  return out;
}

// Plus-chirality (forward) assembly: rows = interior edges + nodes 0..N,
// cols = interior vertices + nodes 1..N (node 0 lives on the glued vertices).
inline Matrix assemble_forward(const CylContext& ctx, double R, double h,
                               double eps, double u, double delta) {
  const int m = static_cast<int>(ctx.gluing.size());
  const int n = static_cast<int>(std::llround(R / h));
  const int vi = ctx.interior_vertices, ei = ctx.interior_edges;
  const int rows = ei + (n + 1) * m, cols = vi + n * m;
  Matrix ap = ctx.a * spectral_projector_inside(ctx.a, eps);
  Matrix f = Matrix::Zero(rows, cols);
  f.topLeftCorner(ei, vi) = ctx.k;
  auto col_of = [&](int j, int b) { return j == 0 ? ctx.gluing[b] : vi + (j - 1) * m + b; };
  for (int j = 0; j <= n; ++j) {
    const double r = j * h;
    const double vt = cyl_vartheta(r);
    Matrix aeff = ctx.a - vt * ap;
    for (int b = 0; b < m; ++b) aeff(b, b) += vt * u;
    const int row0 = ei + j * m;
    for (int a1 = 0; a1 < m; ++a1) {
      for (int b = 0; b < m; ++b) f(row0 + a1, col_of(j, b)) += aeff(a1, b);
      f(row0 + a1, col_of(j, a1)) -= 1.0 / h;
      if (j + 1 <= n) f(row0 + a1, col_of(j + 1, a1)) += 1.0 / h;
    }
  }
  if (delta != 0.0) {
    for (int j = 0; j <= n; ++j) {
      const double w = std::exp(-delta * cyl_theta(j * h));
      f.middleRows(ei + j * m, m) *= w;
    }
    for (int j = 1; j <= n; ++j) {
      const double w = std::exp(delta * cyl_theta(j * h));
      f.middleCols(vi + (j - 1) * m, m) *= w;
    }
  }
  return f;
}

// Minus-chirality (mirror) assembly, rows = interior vertices + nodes 1..N,
// cols = interior edges + nodes 0..N; the far end carries the Dirichlet pin.
inline Matrix assemble_minus(const CylContext& ctx, double R, double h,
                             double eps, double u, double delta) {
  const int m = static_cast<int>(ctx.gluing.size());
  const int n = static_cast<int>(std::llround(R / h));
  const int vi = ctx.interior_vertices, ei = ctx.interior_edges;
  const int rows = vi + n * m, cols = ei + (n + 1) * m;
  Matrix ap = ctx.a * spectral_projector_inside(ctx.a, eps);
  Matrix f = Matrix::Zero(rows, cols);
  f.topLeftCorner(vi, ei) = ctx.k.adjoint();
  auto row_of = [&](int j, int b) { return j == 0 ? ctx.gluing[b] : vi + (j - 1) * m + b; };
  for (int j = 0; j <= n; ++j) {
    const double r = j * h;
    const double vt = cyl_vartheta(r);
    Matrix aeff = ctx.a - vt * ap;
    for (int b = 0; b < m; ++b) aeff(b, b) += vt * u;
    const int col0 = ei + j * m;
    for (int a1 = 0; a1 < m; ++a1) {
      for (int b = 0; b < m; ++b)
        f(row_of(j, a1), col0 + b) += std::conj(aeff(b, a1));
      f(row_of(j, a1), col0 + a1) += 1.0 / h;
      if (j + 1 <= n) f(row_of(j, a1), ei + (j + 1) * m + a1) -= 1.0 / h;
    }
  }
  if (delta != 0.0) {
    for (int j = 0; j <= n; ++j) {
      const double w = std::exp(delta * cyl_theta(j * h));
      f.middleCols(ei + j * m, m) *= w;
    }
    for (int j = 1; j <= n; ++j) {
      const double w = std::exp(-delta * cyl_theta(j * h));
      f.middleRows(vi + (j - 1) * m, m) *= w;
    }
  }
  return f;
}

struct KernelCount {
  double dim = 0.0;  // cols - rank
  double gap_ratio = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
};

// Kernel dimension by relative singular-value threshold sigma_max * 1e-7 with
// a mandatory gap certificate across the cut.
inline KernelCount kernel_count(const Matrix& f, double min_gap_ratio = 1e3) {
  KernelCount out;
  if (f.cols() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(f);
  Eigen::VectorXd sv = svd.singularValues();  // descending
  const double smax = sv.size() ? sv[0] : 0.0;
  if (smax == 0.0) {
    out.dim = static_cast<double>(f.cols());
    return out;
  }
  const double th = smax * 1e-7;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] >= th) ++rank;
  out.dim = static_cast<double>(f.cols() - rank);
  if (rank > 0 && rank < sv.size() && sv[rank] > 0.0)
    out.gap_ratio = sv[rank - 1] / sv[rank];
  else if (rank > 0 && rank < static_cast<Eigen::Index>(f.cols()))
    out.gap_ratio = std::numeric_limits<double>::infinity();
  // no small singular values at all: certificate is distance to threshold
  if (rank == sv.size() && sv.size() > 0 && f.cols() == sv.size())
    out.gap_ratio = sv[sv.size() - 1] / th;
  out.ambiguous = out.gap_ratio < min_gap_ratio;
  return out;
}

}  // namespace detail

inline double boundary_norm(const EquivariantOperator& a, int floquet_nodes = 64) {
  SpectralMeasure mu = spectral_measure(a, floquet_nodes);
  double n = 0.0;
  for (const auto& atom : mu.atoms) n = std::max(n, std::abs(atom.eigenvalue));
  return n;
}

struct ModifiedOperator {
  CylinderModel model;
  double eps = 0.0;
  double u = 0.0;
  int floquet_nodes = 64;
};

// Grid-resolution guard shared by every assembly entry point.
inline ModifiedOperator spectral_modification(const CylinderModel& c, double eps,
                                              double u, int floquet_nodes = 64) {
  c.validate();
  const double norm = boundary_norm(c.boundary, floquet_nodes);
  if (norm > 0.0 && c.h >= 1.0 / (2.0 * norm))
    throw std::invalid_argument(
        "cylinder resolution error: h must be below 1/(2 ||A||)");
  return ModifiedOperator{c, eps, u, floquet_nodes};
}

inline ModifiedOperator product_operator(const CylinderModel& c,
                                         int floquet_nodes = 64) {
  return spectral_modification(c, 0.0, 0.0, floquet_nodes);
}

// Dense graded realization [[0, F*],[F, 0]] (finite deck groups; for Z pass
// the per-node symbol through cylinder_contexts directly).
inline Matrix dense_graded(const ModifiedOperator& m) {
  auto ctxs = detail::cylinder_contexts(m.model, m.floquet_nodes);
  if (ctxs.size() != 1)
    throw std::logic_error("dense_graded: finite deck groups only");
  Matrix f = detail::assemble_forward(ctxs[0], m.model.R, m.model.h, m.eps, m.u, 0.0);
  Matrix d = Matrix::Zero(f.rows() + f.cols(), f.rows() + f.cols());
  d.bottomLeftCorner(f.rows(), f.cols()) = f;
  d.topRightCorner(f.cols(), f.rows()) = f.adjoint();
  return d;
}

// Far-end fiber restriction of the modified operator: A(1 - Pi_eps) + u.
inline Matrix far_boundary_restriction(const ModifiedOperator& m) {
  auto ctxs = detail::cylinder_contexts(m.model, m.floquet_nodes);
  Matrix a = ctxs[0].a;
  Matrix ap = a * detail::spectral_projector_inside(a, m.eps);
  Matrix out = a - ap;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) += m.u;
  return out;
}

struct ChiralityCounts {
  double plus = 0.0, minus = 0.0;
  double gap_plus = std::numeric_limits<double>::infinity();
  double gap_minus = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
};

// Gamma-normalized kernel dimensions of the weighted operators
// e^{-delta theta} D+- e^{delta theta} at modification (eps, u).
inline ChiralityCounts weighted_kernel(const ModifiedOperator& m, double delta,
                                       bool throw_on_ambiguous = true) {
  if (m.eps > 0.0 && std::abs(delta) >= m.eps)
    throw std::invalid_argument("weighted_kernel: need |delta| < eps");
  ChiralityCounts out;
  for (const auto& ctx : detail::cylinder_contexts(m.model, m.floquet_nodes)) {
    auto cp = detail::kernel_count(
        detail::assemble_forward(ctx, m.model.R, m.model.h, m.eps, m.u, delta));
    auto cm = detail::kernel_count(
        detail::assemble_minus(ctx, m.model.R, m.model.h, m.eps, m.u, delta));
    out.plus += ctx.weight * cp.dim;
    out.minus += ctx.weight * cm.dim;
    out.gap_plus = std::min(out.gap_plus, cp.gap_ratio);
    out.gap_minus = std::min(out.gap_minus, cm.gap_ratio);
    out.ambiguous = out.ambiguous || cp.ambiguous || cm.ambiguous;
  }
  if (out.ambiguous && throw_on_ambiguous)
    throw AmbiguousRankError(
        "cylinder kernel count ambiguous: rank gap below certificate; "
        "extend R or refine the delta-weight");
  return out;
}

struct ExtendedKernelReport {
  double l2_plus = 0, ext_plus = 0, l2_minus = 0, ext_minus = 0;
  double h_plus = 0, h_minus = 0;
  bool stable = true;    // identical integers across the delta grid
  double min_gap = std::numeric_limits<double>::infinity();
};

// L2 kernels from slightly negative weights, extended kernels from slightly
// positive ones; requires identical integer counts across >= 3 grid deltas.
inline ExtendedKernelReport extended_kernel_report(const ModifiedOperator& m,
                                                   const std::vector<double>& deltas) {
  if (!(m.eps > 0.0))
    throw std::invalid_argument("extended_kernel_report: eps must be positive");
  if (deltas.size() < 3)
    throw std::invalid_argument("extended_kernel_report: need >= 3 grid deltas");
  ExtendedKernelReport rep;
  bool first = true;
  for (double d : deltas) {
    if (!(d > 0.0) || d >= m.eps)
      throw std::invalid_argument("extended_kernel_report: deltas must lie in (0, eps)");
    ChiralityCounts l2 = weighted_kernel(m, -d, false);
    ChiralityCounts ext = weighted_kernel(m, d, false);
    rep.min_gap = std::min({rep.min_gap, l2.gap_plus, l2.gap_minus,
                            ext.gap_plus, ext.gap_minus});
    if (l2.ambiguous || ext.ambiguous) rep.stable = false;
    if (first) {
      rep.l2_plus = l2.plus;
      rep.l2_minus = l2.minus;
      rep.ext_plus = ext.plus;
      rep.ext_minus = ext.minus;
      first = false;
    } else if (l2.plus != rep.l2_plus || l2.minus != rep.l2_minus ||
               ext.plus != rep.ext_plus || ext.minus != rep.ext_minus) {
      rep.stable = false;
    }
  }
  if (!rep.stable)
    throw AmbiguousRankError(
        "extended_kernel_report: counts unstable across the delta grid; "
        "extend R (decay budget) before reporting h+-");
  rep.h_plus = rep.ext_plus - rep.l2_plus;
  rep.h_minus = rep.ext_minus - rep.l2_minus;
  return rep;
}

// eta of the modified boundary A_{eps,u} = A(1-Pi) + u from the boundary
// measure: eigenvalues inside (-eps,eps) are moved to u.
inline double modified_boundary_eta(const SpectralMeasure& mu, double eps, double u) {
  double s = 0.0;
  for (const auto& a : mu.atoms) {
    const double lam = std::abs(a.eigenvalue) < eps ? u : a.eigenvalue;
    if (lam > 1e-12) s += a.gamma_multiplicity;
    else if (lam < -1e-12) s -= a.gamma_multiplicity;
  }
  return s;
}

struct L2IndexReport {
  double l2_index = 0.0;          // L2-ind(D_eps) at u = 0 (weighted counts)
  double h_plus = 0.0, h_minus = 0.0;
  struct URow {
    double u;
    double index;                 // ind(D_{eps,u})
    double rel_plus_residual;     // |ind(u) - h+ - l2_index|
    double rel_minus_residual;    // |ind(-u) + h- - l2_index|
  };
  std::vector<URow> rows;
  bool relations_hold = true;
};

inline L2IndexReport l2_index_report(const ModifiedOperator& m,
                                     const std::vector<double>& u_grid,
                                     double probe_delta = 0.0) {
  if (!(m.eps > 0.0))
    throw std::invalid_argument("l2_index_report: eps must be positive");
  const double d0 = probe_delta > 0.0 ? probe_delta : 0.4 * m.eps;
  ModifiedOperator at_zero{m.model, m.eps, 0.0, m.floquet_nodes};
  ExtendedKernelReport ek = extended_kernel_report(
      at_zero, {0.75 * d0, 0.875 * d0, d0});
  L2IndexReport rep;
  rep.l2_index = ek.l2_plus - ek.l2_minus;
  rep.h_plus = ek.h_plus;
  rep.h_minus = ek.h_minus;
  for (double u : u_grid) {
    if (!(u > 0.0) || u >= m.eps)
      throw std::invalid_argument("l2_index_report: u grid must lie in (0, eps)");
    ChiralityCounts cu = weighted_kernel({m.model, m.eps, u, m.floquet_nodes}, 0.0);
    ChiralityCounts cmu = weighted_kernel({m.model, m.eps, -u, m.floquet_nodes}, 0.0);
    L2IndexReport::URow row;
    row.u = u;
    row.index = cu.plus - cu.minus;
    row.rel_plus_residual = std::abs(row.index - rep.h_plus - rep.l2_index);
    row.rel_minus_residual =
        std::abs((cmu.plus - cmu.minus) + rep.h_minus - rep.l2_index);
    if (row.rel_plus_residual > 1e-9 || row.rel_minus_residual > 1e-9)
      rep.relations_hold = false;
    rep.rows.push_back(row);
  }
  return rep;
}

struct ApsReport {
  struct URow {
    double u;
    double index;        // ind(D_{eps,u})
    double index_neg;    // ind(D_{eps,-u})
    double eta;          // eta(A_{eps,u})
    double i_of_u;       // ind - eta/2
    double g;            // i_of_u - i_of_u at the smallest u
    double sym_residual; // symmetrization identity residual
  };
  std::vector<URow> rows;      // sorted by decreasing u
  double l2_index = 0.0;
  double h_plus = 0.0, h_minus = 0.0;
  double interior_constant = 0.0;  // I* = I(u_min)
  bool symmetrization_exact = true;
  bool g_nonincreasing = true;
};

// I(u) = ind(D_{eps,u}) - (1/2) eta(A_{eps,u}); checks the symmetrization
// identity L2-ind = (1/2)[ind(u) + ind(-u) + h- - h+] and the g(u) -> 0 trend.
inline ApsReport aps_consistency(const ModifiedOperator& m,
                                 std::vector<double> u_grid) {
  if (!(m.eps > 0.0)) throw std::invalid_argument("aps_consistency: eps > 0 required");
  std::sort(u_grid.begin(), u_grid.end(), std::greater<double>());
  ApsReport rep;
  ModifiedOperator at_zero{m.model, m.eps, 0.0, m.floquet_nodes};
  const double d0 = 0.4 * m.eps;
  ExtendedKernelReport ek =
      extended_kernel_report(at_zero, {0.75 * d0, 0.875 * d0, d0});
  rep.l2_index = ek.l2_plus - ek.l2_minus;
  rep.h_plus = ek.h_plus;
  rep.h_minus = ek.h_minus;
  SpectralMeasure mu = spectral_measure(m.model.boundary, m.floquet_nodes);
  for (double u : u_grid) {
    if (!(u > 0.0) || u >= m.eps)
      throw std::invalid_argument("aps_consistency: u grid must lie in (0, eps)");
    ChiralityCounts cu = weighted_kernel({m.model, m.eps, u, m.floquet_nodes}, 0.0);
    ChiralityCounts cmu = weighted_kernel({m.model, m.eps, -u, m.floquet_nodes}, 0.0);
    ApsReport::URow row;
    row.u = u;
    row.index = cu.plus - cu.minus;
    row.index_neg = cmu.plus - cmu.minus;
    row.eta = modified_boundary_eta(mu, m.eps, u);
    row.i_of_u = row.index - 0.5 * row.eta;
    row.sym_residual = std::abs(
        rep.l2_index -
        0.5 * (row.index + row.index_neg + rep.h_minus - rep.h_plus));
    if (row.sym_residual > 1e-9) rep.symmetrization_exact = false;
    rep.rows.push_back(row);
  }
  rep.interior_constant = rep.rows.back().i_of_u;
  double prev = std::numeric_limits<double>::infinity();
  for (auto& row : rep.rows) {
    row.g = row.i_of_u - rep.interior_constant;
    if (std::abs(row.g) > prev + 1e-12) rep.g_nonincreasing = false;
    prev = std::abs(row.g);
  }
  return rep;
}

struct SpectrumBottomReport {
  double bottom = 0.0;  // inf supp mu_{A_{eps,u}^2}
  struct Row {
    double R;
    int below_bottom;
    int window;  // count in [bottom, bottom + window_width]
  };
  std::vector<Row> rows;
  bool below_stable = true;
  bool window_grows = true;
};

// Eigenvalues of D^2 below the boundary-induced essential bottom form a
// finite R-stable set; window counts above it scale with R.
inline SpectrumBottomReport spectrum_bottom_check(const ModifiedOperator& m,
                                                  const std::vector<double>& r_grid,
                                                  double window_width = 0.0) {
  SpectrumBottomReport rep;
  Matrix afar = far_boundary_restriction(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(afar);
  double bmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    bmin = std::min(bmin, std::abs(es.eigenvalues()[i]));
  rep.bottom = bmin * bmin;
  if (window_width <= 0.0) window_width = std::max(1.0, rep.bottom);
  int prev_below = -1;
  double prev_window = -1.0;
  for (double r : r_grid) {
    CylinderModel cm = m.model;
    cm.R = r;
    Matrix d = dense_graded({cm, m.eps, m.u, m.floquet_nodes});
    Eigen::SelfAdjointEigenSolver<Matrix> esd(d);
    SpectrumBottomReport::Row row{r, 0, 0};
    for (Eigen::Index i = 0; i < esd.eigenvalues().size(); ++i) {
      const double lam2 = esd.eigenvalues()[i] * esd.eigenvalues()[i];
      if (lam2 < rep.bottom * (1.0 - 1e-6) - 1e-12) ++row.below_bottom;
      else if (lam2 <= rep.bottom + window_width) ++row.window;
    }
    if (prev_below >= 0 && row.below_bottom != prev_below) rep.below_stable = false;
    if (prev_window > 0.0 && row.window < 1.2 * prev_window * 0.5)
      rep.window_grows = rep.window_grows && row.window > prev_window;
    prev_below = row.below_bottom;
    prev_window = row.window;
    rep.rows.push_back(row);
  }
  // window growth: last vs first should scale roughly with R
  if (rep.rows.size() >= 2) {
    const auto& a = rep.rows.front();
    const auto& b = rep.rows.back();
    const double ratio_r = b.R / a.R;
    if (a.window > 0)
      rep.window_grows = std::abs(b.window / static_cast<double>(a.window) - ratio_r) <=
                         0.2 * ratio_r + 2.0 / a.window;
    else
      rep.window_grows = b.window >= a.window;
  }
  return rep;
}

struct CylinderDecayReport {
  struct Row {
    double t;
    double dist;     // r-separation of the masks
    double norm;     // masked heat-operator norm
    double bound;
    bool in_regime;
  };
  std::vector<Row> rows;
  double c = 0.0;  // propagation constant (site hops per unit time)
  bool in_regime_bound_holds = true;
};

// Masked heat decay ||psi_1 e^{-tD^2} psi_2|| along the cylinder axis.
inline CylinderDecayReport cylinder_decay_check(const ModifiedOperator& m,
                                                double cut_r, double dist_r,
                                                const std::vector<double>& times) {
  Matrix d = dense_graded(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(d);
  CylinderDecayReport rep;
  // site-hop propagation bound: nearest-neighbor amplitude 1/h plus fiber norm
  const double amp = 1.0 / m.model.h + boundary_norm(m.model.boundary, m.floquet_nodes);
  rep.c = 2.0 * amp;
  auto ctxs = detail::cylinder_contexts(m.model, m.floquet_nodes);
  const auto& ctx = ctxs[0];
  const int mm = static_cast<int>(ctx.gluing.size());
  const int n = m.model.sites();
  const int vi = ctx.interior_vertices, ei = ctx.interior_edges;
  const int fplus = vi + n * mm, fminus = ei + (n + 1) * mm;
  // r-coordinate per dense index (plus block then minus block)
  std::vector<double> rcoord(fplus + fminus, 0.0);
  for (int j = 1; j <= n; ++j)
    for (int b = 0; b < mm; ++b) rcoord[vi + (j - 1) * mm + b] = j * m.model.h;
  for (int j = 0; j <= n; ++j)
    for (int b = 0; b < mm; ++b) rcoord[fplus + ei + j * mm + b] = j * m.model.h;
  Eigen::VectorXd mask1(fplus + fminus), mask2(fplus + fminus);
  for (int i = 0; i < fplus + fminus; ++i) {
    mask1[i] = rcoord[i] <= cut_r ? 1.0 : 0.0;
    mask2[i] = rcoord[i] >= cut_r + dist_r ? 1.0 : 0.0;
  }
  const double nsites = dist_r / m.model.h;  // separation in hops
  for (double t : times) {
    Eigen::VectorXd f(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f[i] = std::exp(-t * es.eigenvalues()[i] * es.eigenvalues()[i]);
    Matrix heat = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
    Matrix masked = mask1.asDiagonal() * heat * mask2.asDiagonal();
    const double norm = masked.jacobiSvd().singularValues()(0);
    const double bound = std::exp(-nsites * nsites / (6.0 * rep.c * rep.c * t));
    const bool in_regime = nsites <= rep.c * t;
    if (in_regime && norm > bound * (1.0 + 1e-9) + 1e-300)
      rep.in_regime_bound_holds = false;
    rep.rows.push_back({t, dist_r, norm, bound, in_regime});
  }
  return rep;
}

}  // namespace ghl
