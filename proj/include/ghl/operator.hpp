#pragma once

// Gamma-equivariant operators as group-algebra-valued matrices
//   A = sum_gamma A_gamma (x) R_gamma
// with finitely supported blocks over a deck group. Finite groups get dense
// realizations through the right regular representation; free-abelian groups
// go through the Floquet transform.

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "ghl/group.hpp"

namespace ghl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised whenever a rank decision would be numerically ambiguous; maps to
// CLI exit code 3.
struct AmbiguousRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EquivariantOperator {
public:
  EquivariantOperator(DeckGroup group, int fiber_plus, int fiber_minus = 0)
      : group_(std::move(group)), fp_(fiber_plus), fm_(fiber_minus) {
    if (fp_ < 0 || fm_ < 0) throw DimensionError("negative fiber dimension");
  }

  const DeckGroup& group() const { return group_; }
  int fiber_plus() const { return fp_; }
  int fiber_minus() const { return fm_; }
  int fiber_dim() const { return fp_ + fm_; }
  const std::map<GroupElement, Matrix>& blocks() const { return blocks_; }

  void set_block(const GroupElement& gamma, const Matrix& m) {
    if (m.rows() != fiber_dim() || m.cols() != fiber_dim())
      throw DimensionError("block shape must match fiber dimension");
    GroupElement g = group_.canonical(gamma);
    if (m.norm() == 0.0)
      blocks_.erase(g);
    else
      blocks_[g] = m;
  }

  void add_block(const GroupElement& gamma, const Matrix& m) {
    if (m.rows() != fiber_dim() || m.cols() != fiber_dim())
      throw DimensionError("block shape must match fiber dimension");
    GroupElement g = group_.canonical(gamma);
    auto it = blocks_.find(g);
    if (it == blocks_.end())
      blocks_[g] = m;
    else
      it->second += m;
  }

  Matrix block(const GroupElement& gamma) const {
    auto it = blocks_.find(group_.canonical(gamma));
    if (it == blocks_.end()) return Matrix::Zero(fiber_dim(), fiber_dim());
    return it->second;
  }

  static EquivariantOperator identity(const DeckGroup& g, int fp, int fm = 0) {
    EquivariantOperator a(g, fp, fm);
    a.set_block(g.identity(), Matrix::Identity(fp + fm, fp + fm));
    return a;
  }

  EquivariantOperator adjoint() const {
    EquivariantOperator a(group_, fp_, fm_);
    for (const auto& [g, m] : blocks_)
      a.set_block(group_.inv(g), m.adjoint());
    return a;
  }

  EquivariantOperator scaled(Complex c) const {
    EquivariantOperator a(group_, fp_, fm_);
    for (const auto& [g, m] : blocks_) a.set_block(g, c * m);
    return a;
  }

  EquivariantOperator plus(const EquivariantOperator& o) const {
    require_compatible(o);
    EquivariantOperator a = *this;
    for (const auto& [g, m] : o.blocks_) a.add_block(g, m);
    return a;
  }

  double selfadjoint_residual() const {
    double r = 0.0;
    EquivariantOperator a = adjoint();
    std::map<GroupElement, Matrix> all = blocks_;
    for (const auto& [g, m] : a.blocks_) all.try_emplace(g, Matrix::Zero(fiber_dim(), fiber_dim()));
    for (const auto& [g, m] : all)
      r = std::max(r, (block(g) - a.block(g)).cwiseAbs().maxCoeff());
    return r;
  }

  bool is_selfadjoint(double tol = 1e-10) const { return selfadjoint_residual() <= tol; }

  // (AB)_gamma = sum_{alpha beta = gamma} A_alpha B_beta
  EquivariantOperator compose(const EquivariantOperator& o) const {
    if (!(group_ == o.group_)) throw DimensionError("compose: group mismatch");
    if (fiber_dim() != o.fiber_dim())
      throw DimensionError("compose: fiber dimension mismatch");
    EquivariantOperator a(group_, fp_, fm_);
    for (const auto& [g1, m1] : blocks_)
      for (const auto& [g2, m2] : o.blocks_)
        a.add_block(group_.mul(g1, g2), m1 * m2);
    return a;
  }

  // tr_Gamma(A) = tr(A_e); for finite G this equals tr(dense)/|G|,
  // for Z^k it equals the torus average of tr(A^(theta)).
  Complex gamma_trace() const { return block(group_.identity()).trace(); }

  // Dense realization sum_gamma A_gamma (x) R_gamma for finite groups,
  // with (R_gamma)_{alpha,beta} = [beta = alpha*gamma].
  Matrix dense() const {
    if (!group_.is_finite())
      throw std::logic_error("dense: infinite deck group");
    const auto els = group_.elements();
    const std::int64_t n = static_cast<std::int64_t>(els.size());
    const int f = fiber_dim();
    Matrix d = Matrix::Zero(f * n, f * n);
    for (const auto& [g, m] : blocks_)
      for (std::int64_t a = 0; a < n; ++a) {
        std::int64_t b = group_.element_index(group_.mul(els[a], g));
        d.block(a * f, b * f, f, f) += m;
      }
    return d;
  }

  // Floquet symbol A^(theta) = sum_gamma A_gamma e^{i<gamma,theta>} for
  // a free-abelian deck group.
  Matrix floquet(const std::vector<double>& theta) const {
    if (group_.kind() != DeckGroup::Kind::Lattice || !group_.orders().empty() ||
        group_.rank() == 0)
      throw std::logic_error("floquet: requires a free-abelian deck group");
    if (static_cast<int>(theta.size()) != group_.rank())
      throw DimensionError("floquet: theta dimension mismatch");
    Matrix s = Matrix::Zero(fiber_dim(), fiber_dim());
    for (const auto& [g, m] : blocks_) {
      double phase = 0.0;
      for (int i = 0; i < group_.rank(); ++i) phase += g[i] * theta[i];
      s += std::polar(1.0, phase) * m;
    }
    return s;
  }

  // Push the operator down a finite quotient: blocks folded onto the target.
  EquivariantOperator at_quotient(const Quotient& q) const {
    if (!(q.source() == group_)) throw DimensionError("at_quotient: group mismatch");
    EquivariantOperator a(q.target(), fp_, fm_);
    for (const auto& [g, m] : blocks_) a.add_block(q.map(g), m);
    return a;
  }

private:
  void require_compatible(const EquivariantOperator& o) const {
    if (!(group_ == o.group_) || fp_ != o.fp_ || fm_ != o.fm_)
      throw DimensionError("operator shape/group mismatch");
  }

  DeckGroup group_;
  int fp_, fm_;
  std::map<GroupElement, Matrix> blocks_;
};

struct SpectralAtom {
  double eigenvalue;
  double gamma_multiplicity;
};

struct SpectralMeasure {
  std::vector<SpectralAtom> atoms;  // sorted ascending by eigenvalue
  enum class Source { FiniteExact, FloquetQuadrature } source = Source::FiniteExact;
  int quadrature_nodes = 0;

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.gamma_multiplicity;
    return s;
  }

  double min_abs_eigenvalue(double kernel_tol = 0.0) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms)
      if (std::abs(a.eigenvalue) > kernel_tol)
        m = std::min(m, std::abs(a.eigenvalue));
    return m;
  }

  // N_{Gamma,T}(lambda): right-continuous counting function.
  double counting(double lambda) const {
    double s = 0.0;
    for (const auto& a : atoms)
      if (a.eigenvalue <= lambda) s += a.gamma_multiplicity;
    return s;
  }
};

namespace detail {
inline void require_selfadjoint(const EquivariantOperator& t, double tol = 1e-10) {
  double r = t.selfadjoint_residual();
  if (r > tol)
    throw std::invalid_argument("operator not selfadjoint (residual " +
                                std::to_string(r) + ")");
}
}  // namespace detail

inline std::vector<std::vector<double>> floquet_grid(int rank, int nodes_per_dim) {
  std::vector<std::vector<double>> grid;
  std::vector<int> idx(rank, 0);
  const double step = 2.0 * M_PI / nodes_per_dim;
  while (true) {
    std::vector<double> theta(rank);
    for (int i = 0; i < rank; ++i) theta[i] = idx[i] * step;
    grid.push_back(theta);
    int i = 0;
    for (; i < rank; ++i) {
      if (++idx[i] < nodes_per_dim) break;
      idx[i] = 0;
    }
    if (i == rank) break;
  }
  return grid;
}

inline int default_floquet_nodes(int rank) { return rank >= 2 ? 64 : 1024; }

inline SpectralMeasure spectral_measure(const EquivariantOperator& t,
                                        int floquet_nodes = 0) {
  detail::require_selfadjoint(t);
  SpectralMeasure mu;
  if (t.group().is_finite()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(t.dense());
    const double w = 1.0 / static_cast<double>(t.group().size());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      mu.atoms.push_back({es.eigenvalues()[i], w});
    mu.source = SpectralMeasure::Source::FiniteExact;
  } else {
    const int nodes = floquet_nodes > 0 ? floquet_nodes
                                        : default_floquet_nodes(t.group().rank());
    const auto grid = floquet_grid(t.group().rank(), nodes);
    const double w = 1.0 / static_cast<double>(grid.size());
    for (const auto& theta : grid) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(t.floquet(theta));
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        mu.atoms.push_back({es.eigenvalues()[i], w});
    }
    mu.source = SpectralMeasure::Source::FloquetQuadrature;
    mu.quadrature_nodes = nodes;
  }
  std::sort(mu.atoms.begin(), mu.atoms.end(),
            [](const SpectralAtom& a, const SpectralAtom& b) {
              return a.eigenvalue < b.eigenvalue;
            });
  return mu;
}

// f applied through the dense eigendecomposition and folded back to blocks;
// exact for equivariant input. Finite groups only.
inline EquivariantOperator apply_function(const EquivariantOperator& t,
                                          const std::function<double(double)>& f) {
  detail::require_selfadjoint(t);
  if (!t.group().is_finite())
    throw std::logic_error("apply_function: finite deck groups only");
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.dense());
  Eigen::VectorXd fv(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv[i] = f(es.eigenvalues()[i]);
    if (!std::isfinite(fv[i]))
      throw std::domain_error("apply_function: f undefined on spectrum");
  }
  Matrix d = es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
  // Fold dense blocks back along group orbits.
  const auto els = t.group().elements();
  const std::int64_t n = static_cast<std::int64_t>(els.size());
  const int fdim = t.fiber_dim();
  EquivariantOperator out(t.group(), t.fiber_plus(), t.fiber_minus());
  for (const auto& g : els) {
    Matrix m = Matrix::Zero(fdim, fdim);
    for (std::int64_t a = 0; a < n; ++a) {
      std::int64_t b = t.group().element_index(t.group().mul(els[a], g));
      m += d.block(a * fdim, b * fdim, fdim, fdim);
    }
    m /= static_cast<double>(n);
    if (m.cwiseAbs().maxCoeff() > 1e-15) out.set_block(g, m);
  }
  return out;
}

inline double gamma_dimension(const EquivariantOperator& p, double tol = 1e-10) {
  detail::require_selfadjoint(p, tol);
  EquivariantOperator p2 = p.compose(p);
  double r = 0.0;
  for (const auto& [g, m] : p2.blocks())
    r = std::max(r, (m - p.block(g)).cwiseAbs().maxCoeff());
  for (const auto& [g, m] : p.blocks())
    if (p2.blocks().find(g) == p2.blocks().end())
      r = std::max(r, m.cwiseAbs().maxCoeff());
  if (r > tol)
    throw std::invalid_argument("gamma_dimension: input is not a projection");
  return p.gamma_trace().real();
}

struct RankDecision {
  Eigen::Index rank = 0;
  double threshold = 0.0;
  double gap_ratio = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
};

// Singular-value rank with the mandatory gap-ratio certificate.
inline RankDecision decide_rank(const Eigen::VectorXd& sv_desc, double threshold,
                                double min_gap_ratio = 1e3) {
  RankDecision d;
  d.threshold = threshold;
  Eigen::Index r = 0;
  while (r < sv_desc.size() && sv_desc[r] >= threshold) ++r;
  d.rank = r;
  if (r > 0 && r < sv_desc.size() && sv_desc[r] > 0.0)
    d.gap_ratio = sv_desc[r - 1] / sv_desc[r];
  d.ambiguous = d.gap_ratio < min_gap_ratio;
  return d;
}

struct IndexReport {
  double gamma_ker_plus = 0.0;
  double gamma_ker_minus = 0.0;
  double index = 0.0;
  double rank_gap_ratio = std::numeric_limits<double>::infinity();
  bool ambiguous = false;
};

// Gamma-index of an odd graded operator via singular-value thresholding of
// the dense plus-to-minus block, divided by |G|.
inline IndexReport gamma_index(const EquivariantOperator& t,
                               double min_gap_ratio = 1e3,
                               bool throw_on_ambiguous = true) {
  if (t.fiber_plus() == 0 && t.fiber_minus() == 0)
    throw DimensionError("gamma_index: empty fibers");
  if (!t.group().is_finite())
    throw std::logic_error("gamma_index: finite deck groups only");
  // Oddness: plus-plus and minus-minus blocks must vanish.
  for (const auto& [g, m] : t.blocks()) {
    double r = 0.0;
    if (t.fiber_plus() > 0)
      r = std::max(r, m.topLeftCorner(t.fiber_plus(), t.fiber_plus()).cwiseAbs().maxCoeff());
    if (t.fiber_minus() > 0)
      r = std::max(r, m.bottomRightCorner(t.fiber_minus(), t.fiber_minus()).cwiseAbs().maxCoeff());
    if (r > 1e-13)
      throw std::invalid_argument("gamma_index: operator is not odd");
  }
  const std::int64_t n = t.group().size();
  Matrix d = t.dense();
  const int f = t.fiber_dim();
  // Extract the dense plus->minus block via index masks.
  std::vector<Eigen::Index> plus_idx, minus_idx;
  for (std::int64_t a = 0; a < n; ++a) {
    for (int i = 0; i < t.fiber_plus(); ++i) plus_idx.push_back(a * f + i);
    for (int i = 0; i < t.fiber_minus(); ++i)
      minus_idx.push_back(a * f + t.fiber_plus() + i);
  }
  Matrix dplus(minus_idx.size(), plus_idx.size());
  for (std::size_t r = 0; r < minus_idx.size(); ++r)
    for (std::size_t c = 0; c < plus_idx.size(); ++c)
      dplus(r, c) = d(minus_idx[r], plus_idx[c]);

  IndexReport rep;
  if (dplus.rows() == 0 || dplus.cols() == 0) {
    rep.gamma_ker_plus = static_cast<double>(dplus.cols()) / n;
    rep.gamma_ker_minus = static_cast<double>(dplus.rows()) / n;
    rep.index = rep.gamma_ker_plus - rep.gamma_ker_minus;
    return rep;
  }
  Eigen::BDCSVD<Matrix> svd(dplus);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  const double threshold =
      std::max(static_cast<double>(std::max(dplus.rows(), dplus.cols())) *
                   std::numeric_limits<double>::epsilon() * smax * 1e3,
               std::numeric_limits<double>::min());
  RankDecision dec = decide_rank(sv, threshold, min_gap_ratio);
  rep.rank_gap_ratio = dec.gap_ratio;
  rep.ambiguous = smax > 0.0 && dec.ambiguous;
  if (rep.ambiguous && throw_on_ambiguous)
    throw AmbiguousRankError("gamma_index: rank gap ratio " +
                             std::to_string(dec.gap_ratio) + " below certificate");
  rep.gamma_ker_plus = static_cast<double>(dplus.cols() - dec.rank) / n;
  rep.gamma_ker_minus = static_cast<double>(dplus.rows() - dec.rank) / n;
  rep.index = rep.gamma_ker_plus - rep.gamma_ker_minus;
  return rep;
}

struct GapReport {
  bool has_gap = false;
  double gap = 0.0;
};

// Spectral gap of a selfadjoint operator at 0 (kernel excluded for finite
// groups; for Z^k the symbol minimum over the quadrature grid).
inline GapReport fredholm_gap(const EquivariantOperator& t, double radius = 0.0,
                              int floquet_nodes = 0, double kernel_tol = 1e-10) {
  detail::require_selfadjoint(t);
  GapReport g;
  if (t.group().is_finite()) {
    SpectralMeasure mu = spectral_measure(t);
    g.gap = mu.min_abs_eigenvalue(kernel_tol);
    if (!std::isfinite(g.gap)) g.gap = 0.0;
    g.has_gap = true;  // finite group: Gamma-essential spectrum is empty
    return g;
  }
  SpectralMeasure mu = spectral_measure(t, floquet_nodes);
  g.gap = mu.min_abs_eigenvalue(0.0);
  g.has_gap = g.gap > radius;
  return g;
}

}  // namespace ghl
