#pragma once

// Complex Clifford algebras C(k), k <= 12: sparse elements over the monomial
// basis, graded traces, and spinor representations by Pauli tensor blocks.
// Generators satisfy c_i c_j + c_j c_i = -2 delta_ij.

#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ghl {

class CliffordElement {
public:
  static constexpr int kMaxGenerators = 12;

  explicit CliffordElement(int k) : k_(k) {
    if (k < 1 || k > kMaxGenerators)
      throw std::invalid_argument("CliffordElement: k out of range");
  }

  int k() const { return k_; }
  // coefficients keyed by generator bitmask (bit i-1 <-> c_i)
  const std::map<std::uint32_t, std::complex<double>>& coefficients() const {
    return coeffs_;
  }

  std::complex<double> coefficient(std::uint32_t mask) const {
    auto it = coeffs_.find(mask);
    return it == coeffs_.end() ? std::complex<double>(0.0) : it->second;
  }

  void add(std::uint32_t mask, std::complex<double> c) {
    if (mask >= (1u << k_))
      throw std::invalid_argument("CliffordElement: monomial outside algebra");
    auto [it, inserted] = coeffs_.try_emplace(mask, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) == 0.0) coeffs_.erase(it);
  }

  static CliffordElement scalar(int k, std::complex<double> c) {
    CliffordElement x(k);
    x.add(0, c);
    return x;
  }

  static CliffordElement generator(int k, int i) {
    if (i < 1 || i > k) throw std::invalid_argument("generator index out of range");
    CliffordElement x(k);
    x.add(1u << (i - 1), 1.0);
    return x;
  }

  static CliffordElement monomial(int k, std::uint32_t mask,
                                  std::complex<double> c = 1.0) {
    CliffordElement x(k);
    x.add(mask, c);
    return x;
  }

  CliffordElement plus(const CliffordElement& o) const {
    require_same(o);
    CliffordElement x = *this;
    for (const auto& [m, c] : o.coeffs_) x.add(m, c);
    return x;
  }

  CliffordElement scaled(std::complex<double> s) const {
    CliffordElement x(k_);
    for (const auto& [m, c] : coeffs_) x.add(m, s * c);
    return x;
  }

private:
  void require_same(const CliffordElement& o) const {
    if (k_ != o.k_)
      throw std::invalid_argument("Clifford elements from different algebras");
  }

  friend CliffordElement multiply(const CliffordElement&, const CliffordElement&);

  int k_;
  std::map<std::uint32_t, std::complex<double>> coeffs_;
};

// Normal-ordered product of basis monomials: returns the sign picked up by
// anticommutation and c_i^2 = -1; the product monomial is mask_a ^ mask_b.
inline int monomial_product_sign(std::uint32_t a, std::uint32_t b) {
  int sign = 1;
  std::uint32_t m = a;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    if (std::popcount(m >> (j + 1)) & 1) sign = -sign;
    if (m & (1u << j)) sign = -sign;  // c_j c_j = -1
    m ^= 1u << j;
  }
  return sign;
}

inline CliffordElement multiply(const CliffordElement& a, const CliffordElement& b) {
  if (a.k() != b.k())
    throw std::invalid_argument("multiply: Clifford elements from different algebras");
  CliffordElement out(a.k());
  for (const auto& [ma, ca] : a.coefficients())
    for (const auto& [mb, cb] : b.coefficients())
      out.add(ma ^ mb,
              static_cast<double>(monomial_product_sign(ma, mb)) * ca * cb);
  return out;
}

// tau_k = i^{floor((k+1)/2)} c_1...c_k; satisfies tau_k^2 = 1.
inline CliffordElement volume_element(int k) {
  const int p = (k + 1) / 2;
  std::complex<double> c = 1.0;
  for (int j = 0; j < p; ++j) c *= std::complex<double>(0.0, 1.0);
  return CliffordElement::monomial(k, (1u << k) - 1, c);
}

struct GradedTraceTable {
  int k = 0;
  std::complex<double> str = 0.0;                 // even k only
  std::optional<std::complex<double>> tr_plus;    // odd k only
  std::optional<std::complex<double>> tr_minus;   // odd k only
};

// Even k=2l: str vanishes on every monomial except c_1..c_2l, normalized so
// str(tau_2l) = 2^l. Odd k=2l-1: tr+-(1) = 2^{l-1}, tr+-(tau) = +-2^{l-1},
// all other monomials traceless.
inline GradedTraceTable graded_trace(const CliffordElement& x) {
  GradedTraceTable t;
  t.k = x.k();
  const std::uint32_t full = (1u << x.k()) - 1;
  const std::complex<double> i(0.0, 1.0);
  if (x.k() % 2 == 0) {
    const int l = x.k() / 2;
    // str(c_1..c_2l) = 2^l * i^{-l}
    std::complex<double> w = std::pow(2.0, l);
    for (int j = 0; j < l; ++j) w *= -i;
    t.str = w * x.coefficient(full);
  } else {
    const int l = (x.k() + 1) / 2;
    std::complex<double> w = std::pow(2.0, l - 1);
    std::complex<double> wt = w;
    for (int j = 0; j < l; ++j) wt *= -i;  // tr+-(c_1..c_k) = +-2^{l-1} i^{-l}
    t.tr_plus = w * x.coefficient(0) + wt * x.coefficient(full);
    t.tr_minus = w * x.coefficient(0) - wt * x.coefficient(full);
  }
  return t;
}

struct SpinorRepresentation {
  int k = 0;
  int ambient_dim = 0;                  // 2^{ceil(k/2)}
  std::vector<Eigen::MatrixXcd> c;      // generator images, ambient space
  Eigen::MatrixXcd grading;             // even k: image of tau_k (diagonal)
  // odd k: irreducible +-representations of dimension 2^{(k-1)/2}
  std::vector<Eigen::MatrixXcd> c_plus, c_minus;

  Eigen::MatrixXcd represent(const CliffordElement& x,
                             const std::vector<Eigen::MatrixXcd>& gens) const {
    const Eigen::Index n = gens.empty() ? ambient_dim : gens[0].rows();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [mask, coef] : x.coefficients()) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
      for (int j = 0; j < k; ++j)
        if (mask & (1u << j)) m = m * gens[j];
      out += coef * m;
    }
    return out;
  }

  Eigen::MatrixXcd ambient(const CliffordElement& x) const { return represent(x, c); }
  Eigen::MatrixXcd plus(const CliffordElement& x) const { return represent(x, c_plus); }
  Eigen::MatrixXcd minus(const CliffordElement& x) const { return represent(x, c_minus); }

  // Signed matrix trace realizing str for even k.
  std::complex<double> signed_trace(const Eigen::MatrixXcd& m) const {
    return (grading * m).trace();
  }
};

namespace detail {
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}
}  // namespace detail

// Pauli tensor construction: c_{2j-1} = s3^{(j-1)} (x) (i s1) (x) I...,
// c_{2j} = s3^{(j-1)} (x) (i s2) (x) I...; grading = s3^{(x)l} = rep(tau_2l).
// Odd k lives in the ambient even algebra via c_i -> c_i c_{2l}; the +- blocks
// are the grading eigenspaces (rep(tau_k) is diagonal +-1 there).
inline SpinorRepresentation spinor_representation(int k) {
  if (k < 1 || k > CliffordElement::kMaxGenerators)
    throw std::invalid_argument("spinor_representation: k out of range");
  const int l = (k + 1) / 2;
  const int n = 1 << l;
  const std::complex<double> i(0.0, 1.0);
  Eigen::MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2), id2 = Eigen::MatrixXcd::Identity(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;

  SpinorRepresentation rep;
  rep.k = k;
  rep.ambient_dim = n;
  std::vector<Eigen::MatrixXcd> amb(2 * l);
  for (int j = 1; j <= l; ++j) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(1, 1), b = a;
    for (int s = 1; s <= l; ++s) {
      const Eigen::MatrixXcd& fa = s < j ? s3 : (s == j ? (i * s1).eval() : id2);
      const Eigen::MatrixXcd& fb = s < j ? s3 : (s == j ? (i * s2).eval() : id2);
      a = detail::kron(a, fa);
      b = detail::kron(b, fb);
    }
    amb[2 * j - 2] = a;
    amb[2 * j - 1] = b;
  }
  Eigen::MatrixXcd grading = Eigen::MatrixXcd::Identity(1, 1);
  for (int s = 0; s < l; ++s) grading = detail::kron(grading, s3);

  if (k % 2 == 0) {
    rep.c.assign(amb.begin(), amb.end());
    rep.grading = grading;
    return rep;
  }

  // Odd k = 2l-1: ambient images c_i c_{2l}.
  rep.c.resize(k);
  for (int j = 0; j < k; ++j) rep.c[j] = amb[j] * amb[2 * l - 1];
  rep.grading = grading;
  // rep image of tau_k is diagonal with entries +-1; split along it.
  Eigen::MatrixXcd tau_img = rep.represent(volume_element(k), rep.c);
  std::vector<int> pidx, midx;
  for (int r = 0; r < n; ++r) {
    const double d = tau_img(r, r).real();
    if (std::abs(d - 1.0) < 1e-12)
      pidx.push_back(r);
    else if (std::abs(d + 1.0) < 1e-12)
      midx.push_back(r);
    else
      throw std::logic_error("spinor_representation: volume image not diagonal +-1");
  }
  if (pidx.size() != midx.size())
    throw std::logic_error("spinor_representation: unbalanced grading split");
  auto restrict_to = [&](const std::vector<int>& idx, const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c2 = 0; c2 < idx.size(); ++c2)
        out(r, c2) = m(idx[r], idx[c2]);
    return out;
  };
  rep.c_plus.resize(k);
  rep.c_minus.resize(k);
  for (int j = 0; j < k; ++j) {
    // c_i c_{2l} commutes with the grading, so both blocks are invariant.
    rep.c_plus[j] = restrict_to(pidx, rep.c[j]);
    rep.c_minus[j] = restrict_to(midx, rep.c[j]);
  }
  return rep;
}

// Half-cylinder trace identity on the 2x2-block model E = C^2 (x) F with
// c(d/dr) = [[0,-1],[1,0]], Omega = [[0,1],[1,0]], grading diag(1,-1):
//   str(c(d/dr) Omega (I (x) phi)) = -2 tr(phi).
// Returns the residual of that identity for the given phi.
inline double cylinder_trace_identity_check(const Eigen::MatrixXcd& phi) {
  if (phi.rows() != phi.cols())
    throw std::invalid_argument("cylinder_trace_identity_check: phi must be square");
  const Eigen::Index f = phi.rows();
  Eigen::MatrixXcd cdr = Eigen::MatrixXcd::Zero(2 * f, 2 * f);
  Eigen::MatrixXcd omega = cdr, grading = cdr, embed = cdr;
  cdr.topRightCorner(f, f) = -Eigen::MatrixXcd::Identity(f, f);
  cdr.bottomLeftCorner(f, f) = Eigen::MatrixXcd::Identity(f, f);
  omega.topRightCorner(f, f) = Eigen::MatrixXcd::Identity(f, f);
  omega.bottomLeftCorner(f, f) = Eigen::MatrixXcd::Identity(f, f);
  grading.topLeftCorner(f, f) = Eigen::MatrixXcd::Identity(f, f);
  grading.bottomRightCorner(f, f) = -Eigen::MatrixXcd::Identity(f, f);
  embed.topLeftCorner(f, f) = phi;
  embed.bottomRightCorner(f, f) = phi;
  const std::complex<double> str = (grading * cdr * omega * embed).trace();
  return std::abs(str + 2.0 * phi.trace());
}

}  // namespace ghl
