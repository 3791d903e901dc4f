#pragma once

// Voltage graphs over deck groups, derived covers, graded graph Dirac
// operators (weighted coboundaries), circle boundary operators, and the
// quasi-isometry diagnostic between cover distance and word length.

#include <algorithm>
#include <queue>

#include "ghl/group.hpp"
#include "ghl/operator.hpp"

namespace ghl {

struct VoltageGraph {
  struct Edge {
    int tail = 0;
    int head = 0;
    double weight = 1.0;
    GroupElement voltage;
  };

  DeckGroup group = DeckGroup::trivial();
  int vertices = 0;
  std::vector<Edge> edges;
  std::vector<double> potentials;  // optional; empty or one entry per vertex

  void validate() const {
    if (vertices <= 0) throw std::invalid_argument("VoltageGraph: empty graph");
    for (const auto& e : edges) {
      if (e.tail < 0 || e.tail >= vertices || e.head < 0 || e.head >= vertices)
        throw std::invalid_argument("VoltageGraph: edge endpoint out of range");
      if (!(e.weight > 0.0))
        throw std::invalid_argument("VoltageGraph: edge weight must be positive");
    }
    if (!potentials.empty() && static_cast<int>(potentials.size()) != vertices)
      throw std::invalid_argument("VoltageGraph: potentials size mismatch");
  }
};

struct GradedGraphDirac {
  EquivariantOperator op;       // plus fiber = vertices, minus fiber = edges
  int base_vertices = 0;
  int base_edges = 0;

  int euler_characteristic() const { return base_vertices - base_edges; }
};

// D+ is the voltage-twisted weighted coboundary: edge e = (u -> v, w, gamma)
// contributes -sqrt(w) at (e,u) in the identity block and +sqrt(w) at (e,v)
// in the gamma block. D = [[0, (D+)*], [D+, 0]].
inline GradedGraphDirac graph_dirac(const VoltageGraph& g) {
  g.validate();
  const int nv = g.vertices;
  const int ne = static_cast<int>(g.edges.size());
  EquivariantOperator lower(g.group, nv, ne);
  const int f = nv + ne;
  for (int e = 0; e < ne; ++e) {
    const auto& ed = g.edges[e];
    const double s = std::sqrt(ed.weight);
    Matrix m = Matrix::Zero(f, f);
    m(nv + e, ed.tail) = -s;
    lower.add_block(g.group.identity(), m);
    Matrix m2 = Matrix::Zero(f, f);
    m2(nv + e, ed.head) = s;
    lower.add_block(ed.voltage, m2);
  }
  GradedGraphDirac d{lower.plus(lower.adjoint()), nv, ne};
  return d;
}

// Covering graph for a finite quotient: vertices V x (Gamma/Gamma_i) indexed
// as base*|Q| + rank(alpha); edge (u,v,gamma) lifts to ((u,a),(v,a*q(gamma))).
inline VoltageGraph derived_cover(const VoltageGraph& g, const Quotient& q) {
  g.validate();
  if (!(q.source() == g.group))
    throw std::invalid_argument("derived_cover: quotient group mismatch");
  const DeckGroup& tg = q.target();
  const auto els = tg.elements();
  const int d = static_cast<int>(els.size());
  VoltageGraph cov;
  cov.group = DeckGroup::trivial();
  cov.vertices = g.vertices * d;
  for (const auto& e : g.edges) {
    const GroupElement t = q.map(e.voltage);
    for (int a = 0; a < d; ++a) {
      const int b = static_cast<int>(tg.element_index(tg.mul(els[a], t)));
      cov.edges.push_back({e.tail * d + a, e.head * d + b, e.weight,
                           cov.group.identity()});
    }
  }
  if (!g.potentials.empty()) {
    cov.potentials.resize(cov.vertices);
    for (int u = 0; u < g.vertices; ++u)
      for (int a = 0; a < d; ++a) cov.potentials[u * d + a] = g.potentials[u];
  }
  return cov;
}

// Hermitian nearest-neighbor momentum (i/2)(e^{i flux} S - e^{-i flux} S*)
// + diag(potential) on n sites. When equivariant_z is set the wrap-around
// edge carries the Z generator instead of closing the circle.
inline EquivariantOperator circle_operator(int n, double flux,
                                           const std::vector<double>& potential = {},
                                           bool equivariant_z = false) {
  if (n < 2) throw std::invalid_argument("circle_operator: need n >= 2 sites");
  if (!potential.empty() && static_cast<int>(potential.size()) != n)
    throw std::invalid_argument("circle_operator: potential size mismatch");
  const DeckGroup g =
      equivariant_z ? DeckGroup::free_abelian(1) : DeckGroup::trivial();
  EquivariantOperator a(g, n, 0);
  const Complex hop = Complex(0.0, 0.5) * std::polar(1.0, flux);
  Matrix id_block = Matrix::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    if (!potential.empty()) id_block(s, s) = potential[s];
    const int t = (s + 1) % n;
    if (t != s + 1 && equivariant_z) continue;  // wrap edge handled below
    id_block(t, s) += hop;
    id_block(s, t) += std::conj(hop);
  }
  a.add_block(g.identity(), id_block);
  if (equivariant_z) {
    Matrix up = Matrix::Zero(n, n), down = Matrix::Zero(n, n);
    up(0, n - 1) = hop;
    down(n - 1, 0) = std::conj(hop);
    a.add_block({1}, up);
    a.add_block({-1}, down);
  }
  return a;
}

inline DeckTower tower(const DeckGroup& gamma, const std::vector<std::int64_t>& orders) {
  if (gamma.is_finite()) {
    if (orders.size() != 1 || orders[0] != gamma.size())
      throw std::invalid_argument("tower: finite group admits only the one-step tower");
    return DeckTower::one_step(gamma);
  }
  if (gamma.kind() != DeckGroup::Kind::Lattice || gamma.rank() != 1 ||
      !gamma.orders().empty())
    throw std::invalid_argument("tower: infinite towers supported over Z only");
  return DeckTower::over_z(orders);
}

inline std::vector<int> bfs_distances(const VoltageGraph& g, int start) {
  std::vector<std::vector<int>> adj(g.vertices);
  for (const auto& e : g.edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<int> dist(g.vertices, -1);
  std::queue<int> q;
  dist[start] = 0;
  q.push(start);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

struct DistanceProfile {
  struct Sample {
    std::int64_t word_length;
    int graph_distance;
  };
  bool connected = true;
  int components = 1;
  std::vector<Sample> samples;   // connected component of vertex (0, e) only
  double fit_A = 0.0;            // d(x, x gamma) <= B |gamma| + A
  double fit_B = 1.0;            // and B^{-1}|gamma| - A <= d(x, x gamma)
};

// Word length of a quotient element: minimal representative coordinate sum.
inline std::int64_t word_length(const DeckGroup& g, const GroupElement& a) {
  std::int64_t s = 0;
  std::size_t idx = 0;
  for (int r = 0; r < g.rank(); ++r, ++idx) s += std::llabs(a[idx]);
  for (std::size_t f = 0; f < g.orders().size(); ++f, ++idx) {
    const std::int64_t m = g.orders()[f];
    const std::int64_t c = ((a[idx] % m) + m) % m;
    s += std::min(c, m - c);
  }
  return s;
}

// Compares cover graph distance d(x, x gamma) to the word length of gamma
// over the derived cover of a finite quotient, and fits two-sided linear
// constants. Disconnected covers are reported per component.
inline DistanceProfile word_distance_profile(const VoltageGraph& g, const Quotient& q) {
  VoltageGraph cov = derived_cover(g, q);
  const DeckGroup& tg = q.target();
  const auto els = tg.elements();
  const int d = static_cast<int>(els.size());

  DistanceProfile prof;
  std::vector<int> dist0 = bfs_distances(cov, 0);
  int reachable = 0;
  for (int v : dist0)
    if (v >= 0) ++reachable;
  prof.connected = reachable == cov.vertices;
  if (!prof.connected) {
    std::vector<int> comp(cov.vertices, -1);
    int nc = 0;
    for (int v = 0; v < cov.vertices; ++v)
      if (comp[v] < 0) {
        auto dv = bfs_distances(cov, v);
        for (int u = 0; u < cov.vertices; ++u)
          if (dv[u] >= 0) comp[u] = nc;
        ++nc;
      }
    prof.components = nc;
  }
  // Deck translates of the basepoint (vertex 0, identity sheet).
  double maxB = 0.0, minB = std::numeric_limits<double>::infinity();
  for (int a = 1; a < d; ++a) {
    const std::int64_t w = word_length(tg, els[a]);
    const int gd = dist0[0 * d + a];
    if (gd < 0 || w == 0) continue;
    prof.samples.push_back({w, gd});
    maxB = std::max(maxB, static_cast<double>(gd) / w);
    minB = std::min(minB, static_cast<double>(gd) / w);
  }
  if (!prof.samples.empty()) {
    prof.fit_B = std::max({1.0, maxB, minB > 0 ? 1.0 / minB : 1.0});
    double A = 0.0;
    for (const auto& s : prof.samples) {
      A = std::max(A, s.graph_distance - prof.fit_B * s.word_length);
      A = std::max(A, s.word_length / prof.fit_B - s.graph_distance);
    }
    prof.fit_A = A;
  }
  return prof;
}

}  // namespace ghl
