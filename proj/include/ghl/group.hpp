#pragma once

// Deck groups for covering spaces: finite groups (multiplication table or
// cyclic factors), free-abelian lattices Z^k, and products Z^k x prod Z/m_i.
// Elements are coordinate vectors; for table groups a single index.

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghl {

using GroupElement = std::vector<std::int64_t>;

class DeckGroup {
public:
  enum class Kind { Lattice, FiniteTable };

  // Z^rank x Z/orders[0] x Z/orders[1] x ...
  static DeckGroup lattice(int rank, std::vector<std::int64_t> orders = {}) {
    DeckGroup g;
    g.kind_ = Kind::Lattice;
    g.rank_ = rank;
    g.orders_ = std::move(orders);
    if (rank < 0) throw std::invalid_argument("DeckGroup: negative rank");
    for (auto m : g.orders_)
      if (m < 1) throw std::invalid_argument("DeckGroup: cyclic order < 1");
    return g;
  }

  static DeckGroup cyclic(std::int64_t m) { return lattice(0, {m}); }
  static DeckGroup trivial() { return lattice(0, {}); }
  static DeckGroup free_abelian(int k) { return lattice(k, {}); }

  // table[a][b] = index of a*b; validated for group axioms.
  static DeckGroup from_table(const std::vector<std::vector<int>>& table) {
    DeckGroup g;
    g.kind_ = Kind::FiniteTable;
    g.table_ = table;
    const int n = static_cast<int>(table.size());
    if (n == 0) throw std::invalid_argument("DeckGroup: empty table");
    for (const auto& row : table)
      if (static_cast<int>(row.size()) != n)
        throw std::invalid_argument("DeckGroup: table not square");
    // identity
    int id = -1;
    for (int e = 0; e < n; ++e) {
      bool ok = true;
      for (int a = 0; a < n && ok; ++a)
        ok = table[e][a] == a && table[a][e] == a;
      if (ok) { id = e; break; }
    }
    if (id != 0)
      throw std::invalid_argument("DeckGroup: table identity must be index 0");
    // inverses and associativity
    for (int a = 0; a < n; ++a) {
      bool has_inv = false;
      for (int b = 0; b < n; ++b)
        if (table[a][b] == 0 && table[b][a] == 0) has_inv = true;
      if (!has_inv) throw std::invalid_argument("DeckGroup: missing inverse");
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (table[table[a][b]][c] != table[a][table[b][c]])
            throw std::invalid_argument("DeckGroup: table not associative");
    return g;
  }

  Kind kind() const { return kind_; }
  int rank() const { return rank_; }
  const std::vector<std::vector<int>>& table() const { return table_; }
  const std::vector<std::int64_t>& orders() const { return orders_; }

  bool is_finite() const { return kind_ == Kind::FiniteTable || rank_ == 0; }

  std::int64_t size() const {
    if (kind_ == Kind::FiniteTable) return static_cast<std::int64_t>(table_.size());
    if (rank_ > 0) throw std::logic_error("DeckGroup: infinite group has no size");
    std::int64_t s = 1;
    for (auto m : orders_) s *= m;
    return s;
  }

  int coord_count() const {
    return kind_ == Kind::FiniteTable ? 1 : rank_ + static_cast<int>(orders_.size());
  }

  GroupElement identity() const { return GroupElement(coord_count(), 0); }

  bool is_identity(const GroupElement& a) const {
    for (auto x : a) if (x != 0) return false;
    return true;
  }

  GroupElement canonical(GroupElement a) const {
    check(a);
    if (kind_ == Kind::Lattice)
      for (std::size_t i = 0; i < orders_.size(); ++i) {
        auto& x = a[rank_ + i];
        x %= orders_[i];
        if (x < 0) x += orders_[i];
      }
    return a;
  }

  GroupElement mul(const GroupElement& a, const GroupElement& b) const {
    check(a); check(b);
    if (kind_ == Kind::FiniteTable)
      return {static_cast<std::int64_t>(table_[a[0]][b[0]])};
    GroupElement c(coord_count());
    for (int i = 0; i < coord_count(); ++i) c[i] = a[i] + b[i];
    return canonical(std::move(c));
  }

  GroupElement inv(const GroupElement& a) const {
    check(a);
    if (kind_ == Kind::FiniteTable) {
      const int n = static_cast<int>(table_.size());
      for (int b = 0; b < n; ++b)
        if (table_[a[0]][b] == 0) return {b};
      throw std::logic_error("DeckGroup: inverse not found");
    }
    GroupElement c(coord_count());
    for (int i = 0; i < coord_count(); ++i) c[i] = -a[i];
    return canonical(std::move(c));
  }

  // Sorted enumeration of a finite group (lexicographic in coordinates).
  std::vector<GroupElement> elements() const {
    if (!is_finite()) throw std::logic_error("DeckGroup: cannot enumerate infinite group");
    std::vector<GroupElement> out;
    if (kind_ == Kind::FiniteTable) {
      for (std::size_t i = 0; i < table_.size(); ++i)
        out.push_back({static_cast<std::int64_t>(i)});
      return out;
    }
    out.push_back(identity());
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      std::vector<GroupElement> next;
      for (const auto& e : out)
        for (std::int64_t x = 0; x < orders_[i]; ++x) {
          GroupElement f = e;
          f[rank_ + i] = x;
          next.push_back(std::move(f));
        }
      out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::int64_t element_index(const GroupElement& a) const {
    if (kind_ == Kind::FiniteTable) return a[0];
    GroupElement c = canonical(a);
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < orders_.size(); ++i)
      idx = idx * orders_[i] + c[rank_ + i];
    return idx;
  }

  bool operator==(const DeckGroup& o) const {
    return kind_ == o.kind_ && rank_ == o.rank_ && orders_ == o.orders_ &&
           table_ == o.table_;
  }

private:
  void check(const GroupElement& a) const {
    if (static_cast<int>(a.size()) != coord_count())
      throw std::invalid_argument("DeckGroup: element coordinate count mismatch");
    if (kind_ == Kind::FiniteTable &&
        (a[0] < 0 || a[0] >= static_cast<std::int64_t>(table_.size())))
      throw std::invalid_argument("DeckGroup: table index out of range");
  }

  Kind kind_ = Kind::Lattice;
  int rank_ = 0;
  std::vector<std::int64_t> orders_;
  std::vector<std::vector<int>> table_;
};

// Surjective homomorphism onto a finite quotient. For lattice groups: each
// free generator is reduced mod a chosen order, cyclic factors pass through.
class Quotient {
public:
  Quotient(const DeckGroup& source, std::vector<std::int64_t> free_orders)
      : source_(source), free_orders_(std::move(free_orders)) {
    if (source.kind() != DeckGroup::Kind::Lattice)
      throw std::invalid_argument("Quotient: table groups support only the identity quotient");
    if (static_cast<int>(free_orders_.size()) != source.rank())
      throw std::invalid_argument("Quotient: need one order per free generator");
    std::vector<std::int64_t> orders = free_orders_;
    for (auto m : source.orders()) orders.push_back(m);
    target_ = DeckGroup::lattice(0, orders);
  }

  static Quotient identity_on(const DeckGroup& finite_source) {
    if (!finite_source.is_finite())
      throw std::invalid_argument("Quotient: identity quotient needs a finite group");
    Quotient q(finite_source);
    return q;
  }

  const DeckGroup& source() const { return source_; }
  const DeckGroup& target() const { return target_; }

  GroupElement map(const GroupElement& a) const {
    if (identity_) return a;
    GroupElement b(target_.coord_count());
    for (std::size_t i = 0; i < a.size(); ++i) b[i] = a[i];
    return target_.canonical(std::move(b));
  }

  std::int64_t index() const { return target_.size(); }

private:
  explicit Quotient(const DeckGroup& g)
      : source_(g), target_(g), identity_(true) {}

  DeckGroup source_;
  DeckGroup target_;
  std::vector<std::int64_t> free_orders_;
  bool identity_ = false;
};

// Residually finite tower over Z (divisibility chain) or a one-step tower
// over a finite group.
struct DeckTower {
  DeckGroup base;
  std::vector<Quotient> levels;
  std::vector<std::int64_t> indices;  // d_i, strictly increasing

  static DeckTower over_z(const std::vector<std::int64_t>& orders) {
    if (orders.empty()) throw std::invalid_argument("DeckTower: empty order chain");
    DeckTower t{DeckGroup::free_abelian(1), {}, {}};
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (orders[i] < 1) throw std::invalid_argument("DeckTower: order < 1");
      if (i > 0) {
        if (orders[i] % orders[i - 1] != 0)
          throw std::invalid_argument("DeckTower: orders must form a divisibility chain");
        if (orders[i] <= orders[i - 1])
          throw std::invalid_argument("DeckTower: indices must strictly increase");
      }
      t.levels.emplace_back(t.base, std::vector<std::int64_t>{orders[i]});
      t.indices.push_back(orders[i]);
    }
    return t;
  }

  static DeckTower one_step(const DeckGroup& finite_group) {
    DeckTower t{finite_group, {}, {}};
    t.levels.push_back(Quotient::identity_on(finite_group));
    t.indices.push_back(finite_group.size());
    return t;
  }
};

}  // namespace ghl
