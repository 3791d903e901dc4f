#pragma once

// JSON round-trips for deck groups and equivariant operators.
//
// Operator schema:
//   { "group": {...}, "fiber_dims": [plus, minus],
//     "blocks": [ { "gamma": [ints], "matrix": [[[re,im],...],...] } ] }

#include <string>

#include "json.hpp"

#include "ghl/covering.hpp"
#include "ghl/group.hpp"
#include "ghl/operator.hpp"

namespace ghl {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key \"" + where + "." + it.key() + "\"");
  }
}

inline const json& require_key(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing key \"" + where + "." + key + "\"");
  return *it;
}
}  // namespace detail

inline json group_to_json(const DeckGroup& g) {
  json j;
  if (g.kind() == DeckGroup::Kind::Lattice) {
    j["type"] = "lattice";
    j["rank"] = g.rank();
    j["orders"] = g.orders();
  } else {
    j["type"] = "table";
    j["table"] = g.table();
  }
  return j;
}

inline DeckGroup group_from_json(const json& j, const std::string& where = "group") {
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  const std::string type = detail::require_key(j, "type", where).get<std::string>();
  if (type == "lattice") {
    detail::reject_unknown_keys(j, {"type", "rank", "orders"}, where);
    int rank = detail::require_key(j, "rank", where).get<int>();
    std::vector<std::int64_t> orders;
    if (j.contains("orders")) orders = j["orders"].get<std::vector<std::int64_t>>();
    return DeckGroup::lattice(rank, orders);
  }
  if (type == "table") {
    detail::reject_unknown_keys(j, {"type", "table"}, where);
    auto table = detail::require_key(j, "table", where)
                     .get<std::vector<std::vector<int>>>();
    return DeckGroup::from_table(table);
  }
  throw ConfigError("\"" + where + ".type\" must be \"lattice\" or \"table\"");
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_array() || j.empty())
    throw ConfigError("\"" + where + "\" must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError("\"" + where + "\": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (!e.is_array() || e.size() != 2)
        throw ConfigError("\"" + where + "\": entries must be [re,im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline json operator_to_json(const EquivariantOperator& a) {
  json j;
  j["group"] = group_to_json(a.group());
  j["fiber_dims"] = {a.fiber_plus(), a.fiber_minus()};
  json blocks = json::array();
  for (const auto& [g, m] : a.blocks())
    blocks.push_back({{"gamma", g}, {"matrix", matrix_to_json(m)}});
  j["blocks"] = std::move(blocks);
  return j;
}

inline EquivariantOperator operator_from_json(const json& j,
                                              const std::string& where = "operator") {
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  detail::reject_unknown_keys(j, {"group", "fiber_dims", "blocks"}, where);
  DeckGroup g = group_from_json(detail::require_key(j, "group", where), where + ".group");
  const json& fd = detail::require_key(j, "fiber_dims", where);
  if (!fd.is_array() || fd.size() != 2)
    throw ConfigError("\"" + where + ".fiber_dims\" must be [plus, minus]");
  EquivariantOperator a(g, fd[0].get<int>(), fd[1].get<int>());
  const json& blocks = detail::require_key(j, "blocks", where);
  if (!blocks.is_array()) throw ConfigError("\"" + where + ".blocks\" must be an array");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string bw = where + ".blocks[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(blocks[i], {"gamma", "matrix"}, bw);
    GroupElement gamma =
        detail::require_key(blocks[i], "gamma", bw).get<GroupElement>();
    Matrix m = matrix_from_json(detail::require_key(blocks[i], "matrix", bw),
                                bw + ".matrix");
    if (m.rows() != a.fiber_dim() || m.cols() != a.fiber_dim())
      throw ConfigError("\"" + bw + ".matrix\" shape does not match fiber_dims");
    a.add_block(gamma, m);
  }
  return a;
}

inline json graph_to_json(const VoltageGraph& g) {
  json j;
  j["group"] = group_to_json(g.group);
  j["vertices"] = g.vertices;
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"tail", e.tail},
                     {"head", e.head},
                     {"weight", e.weight},
                     {"voltage", e.voltage}});
  j["edges"] = std::move(edges);
  if (!g.potentials.empty()) j["potentials"] = g.potentials;
  return j;
}

inline VoltageGraph graph_from_json(const json& j, const std::string& where = "graph") {
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  detail::reject_unknown_keys(j, {"group", "vertices", "edges", "potentials"}, where);
  VoltageGraph g;
  if (j.contains("group"))
    g.group = group_from_json(j["group"], where + ".group");
  g.vertices = detail::require_key(j, "vertices", where).get<int>();
  const json& edges = detail::require_key(j, "edges", where);
  if (!edges.is_array()) throw ConfigError("\"" + where + ".edges\" must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ew = where + ".edges[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(edges[i], {"tail", "head", "weight", "voltage"}, ew);
    VoltageGraph::Edge e;
    e.tail = detail::require_key(edges[i], "tail", ew).get<int>();
    e.head = detail::require_key(edges[i], "head", ew).get<int>();
    e.weight = edges[i].value("weight", 1.0);
    if (edges[i].contains("voltage"))
      e.voltage = g.group.canonical(edges[i]["voltage"].get<GroupElement>());
    else
      e.voltage = g.group.identity();
    g.edges.push_back(std::move(e));
  }
  if (j.contains("potentials"))
    g.potentials = j["potentials"].get<std::vector<double>>();
  g.validate();
  return g;
}

}  // namespace ghl
