/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_COUPLING_HPP
#define QSNOOP_COUPLING_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsnoop {

using Edge = std::pair<uint32_t, uint32_t>; // always stored with first < second

inline Edge make_edge(uint32_t a, uint32_t b) {
  if (a == b) throw std::invalid_argument("self-loop edge");
  return a < b ? Edge{a, b} : Edge{b, a};
}

struct CouplingMap {
  uint32_t n_physical = 0;
  std::set<Edge> edges;
  std::string name;

  bool has_edge(uint32_t a, uint32_t b) const {
    return edges.count(make_edge(a, b)) > 0;
  }

  std::vector<uint32_t> neighbors(uint32_t q) const {
    std::vector<uint32_t> out;
    for (const Edge& e : edges) {
      if (e.first == q) out.push_back(e.second);
      if (e.second == q) out.push_back(e.first);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// All-pairs shortest-path distances (BFS); distances[i][j] in hops.
  std::vector<std::vector<uint32_t>> distances() const {
    const uint32_t INF = UINT32_MAX;
    std::vector<std::vector<uint32_t>> d(n_physical,
                                         std::vector<uint32_t>(n_physical, INF));
    std::vector<std::vector<uint32_t>> adj(n_physical);
    for (const Edge& e : edges) {
      adj[e.first].push_back(e.second);
      adj[e.second].push_back(e.first);
    }
    for (uint32_t s = 0; s < n_physical; ++s) {
      std::deque<uint32_t> q{s};
      d[s][s] = 0;
      while (!q.empty()) {
        const uint32_t u = q.front();
        q.pop_front();
        for (uint32_t v : adj[u]) {
          if (d[s][v] == INF) {
            d[s][v] = d[s][u] + 1;
            q.push_back(v);
          }
        }
      }
    }
    return d;
  }

  bool connected() const {
    if (n_physical == 0) return false;
    const auto d = distances();
    for (uint32_t j = 0; j < n_physical; ++j)
      if (d[0][j] == UINT32_MAX) return false;
    return true;
  }

  void validate() const {
    for (const Edge& e : edges) {
      if (e.first >= n_physical || e.second >= n_physical)
        throw std::invalid_argument("edge endpoint out of range");
      if (e.first == e.second) throw std::invalid_argument("self-loop");
    }
    if (!connected())
      throw std::invalid_argument("coupling map must be connected");
  }
};

inline CouplingMap build_line(uint32_t n) {
  if (n < 2) throw std::invalid_argument("line needs n >= 2");
  CouplingMap m;
  m.n_physical = n;
  m.name = "line" + std::to_string(n);
  for (uint32_t i = 0; i + 1 < n; ++i) m.edges.insert({i, i + 1});
  return m;
}

inline CouplingMap build_ring(uint32_t n) {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3");
  CouplingMap m;
  m.n_physical = n;
  m.name = "ring" + std::to_string(n);
  for (uint32_t i = 0; i < n; ++i) m.edges.insert(make_edge(i, (i + 1) % n));
  return m;
}

/// 7-qubit H-shaped device (config fixture transcribed from the public
/// device description).
inline CouplingMap build_lagos7() {
  CouplingMap m;
  m.n_physical = 7;
  m.name = "lagos7";
  m.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}};
  return m;
}

/// 16-qubit heavy-hex cell (config fixture, same provenance as lagos7).
inline CouplingMap build_guadalupe16() {
  CouplingMap m;
  m.n_physical = 16;
  m.name = "guadalupe16";
  m.edges = {{0, 1}, {1, 2},  {2, 3},   {3, 5},   {1, 4},   {4, 7},
             {5, 8}, {6, 7},  {7, 10},  {8, 9},   {8, 11},  {10, 12},
             {11, 14}, {12, 13}, {12, 15}, {13, 14}};
  return m;
}

/// Parametric heavy-hex style lattice: `rows` horizontal chains joined by
/// bridge qubits at alternating columns.
inline CouplingMap build_heavy_hex(uint32_t rows) {
  if (rows < 1) throw std::invalid_argument("heavy_hex needs rows >= 1");
  CouplingMap m;
  m.name = "heavy_hex" + std::to_string(rows);
  const uint32_t cols = 2 * rows + 1;
  const uint32_t chain_base = 0;
  // chains: rows * cols qubits, then one bridge qubit per vertical link
  auto chain_q = [&](uint32_t r, uint32_t c) { return chain_base + r * cols + c; };
  uint32_t next = rows * cols;
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c + 1 < cols; ++c)
      m.edges.insert(make_edge(chain_q(r, c), chain_q(r, c + 1)));
  for (uint32_t r = 0; r + 1 < rows; ++r) {
    const uint32_t phase = (r % 2 == 0) ? 0 : 2;
    for (uint32_t c = phase; c < cols; c += 4) {
      const uint32_t bridge = next++;
      m.edges.insert(make_edge(chain_q(r, c), bridge));
      m.edges.insert(make_edge(bridge, chain_q(r + 1, c)));
    }
  }
  m.n_physical = next;
  return m;
}

/// Builds a named topology from a spec string: line(n), ring(n), lagos7,
/// guadalupe16, heavy_hex(rows).
inline CouplingMap build_coupling_map(const std::string& spec) {
  auto parse_arg = [&](const std::string& prefix) -> uint32_t {
    const std::string inner =
        spec.substr(prefix.size() + 1, spec.size() - prefix.size() - 2);
    return static_cast<uint32_t>(std::stoul(inner));
  };
  CouplingMap m;
  if (spec == "lagos7") m = build_lagos7();
  else if (spec == "guadalupe16") m = build_guadalupe16();
  else if (spec.starts_with("line(") && spec.ends_with(")"))
    m = build_line(parse_arg("line"));
  else if (spec.starts_with("ring(") && spec.ends_with(")"))
    m = build_ring(parse_arg("ring"));
  else if (spec.starts_with("heavy_hex(") && spec.ends_with(")"))
    m = build_heavy_hex(parse_arg("heavy_hex"));
  else
    throw std::invalid_argument("malformed coupling map spec: " + spec);
  m.validate();
  return m;
}

inline void save_coupling_map(const CouplingMap& m, std::ostream& os) {
  os << "name " << m.name << "\n";
  os << "nodes " << m.n_physical << "\n";
  for (const Edge& e : m.edges) os << "edge " << e.first << " " << e.second << "\n";
}

inline CouplingMap load_coupling_map(std::istream& is) {
  CouplingMap m;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key.starts_with("#")) continue;
    if (key == "name") ls >> m.name;
    else if (key == "nodes") ls >> m.n_physical;
    else if (key == "edge") {
      uint32_t a, b;
      if (!(ls >> a >> b)) throw std::invalid_argument("malformed edge line");
      m.edges.insert(make_edge(a, b));
    } else {
      throw std::invalid_argument("unknown key in coupling map file: " + key);
    }
  }
  m.validate();
  return m;
}

} // namespace qsnoop

#endif
