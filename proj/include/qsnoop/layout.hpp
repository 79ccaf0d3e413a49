/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_LAYOUT_HPP
#define QSNOOP_LAYOUT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/circuit.hpp"
#include "qsnoop/coupling.hpp"

namespace qsnoop {

enum class LayoutMethod { Trivial, Dense, Vf2, Sabre };

inline const char* layout_method_name(LayoutMethod m) {
  switch (m) {
    case LayoutMethod::Trivial: return "trivial";
    case LayoutMethod::Dense: return "dense";
    case LayoutMethod::Vf2: return "vf2";
    case LayoutMethod::Sabre: return "sabre";
  }
  return "?";
}

inline LayoutMethod layout_method_from_name(const std::string& s) {
  if (s == "trivial") return LayoutMethod::Trivial;
  if (s == "dense") return LayoutMethod::Dense;
  if (s == "vf2") return LayoutMethod::Vf2;
  if (s == "sabre") return LayoutMethod::Sabre;
  throw std::invalid_argument("unknown layout method: " + s);
}

struct Layout {
  std::vector<uint32_t> logical_to_physical;
  bool vf2_fallback = false; // vf2 found no exact embedding, used dense

  uint32_t physical(uint32_t logical) const {
    return logical_to_physical.at(logical);
  }

  void validate(uint32_t n_physical) const {
    std::set<uint32_t> seen;
    for (uint32_t p : logical_to_physical) {
      if (p >= n_physical) throw std::invalid_argument("layout out of range");
      if (!seen.insert(p).second)
        throw std::invalid_argument("layout not injective");
    }
  }
};

/// Undirected interaction graph of a circuit: weight = number of 2-qubit
/// gates between the pair (CX after decomposition, but any 2q kind counts).
inline std::map<Edge, uint64_t> interaction_graph(const Circuit& c) {
  std::map<Edge, uint64_t> w;
  for (const Gate& g : c.gates)
    if (g.qubits.size() == 2 && g.kind != GateKind::Barrier)
      ++w[make_edge(g.qubits[0], g.qubits[1])];
  return w;
}

namespace detail {

/// Enumerate connected k-subsets, track the one with the most internal
/// edges; ties resolved toward the lexicographically smallest subset.
/// Enumeration is over all k-combinations, which is fine at device scale.
inline std::vector<uint32_t> densest_subset(const CouplingMap& map,
                                            uint32_t k) {
  const uint32_t n = map.n_physical;
  std::vector<uint32_t> comb(k);
  for (uint32_t i = 0; i < k; ++i) comb[i] = i;
  std::vector<uint32_t> best;
  int64_t best_edges = -1;

  auto internal_edges = [&](const std::vector<uint32_t>& s) -> int64_t {
    std::set<uint32_t> in(s.begin(), s.end());
    int64_t cnt = 0;
    for (const Edge& e : map.edges)
      if (in.count(e.first) && in.count(e.second)) ++cnt;
    return cnt;
  };
  auto is_connected = [&](const std::vector<uint32_t>& s) -> bool {
    std::set<uint32_t> in(s.begin(), s.end());
    std::vector<uint32_t> stack{s[0]};
    std::set<uint32_t> seen{s[0]};
    while (!stack.empty()) {
      const uint32_t u = stack.back();
      stack.pop_back();
      for (uint32_t v : map.neighbors(u))
        if (in.count(v) && seen.insert(v).second) stack.push_back(v);
    }
    return seen.size() == s.size();
  };

  while (true) {
    if (is_connected(comb)) {
      const int64_t e = internal_edges(comb);
      if (e > best_edges) {
        best_edges = e;
        best = comb;
      }
    }
    // next combination
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && comb[i] == n - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (uint32_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  if (best.empty())
    throw std::invalid_argument("no connected subset of requested size");
  return best;
}

/// VF2-flavoured backtracking search for an exact embedding of the
/// interaction graph into the coupling graph. Returns empty on failure or
/// when the node-expansion budget runs out.
inline std::vector<uint32_t> vf2_embed(const std::map<Edge, uint64_t>& ig,
                                       uint32_t n_logical,
                                       const CouplingMap& map,
                                       uint64_t budget = 2000000) {
  std::vector<std::set<uint32_t>> ladj(n_logical);
  for (const auto& [e, w] : ig) {
    ladj[e.first].insert(e.second);
    ladj[e.second].insert(e.first);
  }
  // order logical qubits by degree descending (ties by index)
  std::vector<uint32_t> order(n_logical);
  for (uint32_t i = 0; i < n_logical; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (ladj[a].size() != ladj[b].size()) return ladj[a].size() > ladj[b].size();
    return a < b;
  });

  std::vector<uint32_t> assign(n_logical, UINT32_MAX);
  std::vector<bool> used(map.n_physical, false);
  uint64_t expansions = 0;

  std::vector<std::vector<bool>> padj(map.n_physical,
                                      std::vector<bool>(map.n_physical, false));
  for (const Edge& e : map.edges)
    padj[e.first][e.second] = padj[e.second][e.first] = true;

  auto consistent = [&](uint32_t l, uint32_t p) {
    for (uint32_t nl : ladj[l]) {
      if (assign[nl] != UINT32_MAX && !padj[p][assign[nl]]) return false;
    }
    return true;
  };

  std::vector<uint32_t> phys_deg(map.n_physical, 0);
  for (const Edge& e : map.edges) {
    ++phys_deg[e.first];
    ++phys_deg[e.second];
  }

  // recursive lambda via explicit function
  struct Rec {
    std::vector<uint32_t>& order;
    std::vector<uint32_t>& assign;
    std::vector<bool>& used;
    std::vector<std::set<uint32_t>>& ladj;
    std::vector<uint32_t>& phys_deg;
    const CouplingMap& map;
    uint64_t& expansions;
    uint64_t budget;
    decltype(consistent)& ok;

    bool run(size_t depth) {
      if (depth == order.size()) return true;
      if (expansions > budget) return false;
      const uint32_t l = order[depth];
      for (uint32_t p = 0; p < map.n_physical; ++p) {
        if (used[p] || phys_deg[p] < ladj[l].size()) continue;
        if (!ok(l, p)) continue;
        ++expansions;
        assign[l] = p;
        used[p] = true;
        if (run(depth + 1)) return true;
        assign[l] = UINT32_MAX;
        used[p] = false;
      }
      return false;
    }
  } rec{order, assign, used, ladj, phys_deg, map, expansions, budget, consistent};

  if (!rec.run(0)) return {};
  return assign;
}

} // namespace detail

// apply_layout lives in routing.hpp: the sabre strategy reuses the router
// for its forward/backward refinement passes.

} // namespace qsnoop

#endif
