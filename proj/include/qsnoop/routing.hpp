/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_ROUTING_HPP
#define QSNOOP_ROUTING_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/circuit.hpp"
#include "qsnoop/coupling.hpp"
#include "qsnoop/layout.hpp"
#include "qsnoop/rng.hpp"

namespace qsnoop {

enum class RoutingMethod { Basic, Lookahead, Stochastic, Sabre };

inline const char* routing_method_name(RoutingMethod m) {
  switch (m) {
    case RoutingMethod::Basic: return "basic";
    case RoutingMethod::Lookahead: return "lookahead";
    case RoutingMethod::Stochastic: return "stochastic";
    case RoutingMethod::Sabre: return "sabre";
  }
  return "?";
}

inline RoutingMethod routing_method_from_name(const std::string& s) {
  if (s == "basic") return RoutingMethod::Basic;
  if (s == "lookahead") return RoutingMethod::Lookahead;
  if (s == "stochastic") return RoutingMethod::Stochastic;
  if (s == "sabre") return RoutingMethod::Sabre;
  throw std::invalid_argument("unknown routing method: " + s);
}

struct RoutedCircuit {
  Circuit circuit; // over physical qubits; all CX on coupling edges
  /// final_perm[p] = final physical position of the content that started at
  /// physical position p. The routed unitary equals this permutation applied
  /// after the layout-embedded source unitary.
  std::vector<uint32_t> final_perm;
  uint64_t swaps_inserted = 0;
};

namespace detail {

/// Mutable routing state: logical->physical positions plus the content
/// permutation used for the equivalence contract.
struct RouteState {
  std::vector<uint32_t> log_to_phys;
  std::vector<uint32_t> content_final; // initial position -> current position
  Circuit out;
  uint64_t swaps = 0;
  const CouplingMap& map;

  RouteState(const Layout& l, const CouplingMap& m, uint32_t n_logical)
      : map(m) {
    log_to_phys = l.logical_to_physical;
    log_to_phys.resize(n_logical);
    content_final.resize(m.n_physical);
    for (uint32_t p = 0; p < m.n_physical; ++p) content_final[p] = p;
    out.n_qubits = m.n_physical;
  }

  void emit_swap(uint32_t p, uint32_t q) {
    out.add(Gate::cx(p, q));
    out.add(Gate::cx(q, p));
    out.add(Gate::cx(p, q));
    ++swaps;
    for (uint32_t& lp : log_to_phys) {
      if (lp == p) lp = q;
      else if (lp == q) lp = p;
    }
    for (uint32_t& cp : content_final) {
      if (cp == p) cp = q;
      else if (cp == q) cp = p;
    }
  }

  void emit_gate(const Gate& g) {
    Gate mapped = g;
    for (uint32_t& q : mapped.qubits) q = log_to_phys[q];
    out.add(std::move(mapped));
  }
};

inline std::vector<uint32_t> bfs_path(const CouplingMap& map, uint32_t from,
                                      uint32_t to) {
  std::vector<int64_t> prev(map.n_physical, -1);
  std::deque<uint32_t> q{from};
  std::vector<bool> seen(map.n_physical, false);
  seen[from] = true;
  while (!q.empty()) {
    const uint32_t u = q.front();
    q.pop_front();
    if (u == to) break;
    for (uint32_t v : map.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        prev[v] = u;
        q.push_back(v);
      }
    }
  }
  std::vector<uint32_t> path;
  for (int64_t v = to; v != -1; v = prev[v]) path.push_back(static_cast<uint32_t>(v));
  std::reverse(path.begin(), path.end());
  return path;
}

/// Indices of upcoming two-qubit gates, used for lookahead scoring.
inline std::vector<size_t> upcoming_2q(const Circuit& c, size_t from,
                                       size_t window) {
  std::vector<size_t> out;
  for (size_t i = from; i < c.gates.size() && out.size() < window; ++i)
    if (c.gates[i].qubits.size() == 2 && c.gates[i].kind != GateKind::Barrier)
      out.push_back(i);
  return out;
}

} // namespace detail

/// Route a circuit onto the device: every two-qubit gate of the output acts
/// on a coupling edge, SWAPs are emitted as 3 CX. Deterministic per seed.
inline RoutedCircuit route(const Circuit& c, const Layout& l,
                           const CouplingMap& map, RoutingMethod method,
                           uint64_t seed = 0) {
  l.validate(map.n_physical);
  if (c.n_qubits > map.n_physical)
    throw std::invalid_argument("circuit larger than device");
  const auto dist = map.distances();
  detail::RouteState st(l, map, c.n_qubits);
  st.out.name = c.name;
  st.out.family = c.family;
  Rng rng = Rng(seed).split(0xb0a7);
  std::vector<double> decay_(map.n_physical, 0.0);

  auto gate_dist = [&](const Gate& g) -> uint32_t {
    return dist[st.log_to_phys[g.qubits[0]]][st.log_to_phys[g.qubits[1]]];
  };

  // Sabre-style scoring shared by the lookahead and sabre strategies.
  auto swap_score = [&](uint32_t p, uint32_t q,
                        const std::vector<size_t>& front,
                        const std::vector<size_t>& look) -> double {
    auto mapped = [&](uint32_t logical) -> uint32_t {
      const uint32_t cur = st.log_to_phys[logical];
      if (cur == p) return q;
      if (cur == q) return p;
      return cur;
    };
    double score = 0.0;
    for (size_t gi : front) {
      const Gate& g = c.gates[gi];
      score += dist[mapped(g.qubits[0])][mapped(g.qubits[1])];
    }
    if (!look.empty()) {
      double lk = 0.0;
      for (size_t gi : look) {
        const Gate& g = c.gates[gi];
        lk += dist[mapped(g.qubits[0])][mapped(g.qubits[1])];
      }
      score += 0.5 * lk / static_cast<double>(look.size());
    }
    return score;
  };

  auto candidate_swaps = [&](const std::vector<size_t>& front) {
    std::set<Edge> cands;
    for (size_t gi : front) {
      for (uint32_t lq : c.gates[gi].qubits) {
        const uint32_t p = st.log_to_phys[lq];
        for (uint32_t nb : map.neighbors(p)) cands.insert(make_edge(p, nb));
      }
    }
    return std::vector<Edge>(cands.begin(), cands.end());
  };

  const size_t lookahead_window = 20;

  for (size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    const bool is_2q = g.qubits.size() == 2 && g.kind != GateKind::Barrier;
    if (!is_2q) {
      st.emit_gate(g);
      continue;
    }
    uint64_t guard = 0;
    while (gate_dist(g) > 1) {
      if (++guard > 10000)
        throw std::runtime_error("routing failed to converge");
      switch (method) {
        case RoutingMethod::Basic: {
          const auto path = detail::bfs_path(
              map, st.log_to_phys[g.qubits[0]], st.log_to_phys[g.qubits[1]]);
          // walk the control toward the target, stop when adjacent
          for (size_t i = 0; i + 2 < path.size(); ++i)
            st.emit_swap(path[i], path[i + 1]);
          break;
        }
        case RoutingMethod::Lookahead: {
          const std::vector<size_t> front{gi};
          const auto look = detail::upcoming_2q(c, gi + 1, 10);
          const auto cands = candidate_swaps(front);
          Edge best = cands.front();
          double best_s = std::numeric_limits<double>::infinity();
          for (const Edge& e : cands) {
            const double s = swap_score(e.first, e.second, front, look);
            if (s < best_s) {
              best_s = s;
              best = e;
            }
          }
          st.emit_swap(best.first, best.second);
          break;
        }
        case RoutingMethod::Stochastic: {
          const std::vector<size_t> front{gi};
          const auto cands = candidate_swaps(front);
          const uint32_t cur = gate_dist(g);
          std::vector<Edge> improving;
          for (const Edge& e : cands) {
            const double s = swap_score(e.first, e.second, front, {});
            if (s < cur) improving.push_back(e);
          }
          // every third step force the best move so progress is guaranteed
          if (improving.empty() || guard % 3 == 0) {
            Edge best = cands.front();
            double best_s = std::numeric_limits<double>::infinity();
            for (const Edge& e : cands) {
              const double s = swap_score(e.first, e.second, front, {});
              if (s < best_s) {
                best_s = s;
                best = e;
              }
            }
            st.emit_swap(best.first, best.second);
          } else {
            const Edge& pick = improving[rng.next_below(improving.size())];
            st.emit_swap(pick.first, pick.second);
          }
          break;
        }
        case RoutingMethod::Sabre: {
          const std::vector<size_t> front{gi};
          const auto look = detail::upcoming_2q(c, gi + 1, lookahead_window);
          const auto cands = candidate_swaps(front);
          Edge best = cands.front();
          double best_s = std::numeric_limits<double>::infinity();
          for (const Edge& e : cands) {
            double s = swap_score(e.first, e.second, front, look);
            s += 0.001 * decay_[e.first] + 0.001 * decay_[e.second];
            if (s < best_s) {
              best_s = s;
              best = e;
            }
          }
          st.emit_swap(best.first, best.second);
          decay_[best.first] += 1.0;
          decay_[best.second] += 1.0;
          break;
        }
      }
    }
    st.emit_gate(g);
  }

  RoutedCircuit out;
  out.circuit = std::move(st.out);
  out.final_perm = std::move(st.content_final);
  out.swaps_inserted = st.swaps;
  return out;
}

/// Maps logical qubits onto the device per the requested strategy.
inline Layout apply_layout(const Circuit& c, const CouplingMap& map,
                           LayoutMethod method, uint64_t seed = 0) {
  if (c.n_qubits > map.n_physical)
    throw std::invalid_argument("circuit larger than device");
  Layout l;
  switch (method) {
    case LayoutMethod::Trivial: {
      l.logical_to_physical.resize(c.n_qubits);
      for (uint32_t i = 0; i < c.n_qubits; ++i) l.logical_to_physical[i] = i;
      break;
    }
    case LayoutMethod::Dense: {
      const auto subset = detail::densest_subset(map, c.n_qubits);
      // logicals by interaction degree desc, physicals by internal degree desc
      const auto ig = interaction_graph(c);
      std::vector<uint64_t> ldeg(c.n_qubits, 0);
      for (const auto& [e, w] : ig) {
        ldeg[e.first] += w;
        ldeg[e.second] += w;
      }
      std::vector<uint32_t> lorder(c.n_qubits);
      for (uint32_t i = 0; i < c.n_qubits; ++i) lorder[i] = i;
      std::sort(lorder.begin(), lorder.end(), [&](uint32_t a, uint32_t b) {
        if (ldeg[a] != ldeg[b]) return ldeg[a] > ldeg[b];
        return a < b;
      });
      std::set<uint32_t> in(subset.begin(), subset.end());
      std::vector<uint32_t> porder = subset;
      auto pdeg = [&](uint32_t p) {
        uint32_t d = 0;
        for (uint32_t nb : map.neighbors(p))
          if (in.count(nb)) ++d;
        return d;
      };
      std::sort(porder.begin(), porder.end(), [&](uint32_t a, uint32_t b) {
        if (pdeg(a) != pdeg(b)) return pdeg(a) > pdeg(b);
        return a < b;
      });
      l.logical_to_physical.resize(c.n_qubits);
      for (uint32_t i = 0; i < c.n_qubits; ++i)
        l.logical_to_physical[lorder[i]] = porder[i];
      break;
    }
    case LayoutMethod::Vf2: {
      const auto ig = interaction_graph(c);
      auto assign = detail::vf2_embed(ig, c.n_qubits, map);
      if (assign.empty()) {
        l = apply_layout(c, map, LayoutMethod::Dense, seed);
        l.vf2_fallback = true;
      } else {
        l.logical_to_physical = std::move(assign);
      }
      break;
    }
    case LayoutMethod::Sabre: {
      // Single forward/backward refinement: route forward from a trivial
      // start, adopt the final mapping, then refine on the reversed circuit.
      Layout cur;
      cur.logical_to_physical.resize(c.n_qubits);
      for (uint32_t i = 0; i < c.n_qubits; ++i) cur.logical_to_physical[i] = i;

      Circuit reversed = c;
      std::reverse(reversed.gates.begin(), reversed.gates.end());

      auto final_mapping = [&](const Circuit& circ, const Layout& start) {
        RoutedCircuit r = route(circ, start, map, RoutingMethod::Sabre, seed);
        Layout next;
        next.logical_to_physical.resize(c.n_qubits);
        for (uint32_t lq = 0; lq < c.n_qubits; ++lq)
          next.logical_to_physical[lq] =
              r.final_perm[start.logical_to_physical[lq]];
        return next;
      };
      cur = final_mapping(c, cur);
      cur = final_mapping(reversed, cur);
      l = cur;
      break;
    }
  }
  l.validate(map.n_physical);
  return l;
}

} // namespace qsnoop

#endif
