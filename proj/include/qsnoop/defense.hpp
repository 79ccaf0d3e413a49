/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_DEFENSE_HPP
#define QSNOOP_DEFENSE_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/optimize.hpp"
#include "qsnoop/routing.hpp"
#include "qsnoop/rng.hpp"
#include "qsnoop/schedule.hpp"

namespace qsnoop {

enum class DefenseKind { PadRetime, DummyPairs, EnsembleRemap };

inline const char* defense_kind_name(DefenseKind k) {
  switch (k) {
    case DefenseKind::PadRetime: return "pad_retime";
    case DefenseKind::DummyPairs: return "dummy_pairs";
    case DefenseKind::EnsembleRemap: return "ensemble_remap";
  }
  return "?";
}

struct DefensePolicy {
  DefenseKind kind = DefenseKind::PadRetime;
  uint64_t budget = 0;   // pad sequences or dummy pairs
  uint32_t ensemble = 1; // M for ensemble_remap
  uint64_t seed = 0;
};

struct DefendedSchedule {
  TimedSchedule schedule;
  uint64_t added_1q = 0;
  uint64_t added_cx = 0;
  int64_t makespan_delta = 0;
  bool partial = false; // requested budget could not be fully placed
};

namespace detail {

/// Recover a dependency-ordered circuit from a schedule (gates are stored in
/// a topological order; a stable sort by start time keeps it valid).
inline Circuit circuit_of(const TimedSchedule& s) {
  std::vector<const TimedGate*> order;
  for (const TimedGate& tg : s.gates) order.push_back(&tg);
  std::stable_sort(order.begin(), order.end(),
                   [](const TimedGate* a, const TimedGate* b) {
                     return a->start < b->start;
                   });
  Circuit c;
  c.n_qubits = s.n_qubits;
  c.name = s.circuit_name;
  c.family = s.family;
  for (const TimedGate* tg : order) c.add(tg->gate);
  return c;
}

inline TimedSchedule reschedule(const TimedSchedule& proto, const Circuit& c) {
  TimedSchedule out = schedule(c, proto.durations, SchedulingMethod::Alap);
  out.map_name = proto.map_name;
  out.provenance = proto.provenance;
  out.circuit_name = proto.circuit_name;
  out.family = proto.family;
  return out;
}

} // namespace detail

/// Compiler-assisted obfuscation: up to `budget` identity sequences (an even
/// run of X gates) land before seeded-random CX operands, then the circuit
/// is rescheduled ALAP so the pads soak up slack first and shift CX start
/// times where the chain is tight.
inline DefendedSchedule pad_retime(const TimedSchedule& s, uint64_t budget,
                                   uint64_t seed) {
  DefendedSchedule out;
  if (budget == 0) {
    out.schedule = s;
    return out;
  }
  Circuit c = detail::circuit_of(s);
  std::vector<size_t> cx_pos;
  for (size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].kind == GateKind::CX) cx_pos.push_back(i);
  if (cx_pos.empty()) {
    out.schedule = s;
    out.partial = true;
    return out;
  }
  Rng rng = Rng(seed).split(0xad0b);
  // plan insertions, then apply back-to-front so indices stay valid
  std::vector<std::pair<size_t, std::pair<uint32_t, uint32_t>>> plan;
  for (uint64_t i = 0; i < budget; ++i) {
    const size_t pos = cx_pos[rng.next_below(cx_pos.size())];
    const uint32_t q = c.gates[pos].qubits[rng.next_below(2)];
    const uint32_t pairs = 1 + static_cast<uint32_t>(rng.next_below(3));
    plan.emplace_back(pos, std::pair{q, pairs});
  }
  std::stable_sort(plan.begin(), plan.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [pos, qp] : plan) {
    std::vector<Gate> pads(2 * qp.second, Gate::x(qp.first));
    c.gates.insert(c.gates.begin() + static_cast<int64_t>(pos), pads.begin(),
                   pads.end());
    out.added_1q += pads.size();
  }
  out.schedule = detail::reschedule(s, c);
  out.makespan_delta = static_cast<int64_t>(out.schedule.total_duration) -
                       static_cast<int64_t>(s.total_duration);
  return out;
}

/// Inserts k self-cancelling CX pairs on coupled pairs already used by the
/// schedule (so they stay inside the victim allocation), raising the
/// attacker-visible CX count by exactly 2k.
inline DefendedSchedule insert_dummy_pairs(const TimedSchedule& s, uint64_t k,
                                           uint64_t seed) {
  DefendedSchedule out;
  if (k == 0) {
    out.schedule = s;
    return out;
  }
  Circuit c = detail::circuit_of(s);
  std::set<Edge> used;
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::CX) used.insert(make_edge(g.qubits[0], g.qubits[1]));
  if (used.empty()) {
    out.schedule = s;
    out.partial = true;
    return out;
  }
  const std::vector<Edge> edges(used.begin(), used.end());
  Rng rng = Rng(seed).split(0xd377);
  for (uint64_t i = 0; i < k; ++i) {
    const Edge e = edges[rng.next_below(edges.size())];
    const size_t pos = rng.next_below(c.gates.size() + 1);
    const Gate cx = Gate::cx(e.first, e.second);
    c.gates.insert(c.gates.begin() + static_cast<int64_t>(pos), 2, cx);
    out.added_cx += 2;
  }
  out.schedule = detail::reschedule(s, c);
  out.makespan_delta = static_cast<int64_t>(out.schedule.total_duration) -
                       static_cast<int64_t>(s.total_duration);
  return out;
}

struct EnsembleDefense {
  std::vector<TranspileResult> variants; // one per layout
  std::vector<double> weights;           // equal shot weights
  bool shortfall = false;                // fewer distinct layouts than M
};

namespace detail {

/// All connected k-subsets of the device (devices here are small).
inline std::vector<std::vector<uint32_t>> connected_subsets(
    const CouplingMap& map, uint32_t k) {
  std::vector<std::vector<uint32_t>> out;
  if (k == 0 || k > map.n_physical) return out;
  std::vector<uint32_t> comb(k);
  for (uint32_t i = 0; i < k; ++i) comb[i] = i;
  auto is_connected = [&](const std::vector<uint32_t>& s) {
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
    if (is_connected(comb)) out.push_back(comb);
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && comb[i] == map.n_physical - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (uint32_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

} // namespace detail

/// Qubit-mapping diversification: M schedules on distinct connected device
/// regions, equal shot weights. The attacker then observes the mixture.
inline EnsembleDefense ensemble_remap(const Circuit& c, const CouplingMap& map,
                                      uint32_t M, uint64_t seed,
                                      const GateDurations& d = {}) {
  if (M < 1) throw std::invalid_argument("ensemble size must be >= 1");
  const Circuit native = decompose_to_native(c);
  auto subsets = detail::connected_subsets(map, native.n_qubits);
  Rng rng = Rng(seed).split(0xe45e);
  for (size_t i = subsets.size(); i > 1; --i)
    std::swap(subsets[i - 1], subsets[rng.next_below(i)]);

  EnsembleDefense out;
  const auto ig = interaction_graph(native);
  std::vector<uint64_t> ldeg(native.n_qubits, 0);
  for (const auto& [e, w] : ig) {
    ldeg[e.first] += w;
    ldeg[e.second] += w;
  }
  std::vector<uint32_t> lorder(native.n_qubits);
  for (uint32_t i = 0; i < native.n_qubits; ++i) lorder[i] = i;
  std::sort(lorder.begin(), lorder.end(), [&](uint32_t a, uint32_t b) {
    if (ldeg[a] != ldeg[b]) return ldeg[a] > ldeg[b];
    return a < b;
  });

  for (const auto& subset : subsets) {
    if (out.variants.size() == M) break;
    std::set<uint32_t> in(subset.begin(), subset.end());
    std::vector<uint32_t> porder = subset;
    auto pdeg = [&](uint32_t p) {
      uint32_t deg = 0;
      for (uint32_t nb : map.neighbors(p))
        if (in.count(nb)) ++deg;
      return deg;
    };
    std::sort(porder.begin(), porder.end(), [&](uint32_t a, uint32_t b) {
      if (pdeg(a) != pdeg(b)) return pdeg(a) > pdeg(b);
      return a < b;
    });
    Layout l;
    l.logical_to_physical.resize(native.n_qubits);
    for (uint32_t i = 0; i < native.n_qubits; ++i)
      l.logical_to_physical[lorder[i]] = porder[i];

    RoutedCircuit routed = route(native, l, map, RoutingMethod::Sabre, seed);
    routed.circuit = optimize(routed.circuit, OptLevel::O3lite);
    TranspileResult res;
    res.schedule = schedule(routed.circuit, d, SchedulingMethod::Alap);
    res.schedule.map_name = map.name;
    res.schedule.circuit_name = c.name;
    res.schedule.family = c.family;
    res.schedule.provenance.layout_method = "ensemble";
    res.schedule.provenance.routing_method = "sabre";
    res.schedule.provenance.opt_level = "O3lite";
    res.schedule.provenance.scheduling_method = "alap";
    res.schedule.provenance.layout = l.logical_to_physical;
    res.schedule.provenance.final_perm = routed.final_perm;
    res.routed = std::move(routed);
    out.variants.push_back(std::move(res));
  }
  if (out.variants.empty())
    throw std::invalid_argument("no valid layout for ensemble_remap");
  out.shortfall = out.variants.size() < M;
  out.weights.assign(out.variants.size(),
                     1.0 / static_cast<double>(out.variants.size()));
  return out;
}

} // namespace qsnoop

#endif
