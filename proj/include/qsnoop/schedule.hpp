/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_SCHEDULE_HPP
#define QSNOOP_SCHEDULE_HPP

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/circuit.hpp"
#include "qsnoop/coupling.hpp"
#include "qsnoop/decompose.hpp"
#include "qsnoop/layout.hpp"
#include "qsnoop/optimize.hpp"
#include "qsnoop/routing.hpp"

namespace qsnoop {

/// Per-kind gate durations in dt cycles. Defaults are plausible
/// superconducting values; all overridable.
struct GateDurations {
  uint64_t cx = 180;      // ~400 ns at 2.22 ns per dt
  uint64_t sx = 16;
  uint64_t x = 16;
  uint64_t rz = 0;        // virtual
  uint64_t measure = 1000;
  double dt_ns = 2.22;

  uint64_t duration_of(const Gate& g) const {
    switch (g.kind) {
      case GateKind::CX: return cx;
      case GateKind::SX: return sx;
      case GateKind::X: return x;
      case GateKind::RZ: return rz;
      case GateKind::Measure: return measure;
      case GateKind::Delay: return g.duration;
      case GateKind::Barrier: return 0;
      default:
        throw std::invalid_argument(
            std::string("no duration for non-native gate ") +
            gate_name(g.kind));
    }
  }
};

enum class SchedulingMethod { Asap, Alap };

inline const char* scheduling_method_name(SchedulingMethod m) {
  return m == SchedulingMethod::Asap ? "asap" : "alap";
}

struct TimedGate {
  Gate gate;
  uint64_t start = 0;
  uint64_t duration = 0;

  uint64_t end() const { return start + duration; }
};

struct Provenance {
  std::string layout_method;
  std::string routing_method;
  std::string opt_level;
  std::string scheduling_method;
  std::vector<uint32_t> layout;     // logical -> physical
  std::vector<uint32_t> final_perm; // routing content permutation
  bool vf2_fallback = false;
};

struct TimedSchedule {
  std::string map_name;
  uint32_t n_qubits = 0; // physical
  std::vector<TimedGate> gates;
  uint64_t total_duration = 0;
  GateDurations durations;
  Provenance provenance;
  std::string circuit_name;
  std::string family;

  uint64_t cx_count() const {
    uint64_t n = 0;
    for (const auto& tg : gates)
      if (tg.gate.kind == GateKind::CX) ++n;
    return n;
  }
};

/// Dependency-respecting list schedule. ASAP minimizes every start; ALAP
/// maximizes every start subject to the ASAP makespan.
inline TimedSchedule schedule(const Circuit& c, const GateDurations& d,
                              SchedulingMethod method) {
  if (!is_native(c))
    throw std::invalid_argument("schedule requires a native-basis circuit");
  TimedSchedule s;
  s.n_qubits = c.n_qubits;
  s.durations = d;
  s.circuit_name = c.name;
  s.family = c.family;

  auto run = [&](const std::vector<const Gate*>& order, bool reversed) {
    std::vector<uint64_t> avail(c.n_qubits, 0);
    std::vector<std::pair<const Gate*, uint64_t>> starts;
    starts.reserve(order.size());
    for (const Gate* g : order) {
      const uint64_t dur = d.duration_of(*g);
      uint64_t t = 0;
      if (g->kind == GateKind::Barrier && g->qubits.empty()) {
        for (uint64_t a : avail) t = std::max(t, a);
        std::fill(avail.begin(), avail.end(), t);
      } else {
        for (uint32_t q : g->qubits) t = std::max(t, avail[q]);
        for (uint32_t q : g->qubits) avail[q] = t + dur;
      }
      starts.emplace_back(g, t);
    }
    (void)reversed;
    return starts;
  };

  std::vector<const Gate*> fwd;
  for (const Gate& g : c.gates) fwd.push_back(&g);
  auto asap = run(fwd, false);
  uint64_t makespan = 0;
  for (auto& [g, t] : asap) makespan = std::max(makespan, t + d.duration_of(*g));

  if (method == SchedulingMethod::Asap) {
    for (auto& [g, t] : asap)
      s.gates.push_back({*g, t, d.duration_of(*g)});
  } else {
    std::vector<const Gate*> rev(fwd.rbegin(), fwd.rend());
    auto rasap = run(rev, true);
    // reverse-time start r maps to forward start makespan - r - duration
    std::vector<TimedGate> tmp;
    for (auto& [g, r] : rasap) {
      const uint64_t dur = d.duration_of(*g);
      tmp.push_back({*g, makespan - r - dur, dur});
    }
    std::reverse(tmp.begin(), tmp.end());
    s.gates = std::move(tmp);
  }
  s.total_duration = makespan;
  return s;
}

struct TranspileResult {
  TimedSchedule schedule;
  RoutedCircuit routed;
};

/// Full pipeline for one variant: native decomposition, layout, routing,
/// optimization, scheduling.
inline TranspileResult transpile_one(const Circuit& c, const CouplingMap& map,
                                     LayoutMethod lm, RoutingMethod rm,
                                     OptLevel opt, SchedulingMethod sm,
                                     const GateDurations& d, uint64_t seed) {
  const Circuit native = decompose_to_native(c);
  const Layout layout = apply_layout(native, map, lm, seed);
  RoutedCircuit routed = route(native, layout, map, rm, seed);
  routed.circuit = optimize(routed.circuit, opt);
  TranspileResult res;
  res.schedule = schedule(routed.circuit, d, sm);
  res.schedule.map_name = map.name;
  res.schedule.provenance.layout_method = layout_method_name(lm);
  res.schedule.provenance.routing_method = routing_method_name(rm);
  res.schedule.provenance.opt_level = opt_level_name(opt);
  res.schedule.provenance.scheduling_method = scheduling_method_name(sm);
  res.schedule.provenance.layout = layout.logical_to_physical;
  res.schedule.provenance.final_perm = routed.final_perm;
  res.schedule.provenance.vf2_fallback = layout.vf2_fallback;
  res.routed = std::move(routed);
  return res;
}

/// The 16-variant cross product {4 layouts} x {4 routings}, each O3lite +
/// ALAP. All variants are mutually unitary-equivalent up to permutation.
inline std::vector<TranspileResult> transpile_variants(
    const Circuit& c, const CouplingMap& map, uint64_t seed = 0,
    const GateDurations& d = {}) {
  std::vector<TranspileResult> out;
  out.reserve(16);
  for (LayoutMethod lm : {LayoutMethod::Trivial, LayoutMethod::Dense,
                          LayoutMethod::Vf2, LayoutMethod::Sabre}) {
    for (RoutingMethod rm : {RoutingMethod::Basic, RoutingMethod::Lookahead,
                             RoutingMethod::Stochastic, RoutingMethod::Sabre}) {
      out.push_back(transpile_one(c, map, lm, rm, OptLevel::O3lite,
                                  SchedulingMethod::Alap, d, seed));
    }
  }
  return out;
}

/// Line-oriented text export: one record per gate `kind operands start
/// duration`, after a `# total <dt>` header.
inline void export_schedule(const TimedSchedule& s, std::ostream& os) {
  os << "# circuit " << s.circuit_name << "\n";
  os << "# map " << s.map_name << "\n";
  os << "# variant " << s.provenance.layout_method << "/"
     << s.provenance.routing_method << "/" << s.provenance.opt_level << "/"
     << s.provenance.scheduling_method << "\n";
  os << "# total " << s.total_duration << "\n";
  os.precision(17);
  for (const TimedGate& tg : s.gates) {
    os << gate_name(tg.gate.kind);
    if (tg.gate.kind == GateKind::RZ) os << "(" << tg.gate.angle << ")";
    for (uint32_t q : tg.gate.qubits) os << " " << q;
    os << " @" << tg.start << " +" << tg.duration << "\n";
  }
}

} // namespace qsnoop

#endif
