/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_CIRCUIT_HPP
#define QSNOOP_CIRCUIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsnoop {

enum class GateKind {
  H,
  X,
  SX,
  RZ,
  CX,
  Swap,
  CP,
  CCX,
  Barrier,
  Delay,
  Measure,
};

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::SX: return "sx";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::Swap: return "swap";
    case GateKind::CP: return "cp";
    case GateKind::CCX: return "ccx";
    case GateKind::Barrier: return "barrier";
    case GateKind::Delay: return "delay";
    case GateKind::Measure: return "measure";
  }
  return "?";
}

/// Fixed operand arity, or -1 for Barrier (variadic).
inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::SX:
    case GateKind::RZ:
    case GateKind::Delay:
    case GateKind::Measure: return 1;
    case GateKind::CX:
    case GateKind::Swap:
    case GateKind::CP: return 2;
    case GateKind::CCX: return 3;
    case GateKind::Barrier: return -1;
  }
  return -1;
}

struct Gate {
  GateKind kind;
  std::vector<uint32_t> qubits;
  double angle = 0.0;    // RZ, CP
  uint64_t duration = 0; // Delay, in dt cycles

  static Gate h(uint32_t q) { return {GateKind::H, {q}}; }
  static Gate x(uint32_t q) { return {GateKind::X, {q}}; }
  static Gate sx(uint32_t q) { return {GateKind::SX, {q}}; }
  static Gate rz(double angle, uint32_t q) { return {GateKind::RZ, {q}, angle}; }
  static Gate cx(uint32_t c, uint32_t t) { return {GateKind::CX, {c, t}}; }
  static Gate swap(uint32_t a, uint32_t b) { return {GateKind::Swap, {a, b}}; }
  static Gate cp(double angle, uint32_t c, uint32_t t) {
    return {GateKind::CP, {c, t}, angle};
  }
  static Gate ccx(uint32_t a, uint32_t b, uint32_t t) {
    return {GateKind::CCX, {a, b, t}};
  }
  static Gate barrier(std::vector<uint32_t> qs) {
    return {GateKind::Barrier, std::move(qs)};
  }
  static Gate delay(uint64_t dt, uint32_t q) {
    Gate g{GateKind::Delay, {q}};
    g.duration = dt;
    return g;
  }
  static Gate measure(uint32_t q) { return {GateKind::Measure, {q}}; }

  bool operator==(const Gate& o) const {
    return kind == o.kind && qubits == o.qubits && angle == o.angle &&
           duration == o.duration;
  }
};

struct Circuit {
  uint32_t n_qubits = 0;
  std::vector<Gate> gates;
  std::string name;
  std::string family; // optional benchmark family tag

  void add(Gate g) {
    validate_gate(g);
    gates.push_back(std::move(g));
  }

  void validate_gate(const Gate& g) const {
    const int arity = gate_arity(g.kind);
    if (arity >= 0 && g.qubits.size() != static_cast<size_t>(arity))
      throw std::invalid_argument(std::string("operand count mismatch for ") +
                                  gate_name(g.kind));
    for (uint32_t q : g.qubits)
      if (q >= n_qubits)
        throw std::out_of_range("qubit operand out of range");
    if (g.qubits.size() >= 2) {
      for (size_t i = 0; i < g.qubits.size(); ++i)
        for (size_t j = i + 1; j < g.qubits.size(); ++j)
          if (g.kind != GateKind::Barrier && g.qubits[i] == g.qubits[j])
            throw std::invalid_argument("duplicate operand");
    }
    if ((g.kind == GateKind::RZ || g.kind == GateKind::CP) &&
        !std::isfinite(g.angle))
      throw std::invalid_argument("non-finite rotation angle");
  }

  /// Structural equality (name/family tags ignored).
  bool same_gates(const Circuit& o) const {
    return n_qubits == o.n_qubits && gates == o.gates;
  }
};

struct CircuitStats {
  uint64_t cnot_total = 0;
  uint64_t depth = 0;
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> per_pair_counts;
  double avg_cnot_per_pair = 0.0;
};

/// CX totals by direct scan; depth = longest dependency chain, with Barrier
/// acting as a full cut across the circuit.
inline CircuitStats circuit_stats(const Circuit& c) {
  CircuitStats s;
  std::vector<uint64_t> qubit_depth(c.n_qubits, 0);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::CX) {
      ++s.cnot_total;
      auto key = std::minmax(g.qubits[0], g.qubits[1]);
      ++s.per_pair_counts[{key.first, key.second}];
    }
    if (g.kind == GateKind::Barrier) {
      const uint64_t m =
          c.n_qubits == 0
              ? 0
              : *std::max_element(qubit_depth.begin(), qubit_depth.end());
      std::fill(qubit_depth.begin(), qubit_depth.end(), m);
      continue;
    }
    uint64_t level = 0;
    for (uint32_t q : g.qubits) level = std::max(level, qubit_depth[q]);
    ++level;
    for (uint32_t q : g.qubits) qubit_depth[q] = level;
  }
  s.depth = qubit_depth.empty()
                ? 0
                : *std::max_element(qubit_depth.begin(), qubit_depth.end());
  if (!s.per_pair_counts.empty())
    s.avg_cnot_per_pair = static_cast<double>(s.cnot_total) /
                          static_cast<double>(s.per_pair_counts.size());
  return s;
}

} // namespace qsnoop

#endif
