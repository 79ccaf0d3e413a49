/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_DECOMPOSE_HPP
#define QSNOOP_DECOMPOSE_HPP

#include <numbers>

#include "qsnoop/circuit.hpp"

namespace qsnoop {

namespace detail {

inline void native_h(Circuit& out, uint32_t q) {
  const double pi = std::numbers::pi;
  out.add(Gate::rz(pi / 2, q));
  out.add(Gate::sx(q));
  out.add(Gate::rz(pi / 2, q));
}

inline void native_cp(Circuit& out, double theta, uint32_t a, uint32_t b) {
  out.add(Gate::rz(theta / 2, a));
  out.add(Gate::rz(theta / 2, b));
  out.add(Gate::cx(a, b));
  out.add(Gate::rz(-theta / 2, b));
  out.add(Gate::cx(a, b));
}

inline void native_ccx(Circuit& out, uint32_t a, uint32_t b, uint32_t t) {
  const double pi4 = std::numbers::pi / 4;
  native_h(out, t);
  out.add(Gate::cx(b, t));
  out.add(Gate::rz(-pi4, t));
  out.add(Gate::cx(a, t));
  out.add(Gate::rz(pi4, t));
  out.add(Gate::cx(b, t));
  out.add(Gate::rz(-pi4, t));
  out.add(Gate::cx(a, t));
  out.add(Gate::rz(pi4, b));
  out.add(Gate::rz(pi4, t));
  native_h(out, t);
  out.add(Gate::cx(a, b));
  out.add(Gate::rz(pi4, a));
  out.add(Gate::rz(-pi4, b));
  out.add(Gate::cx(a, b));
}

} // namespace detail

/// Rewrite to the native basis {RZ, SX, X, CX} plus Barrier/Delay/Measure.
/// Unitarily equivalent to the input up to global phase.
inline Circuit decompose_to_native(const Circuit& c) {
  Circuit out;
  out.n_qubits = c.n_qubits;
  out.name = c.name;
  out.family = c.family;
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::H: detail::native_h(out, g.qubits[0]); break;
      case GateKind::Swap:
        out.add(Gate::cx(g.qubits[0], g.qubits[1]));
        out.add(Gate::cx(g.qubits[1], g.qubits[0]));
        out.add(Gate::cx(g.qubits[0], g.qubits[1]));
        break;
      case GateKind::CP:
        detail::native_cp(out, g.angle, g.qubits[0], g.qubits[1]);
        break;
      case GateKind::CCX:
        detail::native_ccx(out, g.qubits[0], g.qubits[1], g.qubits[2]);
        break;
      default: out.add(g);
    }
  }
  return out;
}

inline bool is_native(const Circuit& c) {
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::RZ:
      case GateKind::SX:
      case GateKind::X:
      case GateKind::CX:
      case GateKind::Barrier:
      case GateKind::Delay:
      case GateKind::Measure: break;
      default: return false;
    }
  }
  return true;
}

} // namespace qsnoop

#endif
