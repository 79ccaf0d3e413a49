/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_OPTIMIZE_HPP
#define QSNOOP_OPTIMIZE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/circuit.hpp"
#include "qsnoop/decompose.hpp"

namespace qsnoop {

enum class OptLevel { O0, O3lite };

inline const char* opt_level_name(OptLevel l) {
  return l == OptLevel::O0 ? "O0" : "O3lite";
}

namespace detail {

using Mat2 = std::array<std::complex<double>, 4>; // row-major [m00 m01 m10 m11]

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline Mat2 gate_matrix_1q(const Gate& g) {
  using namespace std::complex_literals;
  switch (g.kind) {
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::SX:
      return {0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i};
    case GateKind::RZ:
      return {std::exp(-0.5i * g.angle), 0, 0, std::exp(0.5i * g.angle)};
    default: throw std::logic_error("not a resynthesizable 1q gate");
  }
}

inline bool angle_is_zero(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  return r < 1e-12 || two_pi - r < 1e-12;
}

/// ZXZXZ synthesis of an arbitrary 1-qubit unitary (up to global phase):
/// gate list RZ(lambda), SX, RZ(theta+pi), SX, RZ(phi+pi), with zero-angle
/// rotations dropped.
inline std::vector<Gate> synthesize_zsxzsxz(const Mat2& u, uint32_t q) {
  const double eps = 1e-10;
  const double a00 = std::abs(u[0]);
  const double a10 = std::abs(u[2]);
  std::vector<Gate> out;
  if (a10 < eps) {
    // diagonal
    const double angle = std::arg(u[3]) - std::arg(u[0]);
    if (!angle_is_zero(angle)) out.push_back(Gate::rz(angle, q));
    return out;
  }
  double theta, phi, lambda;
  if (a00 < eps) {
    theta = std::numbers::pi;
    phi = 0.0;
    lambda = std::arg(-u[1]) - std::arg(u[2]);
  } else {
    theta = 2.0 * std::atan2(a10, a00);
    const double alpha = std::arg(u[0]);
    phi = std::arg(u[2]) - alpha;
    lambda = std::arg(-u[1]) - alpha;
  }
  auto push_rz = [&](double a) {
    if (!angle_is_zero(a)) out.push_back(Gate::rz(a, q));
  };
  push_rz(lambda);
  out.push_back(Gate::sx(q));
  push_rz(theta + std::numbers::pi);
  out.push_back(Gate::sx(q));
  push_rz(phi + std::numbers::pi);
  return out;
}

/// One cleanup sweep: cancel adjacent identical CX pairs, merge adjacent RZ,
/// drop zero-angle RZ. Returns true if anything changed.
inline bool cleanup_pass(Circuit& c) {
  bool changed = false;
  std::vector<Gate> gates = std::move(c.gates);
  std::vector<bool> removed(gates.size(), false);
  std::vector<std::vector<size_t>> stack(c.n_qubits);

  auto top = [&](uint32_t q) -> int64_t {
    auto& s = stack[q];
    while (!s.empty() && removed[s.back()]) s.pop_back();
    return s.empty() ? -1 : static_cast<int64_t>(s.back());
  };

  for (size_t i = 0; i < gates.size(); ++i) {
    Gate& g = gates[i];
    if (g.kind == GateKind::RZ && angle_is_zero(g.angle)) {
      removed[i] = true;
      changed = true;
      continue;
    }
    if (g.kind == GateKind::CX) {
      const int64_t t0 = top(g.qubits[0]);
      const int64_t t1 = top(g.qubits[1]);
      if (t0 >= 0 && t0 == t1 && gates[t0].kind == GateKind::CX &&
          gates[t0].qubits == g.qubits) {
        removed[t0] = true;
        removed[i] = true;
        changed = true;
        continue;
      }
    }
    if (g.kind == GateKind::RZ) {
      const int64_t t = top(g.qubits[0]);
      if (t >= 0 && gates[t].kind == GateKind::RZ) {
        gates[t].angle += g.angle;
        removed[i] = true;
        if (angle_is_zero(gates[t].angle)) removed[t] = true;
        changed = true;
        continue;
      }
    }
    if (g.kind == GateKind::Barrier && g.qubits.empty()) {
      for (auto& s : stack) s.push_back(i);
    } else {
      for (uint32_t q : g.qubits) stack[q].push_back(i);
    }
  }
  c.gates.clear();
  for (size_t i = 0; i < gates.size(); ++i)
    if (!removed[i]) c.gates.push_back(std::move(gates[i]));
  return changed;
}

/// Resynthesize maximal single-qubit runs into at most RZ.SX.RZ.SX.RZ when
/// that strictly shrinks the run. Returns true if anything changed.
inline bool resynth_pass(Circuit& c) {
  bool changed = false;
  std::vector<Gate> gates = std::move(c.gates);
  std::vector<Gate> out;
  // per-qubit pending run of {RZ, SX, X} gates
  std::vector<std::vector<Gate>> run(c.n_qubits);

  auto flush = [&](uint32_t q) {
    auto& r = run[q];
    if (r.empty()) return;
    if (r.size() > 1) {
      Mat2 m{1, 0, 0, 1};
      for (const Gate& g : r) m = mat_mul(gate_matrix_1q(g), m);
      auto synth = synthesize_zsxzsxz(m, q);
      if (synth.size() < r.size()) {
        changed = true;
        for (Gate& g : synth) out.push_back(std::move(g));
        r.clear();
        return;
      }
    }
    for (Gate& g : r) out.push_back(std::move(g));
    r.clear();
  };

  for (Gate& g : gates) {
    const bool resynthable =
        (g.kind == GateKind::RZ || g.kind == GateKind::SX ||
         g.kind == GateKind::X) &&
        g.qubits.size() == 1;
    if (resynthable) {
      run[g.qubits[0]].push_back(std::move(g));
      continue;
    }
    if (g.kind == GateKind::Barrier && g.qubits.empty()) {
      for (uint32_t q = 0; q < c.n_qubits; ++q) flush(q);
    } else {
      for (uint32_t q : g.qubits) flush(q);
    }
    out.push_back(std::move(g));
  }
  for (uint32_t q = 0; q < c.n_qubits; ++q) flush(q);
  c.gates = std::move(out);
  return changed;
}

} // namespace detail

/// O0 is the identity. O3lite runs CX-pair cancellation, RZ merging,
/// zero-angle removal, and single-qubit run resynthesis to a fixed point.
/// Output is unitary-equivalent to the input up to global phase.
inline Circuit optimize(const Circuit& c, OptLevel level) {
  if (level == OptLevel::O0) return c;
  Circuit out = c;
  for (int iter = 0; iter < 64; ++iter) {
    bool changed = false;
    while (detail::cleanup_pass(out)) changed = true;
    if (detail::resynth_pass(out)) changed = true;
    if (!changed) break;
  }
  return out;
}

} // namespace qsnoop

#endif
