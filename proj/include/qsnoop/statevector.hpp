/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_STATEVECTOR_HPP
#define QSNOOP_STATEVECTOR_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qsnoop/circuit.hpp"

namespace qsnoop {

/// Exact statevector over up to 12 qubits. This simulator exists solely as a
/// correctness oracle for transpilation and decomposition; it is not on any
/// performance path.
struct StateVector {
  uint32_t n_qubits = 0;
  std::vector<std::complex<double>> amps;

  static StateVector zero_state(uint32_t n) {
    StateVector s;
    s.n_qubits = n;
    s.amps.assign(size_t{1} << n, {0.0, 0.0});
    s.amps[0] = {1.0, 0.0};
    return s;
  }

  static StateVector basis_state(uint32_t n, uint64_t index) {
    StateVector s;
    s.n_qubits = n;
    s.amps.assign(size_t{1} << n, {0.0, 0.0});
    s.amps[index] = {1.0, 0.0};
    return s;
  }

  double norm_sq() const {
    double acc = 0.0;
    for (const auto& a : amps) acc += std::norm(a);
    return acc;
  }

  double probability(uint64_t index) const { return std::norm(amps[index]); }

  void apply1(uint32_t q, const std::complex<double> m[2][2]) {
    const uint64_t bit = uint64_t{1} << q;
    for (uint64_t i = 0; i < amps.size(); ++i) {
      if (i & bit) continue;
      const auto a0 = amps[i];
      const auto a1 = amps[i | bit];
      amps[i] = m[0][0] * a0 + m[0][1] * a1;
      amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
  }

  void apply_gate(const Gate& g) {
    using namespace std::complex_literals;
    const double pi = std::numbers::pi;
    switch (g.kind) {
      case GateKind::H: {
        const double s = 1.0 / std::sqrt(2.0);
        const std::complex<double> m[2][2] = {{s, s}, {s, -s}};
        apply1(g.qubits[0], m);
        break;
      }
      case GateKind::X: {
        const std::complex<double> m[2][2] = {{0, 1}, {1, 0}};
        apply1(g.qubits[0], m);
        break;
      }
      case GateKind::SX: {
        const std::complex<double> m[2][2] = {{0.5 + 0.5i, 0.5 - 0.5i},
                                              {0.5 - 0.5i, 0.5 + 0.5i}};
        apply1(g.qubits[0], m);
        break;
      }
      case GateKind::RZ: {
        const std::complex<double> m[2][2] = {
            {std::exp(-0.5i * g.angle), 0}, {0, std::exp(0.5i * g.angle)}};
        apply1(g.qubits[0], m);
        break;
      }
      case GateKind::CX: {
        const uint64_t cb = uint64_t{1} << g.qubits[0];
        const uint64_t tb = uint64_t{1} << g.qubits[1];
        for (uint64_t i = 0; i < amps.size(); ++i)
          if ((i & cb) && !(i & tb)) std::swap(amps[i], amps[i | tb]);
        break;
      }
      case GateKind::Swap: {
        const uint64_t ab = uint64_t{1} << g.qubits[0];
        const uint64_t bb = uint64_t{1} << g.qubits[1];
        for (uint64_t i = 0; i < amps.size(); ++i)
          if ((i & ab) && !(i & bb)) std::swap(amps[i], amps[(i ^ ab) | bb]);
        break;
      }
      case GateKind::CP: {
        const uint64_t mask =
            (uint64_t{1} << g.qubits[0]) | (uint64_t{1} << g.qubits[1]);
        const std::complex<double> ph = std::exp(1.0i * g.angle);
        for (uint64_t i = 0; i < amps.size(); ++i)
          if ((i & mask) == mask) amps[i] *= ph;
        break;
      }
      case GateKind::CCX: {
        const uint64_t c1 = uint64_t{1} << g.qubits[0];
        const uint64_t c2 = uint64_t{1} << g.qubits[1];
        const uint64_t tb = uint64_t{1} << g.qubits[2];
        for (uint64_t i = 0; i < amps.size(); ++i)
          if ((i & c1) && (i & c2) && !(i & tb))
            std::swap(amps[i], amps[i | tb]);
        break;
      }
      case GateKind::Barrier:
      case GateKind::Delay:
        break;
      case GateKind::Measure:
        throw std::invalid_argument("oracle does not support Measure gates");
    }
    (void)pi;
  }
};

inline StateVector simulate_statevector(const Circuit& c,
                                        std::optional<uint64_t> input = {}) {
  if (c.n_qubits > 12)
    throw std::invalid_argument("oracle limit is 12 qubits");
  StateVector s = input ? StateVector::basis_state(c.n_qubits, *input)
                        : StateVector::zero_state(c.n_qubits);
  for (const Gate& g : c.gates) s.apply_gate(g);
  return s;
}

/// Relocate basis-index bits: bit q of the source index moves to bit perm[q]
/// of the destination index.
inline StateVector permute_state(const StateVector& s,
                                 const std::vector<uint32_t>& perm) {
  StateVector out;
  out.n_qubits = s.n_qubits;
  out.amps.assign(s.amps.size(), {0.0, 0.0});
  for (uint64_t i = 0; i < s.amps.size(); ++i) {
    uint64_t j = 0;
    for (uint32_t q = 0; q < s.n_qubits; ++q)
      if (i & (uint64_t{1} << q)) j |= uint64_t{1} << perm[q];
    out.amps[j] = s.amps[i];
  }
  return out;
}

/// True iff U_b equals P_perm * U_a up to one common global phase, where
/// P_perm relabels qubit q of a's output as qubit perm[q]. Checked by basis
/// probing, tolerance 1e-8; identity permutation when perm is empty.
inline bool unitary_equivalent(const Circuit& a, const Circuit& b,
                               std::vector<uint32_t> perm = {},
                               double tol = 1e-8) {
  if (a.n_qubits != b.n_qubits)
    throw std::invalid_argument("qubit count mismatch");
  if (a.n_qubits > 5)
    throw std::invalid_argument("unitary_equivalent limit is 5 qubits");
  if (perm.empty()) {
    perm.resize(a.n_qubits);
    for (uint32_t q = 0; q < a.n_qubits; ++q) perm[q] = q;
  }
  const uint64_t dim = uint64_t{1} << a.n_qubits;
  std::complex<double> phase{0.0, 0.0};
  bool have_phase = false;
  for (uint64_t x = 0; x < dim; ++x) {
    const StateVector oa = permute_state(simulate_statevector(a, x), perm);
    const StateVector ob = simulate_statevector(b, x);
    if (!have_phase) {
      for (uint64_t j = 0; j < dim; ++j) {
        if (std::abs(oa.amps[j]) > 1e-6) {
          phase = ob.amps[j] / oa.amps[j];
          have_phase = true;
          break;
        }
      }
      if (!have_phase) return false;
      if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    }
    for (uint64_t j = 0; j < dim; ++j)
      if (std::abs(ob.amps[j] - phase * oa.amps[j]) > tol) return false;
  }
  return true;
}

} // namespace qsnoop

#endif
