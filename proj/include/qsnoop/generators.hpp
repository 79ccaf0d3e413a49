/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_GENERATORS_HPP
#define QSNOOP_GENERATORS_HPP

#include <numbers>
#include <stdexcept>
#include <string>

#include "qsnoop/circuit.hpp"
#include "qsnoop/rng.hpp"

namespace qsnoop {

enum class BenchmarkFamily {
  Ghz,
  Dj,
  GraphState,
  Qft,
  Adder,
  TwoLocal,
  Qpe,
  Random,
};

inline const char* family_name(BenchmarkFamily f) {
  switch (f) {
    case BenchmarkFamily::Ghz: return "ghz";
    case BenchmarkFamily::Dj: return "dj";
    case BenchmarkFamily::GraphState: return "graphstate";
    case BenchmarkFamily::Qft: return "qft";
    case BenchmarkFamily::Adder: return "adder";
    case BenchmarkFamily::TwoLocal: return "twolocal";
    case BenchmarkFamily::Qpe: return "qpe";
    case BenchmarkFamily::Random: return "random";
  }
  return "?";
}

inline BenchmarkFamily family_from_name(const std::string& s) {
  if (s == "ghz") return BenchmarkFamily::Ghz;
  if (s == "dj") return BenchmarkFamily::Dj;
  if (s == "graphstate") return BenchmarkFamily::GraphState;
  if (s == "qft") return BenchmarkFamily::Qft;
  if (s == "adder") return BenchmarkFamily::Adder;
  if (s == "twolocal") return BenchmarkFamily::TwoLocal;
  if (s == "qpe") return BenchmarkFamily::Qpe;
  if (s == "random") return BenchmarkFamily::Random;
  throw std::invalid_argument("unknown benchmark family: " + s);
}

namespace detail {

inline void emit_cz(Circuit& c, uint32_t a, uint32_t b) {
  c.add(Gate::h(b));
  c.add(Gate::cx(a, b));
  c.add(Gate::h(b));
}

inline Circuit gen_ghz(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  c.add(Gate::h(0));
  for (uint32_t i = 0; i + 1 < n; ++i) c.add(Gate::cx(i, i + 1));
  return c;
}

/// Deutsch-Jozsa with a balanced oracle: n-1 data qubits, q[n-1] is the
/// ancilla; one CX per data qubit.
inline Circuit gen_dj(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  const uint32_t anc = n - 1;
  c.add(Gate::x(anc));
  for (uint32_t i = 0; i < n; ++i) c.add(Gate::h(i));
  for (uint32_t i = 0; i < anc; ++i) c.add(Gate::cx(i, anc));
  for (uint32_t i = 0; i < anc; ++i) c.add(Gate::h(i));
  return c;
}

/// Ring graph state: H on all, CZ around the cycle (one CX each once native).
inline Circuit gen_graphstate(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  for (uint32_t i = 0; i < n; ++i) c.add(Gate::h(i));
  for (uint32_t i = 0; i < n; ++i) emit_cz(c, i, (i + 1) % n);
  return c;
}

/// Textbook QFT: controlled-phase ladder plus the final qubit-reversal swaps.
inline Circuit gen_qft(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  for (uint32_t i = 0; i < n; ++i) {
    c.add(Gate::h(i));
    for (uint32_t j = i + 1; j < n; ++j) {
      const double angle = std::numbers::pi / static_cast<double>(1ULL << (j - i));
      c.add(Gate::cp(angle, j, i));
    }
  }
  for (uint32_t i = 0; i < n / 2; ++i) c.add(Gate::swap(i, n - 1 - i));
  return c;
}

/// Ripple-carry style adder sketch over n qubits: alternating carry (CCX)
/// and sum (CX) stages.
inline Circuit gen_adder(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  for (uint32_t i = 0; i + 1 < n; i += 2) c.add(Gate::x(i));
  for (uint32_t i = 0; i + 2 < n; ++i) {
    c.add(Gate::ccx(i, i + 1, i + 2));
    c.add(Gate::cx(i, i + 1));
  }
  for (uint32_t i = n - 1; i >= 2; --i) c.add(Gate::cx(i - 1, i));
  return c;
}

/// Hardware-efficient two-local ansatz: rotation layers with seeded angles
/// and linear CX entanglement, three repetitions.
inline Circuit gen_twolocal(uint32_t n, uint64_t seed) {
  Circuit c;
  c.n_qubits = n;
  Rng rng(seed);
  const uint32_t reps = 3;
  for (uint32_t r = 0; r < reps; ++r) {
    for (uint32_t i = 0; i < n; ++i) {
      c.add(Gate::rz(rng.next_double() * 2.0 * std::numbers::pi, i));
      c.add(Gate::sx(i));
      c.add(Gate::rz(rng.next_double() * 2.0 * std::numbers::pi, i));
    }
    for (uint32_t i = 0; i + 1 < n; ++i) c.add(Gate::cx(i, i + 1));
  }
  for (uint32_t i = 0; i < n; ++i)
    c.add(Gate::rz(rng.next_double() * 2.0 * std::numbers::pi, i));
  return c;
}

/// Phase estimation: q[n-1] is the eigenstate target, the rest count.
inline Circuit gen_qpe(uint32_t n) {
  Circuit c;
  c.n_qubits = n;
  const uint32_t target = n - 1;
  const uint32_t m = n - 1;
  c.add(Gate::x(target));
  for (uint32_t i = 0; i < m; ++i) c.add(Gate::h(i));
  for (uint32_t i = 0; i < m; ++i) {
    const double angle =
        2.0 * std::numbers::pi * 0.3125 * static_cast<double>(1ULL << i);
    c.add(Gate::cp(angle, i, target));
  }
  // inverse QFT on the counting register
  for (uint32_t ii = 0; ii < m; ++ii) {
    const uint32_t i = m - 1 - ii;
    for (uint32_t j = m - 1; j > i; --j) {
      const double angle = -std::numbers::pi / static_cast<double>(1ULL << (j - i));
      c.add(Gate::cp(angle, j, i));
    }
    c.add(Gate::h(i));
  }
  return c;
}

inline Circuit gen_random(uint32_t n, uint64_t seed) {
  Circuit c;
  c.n_qubits = n;
  Rng rng(seed);
  const uint32_t layers = 3 * n;
  for (uint32_t l = 0; l < layers; ++l) {
    const uint64_t pick = rng.next_below(4);
    const uint32_t q = static_cast<uint32_t>(rng.next_below(n));
    switch (pick) {
      case 0: c.add(Gate::h(q)); break;
      case 1: c.add(Gate::sx(q)); break;
      case 2:
        c.add(Gate::rz(rng.next_double() * 2.0 * std::numbers::pi, q));
        break;
      default: {
        uint32_t p = static_cast<uint32_t>(rng.next_below(n));
        if (p == q) p = (q + 1) % n;
        c.add(Gate::cx(q, p));
      }
    }
  }
  return c;
}

} // namespace detail

/// Deterministic benchmark generator; the seed only matters for the
/// twolocal and random families.
inline Circuit generate_benchmark(BenchmarkFamily family, uint32_t n_qubits,
                                  uint64_t seed = 0) {
  uint32_t min_n = 2;
  switch (family) {
    case BenchmarkFamily::GraphState:
    case BenchmarkFamily::Qpe: min_n = 3; break;
    case BenchmarkFamily::Adder: min_n = 4; break;
    default: break;
  }
  if (n_qubits < min_n)
    throw std::invalid_argument(std::string(family_name(family)) +
                                " requires at least " + std::to_string(min_n) +
                                " qubits");
  Circuit c;
  switch (family) {
    case BenchmarkFamily::Ghz: c = detail::gen_ghz(n_qubits); break;
    case BenchmarkFamily::Dj: c = detail::gen_dj(n_qubits); break;
    case BenchmarkFamily::GraphState: c = detail::gen_graphstate(n_qubits); break;
    case BenchmarkFamily::Qft: c = detail::gen_qft(n_qubits); break;
    case BenchmarkFamily::Adder: c = detail::gen_adder(n_qubits); break;
    case BenchmarkFamily::TwoLocal: c = detail::gen_twolocal(n_qubits, seed); break;
    case BenchmarkFamily::Qpe: c = detail::gen_qpe(n_qubits); break;
    case BenchmarkFamily::Random: c = detail::gen_random(n_qubits, seed); break;
  }
  c.family = family_name(family);
  c.name = c.family + "_n" + std::to_string(n_qubits);
  if (family == BenchmarkFamily::TwoLocal || family == BenchmarkFamily::Random)
    c.name += "_s" + std::to_string(seed);
  return c;
}

} // namespace qsnoop

#endif
