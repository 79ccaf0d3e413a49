/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#include <catch2/catch_amalgamated.hpp>

#include "qsnoop/decompose.hpp"
#include "qsnoop/generators.hpp"
#include "qsnoop/qasm.hpp"
#include "qsnoop/rng.hpp"
#include "qsnoop/statevector.hpp"

using namespace qsnoop;

namespace {

Circuit random_circuit(uint32_t n, uint32_t gates, uint64_t seed) {
  Circuit c;
  c.n_qubits = n;
  Rng rng(seed);
  for (uint32_t i = 0; i < gates; ++i) {
    switch (rng.next_below(5)) {
      case 0: c.add(Gate::h(static_cast<uint32_t>(rng.next_below(n)))); break;
      case 1: c.add(Gate::sx(static_cast<uint32_t>(rng.next_below(n)))); break;
      case 2: c.add(Gate::x(static_cast<uint32_t>(rng.next_below(n)))); break;
      case 3:
        c.add(Gate::rz(rng.next_double() * 6.28,
                       static_cast<uint32_t>(rng.next_below(n))));
        break;
      default: {
        const uint32_t a = static_cast<uint32_t>(rng.next_below(n));
        uint32_t b = static_cast<uint32_t>(rng.next_below(n));
        if (b == a) b = (a + 1) % n;
        c.add(Gate::cx(a, b));
      }
    }
  }
  return c;
}

} // namespace

TEST_CASE("H gives the uniform single-qubit superposition") {
  Circuit c;
  c.n_qubits = 1;
  c.add(Gate::h(0));
  const StateVector s = simulate_statevector(c);
  CHECK(s.probability(0) == Catch::Approx(0.5));
  CHECK(s.probability(1) == Catch::Approx(0.5));
}

TEST_CASE("H then CX gives the Bell state") {
  Circuit c;
  c.n_qubits = 2;
  c.add(Gate::h(0));
  c.add(Gate::cx(0, 1));
  const StateVector s = simulate_statevector(c);
  CHECK(s.probability(0b00) == Catch::Approx(0.5));
  CHECK(s.probability(0b11) == Catch::Approx(0.5));
  CHECK(s.probability(0b01) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("X flips to |1> deterministically") {
  Circuit c;
  c.n_qubits = 1;
  c.add(Gate::x(0));
  CHECK(simulate_statevector(c).probability(1) == Catch::Approx(1.0));
}

TEST_CASE("norm is preserved after every gate") {
  const Circuit c = random_circuit(4, 60, 11);
  StateVector s = StateVector::zero_state(4);
  for (const Gate& g : c.gates) {
    s.apply_gate(g);
    REQUIRE(s.norm_sq() == Catch::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("gate followed by its inverse restores the state") {
  StateVector s = StateVector::zero_state(2);
  s.apply_gate(Gate::h(0));
  s.apply_gate(Gate::rz(0.7, 0));
  const StateVector before = s;
  s.apply_gate(Gate::cx(0, 1));
  s.apply_gate(Gate::cx(0, 1));
  s.apply_gate(Gate::rz(1.3, 1));
  s.apply_gate(Gate::rz(-1.3, 1));
  for (size_t i = 0; i < s.amps.size(); ++i)
    CHECK(std::abs(s.amps[i] - before.amps[i]) < 1e-10);
}

TEST_CASE("unitary_equivalent accepts a circuit against itself") {
  const Circuit c = random_circuit(3, 25, 5);
  CHECK(unitary_equivalent(c, c));
}

TEST_CASE("unitary_equivalent tracks a trailing swap via the permutation") {
  Circuit a;
  a.n_qubits = 2;
  a.add(Gate::cx(0, 1));
  Circuit b = a;
  b.add(Gate::swap(0, 1));
  // b = P_{0<->1} after a, which is exactly the routing contract
  CHECK(unitary_equivalent(a, b, {1, 0}));
  CHECK_FALSE(unitary_equivalent(a, b));
}

TEST_CASE("unitary_equivalent distinguishes H from X") {
  Circuit a;
  a.n_qubits = 1;
  a.add(Gate::h(0));
  Circuit b;
  b.n_qubits = 1;
  b.add(Gate::x(0));
  CHECK_FALSE(unitary_equivalent(a, b));
}

TEST_CASE("unitary_equivalent tolerates a global phase") {
  Circuit a;
  a.n_qubits = 1;
  a.add(Gate::rz(1.0, 0));
  Circuit b = a;
  // rz(theta + 4pi) differs by a -1^2 = identity phase; rz(theta + 2pi) by -1
  b.gates[0].angle += 2.0 * std::numbers::pi;
  CHECK(unitary_equivalent(a, b));
}

TEST_CASE("native H decomposition matches H") {
  Circuit a;
  a.n_qubits = 1;
  a.add(Gate::h(0));
  CHECK(unitary_equivalent(a, decompose_to_native(a)));
}

TEST_CASE("native CP decomposition matches CP on 2 qubits") {
  for (double theta : {0.3, 1.57, -2.2}) {
    Circuit a;
    a.n_qubits = 2;
    a.add(Gate::cp(theta, 0, 1));
    CHECK(unitary_equivalent(a, decompose_to_native(a)));
  }
}

TEST_CASE("native CCX and SWAP decompositions are exact") {
  Circuit a;
  a.n_qubits = 3;
  a.add(Gate::ccx(0, 1, 2));
  a.add(Gate::swap(0, 2));
  CHECK(unitary_equivalent(a, decompose_to_native(a)));
}

TEST_CASE("u2/u3 parse rewrites preserve the unitary") {
  const Circuit u2 = parse_qasm("OPENQASM 2.0; qreg q[1]; u2(0.4,1.1) q[0];");
  Circuit h;
  h.n_qubits = 1;
  // u2(0, pi) == H
  const Circuit u2h = parse_qasm("OPENQASM 2.0; qreg q[1]; u2(0,pi) q[0];");
  h.add(Gate::h(0));
  CHECK(unitary_equivalent(h, u2h));

  // u3(pi, 0, pi) == X
  const Circuit u3x =
      parse_qasm("OPENQASM 2.0; qreg q[1]; u3(pi,0,pi) q[0];");
  Circuit x;
  x.n_qubits = 1;
  x.add(Gate::x(0));
  CHECK(unitary_equivalent(x, u3x));
  (void)u2;
}

TEST_CASE("benchmark decompositions are unitary-equivalent at small sizes") {
  for (BenchmarkFamily f :
       {BenchmarkFamily::Ghz, BenchmarkFamily::Dj, BenchmarkFamily::GraphState,
        BenchmarkFamily::Qft, BenchmarkFamily::Adder, BenchmarkFamily::TwoLocal,
        BenchmarkFamily::Qpe, BenchmarkFamily::Random}) {
    const Circuit c = generate_benchmark(f, 4, 3);
    INFO(family_name(f));
    CHECK(unitary_equivalent(c, decompose_to_native(c)));
  }
}

TEST_CASE("oracle rejects oversized circuits and Measure") {
  Circuit big;
  big.n_qubits = 13;
  CHECK_THROWS_AS(simulate_statevector(big), std::invalid_argument);
  Circuit m;
  m.n_qubits = 1;
  m.add(Gate::measure(0));
  CHECK_THROWS_AS(simulate_statevector(m), std::invalid_argument);
}
