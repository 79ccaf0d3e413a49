/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "qsnoop/coupling.hpp"
#include "qsnoop/decompose.hpp"
#include "qsnoop/generators.hpp"
#include "qsnoop/optimize.hpp"
#include "qsnoop/routing.hpp"
#include "qsnoop/schedule.hpp"
#include "qsnoop/statevector.hpp"

using namespace qsnoop;

namespace {

/// Embed a logical circuit into physical space via a layout (ancillas idle).
Circuit embed(const Circuit& c, const Layout& l, uint32_t n_physical) {
  Circuit out;
  out.n_qubits = n_physical;
  for (Gate g : c.gates) {
    for (uint32_t& q : g.qubits) q = l.logical_to_physical[q];
    out.add(std::move(g));
  }
  return out;
}

Circuit random_native(uint32_t n, uint32_t gates, uint64_t seed) {
  Circuit c;
  c.n_qubits = n;
  Rng rng(seed);
  for (uint32_t i = 0; i < gates; ++i) {
    switch (rng.next_below(4)) {
      case 0: c.add(Gate::sx(static_cast<uint32_t>(rng.next_below(n)))); break;
      case 1: c.add(Gate::x(static_cast<uint32_t>(rng.next_below(n)))); break;
      case 2:
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

bool hardware_legal(const Circuit& c, const CouplingMap& map) {
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::CX && !map.has_edge(g.qubits[0], g.qubits[1]))
      return false;
  return true;
}

} // namespace

TEST_CASE("coupling map builders") {
  const CouplingMap line = build_coupling_map("line(3)");
  CHECK(line.n_physical == 3);
  CHECK(line.edges == std::set<Edge>{{0, 1}, {1, 2}});

  const CouplingMap lagos = build_coupling_map("lagos7");
  CHECK(lagos.n_physical == 7);
  CHECK(lagos.edges ==
        std::set<Edge>{{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}});

  const CouplingMap guad = build_coupling_map("guadalupe16");
  CHECK(guad.n_physical == 16);
  CHECK(guad.edges.size() == 16);
  CHECK(guad.connected());

  CHECK_THROWS_AS(build_coupling_map("mesh(4)"), std::invalid_argument);
}

TEST_CASE("coupling map text round-trip") {
  const CouplingMap m = build_coupling_map("lagos7");
  std::stringstream ss;
  save_coupling_map(m, ss);
  const CouplingMap back = load_coupling_map(ss);
  CHECK(back.n_physical == m.n_physical);
  CHECK(back.edges == m.edges);
  CHECK(back.name == m.name);
}

TEST_CASE("trivial layout is the identity") {
  const Circuit c = generate_benchmark(BenchmarkFamily::Ghz, 3);
  const Layout l =
      apply_layout(c, build_coupling_map("line(3)"), LayoutMethod::Trivial);
  CHECK(l.logical_to_physical == std::vector<uint32_t>{0, 1, 2});
}

TEST_CASE("dense layout picks a maximally connected subset") {
  const CouplingMap lagos = build_coupling_map("lagos7");
  const Circuit c = generate_benchmark(BenchmarkFamily::Ghz, 3);
  const Layout l = apply_layout(c, lagos, LayoutMethod::Dense);
  // brute-force oracle: best 3-subset internal edge count on lagos7 is 2
  int best = 0;
  for (uint32_t a = 0; a < 7; ++a)
    for (uint32_t b = a + 1; b < 7; ++b)
      for (uint32_t d = b + 1; d < 7; ++d) {
        int e = 0;
        e += lagos.has_edge(a, b);
        e += lagos.has_edge(a, d);
        e += lagos.has_edge(b, d);
        best = std::max(best, e);
      }
  std::set<uint32_t> chosen(l.logical_to_physical.begin(),
                            l.logical_to_physical.end());
  int internal = 0;
  for (const Edge& e : lagos.edges)
    if (chosen.count(e.first) && chosen.count(e.second)) ++internal;
  CHECK(internal == best);
}

TEST_CASE("vf2 finds the exact path embedding for GHZ(3) on line(3)") {
  const Circuit c = generate_benchmark(BenchmarkFamily::Ghz, 3);
  const Layout l =
      apply_layout(c, build_coupling_map("line(3)"), LayoutMethod::Vf2);
  CHECK_FALSE(l.vf2_fallback);
  // interaction graph is the path 0-1-2; embedding must keep both edges
  const CouplingMap m = build_coupling_map("line(3)");
  CHECK(m.has_edge(l.physical(0), l.physical(1)));
  CHECK(m.has_edge(l.physical(1), l.physical(2)));
}

TEST_CASE("vf2 falls back to dense when no embedding exists") {
  // K3 interaction triangle cannot embed in a line
  Circuit c;
  c.n_qubits = 3;
  c.add(Gate::cx(0, 1));
  c.add(Gate::cx(1, 2));
  c.add(Gate::cx(0, 2));
  const Layout l =
      apply_layout(c, build_coupling_map("line(3)"), LayoutMethod::Vf2);
  CHECK(l.vf2_fallback);
}

TEST_CASE("layout rejects circuits larger than the device") {
  const Circuit c = generate_benchmark(BenchmarkFamily::Ghz, 8);
  CHECK_THROWS_AS(
      apply_layout(c, build_coupling_map("lagos7"), LayoutMethod::Trivial),
      std::invalid_argument);
}

TEST_CASE("routing an already-legal circuit inserts no swaps") {
  Circuit c;
  c.n_qubits = 3;
  c.add(Gate::cx(0, 1));
  c.add(Gate::cx(1, 2));
  const CouplingMap m = build_coupling_map("line(3)");
  const Layout l = apply_layout(c, m, LayoutMethod::Trivial);
  for (RoutingMethod rm : {RoutingMethod::Basic, RoutingMethod::Lookahead,
                           RoutingMethod::Stochastic, RoutingMethod::Sabre}) {
    const RoutedCircuit r = route(c, l, m, rm, 1);
    INFO(routing_method_name(rm));
    CHECK(r.swaps_inserted == 0);
    CHECK(r.circuit.same_gates(c));
  }
}

TEST_CASE("basic routing of CX(0,2) on line(3) needs exactly one swap") {
  Circuit c;
  c.n_qubits = 3;
  c.add(Gate::cx(0, 2));
  const CouplingMap m = build_coupling_map("line(3)");
  const Layout l = apply_layout(c, m, LayoutMethod::Trivial);
  const RoutedCircuit r = route(c, l, m, RoutingMethod::Basic, 0);
  CHECK(r.swaps_inserted == 1);
  CHECK(circuit_stats(r.circuit).cnot_total == 4);
  CHECK(hardware_legal(r.circuit, m));
  CHECK(unitary_equivalent(embed(c, l, 3), r.circuit, r.final_perm));
}

TEST_CASE("routing preserves the unitary up to the recorded permutation") {
  const CouplingMap m = build_coupling_map("line(5)");
  for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    const Circuit c = random_native(5, 30, seed);
    for (LayoutMethod lm : {LayoutMethod::Trivial, LayoutMethod::Dense,
                            LayoutMethod::Vf2, LayoutMethod::Sabre}) {
      const Layout l = apply_layout(c, m, lm, seed);
      for (RoutingMethod rm :
           {RoutingMethod::Basic, RoutingMethod::Lookahead,
            RoutingMethod::Stochastic, RoutingMethod::Sabre}) {
        const RoutedCircuit r = route(c, l, m, rm, seed);
        INFO(layout_method_name(lm) << "/" << routing_method_name(rm)
                                    << " seed " << seed);
        CHECK(hardware_legal(r.circuit, m));
        CHECK(unitary_equivalent(embed(c, l, 5), r.circuit, r.final_perm));
      }
    }
  }
}

TEST_CASE("stochastic routing is deterministic per seed") {
  const CouplingMap m = build_coupling_map("ring(5)");
  const Circuit c = random_native(5, 40, 9);
  const Layout l = apply_layout(c, m, LayoutMethod::Trivial);
  const RoutedCircuit a = route(c, l, m, RoutingMethod::Stochastic, 7);
  const RoutedCircuit b = route(c, l, m, RoutingMethod::Stochastic, 7);
  CHECK(a.circuit.same_gates(b.circuit));
}

TEST_CASE("optimize cancels adjacent identical CX pairs") {
  Circuit c;
  c.n_qubits = 2;
  c.add(Gate::cx(0, 1));
  c.add(Gate::cx(0, 1));
  CHECK(optimize(c, OptLevel::O3lite).gates.empty());
}

TEST_CASE("optimize merges adjacent RZ") {
  Circuit c;
  c.n_qubits = 1;
  c.add(Gate::rz(0.3, 0));
  c.add(Gate::rz(0.4, 0));
  const Circuit o = optimize(c, OptLevel::O3lite);
  REQUIRE(o.gates.size() == 1);
  CHECK(o.gates[0].angle == Catch::Approx(0.7));
}

TEST_CASE("O0 is the identity") {
  const Circuit c = decompose_to_native(
      generate_benchmark(BenchmarkFamily::Random, 5, 12));
  CHECK(optimize(c, OptLevel::O0).same_gates(c));
}

TEST_CASE("O3lite preserves the unitary and never grows the circuit") {
  for (uint64_t seed : {5ull, 6ull, 7ull}) {
    const Circuit c = random_native(4, 50, seed);
    const Circuit o = optimize(c, OptLevel::O3lite);
    CHECK(o.gates.size() <= c.gates.size());
    CHECK(unitary_equivalent(c, o));
  }
}

TEST_CASE("O3lite resynthesizes long single-qubit runs") {
  Circuit c;
  c.n_qubits = 1;
  for (int i = 0; i < 8; ++i) {
    c.add(Gate::rz(0.1 + i * 0.2, 0));
    c.add(Gate::sx(0));
  }
  const Circuit o = optimize(c, OptLevel::O3lite);
  CHECK(o.gates.size() <= 5);
  CHECK(unitary_equivalent(c, o));
}

TEST_CASE("asap schedules a single CX at t=0 with the default duration") {
  Circuit c;
  c.n_qubits = 2;
  c.add(Gate::cx(0, 1));
  const TimedSchedule s = schedule(c, {}, SchedulingMethod::Asap);
  REQUIRE(s.gates.size() == 1);
  CHECK(s.gates[0].start == 0);
  CHECK(s.gates[0].duration == 180);
  CHECK(s.total_duration == 180);
}

TEST_CASE("alap pushes terminal gates to the makespan") {
  Circuit c;
  c.n_qubits = 2;
  c.add(Gate::cx(0, 1));
  c.add(Gate::sx(0)); // leaves qubit 1 free at the end
  c.add(Gate::x(1));
  const TimedSchedule s = schedule(c, {}, SchedulingMethod::Alap);
  for (const TimedGate& tg : s.gates) {
    // every gate without successors ends exactly at total_duration
    bool has_successor = false;
    for (const TimedGate& other : s.gates) {
      if (&other == &tg || other.start < tg.end()) continue;
      for (uint32_t q : other.gate.qubits)
        for (uint32_t p : tg.gate.qubits)
          if (q == p) has_successor = true;
    }
    if (!has_successor) CHECK(tg.end() == s.total_duration);
  }
}

TEST_CASE("alap dominates asap gate-wise with equal makespans") {
  for (uint64_t seed : {3ull, 8ull, 21ull}) {
    const Circuit c = random_native(5, 60, seed);
    const TimedSchedule a = schedule(c, {}, SchedulingMethod::Asap);
    const TimedSchedule l = schedule(c, {}, SchedulingMethod::Alap);
    REQUIRE(a.gates.size() == l.gates.size());
    CHECK(a.total_duration == l.total_duration);
    for (size_t i = 0; i < a.gates.size(); ++i)
      CHECK(a.gates[i].start <= l.gates[i].start);
  }
}

TEST_CASE("schedules have no per-qubit interval overlap") {
  for (uint64_t seed : {2ull, 13ull}) {
    const Circuit c = random_native(5, 60, seed);
    for (SchedulingMethod sm : {SchedulingMethod::Asap, SchedulingMethod::Alap}) {
      const TimedSchedule s = schedule(c, {}, sm);
      std::map<uint32_t, std::vector<std::pair<uint64_t, uint64_t>>> per_qubit;
      for (const TimedGate& tg : s.gates)
        for (uint32_t q : tg.gate.qubits)
          per_qubit[q].emplace_back(tg.start, tg.end());
      for (auto& [q, iv] : per_qubit) {
        std::sort(iv.begin(), iv.end());
        for (size_t i = 1; i < iv.size(); ++i)
          CHECK(iv[i].first >= iv[i - 1].second);
      }
    }
  }
}

TEST_CASE("transpile_variants yields 16 legal, equivalent schedules") {
  const Circuit c = generate_benchmark(BenchmarkFamily::TwoLocal, 4, 5);
  const CouplingMap m = build_coupling_map("line(4)");
  const auto variants = transpile_variants(c, m, 3);
  REQUIRE(variants.size() == 16);
  const Circuit native = decompose_to_native(c);
  for (const auto& v : variants) {
    INFO(v.schedule.provenance.layout_method << "/"
         << v.schedule.provenance.routing_method);
    CHECK(hardware_legal(v.routed.circuit, m));
    Layout l;
    l.logical_to_physical = v.schedule.provenance.layout;
    CHECK(unitary_equivalent(embed(native, l, m.n_physical), v.routed.circuit,
                             v.schedule.provenance.final_perm));
  }
}

TEST_CASE("GHZ(4) trivial-layout variants need no routing") {
  const Circuit c = generate_benchmark(BenchmarkFamily::Ghz, 4);
  const CouplingMap m = build_coupling_map("line(4)");
  const auto variants = transpile_variants(c, m, 1);
  for (const auto& v : variants) {
    if (v.schedule.provenance.layout_method == "trivial")
      CHECK(v.schedule.cx_count() == 3);
  }
}

TEST_CASE("transpile variants are deterministic per seed") {
  const Circuit c = generate_benchmark(BenchmarkFamily::Random, 5, 17);
  const CouplingMap m = build_coupling_map("lagos7");
  const auto a = transpile_variants(c, m, 5);
  const auto b = transpile_variants(c, m, 5);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].routed.circuit.same_gates(b[i].routed.circuit));
    REQUIRE(a[i].schedule.gates.size() == b[i].schedule.gates.size());
    for (size_t j = 0; j < a[i].schedule.gates.size(); ++j)
      CHECK(a[i].schedule.gates[j].start == b[i].schedule.gates[j].start);
  }
}

TEST_CASE("variant CX totals show qualitative diversity on a QAOA-like fixture") {
  // entangling ansatz over non-adjacent pairs forces routing differences
  Circuit c;
  c.n_qubits = 5;
  c.name = "qaoa_fixture";
  Rng rng(4);
  for (int rep = 0; rep < 2; ++rep) {
    for (uint32_t a = 0; a < 5; ++a)
      for (uint32_t b = a + 1; b < 5; ++b) {
        c.add(Gate::cx(a, b));
        c.add(Gate::rz(0.4 + 0.1 * a + 0.05 * b, b));
        c.add(Gate::cx(a, b));
      }
    for (uint32_t q = 0; q < 5; ++q) c.add(Gate::sx(q));
  }
  const auto variants = transpile_variants(c, build_coupling_map("line(5)"), 2);
  std::set<uint64_t> totals;
  for (const auto& v : variants) totals.insert(v.schedule.cx_count());
  CHECK(totals.size() >= 2); // variants differ in total CX
}

TEST_CASE("schedule export is line-oriented text") {
  Circuit c;
  c.n_qubits = 2;
  c.add(Gate::cx(0, 1));
  const TimedSchedule s = schedule(c, {}, SchedulingMethod::Asap);
  std::ostringstream os;
  export_schedule(s, os);
  CHECK(os.str().find("cx 0 1 @0 +180") != std::string::npos);
}
