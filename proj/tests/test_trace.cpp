/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.hpp"
#include "qsnoop/trace.hpp"

using namespace qsnoop;

namespace {

CrosstalkModel noiseless(const TenantPartition& part) {
  CrosstalkModel m = default_crosstalk_model(part);
  m.kick_jitter_sigma = 0.0;
  m.idle_dephasing_sigma = 0.0;
  m.eps_excite = 0.0;
  m.eps_relax = 0.0;
  return m;
}

} // namespace

TEST_CASE("oracle trace reproduces the published bucket totals") {
  const TimedSchedule s = fixtures::fig6_schedule();
  REQUIRE(s.total_duration == 6360);
  const CnotTrace t = oracle_trace(s, 2000);
  REQUIRE(t.n_buckets == 4);
  CHECK(t.per_bucket_totals() == std::vector<double>{1, 2, 2, 1});
  CHECK(t.count_at(1, {0, 1}) == 1);
  CHECK(t.count_at(1, {2, 3}) == 1);
  CHECK(t.count_at(2, {0, 1}) == 1);
  CHECK(t.count_at(2, {2, 3}) == 1);
  CHECK(t.count_at(0, {0, 1}) == 1);
  CHECK(t.count_at(3, {0, 1}) == 1);
}

TEST_CASE("oracle trace conserves the CX total at every grid") {
  const TimedSchedule s = fixtures::fig6_schedule();
  for (uint64_t tb : {uint64_t{180}, uint64_t{777}, uint64_t{2000},
                      uint64_t{6360}, uint64_t{100000}}) {
    const CnotTrace t = oracle_trace(s, tb);
    CHECK(t.total() == static_cast<int64_t>(s.cx_count()));
  }
}

TEST_CASE("a bucket covering the whole schedule collapses to one column") {
  const TimedSchedule s = fixtures::fig6_schedule();
  const CnotTrace t = oracle_trace(s, 7000);
  CHECK(t.n_buckets == 1);
  CHECK(t.count_at(0, {0, 1}) == 4);
  CHECK(t.count_at(0, {2, 3}) == 2);
}

TEST_CASE("bucket durations below one CX are rejected") {
  const TimedSchedule s = fixtures::fig6_schedule();
  CHECK_THROWS_AS(oracle_trace(s, 100), std::invalid_argument);
}

TEST_CASE("coarsening by a factor matches the coarser oracle") {
  const TimedSchedule s = fixtures::fig6_schedule();
  const CnotTrace fine = oracle_trace(s, 1000);
  const CnotTrace merged = coarsen_trace(fine, 2);
  const CnotTrace coarse = oracle_trace(s, 2000);
  CHECK(merged.bucket_duration == 2000);
  CHECK(merged.n_buckets == coarse.n_buckets);
  CHECK(merged.counts == coarse.counts);
  CHECK_THROWS_AS(coarsen_trace(fine, 0), std::invalid_argument);
}

TEST_CASE("fuzzing semantics") {
  const CnotTrace t = oracle_trace(fixtures::fig6_schedule(), 2000);
  REQUIRE(uint64_t{t.n_qubits} * t.n_buckets == 16);

  SECTION("level zero is the identity up to provenance") {
    const CnotTrace f = fuzz_trace(t, 0.0, 1);
    CHECK(f.counts == t.counts);
    CHECK(f.provenance == TraceProvenance::Fuzzed);
  }

  SECTION("a level rounding down to zero picks is also the identity") {
    // floor(0.03 * 16) = 0
    const CnotTrace f = fuzz_trace(t, 0.03, 1);
    CHECK(f.counts == t.counts);
  }

  SECTION("level 0.5 perturbs at most 8 of the 16 cells") {
    const CnotTrace f = fuzz_trace(t, 0.5, 7);
    size_t changed = 0;
    std::set<std::pair<uint32_t, Edge>> keys;
    for (const auto& [k, v] : t.counts) keys.insert(k);
    for (const auto& [k, v] : f.counts) keys.insert(k);
    for (const auto& k : keys) {
      const auto a = t.counts.find(k);
      const auto b = f.counts.find(k);
      const int64_t va = a == t.counts.end() ? 0 : a->second;
      const int64_t vb = b == f.counts.end() ? 0 : b->second;
      if (va != vb) {
        ++changed;
        CHECK(std::abs(va - vb) <= 2);
      }
      CHECK(vb >= 0);
    }
    CHECK(changed >= 1);
    CHECK(changed <= 8);
  }

  SECTION("fuzzing is deterministic per seed") {
    CHECK(fuzz_trace(t, 0.4, 3).counts == fuzz_trace(t, 0.4, 3).counts);
    CHECK(fuzz_trace(t, 0.4, 3).counts != fuzz_trace(t, 0.4, 4).counts);
  }

  SECTION("perturbed edges stay inside the declared universe") {
    const std::vector<Edge> universe{{0, 1}, {1, 2}, {2, 3}};
    const CnotTrace f = fuzz_trace(t, 0.5, 11, universe);
    for (const auto& [k, v] : f.counts) {
      const bool known = k.second == Edge{0, 1} || k.second == Edge{1, 2} ||
                         k.second == Edge{2, 3};
      CHECK(known);
    }
  }

  SECTION("levels outside [0, 0.5] are rejected") {
    CHECK_THROWS_AS(fuzz_trace(t, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(fuzz_trace(t, 0.6, 1), std::invalid_argument);
  }
}

TEST_CASE("calibration fits the injected phase slopes") {
  const TenantPartition p = partition_tenants(build_lagos7(), {0, 1});
  CrosstalkModel m = noiseless(p);
  m.sensitivity[6] = Sensitivity::Insensitive;
  CgdConfig cfg;
  cfg.shots_per_bucket = 4000;
  cfg.repetitions = 10;
  cfg.seed = 2;

  const CalibrationTable cal = calibrate(p, m, cfg, 5);
  REQUIRE(cal.edges == std::vector<Edge>{{0, 1}});
  CHECK(cal.max_k == 5);
  // adjacent snoop: kappa0; two hops: kappa0 / 2
  CHECK(cal.response_of(2, {0, 1}) == Catch::Approx(0.35).margin(0.02));
  CHECK(cal.response_of(3, {0, 1}) == Catch::Approx(0.35).margin(0.02));
  CHECK(cal.response_of(5, {0, 1}) == Catch::Approx(0.175).margin(0.02));
  CHECK(cal.response_of(6, {0, 1}) == Catch::Approx(0.0).margin(0.01));
  // noiseless idle probe leaves every shot in |0>
  CHECK(cal.baseline.at(2) == Catch::Approx(4000.0));
  CHECK_THROWS_AS(calibrate(p, m, cfg, 0), std::invalid_argument);
}

TEST_CASE("trace inference recovers exact small counts on a single edge") {
  const TenantPartition p = partition_tenants(build_lagos7(), {0, 1});
  const CrosstalkModel m = noiseless(p);
  CgdConfig cfg;
  cfg.shots_per_bucket = 4000;
  cfg.repetitions = 10;
  cfg.seed = 2;
  cfg.window = 5 * 180;
  const CalibrationTable cal = calibrate(p, m, cfg, 5);

  for (uint32_t k = 0; k <= 5; ++k) {
    CgdConfig ck = cfg;
    ck.seed = 1000 + k;
    const ZeroCountTrace obs = simulate_cgd(
        detail::probe_schedule({0, 1}, k, 7, {}), p, m, ck);
    const CnotTrace est = estimate_trace(obs, cal, p);
    CHECK_FALSE(est.degraded);
    CHECK(est.provenance == TraceProvenance::Inferred);
    CHECK(est.count_at(0, {0, 1}) == k);
    CHECK(est.total() == k);
  }
}

TEST_CASE("an idle observation estimates the all-zero trace") {
  const TenantPartition p = partition_tenants(build_lagos7(), {0, 1});
  const CrosstalkModel m = noiseless(p);
  CgdConfig cfg;
  cfg.shots_per_bucket = 2000;
  cfg.repetitions = 5;
  cfg.seed = 4;
  const CalibrationTable cal = calibrate(p, m, cfg, 3);

  Circuit idle;
  idle.n_qubits = 7;
  idle.add(Gate::delay(900, 0));
  const ZeroCountTrace obs =
      simulate_cgd(schedule(idle, {}, SchedulingMethod::Asap), p, m, cfg);
  const CnotTrace est = estimate_trace(obs, cal, p);
  CHECK(est.total() == 0);
}

TEST_CASE("indistinguishable edges flag the estimate as degraded") {
  // both victim edges of the 0-1-2 path share qubit 1, and every snoop sits
  // on the far side of it, so the ideal response columns are identical and
  // the per-edge split is unidentifiable
  const TenantPartition p = partition_tenants(build_lagos7(), {0, 1, 2});
  CalibrationTable cal;
  cal.snoop = {3, 4, 5, 6};
  cal.edges = {{0, 1}, {1, 2}};
  cal.shots = 10000;
  cal.max_k = 3;
  const double resp[4] = {0.35, 0.0875, 0.175, 0.0875};
  for (size_t si = 0; si < 4; ++si) {
    for (const Edge& e : cal.edges) cal.response[{cal.snoop[si], e}] = resp[si];
    cal.baseline[cal.snoop[si]] = 10000.0;
  }

  ZeroCountTrace obs;
  obs.snoop = cal.snoop;
  obs.n_buckets = 1;
  obs.shots = 10000;
  obs.window = 360;
  obs.repetitions = 1;
  obs.zero_mean.resize(4);
  obs.zero_std.assign(4, {0.0});
  for (size_t si = 0; si < 4; ++si) {
    // exactly 2 concurrent CX worth of phase on each snoop
    const double phi = 2.0 * resp[si];
    const double p1 = std::sin(phi / 2.0) * std::sin(phi / 2.0);
    obs.zero_mean[si] = {10000.0 * (1.0 - p1)};
  }
  obs.joint_zero_mean = {0.0};

  const CnotTrace est = estimate_trace(obs, cal, p);
  CHECK(est.degraded);
  // the projected total survives even though the split is arbitrary
  CHECK(est.total() == 2);
}

TEST_CASE("nnls solves the small systems used by the estimator") {
  SECTION("identity system") {
    const auto x = detail::nnls({{1, 0}, {0, 1}}, {3, 2});
    REQUIRE(x.size() == 2);
    CHECK(x[0] == Catch::Approx(3.0));
    CHECK(x[1] == Catch::Approx(2.0));
  }
  SECTION("negative least-squares component clamps to zero") {
    const auto x = detail::nnls({{1, 0}, {0, 1}}, {1, -1});
    CHECK(x[0] == Catch::Approx(1.0));
    CHECK(x[1] == 0.0);
  }
  SECTION("overdetermined column averages the residual") {
    const auto x = detail::nnls({{1}, {1}}, {1, 3});
    CHECK(x[0] == Catch::Approx(2.0));
  }
  SECTION("rank-deficient row conserves the projected total") {
    const auto x = detail::nnls({{0.35, 0.35}}, {0.7});
    CHECK(x[0] + x[1] == Catch::Approx(2.0));
    CHECK(x[0] >= 0.0);
    CHECK(x[1] >= 0.0);
  }
}

TEST_CASE("phase inversion is exact on the noiseless observable") {
  // zero = N cos^2(phi/2) inverts back to phi
  for (double phi : {0.0, 0.35, 0.7, 1.75, 3.0}) {
    const double p1 = std::sin(phi / 2.0) * std::sin(phi / 2.0);
    const double zero = 10000.0 * (1.0 - p1);
    CHECK(detail::phase_of_zero_count(zero, 10000, 0.0, 0.0) ==
          Catch::Approx(phi).margin(1e-9));
  }
  // readout correction undoes the asymmetric flips in expectation
  const double p1 = 0.25;
  const double read1 = p1 * (1.0 - 0.03) + (1.0 - p1) * 0.01;
  const double zero = 10000.0 * (1.0 - read1);
  CHECK(detail::phase_of_zero_count(zero, 10000, 0.01, 0.03) ==
        Catch::Approx(2.0 * std::asin(std::sqrt(0.25))).margin(1e-9));
}

TEST_CASE("trace serialization round-trips") {
  CnotTrace t = oracle_trace(fixtures::fig6_schedule(), 2000);
  t.label = "twolocal_fig6";
  t.family = "twolocal";
  std::ostringstream os;
  save_trace(t, os);
  std::istringstream is(os.str());
  const CnotTrace r = load_trace(is);
  CHECK(r.bucket_duration == t.bucket_duration);
  CHECK(r.n_buckets == t.n_buckets);
  CHECK(r.n_qubits == t.n_qubits);
  CHECK(r.label == t.label);
  CHECK(r.family == t.family);
  CHECK(r.counts == t.counts);
  CHECK(r.provenance == TraceProvenance::Oracle);

  std::istringstream bad("0 0 1 not_a_count oracle\n");
  CHECK_THROWS_AS(load_trace(bad), std::invalid_argument);
}
