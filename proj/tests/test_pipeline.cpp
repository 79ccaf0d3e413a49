/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qsnoop/pipeline.hpp"

using namespace qsnoop;

namespace {

/// Three small classes on the 7-qubit device keep every pipeline test fast.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.device = "lagos7";
  cfg.classes = {{"ghz", 4, 0, "ghz4"},
                 {"twolocal", 4, 1, "twolocal4"},
                 {"dj", 4, 0, "dj4"}};
  cfg.hidden = 16;
  cfg.layers = 2;
  cfg.iterations = 60;
  cfg.seed = 1;
  return cfg;
}

} // namespace

TEST_CASE("experiment configs round-trip through json") {
  ExperimentConfig cfg = tiny_config();
  cfg.mode = "simulated";
  cfg.fuzz = 0.25;
  cfg.victim = {0, 1, 2};
  const nlohmann::json j = cfg;
  const ExperimentConfig r = j.get<ExperimentConfig>();
  CHECK(r.device == cfg.device);
  CHECK(r.classes.size() == 3);
  CHECK(r.classes[1].family == "twolocal");
  CHECK(r.classes[1].gen_seed == 1);
  CHECK(r.classes[1].label == "twolocal4");
  CHECK(r.mode == "simulated");
  CHECK(r.fuzz == 0.25);
  CHECK(r.victim == std::vector<uint32_t>{0, 1, 2});
  CHECK(config_hash(r) == config_hash(cfg));
}

TEST_CASE("config hashes are stable and content-sensitive") {
  const ExperimentConfig a = tiny_config();
  CHECK(config_hash(a) == config_hash(a));
  ExperimentConfig b = a;
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("the desk corpus has ten classes with sixteen variants each") {
  const ExperimentConfig cfg = desk_config();
  REQUIRE(cfg.classes.size() == 10);
  std::set<std::string> labels;
  for (const ClassSpec& c : cfg.classes) {
    labels.insert(c.label);
    CHECK(c.n >= 8);
    CHECK(c.n <= 12);
  }
  CHECK(labels.size() == 10);
}

TEST_CASE("variant building produces 16 schedules per class") {
  const auto variants = build_variants(tiny_config());
  REQUIRE(variants.size() == 48);
  std::map<std::string, int> per_class;
  for (const auto& v : variants) ++per_class[v.class_name];
  for (const auto& [name, count] : per_class) CHECK(count == 16);
  CHECK_THROWS_AS(build_variants(ExperimentConfig{}), std::invalid_argument);
}

TEST_CASE("the oracle pipeline is reproducible end to end") {
  const ExperimentConfig cfg = tiny_config();
  const PipelineResult a = run_pipeline(cfg);
  const PipelineResult b = run_pipeline(cfg);
  CHECK(a.metrics.accuracy == b.metrics.accuracy);
  CHECK(a.metrics.loss_curve == b.metrics.loss_curve);
  CHECK(a.dataset.train_idx == b.dataset.train_idx);
  // three easily separable classes must beat chance comfortably
  CHECK(a.metrics.accuracy > 0.5);
  CHECK(a.dataset.graphs.size() == 48);
  CHECK(a.dataset.n_classes() == 3);
}

TEST_CASE("artifacts carry the config hash") {
  const ExperimentConfig cfg = tiny_config();
  const PipelineResult res = run_pipeline(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "qsnoop_art_test";
  std::filesystem::remove_all(dir);
  write_artifacts(res, dir);

  CHECK(std::filesystem::exists(dir / "dataset" / "manifest.txt"));
  std::ifstream ckpt(dir / "model.ckpt");
  std::string line;
  std::getline(ckpt, line);
  CHECK(line == "# config " + res.hash);
  std::ifstream csv(dir / "metrics.csv");
  std::getline(csv, line);
  CHECK(line == "iteration,loss,test_accuracy");
  std::getline(csv, line);
  CHECK(line == "# config " + res.hash);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps cover each axis and validate their ranges") {
  ExperimentConfig cfg = tiny_config();
  cfg.iterations = 30;

  const SweepResult h = sweep(cfg, "hidden", {8, 16});
  REQUIRE(h.metrics.size() == 2);
  CHECK(h.iters_to_plateau.size() == 2);
  CHECK(h.runtime_s.size() == 2);

  const SweepResult f = sweep(cfg, "fuzz", {0.0, 0.4});
  REQUIRE(f.metrics.size() == 2);

  CHECK_THROWS_AS(sweep(cfg, "resolution", {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(cfg, "fuzz", {0.7}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(cfg, "shots", {1.0}), std::invalid_argument);
}

TEST_CASE("sweep export uses the figure-analog csv headers") {
  SweepResult r;
  r.axis = "fuzz";
  r.values = {0.1};
  r.metrics.resize(1);
  r.iters_to_plateau = {10};
  r.runtime_s = {0.0};
  r.hash = "abc";
  std::ostringstream os;
  export_sweep_csv(r, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "fuzz_level,dataset,accuracy,precision,recall,seed");
  std::getline(is, line);
  CHECK(line == "# config abc");

  r.axis = "resolution";
  std::ostringstream os2;
  export_sweep_csv(r, os2);
  std::istringstream is2(os2.str());
  std::getline(is2, line);
  CHECK(line ==
        "resolution,dataset,accuracy,precision,recall,iters_to_plateau,seed");

  const SweepResult empty;
  std::ostringstream os3;
  CHECK_THROWS_AS(export_sweep_csv(empty, os3), std::runtime_error);
}

TEST_CASE("report export writes figure analogs and rejects empty input") {
  CHECK_THROWS_AS(export_report({}, {}, "/tmp/qsnoop_report_none", "x"),
                  std::runtime_error);

  SweepResult r;
  r.axis = "resolution";
  r.values = {2.0};
  r.metrics.resize(1);
  r.iters_to_plateau = {10};
  r.runtime_s = {0.0};
  r.hash = "abc";
  DefensePolicy pol;
  pol.kind = DefenseKind::DummyPairs;
  pol.budget = 3;
  DefenseReport rep;
  rep.undefended_accuracy = 0.9;
  rep.defended_accuracy = 0.5;
  rep.added_cx = 6;

  const auto dir = std::filesystem::temp_directory_path() / "qsnoop_rep_test";
  std::filesystem::remove_all(dir);
  export_report({r}, {{pol, rep}}, dir, "abc");
  CHECK(std::filesystem::exists(dir / "fig9_resolution.csv"));
  REQUIRE(std::filesystem::exists(dir / "defense_report.csv"));
  std::ifstream is(dir / "defense_report.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "policy,budget,ensemble,undefended_accuracy,defended_accuracy,"
        "added_1q,added_cx,makespan_delta");
  std::getline(is, line); // hash comment
  std::getline(is, line);
  CHECK(line == "dummy_pairs,3,1,0.9,0.5,0,6,0");
  // idempotent re-export
  export_report({r}, {{pol, rep}}, dir, "abc");
  CHECK(std::filesystem::exists(dir / "fig9_resolution.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a zero-budget defense cannot change the attack accuracy") {
  const ExperimentConfig cfg = tiny_config();
  DefensePolicy pol;
  pol.kind = DefenseKind::PadRetime;
  pol.budget = 0;
  const DefenseReport rep = evaluate_defense(cfg, pol);
  CHECK(rep.defended_accuracy == rep.undefended_accuracy);
  CHECK(rep.added_1q == 0);
  CHECK(rep.added_cx == 0);
  CHECK(rep.makespan_delta == 0);
}

TEST_CASE("dummy-pair defense accounts its gate costs") {
  const ExperimentConfig cfg = tiny_config();
  DefensePolicy pol;
  pol.kind = DefenseKind::DummyPairs;
  pol.budget = 3;
  pol.seed = 5;
  const DefenseReport rep = evaluate_defense(cfg, pol);
  // 3 classes x ~20% test split, 2k CX added per defended schedule
  const size_t n_test = run_pipeline(cfg).dataset.test_idx.size();
  CHECK(rep.added_cx == 6 * n_test);
}

TEST_CASE("a single-member ensemble mixture is that member's oracle trace") {
  const CouplingMap lagos = build_lagos7();
  const Circuit ghz = generate_benchmark(BenchmarkFamily::Ghz, 3);
  const EnsembleDefense e = ensemble_remap(ghz, lagos, 1, 3);
  REQUIRE(e.variants.size() == 1);
  const CnotTrace direct = oracle_trace(e.variants[0].schedule, 1800);
  const CnotTrace mixed = mixture_trace(e, 1800);
  CHECK(mixed.counts == direct.counts);
  CHECK(mixed.n_buckets == direct.n_buckets);
}

TEST_CASE("an ensemble mixture averages the per-layout counts") {
  const CouplingMap lagos = build_lagos7();
  const Circuit ghz = generate_benchmark(BenchmarkFamily::Ghz, 3);
  const EnsembleDefense e = ensemble_remap(ghz, lagos, 4, 3);
  REQUIRE(e.variants.size() == 4);
  const CnotTrace mixed = mixture_trace(e, 100000);
  std::map<std::pair<uint32_t, Edge>, double> acc;
  for (size_t i = 0; i < 4; ++i)
    for (const auto& [k, v] :
         oracle_trace(e.variants[i].schedule, 100000).counts)
      acc[k] += 0.25 * static_cast<double>(v);
  for (const auto& [k, v] : mixed.counts)
    CHECK(v == std::llround(acc[k]));
}

TEST_CASE("simulated mode recovers an exact trace on a single victim edge") {
  const TenantPartition part = partition_tenants(build_lagos7(), {1, 3});
  std::vector<uint32_t> relabel;
  const CouplingMap sub = victim_submap(part, relabel);
  CHECK(sub.n_physical == 2);
  CHECK(relabel == std::vector<uint32_t>{1, 3});
  REQUIRE(sub.edges == std::set<Edge>{{0, 1}});

  Circuit c;
  c.n_qubits = 2;
  for (int i = 0; i < 3; ++i) c.add(Gate::cx(0, 1));
  const TimedSchedule local = schedule(c, {}, SchedulingMethod::Asap);
  const TimedSchedule dev = relabel_schedule(local, relabel, 7);
  for (const TimedGate& tg : dev.gates)
    CHECK(make_edge(tg.gate.qubits[0], tg.gate.qubits[1]) == Edge{1, 3});

  CrosstalkModel m = default_crosstalk_model(part);
  m.kick_jitter_sigma = 0.0;
  m.idle_dephasing_sigma = 0.0;
  m.eps_excite = 0.0;
  m.eps_relax = 0.0;
  CgdConfig cfg;
  cfg.shots_per_bucket = 4000;
  cfg.repetitions = 10;
  cfg.seed = 2;
  cfg.window = 540;
  const CalibrationTable cal = calibrate(part, m, cfg, 3);

  const CnotTrace est = simulated_trace(dev, part, m, cfg, cal);
  CHECK(est.provenance == TraceProvenance::Inferred);
  CHECK(est.count_at(0, {1, 3}) == 3);
  CHECK(est.total() == 3);
}
