/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_PIPELINE_HPP
#define QSNOOP_PIPELINE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsnoop/defense.hpp"
#include "qsnoop/gcn.hpp"
#include "qsnoop/generators.hpp"
#include "qsnoop/graph.hpp"
#include "qsnoop/schedule.hpp"
#include "qsnoop/sidechannel.hpp"
#include "qsnoop/trace.hpp"

namespace qsnoop {

struct ClassSpec {
  std::string family;
  uint32_t n = 0;
  uint64_t gen_seed = 0;
  std::string label; // class name; defaults to family+n
};

struct ExperimentConfig {
  std::string device = "guadalupe16";
  std::vector<ClassSpec> classes;
  std::string mode = "oracle"; // oracle | simulated
  double resolution = 10.0;
  double fuzz = 0.0;
  double split = 0.8;
  uint32_t hidden = 64;
  uint32_t layers = 3;
  uint32_t iterations = 400;
  double learning_rate = 0.01;
  uint64_t seed = 1;
  std::vector<uint32_t> victim; // physical ids, simulated mode only
};

inline void to_json(nlohmann::json& j, const ClassSpec& c) {
  j = {{"family", c.family}, {"n", c.n}, {"seed", c.gen_seed},
       {"label", c.label}};
}

inline void from_json(const nlohmann::json& j, ClassSpec& c) {
  j.at("family").get_to(c.family);
  j.at("n").get_to(c.n);
  c.gen_seed = j.value("seed", uint64_t{0});
  c.label = j.value("label", std::string{});
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"device", c.device},         {"classes", c.classes},
       {"mode", c.mode},             {"resolution", c.resolution},
       {"fuzz", c.fuzz},             {"split", c.split},
       {"hidden", c.hidden},         {"layers", c.layers},
       {"iterations", c.iterations}, {"learning_rate", c.learning_rate},
       {"seed", c.seed},             {"victim", c.victim}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c.device = j.value("device", c.device);
  if (j.contains("classes")) j.at("classes").get_to(c.classes);
  c.mode = j.value("mode", c.mode);
  c.resolution = j.value("resolution", c.resolution);
  c.fuzz = j.value("fuzz", c.fuzz);
  c.split = j.value("split", c.split);
  c.hidden = j.value("hidden", c.hidden);
  c.layers = j.value("layers", c.layers);
  c.iterations = j.value("iterations", c.iterations);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  if (j.contains("victim")) j.at("victim").get_to(c.victim);
}

/// FNV-1a content hash of the canonical config dump, for file provenance.
inline std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = nlohmann::json(cfg).dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

/// The standard desk-scale corpus: 10 classes at 8-12 qubits, 16 transpile
/// variants each on the 16-qubit device.
inline ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.resolution = 4.0;
  cfg.learning_rate = 0.005;
  cfg.iterations = 800;
  cfg.classes = {
      {"ghz", 10, 0, "ghz10"},        {"dj", 9, 0, "dj9"},
      {"graphstate", 8, 0, "graphstate8"}, {"qft", 8, 0, "qft8"},
      {"adder", 8, 0, "adder8"},      {"twolocal", 10, 1, "twolocal10"},
      {"qpe", 8, 0, "qpe8"},          {"random", 10, 2, "random10"},
      {"random", 12, 3, "random12"},  {"twolocal", 12, 4, "twolocal12"},
  };
  return cfg;
}

/// One transpiled variant of one benchmark class.
struct VariantRecord {
  std::string class_name;
  Circuit logical;
  TimedSchedule schedule;
};

inline std::vector<VariantRecord> build_variants(const ExperimentConfig& cfg) {
  if (cfg.classes.empty()) throw std::invalid_argument("config has no classes");
  const CouplingMap map = build_coupling_map(cfg.device);
  std::vector<VariantRecord> out;
  for (size_t ci = 0; ci < cfg.classes.size(); ++ci) {
    const ClassSpec& spec = cfg.classes[ci];
    Circuit c = generate_benchmark(family_from_name(spec.family), spec.n,
                                   spec.gen_seed);
    const std::string label =
        spec.label.empty() ? spec.family + std::to_string(spec.n) : spec.label;
    const auto variants = transpile_variants(c, map, cfg.seed + ci);
    for (const auto& v : variants)
      out.push_back({label, c, v.schedule});
  }
  return out;
}

/// Oracle-mode traces: exact bucketed counts plus the configured synthetic
/// fuzz, bucketed directly at tb = resolution x CX duration.
inline std::vector<LabeledTrace> oracle_traces(
    const std::vector<VariantRecord>& variants, const ExperimentConfig& cfg) {
  std::vector<LabeledTrace> out;
  const CouplingMap map = build_coupling_map(cfg.device);
  const std::vector<Edge> universe(map.edges.begin(), map.edges.end());
  for (size_t i = 0; i < variants.size(); ++i) {
    const uint64_t tb = static_cast<uint64_t>(
        cfg.resolution * static_cast<double>(variants[i].schedule.durations.cx));
    CnotTrace t = oracle_trace(variants[i].schedule, tb);
    t.label = variants[i].class_name;
    if (cfg.fuzz > 0.0)
      t = fuzz_trace(t, cfg.fuzz, cfg.seed + 0x777 + i, universe);
    out.push_back({std::move(t), variants[i].class_name});
  }
  return out;
}

struct PipelineResult {
  Metrics metrics;
  Dataset dataset;
  GcnModel model;
  std::string hash;
};

inline TrainConfig train_config_of(const ExperimentConfig& cfg) {
  TrainConfig tc;
  tc.iterations = cfg.iterations;
  tc.learning_rate = cfg.learning_rate;
  tc.seed = cfg.seed;
  return tc;
}

/// End-to-end attack: benchmarks -> 16 variants -> traces -> graphs -> GCN.
/// Fully reproducible from (config, seed).
inline PipelineResult run_pipeline(const ExperimentConfig& cfg) {
  const auto variants = build_variants(cfg);
  const auto traces = oracle_traces(variants, cfg);
  PipelineResult res;
  res.hash = config_hash(cfg);
  res.dataset = build_dataset(traces, cfg.resolution, cfg.split, cfg.seed);
  res.model =
      init_model(static_cast<uint32_t>(res.dataset.feature_width()), cfg.hidden,
                 static_cast<uint32_t>(res.dataset.n_classes()), cfg.layers,
                 cfg.seed);
  res.metrics = train(res.model, res.dataset, train_config_of(cfg));
  return res;
}

/// Write dataset, checkpoint and metric curves under `dir`; every file
/// records the config hash.
inline void write_artifacts(const PipelineResult& res,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_dataset(res.dataset, dir / "dataset");
  {
    std::ofstream os(dir / "model.ckpt");
    os << "# config " << res.hash << "\n";
    GcnModel m = res.model;
    save_model(m, os);
  }
  {
    std::ofstream os(dir / "metrics.csv");
    os << "iteration,loss,test_accuracy\n";
    os << "# config " << res.hash << "\n";
    os.precision(17);
    for (size_t i = 0; i < res.metrics.loss_curve.size(); ++i)
      os << res.metrics.loss_curve[i].first << ","
         << res.metrics.loss_curve[i].second << ","
         << res.metrics.acc_curve[i].second << "\n";
  }
}

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<Metrics> metrics;
  std::vector<uint32_t> iters_to_plateau; // to 90% of final accuracy
  std::vector<double> runtime_s;
  std::string hash;
  std::string dataset_name = "desk";
};

/// One full pipeline point per axis value; the dataset is shared where the
/// axis allows (hidden width, fuzz level).
inline SweepResult sweep(const ExperimentConfig& cfg, const std::string& axis,
                         const std::vector<double>& values) {
  SweepResult res;
  res.axis = axis;
  res.values = values;
  res.hash = config_hash(cfg);
  const auto clock = []() { return std::chrono::steady_clock::now(); };

  auto record = [&](const Metrics& m, double secs) {
    res.metrics.push_back(m);
    res.iters_to_plateau.push_back(iterations_to_fraction(m.acc_curve, 0.9));
    res.runtime_s.push_back(secs);
  };

  if (axis == "resolution") {
    for (double v : values) {
      if (v < 1.0 || v > 15.0)
        throw std::invalid_argument("resolution outside 1..15");
      ExperimentConfig point = cfg;
      point.resolution = v;
      const auto t0 = clock();
      record(run_pipeline(point).metrics,
             std::chrono::duration<double>(clock() - t0).count());
    }
  } else if (axis == "hidden") {
    const auto variants = build_variants(cfg);
    const auto traces = oracle_traces(variants, cfg);
    const Dataset d = build_dataset(traces, cfg.resolution, cfg.split, cfg.seed);
    for (double v : values) {
      ExperimentConfig point = cfg;
      point.hidden = static_cast<uint32_t>(v);
      const auto t0 = clock();
      GcnModel m = init_model(static_cast<uint32_t>(d.feature_width()),
                              point.hidden,
                              static_cast<uint32_t>(d.n_classes()),
                              point.layers, point.seed);
      record(train(m, d, train_config_of(point)),
             std::chrono::duration<double>(clock() - t0).count());
    }
  } else if (axis == "fuzz") {
    const auto variants = build_variants(cfg);
    for (double v : values) {
      if (v < 0.0 || v > 0.5)
        throw std::invalid_argument("fuzz level outside 0..0.5");
      ExperimentConfig point = cfg;
      point.fuzz = v;
      const auto traces = oracle_traces(variants, point);
      const auto t0 = clock();
      const Dataset d =
          build_dataset(traces, point.resolution, point.split, point.seed);
      GcnModel m = init_model(static_cast<uint32_t>(d.feature_width()),
                              point.hidden,
                              static_cast<uint32_t>(d.n_classes()),
                              point.layers, point.seed);
      record(train(m, d, train_config_of(point)),
             std::chrono::duration<double>(clock() - t0).count());
    }
  } else {
    throw std::invalid_argument("unknown sweep axis: " + axis);
  }
  return res;
}

struct DefenseReport {
  double undefended_accuracy = 0.0;
  double defended_accuracy = 0.0;
  uint64_t added_1q = 0;
  uint64_t added_cx = 0;
  int64_t makespan_delta = 0; // summed over defended test schedules
};

/// Weighted per-layout oracle traces combined into the attacker-visible
/// mixture; counts are rounded back to integers.
inline CnotTrace mixture_trace(const EnsembleDefense& e, uint64_t tb) {
  std::map<std::pair<uint32_t, Edge>, double> acc;
  CnotTrace out;
  for (size_t i = 0; i < e.variants.size(); ++i) {
    const CnotTrace t = oracle_trace(e.variants[i].schedule, tb);
    out.n_buckets = std::max(out.n_buckets, t.n_buckets);
    out.n_qubits = t.n_qubits;
    out.bucket_duration = tb;
    for (const auto& [k, v] : t.counts)
      acc[k] += e.weights[i] * static_cast<double>(v);
  }
  out.provenance = TraceProvenance::Oracle;
  for (const auto& [k, v] : acc) {
    const int64_t r = std::llround(v);
    if (r > 0) out.counts[k] = r;
  }
  return out;
}

/// Trains the attack on undefended traces, then replays the test split
/// through the defense with identical seeds and reports the accuracy delta
/// and gate-count costs.
inline DefenseReport evaluate_defense(const ExperimentConfig& cfg,
                                      const DefensePolicy& policy) {
  const auto variants = build_variants(cfg);
  const auto traces = oracle_traces(variants, cfg);
  Dataset d = build_dataset(traces, cfg.resolution, cfg.split, cfg.seed);
  GcnModel m = init_model(static_cast<uint32_t>(d.feature_width()), cfg.hidden,
                          static_cast<uint32_t>(d.n_classes()), cfg.layers,
                          cfg.seed);
  const Metrics undefended = train(m, d, train_config_of(cfg));

  DefenseReport rep;
  rep.undefended_accuracy = undefended.accuracy;

  const CouplingMap map = build_coupling_map(cfg.device);
  const std::vector<Edge> universe(map.edges.begin(), map.edges.end());
  std::vector<std::pair<int, int>> pairs;
  for (size_t gi : d.test_idx) {
    const VariantRecord& rec = variants[gi]; // build_dataset keeps order
    const uint64_t tb = static_cast<uint64_t>(
        cfg.resolution * static_cast<double>(rec.schedule.durations.cx));
    CnotTrace t;
    switch (policy.kind) {
      case DefenseKind::PadRetime: {
        const DefendedSchedule ds =
            pad_retime(rec.schedule, policy.budget, policy.seed + gi);
        rep.added_1q += ds.added_1q;
        rep.makespan_delta += ds.makespan_delta;
        t = oracle_trace(ds.schedule, tb);
        break;
      }
      case DefenseKind::DummyPairs: {
        const DefendedSchedule ds =
            insert_dummy_pairs(rec.schedule, policy.budget, policy.seed + gi);
        rep.added_cx += ds.added_cx;
        rep.makespan_delta += ds.makespan_delta;
        t = oracle_trace(ds.schedule, tb);
        break;
      }
      case DefenseKind::EnsembleRemap: {
        const EnsembleDefense e = ensemble_remap(
            rec.logical, map, policy.ensemble, policy.seed + gi,
            rec.schedule.durations);
        t = mixture_trace(e, tb);
        break;
      }
    }
    t.label = rec.class_name;
    if (cfg.fuzz > 0.0)
      t = fuzz_trace(t, cfg.fuzz, cfg.seed + 0x777 + gi, universe);
    CircuitGraph g = encode_graph(t, cfg.resolution, d.b_max);
    g.label = d.graphs[gi].label;
    pairs.emplace_back(g.label, predict(m, g));
  }
  rep.defended_accuracy =
      metrics_from_pairs(pairs, d.n_classes()).accuracy;
  return rep;
}

// ---------------------------------------------------------------------------
// Report export (figure-analog CSVs).

inline void export_sweep_csv(const SweepResult& r, std::ostream& os) {
  if (r.metrics.empty()) throw std::runtime_error("NoRuns");
  os.precision(12);
  if (r.axis == "fuzz") {
    os << "fuzz_level,dataset,accuracy,precision,recall,seed\n";
    os << "# config " << r.hash << "\n";
    for (size_t i = 0; i < r.values.size(); ++i)
      os << r.values[i] << "," << r.dataset_name << ","
         << r.metrics[i].accuracy << "," << r.metrics[i].macro_precision << ","
         << r.metrics[i].macro_recall << "," << 0 << "\n";
  } else {
    os << r.axis << ",dataset,accuracy,precision,recall,iters_to_plateau,seed\n";
    os << "# config " << r.hash << "\n";
    for (size_t i = 0; i < r.values.size(); ++i)
      os << r.values[i] << "," << r.dataset_name << ","
         << r.metrics[i].accuracy << "," << r.metrics[i].macro_precision << ","
         << r.metrics[i].macro_recall << "," << r.iters_to_plateau[i] << ","
         << 0 << "\n";
  }
}

/// One CSV per figure analog; empty input is an error, re-export overwrites
/// idempotently.
inline void export_report(const std::vector<SweepResult>& sweeps,
                          const std::vector<std::pair<DefensePolicy,
                                                      DefenseReport>>& defenses,
                          const std::filesystem::path& dir,
                          const std::string& hash) {
  if (sweeps.empty() && defenses.empty()) throw std::runtime_error("NoRuns");
  std::filesystem::create_directories(dir);
  for (const SweepResult& r : sweeps) {
    std::string name = "sweep_" + r.axis + ".csv";
    if (r.axis == "resolution") name = "fig9_resolution.csv";
    else if (r.axis == "hidden") name = "fig10_hidden.csv";
    else if (r.axis == "fuzz") name = "fig11_fuzz.csv";
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    export_sweep_csv(r, os);
  }
  if (!defenses.empty()) {
    std::ofstream os(dir / "defense_report.csv");
    if (!os)
      throw std::runtime_error("cannot write " +
                               (dir / "defense_report.csv").string());
    os << "policy,budget,ensemble,undefended_accuracy,defended_accuracy,"
          "added_1q,added_cx,makespan_delta\n";
    os << "# config " << hash << "\n";
    os.precision(12);
    for (const auto& [p, rep] : defenses)
      os << defense_kind_name(p.kind) << "," << p.budget << "," << p.ensemble
         << "," << rep.undefended_accuracy << "," << rep.defended_accuracy
         << "," << rep.added_1q << "," << rep.added_cx << ","
         << rep.makespan_delta << "\n";
  }
}

// ---------------------------------------------------------------------------
// Simulated-trace mode: the end-to-end demonstration path. The victim's
// circuit is transpiled onto the induced victim subgraph, the CGD protocol
// observes it and the trace is inferred from calibrated zero counts.

/// Induced subgraph on the victim allocation, relabeled 0..v-1 (sorted).
inline CouplingMap victim_submap(const TenantPartition& part,
                                 std::vector<uint32_t>& relabel) {
  relabel.assign(part.victim_qubits.begin(), part.victim_qubits.end());
  std::map<uint32_t, uint32_t> inv;
  for (uint32_t i = 0; i < relabel.size(); ++i) inv[relabel[i]] = i;
  CouplingMap sub;
  sub.n_physical = static_cast<uint32_t>(relabel.size());
  sub.name = part.map.name + "_victim";
  for (const Edge& e : part.victim_edges())
    sub.edges.insert(make_edge(inv[e.first], inv[e.second]));
  sub.validate();
  return sub;
}

/// Rewrite a schedule over the victim submap back to device physical ids.
inline TimedSchedule relabel_schedule(const TimedSchedule& s,
                                      const std::vector<uint32_t>& relabel,
                                      uint32_t n_device) {
  TimedSchedule out = s;
  out.n_qubits = n_device;
  for (TimedGate& tg : out.gates) {
    Gate g = tg.gate;
    for (uint32_t& q : g.qubits) q = relabel[q];
    tg.gate = std::move(g);
  }
  return out;
}

/// One simulated-trace observation of a victim schedule (device-labeled).
inline CnotTrace simulated_trace(const TimedSchedule& device_sched,
                                 const TenantPartition& part,
                                 const CrosstalkModel& model,
                                 const CgdConfig& cfg,
                                 const CalibrationTable& cal) {
  const ZeroCountTrace z = simulate_cgd(device_sched, part, model, cfg);
  return estimate_trace(z, cal, part);
}

} // namespace qsnoop

#endif
