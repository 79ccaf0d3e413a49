/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 *
 * Pipeline driver. Every subcommand exits 0 on success and nonzero with a
 * stage-tagged diagnostic on stderr otherwise.
 */

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsnoop/pipeline.hpp"
#include "qsnoop/qasm.hpp"

using namespace qsnoop;

namespace {

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return desk_config();
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  nlohmann::json j;
  is >> j;
  ExperimentConfig cfg = desk_config();
  j.get_to(cfg);
  return cfg;
}

Circuit load_qasm_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_qasm(ss.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::vector<LabeledTrace> traces_of(const ExperimentConfig& cfg) {
  return oracle_traces(build_variants(cfg), cfg);
}

GcnModel model_for(const Dataset& d, const ExperimentConfig& cfg) {
  return init_model(static_cast<uint32_t>(d.feature_width()), cfg.hidden,
                    static_cast<uint32_t>(d.n_classes()), cfg.layers, cfg.seed);
}

void print_metrics(const Metrics& m) {
  std::cout.precision(6);
  std::cout << "accuracy,precision,recall\n"
            << m.accuracy << "," << m.macro_precision << "," << m.macro_recall
            << "\n";
}

DefensePolicy policy_of(const std::string& kind, uint64_t budget,
                        uint32_t ensemble, uint64_t seed) {
  DefensePolicy pol;
  if (kind == "pad_retime") pol.kind = DefenseKind::PadRetime;
  else if (kind == "dummy_pairs") pol.kind = DefenseKind::DummyPairs;
  else if (kind == "ensemble_remap") pol.kind = DefenseKind::EnsembleRemap;
  else throw std::runtime_error("unknown defense kind " + kind);
  pol.budget = budget;
  pol.ensemble = ensemble;
  pol.seed = seed;
  return pol;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsnoop: crosstalk side-channel laboratory"};
  app.require_subcommand(1);

  std::string config_path, family = "ghz", device = "guadalupe16";
  std::string in_path, out_path, dataset_dir, model_path, metrics_path;
  std::string axis = "fuzz", values_csv, kind = "pad_retime";
  uint32_t n_qubits = 4, ensemble = 4;
  uint64_t seed = 1, budget = 8;
  std::string res_csv = "1,4,8,15";
  std::string hid_csv = "8,16,32,64";
  std::string fuzz_csv = "0,0.1,0.2,0.3,0.4,0.5";

  auto* gen = app.add_subcommand("gen", "generate a benchmark circuit");
  gen->add_option("--family", family, "ghz|dj|graphstate|qft|adder|twolocal|qpe|random");
  gen->add_option("--n", n_qubits, "qubit count");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output QASM file (default stdout)");

  auto* transpile = app.add_subcommand("transpile", "emit all 16 variants");
  transpile->add_option("--in", in_path, "input QASM file")->required();
  transpile->add_option("--device", device, "coupling map spec");
  transpile->add_option("--seed", seed, "transpile seed");
  transpile->add_option("--out", out_path, "output directory")->required();

  auto* trace = app.add_subcommand("trace", "oracle traces for a config");
  trace->add_option("--config", config_path, "experiment config JSON");
  trace->add_option("--out", out_path, "output directory")->required();

  auto* encode = app.add_subcommand("encode", "build a graph dataset");
  encode->add_option("--config", config_path, "experiment config JSON");
  encode->add_option("--out", out_path, "dataset directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train a GCN on a dataset");
  train_cmd->add_option("--config", config_path, "experiment config JSON");
  train_cmd->add_option("--dataset", dataset_dir, "dataset directory")->required();
  train_cmd->add_option("--model", model_path, "checkpoint path")->required();
  train_cmd->add_option("--metrics", metrics_path, "metrics CSV path");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--dataset", dataset_dir, "dataset directory")->required();
  eval_cmd->add_option("--model", model_path, "checkpoint path")->required();

  auto* attack = app.add_subcommand("attack", "end-to-end attack pipeline");
  attack->add_option("--config", config_path, "experiment config JSON");
  attack->add_option("--out", out_path, "artifact directory")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis");
  sweep_cmd->add_option("--config", config_path, "experiment config JSON");
  sweep_cmd->add_option("--axis", axis, "resolution|hidden|fuzz");
  sweep_cmd->add_option("--values", values_csv, "comma-separated axis values");
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* defend = app.add_subcommand("defend", "evaluate a defense policy");
  defend->add_option("--config", config_path, "experiment config JSON");
  defend->add_option("--kind", kind, "pad_retime|dummy_pairs|ensemble_remap");
  defend->add_option("--budget", budget, "pad/dummy budget");
  defend->add_option("--ensemble", ensemble, "ensemble size M");
  defend->add_option("--seed", seed, "defense seed");
  defend->add_option("--out", out_path, "output directory")->required();

  auto* report = app.add_subcommand("report", "figure-analog CSV bundle");
  report->add_option("--config", config_path, "experiment config JSON");
  report->add_option("--resolution-values", res_csv, "resolution sweep points");
  report->add_option("--hidden-values", hid_csv, "hidden width sweep points");
  report->add_option("--fuzz-values", fuzz_csv, "fuzz sweep points");
  report->add_option("--budget", budget, "defense budget");
  report->add_option("--ensemble", ensemble, "ensemble size M");
  report->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  const CLI::App* cmd = app.get_subcommands().front();

  auto parse_values = [](const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
  };

  try {
    if (cmd == gen) {
      const Circuit c =
          generate_benchmark(family_from_name(family), n_qubits, seed);
      const std::string qasm = emit_qasm(c);
      if (out_path.empty()) std::cout << qasm;
      else write_text(out_path, qasm);
    } else if (cmd == transpile) {
      const Circuit c = load_qasm_file(in_path);
      const CouplingMap map = build_coupling_map(device);
      const auto variants = transpile_variants(c, map, seed);
      std::filesystem::create_directories(out_path);
      for (size_t i = 0; i < variants.size(); ++i) {
        std::ostringstream os;
        export_schedule(variants[i].schedule, os);
        std::ostringstream name;
        name << "variant_" << (i < 10 ? "0" : "") << i << ".txt";
        write_text(std::filesystem::path(out_path) / name.str(), os.str());
      }
      std::cout << variants.size() << " variants written to " << out_path
                << "\n";
    } else if (cmd == trace) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto traces = traces_of(cfg);
      std::filesystem::create_directories(out_path);
      std::ofstream index(std::filesystem::path(out_path) / "index.txt");
      index << "# config " << config_hash(cfg) << "\n";
      for (size_t i = 0; i < traces.size(); ++i) {
        std::ostringstream os;
        save_trace(traces[i].trace, os);
        const std::string name = "trace_" + std::to_string(i) + ".txt";
        write_text(std::filesystem::path(out_path) / name, os.str());
        index << name << " " << traces[i].class_name << "\n";
      }
      std::cout << traces.size() << " traces written to " << out_path << "\n";
    } else if (cmd == encode) {
      const ExperimentConfig cfg = load_config(config_path);
      const Dataset d =
          build_dataset(traces_of(cfg), cfg.resolution, cfg.split, cfg.seed);
      save_dataset(d, out_path);
      std::cout << d.graphs.size() << " graphs, " << d.n_classes()
                << " classes written to " << out_path << "\n";
    } else if (cmd == train_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      const Dataset d = load_dataset(dataset_dir);
      GcnModel m = model_for(d, cfg);
      const Metrics metrics = train(m, d, train_config_of(cfg));
      std::ofstream os(model_path);
      if (!os) throw std::runtime_error("cannot write " + model_path);
      os << "# config " << config_hash(cfg) << "\n";
      save_model(m, os);
      if (!metrics_path.empty()) {
        std::ostringstream ms;
        ms << "iteration,loss,test_accuracy\n";
        ms.precision(17);
        for (size_t i = 0; i < metrics.loss_curve.size(); ++i)
          ms << metrics.loss_curve[i].first << ","
             << metrics.loss_curve[i].second << ","
             << metrics.acc_curve[i].second << "\n";
        write_text(metrics_path, ms.str());
      }
      print_metrics(metrics);
    } else if (cmd == eval_cmd) {
      const Dataset d = load_dataset(dataset_dir);
      std::ifstream is(model_path);
      if (!is) throw std::runtime_error("cannot read " + model_path);
      std::string first;
      std::getline(is, first); // config hash comment
      if (first.rfind("# config", 0) != 0) {
        is.clear();
        is.seekg(0);
      }
      const GcnModel m = load_model(is);
      print_metrics(evaluate(m, d));
    } else if (cmd == attack) {
      const ExperimentConfig cfg = load_config(config_path);
      const PipelineResult res = run_pipeline(cfg);
      write_artifacts(res, out_path);
      std::cout << "config " << res.hash << "\n";
      print_metrics(res.metrics);
    } else if (cmd == sweep_cmd) {
      const ExperimentConfig cfg = load_config(config_path);
      std::vector<double> values = parse_values(values_csv);
      if (values.empty()) {
        if (axis == "resolution") values = parse_values(res_csv);
        else if (axis == "hidden") values = parse_values(hid_csv);
        else values = parse_values(fuzz_csv);
      }
      const SweepResult r = sweep(cfg, axis, values);
      std::ostringstream os;
      export_sweep_csv(r, os);
      write_text(out_path, os.str());
      std::cout << values.size() << " points written to " << out_path << "\n";
    } else if (cmd == defend) {
      const ExperimentConfig cfg = load_config(config_path);
      const DefensePolicy pol = policy_of(kind, budget, ensemble, seed);
      const DefenseReport rep = evaluate_defense(cfg, pol);
      export_report({}, {{pol, rep}}, out_path, config_hash(cfg));
      std::cout << defense_kind_name(pol.kind) << ": "
                << rep.undefended_accuracy << " -> " << rep.defended_accuracy
                << "\n";
    } else if (cmd == report) {
      const ExperimentConfig cfg = load_config(config_path);
      std::vector<SweepResult> sweeps;
      sweeps.push_back(sweep(cfg, "resolution", parse_values(res_csv)));
      sweeps.push_back(sweep(cfg, "hidden", parse_values(hid_csv)));
      sweeps.push_back(sweep(cfg, "fuzz", parse_values(fuzz_csv)));
      std::vector<std::pair<DefensePolicy, DefenseReport>> defenses;
      for (const char* k : {"pad_retime", "dummy_pairs", "ensemble_remap"}) {
        const DefensePolicy pol = policy_of(k, budget, ensemble, cfg.seed);
        defenses.emplace_back(pol, evaluate_defense(cfg, pol));
      }
      export_report(sweeps, defenses, out_path, config_hash(cfg));
      std::cout << "report written to " << out_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error [" << cmd->get_name() << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
