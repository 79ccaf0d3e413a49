/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_GRAPH_HPP
#define QSNOOP_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/trace.hpp"

namespace qsnoop {

/// Attributed device graph: one node per physical qubit, weighted edges from
/// per-pair CNOT totals. Node feature row = [active flag, distinct-partner
/// degree, total CX, per-bucket CX vector padded to b_max], so F = 3 + b_max.
struct CircuitGraph {
  uint32_t n_nodes = 0;
  std::vector<std::vector<double>> node_features; // n_nodes x F
  std::vector<std::pair<Edge, double>> edges;     // weight = per-pair total
  int label = -1;
  std::string label_name;
  double resolution = 0.0;
  uint32_t b_max = 0;

  size_t feature_width() const { return 3 + b_max; }
};

/// Encode a trace bucketed at tb = resolution x CX duration. A coarser grid
/// than the trace's own is reached by merging buckets; buckets beyond b_max
/// fold into the final slot.
inline CircuitGraph encode_graph(const CnotTrace& t, double resolution,
                                 uint32_t b_max, uint64_t cx_duration = 180) {
  if (resolution < 1.0)
    throw std::invalid_argument("resolution below 1 is undetectable");
  if (b_max < 1) throw std::invalid_argument("b_max must be >= 1");

  const uint64_t tb =
      static_cast<uint64_t>(resolution * static_cast<double>(cx_duration));
  CnotTrace src = t;
  if (t.bucket_duration != tb) {
    if (tb < t.bucket_duration || tb % t.bucket_duration != 0)
      throw std::invalid_argument(
          "trace grid incompatible with requested resolution");
    src = coarsen_trace(t, tb / t.bucket_duration);
  }

  CircuitGraph g;
  g.n_nodes = src.n_qubits;
  g.resolution = resolution;
  g.b_max = b_max;
  g.label_name = src.label;
  g.node_features.assign(g.n_nodes, std::vector<double>(3 + b_max, 0.0));

  std::map<Edge, double> weights;
  std::vector<std::set<uint32_t>> partners(g.n_nodes);
  for (const auto& [key, v] : src.counts) {
    if (v <= 0) continue;
    const uint32_t slot = std::min(key.first, b_max - 1);
    const Edge& e = key.second;
    weights[e] += static_cast<double>(v);
    partners[e.first].insert(e.second);
    partners[e.second].insert(e.first);
    for (uint32_t q : {e.first, e.second}) {
      g.node_features[q][2] += static_cast<double>(v);       // total
      g.node_features[q][3 + slot] += static_cast<double>(v); // temporal
    }
  }
  for (uint32_t q = 0; q < g.n_nodes; ++q) {
    g.node_features[q][0] = g.node_features[q][2] > 0.0 ? 1.0 : 0.0;
    g.node_features[q][1] = static_cast<double>(partners[q].size());
  }
  for (const auto& [e, w] : weights) g.edges.emplace_back(e, w);
  return g;
}

struct Dataset {
  std::vector<CircuitGraph> graphs;
  std::vector<std::string> class_names;
  std::vector<size_t> train_idx;
  std::vector<size_t> test_idx;
  uint32_t b_max = 0;
  double resolution = 0.0;
  uint64_t seed = 0;

  size_t n_classes() const { return class_names.size(); }
  size_t feature_width() const { return 3 + b_max; }
};

struct LabeledTrace {
  CnotTrace trace;
  std::string class_name;
};

/// Encode every trace at a shared B_max and split stratified per class.
inline Dataset build_dataset(const std::vector<LabeledTrace>& traces,
                             double resolution, double split_fraction,
                             uint64_t seed, uint64_t cx_duration = 180) {
  if (split_fraction <= 0.0 || split_fraction >= 1.0)
    throw std::invalid_argument("split fraction must be in (0, 1)");

  Dataset d;
  d.resolution = resolution;
  d.seed = seed;
  const uint64_t tb =
      static_cast<uint64_t>(resolution * static_cast<double>(cx_duration));

  uint32_t b_max = 1;
  for (const LabeledTrace& lt : traces) {
    if (tb < lt.trace.bucket_duration || tb % lt.trace.bucket_duration != 0)
      throw std::invalid_argument("trace grid incompatible with resolution");
    const uint64_t factor = tb / lt.trace.bucket_duration;
    const uint32_t nb =
        static_cast<uint32_t>((lt.trace.n_buckets + factor - 1) / factor);
    b_max = std::max(b_max, nb);
  }
  d.b_max = b_max;

  std::map<std::string, int> class_of;
  for (const LabeledTrace& lt : traces) {
    if (!class_of.count(lt.class_name)) {
      class_of[lt.class_name] = static_cast<int>(d.class_names.size());
      d.class_names.push_back(lt.class_name);
    }
  }
  if (d.class_names.size() < 2)
    throw std::invalid_argument("dataset needs at least 2 classes");

  std::map<int, std::vector<size_t>> by_class;
  for (const LabeledTrace& lt : traces) {
    CircuitGraph g = encode_graph(lt.trace, resolution, b_max, cx_duration);
    g.label = class_of[lt.class_name];
    g.label_name = lt.class_name;
    by_class[g.label].push_back(d.graphs.size());
    d.graphs.push_back(std::move(g));
  }
  for (const auto& [cls, idx] : by_class)
    if (idx.size() < 2)
      throw std::invalid_argument("class " + d.class_names[cls] +
                                  " has a single instance");

  Rng rng = Rng(seed).split(0x5b17);
  for (const auto& [cls, idx] : by_class) {
    std::vector<size_t> shuffled = idx;
    for (size_t i = shuffled.size() - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[rng.next_below(i + 1)]);
    size_t n_train = static_cast<size_t>(
        std::llround(split_fraction * static_cast<double>(shuffled.size())));
    n_train = std::clamp<size_t>(n_train, 1, shuffled.size() - 1);
    for (size_t i = 0; i < shuffled.size(); ++i)
      (i < n_train ? d.train_idx : d.test_idx).push_back(shuffled[i]);
  }
  std::sort(d.train_idx.begin(), d.train_idx.end());
  std::sort(d.test_idx.begin(), d.test_idx.end());
  return d;
}

/// Directory layout: manifest.txt plus graph_N.nodes / graph_N.edges files.
inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write " + dir.string());
  manifest.precision(17);
  manifest << "b_max " << d.b_max << "\n";
  manifest << "resolution " << d.resolution << "\n";
  manifest << "seed " << d.seed << "\n";
  manifest << "classes";
  for (const std::string& c : d.class_names) manifest << " " << c;
  manifest << "\n";
  manifest << "train";
  for (size_t i : d.train_idx) manifest << " " << i;
  manifest << "\n";
  manifest << "test";
  for (size_t i : d.test_idx) manifest << " " << i;
  manifest << "\n";
  for (size_t gi = 0; gi < d.graphs.size(); ++gi) {
    const CircuitGraph& g = d.graphs[gi];
    manifest << "graph " << gi << " " << g.label << " " << g.n_nodes << "\n";
    std::ofstream nodes(dir / ("graph_" + std::to_string(gi) + ".nodes"));
    nodes.precision(17);
    for (const auto& row : g.node_features) {
      for (size_t c = 0; c < row.size(); ++c)
        nodes << (c ? " " : "") << row[c];
      nodes << "\n";
    }
    std::ofstream edges(dir / ("graph_" + std::to_string(gi) + ".edges"));
    edges.precision(17);
    for (const auto& [e, w] : g.edges)
      edges << e.first << " " << e.second << " " << w << "\n";
  }
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot read " + dir.string());
  Dataset d;
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "b_max") ls >> d.b_max;
    else if (key == "resolution") ls >> d.resolution;
    else if (key == "seed") ls >> d.seed;
    else if (key == "classes") {
      std::string c;
      while (ls >> c) d.class_names.push_back(c);
    } else if (key == "train") {
      size_t i;
      while (ls >> i) d.train_idx.push_back(i);
    } else if (key == "test") {
      size_t i;
      while (ls >> i) d.test_idx.push_back(i);
    } else if (key == "graph") {
      size_t gi;
      CircuitGraph g;
      ls >> gi >> g.label >> g.n_nodes;
      g.b_max = d.b_max;
      g.resolution = d.resolution;
      if (g.label >= 0 && static_cast<size_t>(g.label) < d.class_names.size())
        g.label_name = d.class_names[g.label];
      std::ifstream nodes(dir / ("graph_" + std::to_string(gi) + ".nodes"));
      std::string row;
      while (std::getline(nodes, row)) {
        if (row.empty()) continue;
        std::istringstream rs(row);
        std::vector<double> vals;
        double v;
        while (rs >> v) vals.push_back(v);
        g.node_features.push_back(std::move(vals));
      }
      std::ifstream edges(dir / ("graph_" + std::to_string(gi) + ".edges"));
      while (std::getline(edges, row)) {
        if (row.empty()) continue;
        std::istringstream rs(row);
        uint32_t a, b;
        double w;
        rs >> a >> b >> w;
        g.edges.emplace_back(make_edge(a, b), w);
      }
      d.graphs.push_back(std::move(g));
    }
  }
  return d;
}

} // namespace qsnoop

#endif
