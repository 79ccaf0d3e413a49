/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_SIDECHANNEL_HPP
#define QSNOOP_SIDECHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/coupling.hpp"
#include "qsnoop/rng.hpp"
#include "qsnoop/schedule.hpp"

namespace qsnoop {

/// Disjoint victim/snoop split of a device's physical qubits.
struct TenantPartition {
  CouplingMap map;
  std::set<uint32_t> victim_qubits;
  std::set<uint32_t> snoop_qubits;

  /// Coupling edges with both endpoints inside the victim allocation.
  std::vector<Edge> victim_edges() const {
    std::vector<Edge> out;
    for (const Edge& e : map.edges)
      if (victim_qubits.count(e.first) && victim_qubits.count(e.second))
        out.push_back(e);
    return out;
  }
};

inline TenantPartition partition_tenants(const CouplingMap& map,
                                         const std::set<uint32_t>& victim) {
  if (victim.empty())
    throw std::invalid_argument("victim allocation must be nonempty");
  for (uint32_t q : victim)
    if (q >= map.n_physical)
      throw std::invalid_argument("victim qubit outside device");
  TenantPartition p;
  p.map = map;
  p.victim_qubits = victim;
  for (uint32_t q = 0; q < map.n_physical; ++q)
    if (!victim.count(q)) p.snoop_qubits.insert(q);
  if (p.snoop_qubits.empty())
    throw std::invalid_argument("NoSnoopQubits: victim occupies whole device");
  return p;
}

/// How a snoop qubit's phase responds to concurrent victim activity.
enum class Sensitivity { Insensitive, Binary, Graded };

struct CrosstalkModel {
  /// Phase kick in radians per concurrent CX, per (snoop qubit, victim edge).
  std::map<std::pair<uint32_t, Edge>, double> kappa;
  std::map<uint32_t, Sensitivity> sensitivity; // default Graded
  double kick_jitter_sigma = 0.02;       // radians
  double idle_dephasing_sigma = 0.0005;  // radians per sqrt(dt)
  double dd_attenuation = 0.9;           // in (0, 1]
  double binary_cap = 0.35;              // saturation for Binary qubits
  double eps_excite = 0.01;              // P(read 1 | 0)
  double eps_relax = 0.03;               // P(read 0 | 1)

  double kappa_of(uint32_t snoop, const Edge& e) const {
    const auto it = kappa.find({snoop, e});
    return it == kappa.end() ? 0.0 : it->second;
  }

  Sensitivity class_of(uint32_t snoop) const {
    const auto it = sensitivity.find(snoop);
    return it == sensitivity.end() ? Sensitivity::Graded : it->second;
  }

  void validate() const {
    for (const auto& [key, k] : kappa)
      if (k < 0.0) throw std::invalid_argument("kappa must be non-negative");
    if (dd_attenuation <= 0.0 || dd_attenuation > 1.0)
      throw std::invalid_argument("dd_attenuation must be in (0, 1]");
    if (eps_excite < 0.0 || eps_excite >= 0.5 || eps_relax < 0.0 ||
        eps_relax >= 0.5)
      throw std::invalid_argument("readout error must be in [0, 0.5)");
  }
};

/// Distance-decayed coupling: kappa(s, e) = kappa0 * 2^-(dist-1) with dist
/// the hop count from the snoop qubit to the nearer edge endpoint. All snoop
/// qubits default to the graded class; override per qubit as needed.
inline CrosstalkModel default_crosstalk_model(const TenantPartition& part,
                                              double kappa0 = 0.35) {
  CrosstalkModel m;
  const auto dist = part.map.distances();
  for (uint32_t s : part.snoop_qubits) {
    for (const Edge& e : part.victim_edges()) {
      const uint32_t d = std::min(dist[s][e.first], dist[s][e.second]);
      if (d == UINT32_MAX) continue;
      m.kappa[{s, e}] = kappa0 * std::pow(2.0, -(static_cast<double>(d) - 1.0));
    }
  }
  m.validate();
  return m;
}

struct CgdConfig {
  uint64_t shots_per_bucket = 10000;
  uint64_t window = 180; // dt; must be >= CX duration
  uint32_t repetitions = 75;
  bool dd_enabled = false;
  uint64_t seed = 0;
};

/// Zero-count statistics per (snoop qubit, bucket) over repetitions.
struct ZeroCountTrace {
  std::vector<uint32_t> snoop; // sorted physical ids
  uint32_t n_buckets = 0;
  uint64_t shots = 0;
  uint64_t window = 0;
  uint32_t repetitions = 0;
  std::vector<std::vector<double>> zero_mean; // [snoop index][bucket]
  std::vector<std::vector<double>> zero_std;
  std::vector<double> joint_zero_mean; // whole snoop register reads 0

  size_t snoop_index(uint32_t q) const {
    const auto it = std::find(snoop.begin(), snoop.end(), q);
    if (it == snoop.end()) throw std::invalid_argument("not a snoop qubit");
    return static_cast<size_t>(it - snoop.begin());
  }
};

/// One CGD phase sample: deterministic crosstalk term shaped by the qubit's
/// sensitivity class, then jitter and idle dephasing.
inline double sample_phase_kick(
    const CrosstalkModel& model, uint32_t snoop,
    const std::vector<std::pair<Edge, double>>& concurrent_cx, uint64_t window,
    bool dd_enabled, Rng& rng) {
  double acc = 0.0;
  for (const auto& [edge, overlap] : concurrent_cx) {
    if (overlap < 0.0 || overlap > 1.0)
      throw std::invalid_argument("overlap fraction outside [0, 1]");
    acc += model.kappa_of(snoop, edge) * overlap;
  }
  switch (model.class_of(snoop)) {
    case Sensitivity::Insensitive: acc = 0.0; break;
    case Sensitivity::Binary: acc = std::min(acc, model.binary_cap); break;
    case Sensitivity::Graded: break;
  }
  if (dd_enabled) acc *= model.dd_attenuation;
  double phi = acc;
  if (model.kick_jitter_sigma > 0.0)
    phi += rng.next_normal(0.0, model.kick_jitter_sigma);
  if (model.idle_dephasing_sigma > 0.0)
    phi += rng.next_normal(
        0.0, model.idle_dephasing_sigma * std::sqrt(static_cast<double>(window)));
  return phi;
}

namespace detail {

/// CX events overlapping each window [b*w, (b+1)*w), with the overlap
/// expressed as a fraction of the CX duration.
inline std::vector<std::vector<std::pair<Edge, double>>> bucket_cx_events(
    const TimedSchedule& s, uint64_t window, uint32_t n_buckets) {
  std::vector<std::vector<std::pair<Edge, double>>> events(n_buckets);
  for (const TimedGate& tg : s.gates) {
    if (tg.gate.kind != GateKind::CX) continue;
    const Edge e = make_edge(tg.gate.qubits[0], tg.gate.qubits[1]);
    const uint64_t first = tg.start / window;
    const uint64_t last = tg.end() == tg.start ? first : (tg.end() - 1) / window;
    for (uint64_t b = first; b <= last && b < n_buckets; ++b) {
      const uint64_t lo = std::max(tg.start, b * window);
      const uint64_t hi = std::min(tg.end(), (b + 1) * window);
      if (hi > lo)
        events[b].emplace_back(
            e, static_cast<double>(hi - lo) / static_cast<double>(tg.duration));
    }
  }
  return events;
}

} // namespace detail

/// Monte Carlo CGD run: per bucket, every snoop qubit executes the
/// H-idle(window)-H-measure probe while the victim's concurrent CX activity
/// kicks its phase. P(pre-readout 1) = sin^2(phi/2), then the asymmetric
/// readout flips. Bit-reproducible per seed; streams are split per
/// (bucket, repetition) so parallel and serial execution agree.
inline ZeroCountTrace simulate_cgd(const TimedSchedule& victim,
                                   const TenantPartition& part,
                                   const CrosstalkModel& model,
                                   const CgdConfig& cfg) {
  model.validate();
  if (cfg.shots_per_bucket < 1)
    throw std::invalid_argument("shots_per_bucket must be >= 1");
  if (cfg.window < victim.durations.cx)
    throw std::invalid_argument("window must cover one CX duration");
  for (const TimedGate& tg : victim.gates)
    if (tg.gate.kind == GateKind::CX &&
        (!part.victim_qubits.count(tg.gate.qubits[0]) ||
         !part.victim_qubits.count(tg.gate.qubits[1])))
      throw std::invalid_argument(
          "threat-model violation: victim CX outside victim region");

  ZeroCountTrace t;
  t.snoop.assign(part.snoop_qubits.begin(), part.snoop_qubits.end());
  t.n_buckets = static_cast<uint32_t>(
      std::max<uint64_t>(1, (victim.total_duration + cfg.window - 1) / cfg.window));
  t.shots = cfg.shots_per_bucket;
  t.window = cfg.window;
  t.repetitions = cfg.repetitions;
  t.zero_mean.assign(t.snoop.size(), std::vector<double>(t.n_buckets, 0.0));
  t.zero_std.assign(t.snoop.size(), std::vector<double>(t.n_buckets, 0.0));
  t.joint_zero_mean.assign(t.n_buckets, 0.0);

  const auto events = detail::bucket_cx_events(victim, cfg.window, t.n_buckets);
  const Rng master(cfg.seed);

  for (uint32_t b = 0; b < t.n_buckets; ++b) {
    std::vector<std::vector<uint64_t>> zeros(
        t.snoop.size(), std::vector<uint64_t>(cfg.repetitions, 0));
    std::vector<uint64_t> joint(cfg.repetitions, 0);
    for (uint32_t rep = 0; rep < cfg.repetitions; ++rep) {
      Rng rng = master.split(b, rep);
      for (uint64_t shot = 0; shot < cfg.shots_per_bucket; ++shot) {
        bool all_zero = true;
        for (size_t si = 0; si < t.snoop.size(); ++si) {
          const double phi = sample_phase_kick(model, t.snoop[si], events[b],
                                               cfg.window, cfg.dd_enabled, rng);
          const double half = std::sin(phi / 2.0);
          bool bit = rng.next_double() < half * half;
          if (bit) {
            if (rng.next_double() < model.eps_relax) bit = false;
          } else {
            if (rng.next_double() < model.eps_excite) bit = true;
          }
          if (!bit) ++zeros[si][rep];
          else all_zero = false;
        }
        if (all_zero) ++joint[rep];
      }
    }
    for (size_t si = 0; si < t.snoop.size(); ++si) {
      double mean = 0.0;
      for (uint64_t z : zeros[si]) mean += static_cast<double>(z);
      mean /= cfg.repetitions;
      double var = 0.0;
      for (uint64_t z : zeros[si]) {
        const double d = static_cast<double>(z) - mean;
        var += d * d;
      }
      t.zero_mean[si][b] = mean;
      t.zero_std[si][b] =
          cfg.repetitions > 1 ? std::sqrt(var / (cfg.repetitions - 1)) : 0.0;
    }
    double jm = 0.0;
    for (uint64_t j : joint) jm += static_cast<double>(j);
    t.joint_zero_mean[b] = jm / cfg.repetitions;
  }
  return t;
}

/// Pearson correlation; throws on degenerate inputs so callers never read a
/// coefficient from a constant series.
inline double pearson(const std::vector<double>& x,
                      const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const size_t n = x.size();
  if (n < 3) throw std::invalid_argument("need at least 3 points");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::domain_error("InsufficientVariance");
  return sxy / std::sqrt(sxx * syy);
}

/// Per-snoop Pearson coefficient of zero counts against the true per-bucket
/// CX totals.
inline std::map<uint32_t, double> correlation_report(
    const ZeroCountTrace& t, const std::vector<double>& true_cx_per_bucket) {
  if (true_cx_per_bucket.size() != t.n_buckets)
    throw std::invalid_argument("bucket grid mismatch");
  std::map<uint32_t, double> out;
  for (size_t si = 0; si < t.snoop.size(); ++si)
    out[t.snoop[si]] = pearson(true_cx_per_bucket, t.zero_mean[si]);
  return out;
}

/// Tabular export: snoop_qubit, bucket, zero_mean, zero_std, shots.
inline void export_zero_counts(const ZeroCountTrace& t, std::ostream& os) {
  os << "snoop_qubit bucket zero_mean zero_std shots\n";
  os.precision(17);
  for (size_t si = 0; si < t.snoop.size(); ++si)
    for (uint32_t b = 0; b < t.n_buckets; ++b)
      os << t.snoop[si] << " " << b << " " << t.zero_mean[si][b] << " "
         << t.zero_std[si][b] << " " << t.shots << "\n";
}

} // namespace qsnoop

#endif
