/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_TRACE_HPP
#define QSNOOP_TRACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/schedule.hpp"
#include "qsnoop/sidechannel.hpp"

namespace qsnoop {

enum class TraceProvenance { Oracle, Inferred, Fuzzed };

inline const char* provenance_name(TraceProvenance p) {
  switch (p) {
    case TraceProvenance::Oracle: return "oracle";
    case TraceProvenance::Inferred: return "inferred";
    case TraceProvenance::Fuzzed: return "fuzzed";
  }
  return "?";
}

inline TraceProvenance provenance_from_name(const std::string& s) {
  if (s == "oracle") return TraceProvenance::Oracle;
  if (s == "inferred") return TraceProvenance::Inferred;
  if (s == "fuzzed") return TraceProvenance::Fuzzed;
  throw std::invalid_argument("unknown provenance: " + s);
}

/// Per-bucket, per-edge CNOT counts recovered (or known) for a schedule.
struct CnotTrace {
  uint64_t bucket_duration = 0; // dt
  uint32_t n_buckets = 0;
  uint32_t n_qubits = 0; // device size
  std::map<std::pair<uint32_t, Edge>, int64_t> counts;
  std::string label;  // circuit/class name, optional
  std::string family;
  TraceProvenance provenance = TraceProvenance::Oracle;
  bool degraded = false; // inference fell back to an ill-posed solve

  int64_t count_at(uint32_t bucket, const Edge& e) const {
    const auto it = counts.find({bucket, e});
    return it == counts.end() ? 0 : it->second;
  }

  int64_t total() const {
    int64_t t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
  }

  std::vector<int64_t> per_qubit_totals() const {
    std::vector<int64_t> t(n_qubits, 0);
    for (const auto& [k, v] : counts) {
      t[k.second.first] += v;
      t[k.second.second] += v;
    }
    return t;
  }

  std::vector<double> per_bucket_totals() const {
    std::vector<double> t(n_buckets, 0.0);
    for (const auto& [k, v] : counts) t[k.first] += static_cast<double>(v);
    return t;
  }

  /// Distinct edges carrying at least one count.
  std::vector<Edge> active_edges() const {
    std::set<Edge> s;
    for (const auto& [k, v] : counts)
      if (v > 0) s.insert(k.second);
    return {s.begin(), s.end()};
  }
};

/// Exact bucketed counts: each CX lands in the bucket containing its start
/// time (integer per-bucket counts, matching the published tables).
inline CnotTrace oracle_trace(const TimedSchedule& s, uint64_t bucket_duration) {
  if (bucket_duration < s.durations.cx)
    throw std::invalid_argument(
        "bucket duration below one CX duration is undetectable");
  CnotTrace t;
  t.bucket_duration = bucket_duration;
  t.n_qubits = s.n_qubits;
  t.n_buckets = static_cast<uint32_t>(std::max<uint64_t>(
      1, (s.total_duration + bucket_duration - 1) / bucket_duration));
  t.label = s.circuit_name;
  t.family = s.family;
  t.provenance = TraceProvenance::Oracle;
  for (const TimedGate& tg : s.gates) {
    if (tg.gate.kind != GateKind::CX) continue;
    const uint32_t b = static_cast<uint32_t>(tg.start / bucket_duration);
    ++t.counts[{b, make_edge(tg.gate.qubits[0], tg.gate.qubits[1])}];
  }
  return t;
}

/// Merge adjacent buckets by an integer factor; counts sum cell-wise.
inline CnotTrace coarsen_trace(const CnotTrace& t, uint64_t factor) {
  if (factor < 1) throw std::invalid_argument("factor must be >= 1");
  if (factor == 1) return t;
  CnotTrace out = t;
  out.counts.clear();
  out.bucket_duration = t.bucket_duration * factor;
  out.n_buckets = static_cast<uint32_t>((t.n_buckets + factor - 1) / factor);
  for (const auto& [k, v] : t.counts)
    out.counts[{static_cast<uint32_t>(k.first / factor), k.second}] += v;
  return out;
}

/// The paper-style synthetic fuzziness: a fraction `level` of (qubit, bucket)
/// cells is selected; each selected cell perturbs one incident edge count by
/// a uniform draw from {-2,-1,+1,+2}, clamped at zero. The optional edge
/// universe admits false positives on edges the trace never used.
inline CnotTrace fuzz_trace(const CnotTrace& t, double level, uint64_t seed,
                            const std::vector<Edge>& edge_universe = {}) {
  if (level < 0.0 || level > 0.5)
    throw std::invalid_argument("fuzz level must be in [0, 0.5]");
  CnotTrace out = t;
  out.provenance = TraceProvenance::Fuzzed;
  const uint64_t cells = uint64_t{t.n_qubits} * t.n_buckets;
  const uint64_t picks = static_cast<uint64_t>(level * static_cast<double>(cells));
  if (picks == 0) return out;

  std::set<Edge> universe(edge_universe.begin(), edge_universe.end());
  for (const auto& [k, v] : t.counts) universe.insert(k.second);
  std::vector<std::vector<Edge>> incident(t.n_qubits);
  for (const Edge& e : universe) {
    incident[e.first].push_back(e);
    incident[e.second].push_back(e);
  }

  std::vector<uint64_t> order(cells);
  for (uint64_t i = 0; i < cells; ++i) order[i] = i;
  Rng rng = Rng(seed).split(0xf022, 0);
  for (uint64_t i = cells - 1; i > 0; --i)
    std::swap(order[i], order[rng.next_below(i + 1)]);

  static const int64_t deltas[4] = {-2, -1, 1, 2};
  for (uint64_t i = 0; i < picks; ++i) {
    const uint32_t q = static_cast<uint32_t>(order[i] % t.n_qubits);
    const uint32_t b = static_cast<uint32_t>(order[i] / t.n_qubits);
    if (incident[q].empty()) continue;
    const Edge e = incident[q][rng.next_below(incident[q].size())];
    const int64_t delta = deltas[rng.next_below(4)];
    int64_t& cell = out.counts[{b, e}];
    cell = std::max<int64_t>(0, cell + delta);
    if (cell == 0) out.counts.erase({b, e});
  }
  return out;
}

/// Per-edge linear response of the snoop register, fitted in the phase
/// domain where the CGD observable is linear in the concurrent CX count.
struct CalibrationTable {
  std::vector<uint32_t> snoop;
  std::vector<Edge> edges;
  std::map<std::pair<uint32_t, Edge>, double> response; // phase slope, rad/CX
  std::map<uint32_t, double> baseline;                  // idle zero count
  uint64_t shots = 0;
  uint32_t max_k = 0;
  double eps_excite = 0.0;
  double eps_relax = 0.0;

  double response_of(uint32_t s, const Edge& e) const {
    const auto it = response.find({s, e});
    return it == response.end() ? 0.0 : it->second;
  }
};

namespace detail {

/// Invert the CGD observable: zero count -> estimated phase magnitude.
inline double phase_of_zero_count(double zero, uint64_t shots,
                                  double eps_excite, double eps_relax) {
  const double p_one = 1.0 - zero / static_cast<double>(shots);
  const double denom = 1.0 - eps_excite - eps_relax;
  double p = denom > 0.0 ? (p_one - eps_excite) / denom : p_one;
  p = std::clamp(p, 0.0, 1.0);
  return 2.0 * std::asin(std::sqrt(p));
}

/// Lawson-Hanson active-set NNLS for the small systems used here.
inline std::vector<double> nnls(const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b) {
  const size_t m = A.size();
  const size_t n = m == 0 ? 0 : A[0].size();
  std::vector<double> x(n, 0.0);
  if (m == 0 || n == 0) return x;
  std::vector<bool> passive(n, false);

  auto solve_passive = [&]() -> std::vector<double> {
    std::vector<size_t> idx;
    for (size_t j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    const size_t k = idx.size();
    std::vector<double> z(n, 0.0);
    if (k == 0) return z;
    // normal equations with Gaussian elimination and partial pivoting
    std::vector<std::vector<double>> G(k, std::vector<double>(k + 1, 0.0));
    for (size_t a = 0; a < k; ++a) {
      for (size_t c = 0; c < k; ++c)
        for (size_t r = 0; r < m; ++r) G[a][c] += A[r][idx[a]] * A[r][idx[c]];
      for (size_t r = 0; r < m; ++r) G[a][k] += A[r][idx[a]] * b[r];
    }
    for (size_t col = 0; col < k; ++col) {
      size_t piv = col;
      for (size_t r = col + 1; r < k; ++r)
        if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
      std::swap(G[col], G[piv]);
      if (std::abs(G[col][col]) < 1e-12) return {}; // singular passive set
      for (size_t r = 0; r < k; ++r) {
        if (r == col) continue;
        const double f = G[r][col] / G[col][col];
        for (size_t c = col; c <= k; ++c) G[r][c] -= f * G[col][c];
      }
    }
    for (size_t a = 0; a < k; ++a) z[idx[a]] = G[a][k] / G[a][a];
    return z;
  };

  for (size_t outer = 0; outer < 3 * n + 10; ++outer) {
    // gradient of the residual
    std::vector<double> w(n, 0.0);
    for (size_t r = 0; r < m; ++r) {
      double ax = 0.0;
      for (size_t j = 0; j < n; ++j) ax += A[r][j] * x[j];
      const double res = b[r] - ax;
      for (size_t j = 0; j < n; ++j) w[j] += A[r][j] * res;
    }
    size_t best = n;
    double best_w = 1e-10;
    for (size_t j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best == n) break;
    passive[best] = true;

    std::vector<double> z = solve_passive();
    if (z.empty()) {
      passive[best] = false;
      break;
    }
    uint32_t guard = 0;
    while (true) {
      bool feasible = true;
      for (size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible || ++guard > n + 2) break;
      double alpha = 1.0;
      for (size_t j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0)
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      for (size_t j = 0; j < n; ++j)
        if (passive[j]) x[j] += alpha * (z[j] - x[j]);
      for (size_t j = 0; j < n; ++j)
        if (passive[j] && x[j] <= 1e-12) {
          passive[j] = false;
          x[j] = 0.0;
        }
      z = solve_passive();
      if (z.empty()) break;
    }
    if (!z.empty())
      for (size_t j = 0; j < n; ++j) x[j] = passive[j] ? std::max(0.0, z[j]) : 0.0;
  }
  return x;
}

inline TimedSchedule probe_schedule(const Edge& e, uint32_t k,
                                    uint32_t n_physical,
                                    const GateDurations& d) {
  Circuit c;
  c.n_qubits = n_physical;
  c.name = "probe";
  for (uint32_t i = 0; i < k; ++i) c.add(Gate::cx(e.first, e.second));
  TimedSchedule s = schedule(c, d, SchedulingMethod::Asap);
  return s;
}

} // namespace detail

/// Probe every victim edge with exactly k = 0..max_k concurrent CX and fit a
/// per-(snoop, edge) phase slope; the k = 0 row is the baseline.
inline CalibrationTable calibrate(const TenantPartition& part,
                                  const CrosstalkModel& model,
                                  const CgdConfig& cfg, uint32_t max_k,
                                  const GateDurations& d = {}) {
  if (max_k < 1) throw std::invalid_argument("max_k must be >= 1");
  CalibrationTable cal;
  cal.snoop.assign(part.snoop_qubits.begin(), part.snoop_qubits.end());
  cal.edges = part.victim_edges();
  cal.shots = cfg.shots_per_bucket;
  cal.max_k = max_k;
  cal.eps_excite = model.eps_excite;
  cal.eps_relax = model.eps_relax;

  CgdConfig probe_cfg = cfg;
  probe_cfg.window = std::max<uint64_t>(cfg.window, uint64_t{max_k} * d.cx);

  // shared idle baseline (edge-independent)
  {
    const Edge any = cal.edges.empty() ? Edge{0, 1} : cal.edges.front();
    const TimedSchedule idle =
        detail::probe_schedule(any, 0, part.map.n_physical, d);
    const ZeroCountTrace t0 = simulate_cgd(idle, part, model, probe_cfg);
    for (size_t si = 0; si < cal.snoop.size(); ++si)
      cal.baseline[cal.snoop[si]] = t0.zero_mean[si][0];
  }

  for (const Edge& e : cal.edges) {
    std::vector<std::vector<double>> phi(cal.snoop.size());
    for (uint32_t k = 0; k <= max_k; ++k) {
      CgdConfig ck = probe_cfg;
      ck.seed = probe_cfg.seed + 7919 * (uint64_t{e.first} << 16 | e.second) + k;
      const ZeroCountTrace t = simulate_cgd(
          detail::probe_schedule(e, k, part.map.n_physical, d), part, model, ck);
      for (size_t si = 0; si < cal.snoop.size(); ++si)
        phi[si].push_back(detail::phase_of_zero_count(
            t.zero_mean[si][0], t.shots, model.eps_excite, model.eps_relax));
    }
    for (size_t si = 0; si < cal.snoop.size(); ++si) {
      // least-squares slope through the k=0 anchor
      double num = 0.0, den = 0.0;
      for (uint32_t k = 1; k <= max_k; ++k) {
        num += k * (phi[si][k] - phi[si][0]);
        den += static_cast<double>(k) * k;
      }
      cal.response[{cal.snoop[si], e}] = std::max(0.0, num / den);
    }
  }
  return cal;
}

/// Per bucket, solve the non-negative least-squares system response * x =
/// phase deviation and round to integer counts. Rank-deficient systems are
/// still solved but flagged degraded; an all-zero system falls back to the
/// nearest-snoop per-edge estimate.
inline CnotTrace estimate_trace(const ZeroCountTrace& obs,
                                const CalibrationTable& cal,
                                const TenantPartition& part) {
  CnotTrace t;
  t.bucket_duration = obs.window;
  t.n_buckets = obs.n_buckets;
  t.n_qubits = part.map.n_physical;
  t.provenance = TraceProvenance::Inferred;

  const std::vector<Edge>& edges = cal.edges;
  const size_t m = obs.snoop.size();
  const size_t n = edges.size();
  if (n == 0) return t;

  std::vector<std::vector<double>> K(m, std::vector<double>(n, 0.0));
  double knorm = 0.0;
  for (size_t si = 0; si < m; ++si)
    for (size_t ej = 0; ej < n; ++ej) {
      K[si][ej] = cal.response_of(obs.snoop[si], edges[ej]);
      knorm += K[si][ej];
    }

  // rank probe on the Gram matrix; deficiency means some edge mix is
  // indistinguishable through this snoop register
  {
    std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
    for (size_t a = 0; a < n; ++a)
      for (size_t b = 0; b < n; ++b)
        for (size_t r = 0; r < m; ++r) G[a][b] += K[r][a] * K[r][b];
    size_t rank = 0;
    for (size_t col = 0; col < n; ++col) {
      size_t piv = rank;
      for (size_t r = rank; r < n; ++r)
        if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
      if (piv >= n || std::abs(G[piv][col]) < 1e-9) continue;
      std::swap(G[rank], G[piv]);
      for (size_t r = 0; r < n; ++r) {
        if (r == rank) continue;
        const double f = G[r][col] / G[rank][col];
        for (size_t c = 0; c < n; ++c) G[r][c] -= f * G[rank][c];
      }
      ++rank;
    }
    if (rank < n) t.degraded = true;
  }

  for (uint32_t b = 0; b < obs.n_buckets; ++b) {
    std::vector<double> d(m, 0.0);
    for (size_t si = 0; si < m; ++si) {
      const double phi = detail::phase_of_zero_count(
          obs.zero_mean[si][b], obs.shots, cal.eps_excite, cal.eps_relax);
      const double phi0 = detail::phase_of_zero_count(
          cal.baseline.at(obs.snoop[si]), cal.shots, cal.eps_excite,
          cal.eps_relax);
      d[si] = std::max(0.0, phi - phi0);
    }
    std::vector<double> x;
    if (knorm < 1e-12) {
      // no informative snoop at all: nothing recoverable
      t.degraded = true;
      x.assign(n, 0.0);
    } else {
      x = detail::nnls(K, d);
    }
    for (size_t ej = 0; ej < n; ++ej) {
      const int64_t k = std::max<int64_t>(0, std::llround(x[ej]));
      if (k > 0) t.counts[{b, edges[ej]}] = k;
    }
  }
  return t;
}

/// Convenience overload correlating zero counts against a known trace.
inline std::map<uint32_t, double> correlation_report(const ZeroCountTrace& z,
                                                     const CnotTrace& truth) {
  return correlation_report(z, truth.per_bucket_totals());
}

/// Tabular export: bucket qubit_a qubit_b count provenance.
inline void save_trace(const CnotTrace& t, std::ostream& os) {
  os << "# tb " << t.bucket_duration << "\n";
  os << "# buckets " << t.n_buckets << "\n";
  os << "# qubits " << t.n_qubits << "\n";
  if (!t.label.empty()) os << "# label " << t.label << "\n";
  if (!t.family.empty()) os << "# family " << t.family << "\n";
  for (const auto& [k, v] : t.counts)
    os << k.first << " " << k.second.first << " " << k.second.second << " " << v
       << " " << provenance_name(t.provenance) << "\n";
}

inline CnotTrace load_trace(std::istream& is) {
  CnotTrace t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "tb") ls >> t.bucket_duration;
      else if (key == "buckets") ls >> t.n_buckets;
      else if (key == "qubits") ls >> t.n_qubits;
      else if (key == "label") ls >> t.label;
      else if (key == "family") ls >> t.family;
      continue;
    }
    uint32_t b, qa, qb;
    int64_t v;
    std::string prov;
    if (!(ls >> b >> qa >> qb >> v >> prov))
      throw std::invalid_argument("malformed trace line: " + line);
    t.counts[{b, make_edge(qa, qb)}] = v;
    t.provenance = provenance_from_name(prov);
  }
  return t;
}

} // namespace qsnoop

#endif
