/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_GCN_HPP
#define QSNOOP_GCN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/graph.hpp"
#include "qsnoop/rng.hpp"

namespace qsnoop {

/// Dense row-major matrix; all the sizes here are tiny (device qubits x
/// hidden width), so no BLAS dependency is warranted.
struct Mat {
  size_t rows = 0, cols = 0;
  std::vector<double> d;

  Mat() = default;
  Mat(size_t r, size_t c) : rows(r), cols(c), d(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return d[r * cols + c]; }
  double at(size_t r, size_t c) const { return d[r * cols + c]; }
  void zero() { std::fill(d.begin(), d.end(), 0.0); }
};

namespace detail {

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.rows, b.cols);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t k = 0; k < a.cols; ++k) {
      const double v = a.at(i, k);
      if (v == 0.0) continue;
      for (size_t j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(k, j);
    }
  return out;
}

/// a^T * b
inline Mat matmul_tn(const Mat& a, const Mat& b) {
  Mat out(a.cols, b.cols);
  for (size_t k = 0; k < a.rows; ++k)
    for (size_t i = 0; i < a.cols; ++i) {
      const double v = a.at(k, i);
      if (v == 0.0) continue;
      for (size_t j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(k, j);
    }
  return out;
}

/// a * b^T
inline Mat matmul_nt(const Mat& a, const Mat& b) {
  Mat out(a.rows, b.rows);
  for (size_t i = 0; i < a.rows; ++i)
    for (size_t j = 0; j < b.rows; ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(j, k);
      out.at(i, j) = acc;
    }
  return out;
}

} // namespace detail

/// Symmetric degree normalization of the weighted adjacency with self loops:
/// D^-1/2 (A_w + I) D^-1/2.
inline Mat normalized_adjacency(const CircuitGraph& g) {
  Mat a(g.n_nodes, g.n_nodes);
  for (uint32_t i = 0; i < g.n_nodes; ++i) a.at(i, i) = 1.0;
  for (const auto& [e, w] : g.edges) {
    a.at(e.first, e.second) += w;
    a.at(e.second, e.first) += w;
  }
  std::vector<double> dinv(g.n_nodes, 0.0);
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    double deg = 0.0;
    for (uint32_t j = 0; j < g.n_nodes; ++j) deg += a.at(i, j);
    dinv[i] = 1.0 / std::sqrt(deg);
  }
  for (uint32_t i = 0; i < g.n_nodes; ++i)
    for (uint32_t j = 0; j < g.n_nodes; ++j) a.at(i, j) *= dinv[i] * dinv[j];
  return a;
}

/// L graph-convolution layers, a feature-aggregation layer combining the
/// final embedding with the raw node features, global mean pooling and a
/// log-softmax head.
struct GcnModel {
  uint32_t F = 0, H = 0, classes = 0, L = 0;
  std::vector<Mat> conv_w;               // [0]: F x H, then H x H
  std::vector<std::vector<double>> conv_b;
  Mat wf;                                // (H + F) x H
  std::vector<double> bf;
  Mat wy;                                // H x classes
  std::vector<double> by;
  std::vector<double> mu, sigma;         // per-feature standardization

  size_t param_count() const {
    size_t n = wf.d.size() + bf.size() + wy.d.size() + by.size();
    for (const Mat& w : conv_w) n += w.d.size();
    for (const auto& b : conv_b) n += b.size();
    return n;
  }

  /// Visit every parameter array in a fixed order (used by the optimizer,
  /// gradient checking and serialization).
  template <typename Fn>
  void visit_params(Fn&& fn) {
    for (size_t l = 0; l < conv_w.size(); ++l) {
      fn(conv_w[l].d);
      fn(conv_b[l]);
    }
    fn(wf.d);
    fn(bf);
    fn(wy.d);
    fn(by);
  }
};

inline GcnModel init_model(uint32_t F, uint32_t H, uint32_t classes,
                           uint32_t L, uint64_t seed) {
  if (F == 0 || H == 0 || classes == 0 || L == 0)
    throw std::invalid_argument("model dimensions must be positive");
  GcnModel m;
  m.F = F;
  m.H = H;
  m.classes = classes;
  m.L = L;
  Rng rng = Rng(seed).split(0x6c17);
  auto xavier = [&](Mat& w) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    for (double& v : w.d) v = (2.0 * rng.next_double() - 1.0) * bound;
  };
  for (uint32_t l = 0; l < L; ++l) {
    m.conv_w.emplace_back(l == 0 ? F : H, H);
    xavier(m.conv_w.back());
    m.conv_b.emplace_back(H, 0.0);
  }
  m.wf = Mat(H + F, H);
  xavier(m.wf);
  m.bf.assign(H, 0.0);
  m.wy = Mat(H, classes);
  xavier(m.wy);
  m.by.assign(classes, 0.0);
  m.mu.assign(F, 0.0);
  m.sigma.assign(F, 1.0);
  return m;
}

namespace detail {

struct GcnCache {
  Mat X;              // standardized features
  std::vector<Mat> S; // Ahat * E_l
  std::vector<Mat> Z; // S * W + b (pre-activation)
  std::vector<Mat> E; // E[0] = X, E[l+1] = relu(Z[l])
  Mat U;              // [E_L | X]
  std::vector<double> h, r, logp;
};

inline Mat standardize(const CircuitGraph& g, const GcnModel& m) {
  if (g.node_features.empty() || g.node_features[0].size() != m.F)
    throw std::invalid_argument("feature width mismatch");
  Mat x(g.n_nodes, m.F);
  for (uint32_t i = 0; i < g.n_nodes; ++i)
    for (uint32_t j = 0; j < m.F; ++j)
      x.at(i, j) = (g.node_features[i][j] - m.mu[j]) / m.sigma[j];
  return x;
}

inline GcnCache gcn_forward(const GcnModel& m, const CircuitGraph& g,
                            const Mat& ahat) {
  GcnCache c;
  c.X = standardize(g, m);
  c.E.push_back(c.X);
  for (uint32_t l = 0; l < m.L; ++l) {
    c.S.push_back(matmul(ahat, c.E.back()));
    Mat z = matmul(c.S.back(), m.conv_w[l]);
    for (size_t i = 0; i < z.rows; ++i)
      for (size_t j = 0; j < z.cols; ++j) z.at(i, j) += m.conv_b[l][j];
    Mat e = z;
    for (double& v : e.d) v = std::max(0.0, v);
    c.Z.push_back(std::move(z));
    c.E.push_back(std::move(e));
  }
  const Mat& el = c.E.back();
  c.U = Mat(g.n_nodes, m.H + m.F);
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    for (uint32_t j = 0; j < m.H; ++j) c.U.at(i, j) = el.at(i, j);
    for (uint32_t j = 0; j < m.F; ++j) c.U.at(i, m.H + j) = c.X.at(i, j);
  }
  const Mat v = matmul(c.U, m.wf);
  c.h.assign(m.H, 0.0);
  for (size_t i = 0; i < v.rows; ++i)
    for (uint32_t j = 0; j < m.H; ++j) c.h[j] += v.at(i, j);
  for (uint32_t j = 0; j < m.H; ++j)
    c.h[j] = c.h[j] / static_cast<double>(g.n_nodes) + m.bf[j];
  c.r.assign(m.H, 0.0);
  for (uint32_t j = 0; j < m.H; ++j) c.r[j] = std::max(0.0, c.h[j]);
  std::vector<double> logits(m.classes, 0.0);
  for (uint32_t k = 0; k < m.classes; ++k) {
    double acc = m.by[k];
    for (uint32_t j = 0; j < m.H; ++j) acc += c.r[j] * m.wy.at(j, k);
    logits[k] = acc;
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v2 : logits) mx = std::max(mx, v2);
  double lse = 0.0;
  for (double v2 : logits) lse += std::exp(v2 - mx);
  lse = mx + std::log(lse);
  c.logp.assign(m.classes, 0.0);
  for (uint32_t k = 0; k < m.classes; ++k) c.logp[k] = logits[k] - lse;
  return c;
}

struct GcnGrads {
  std::vector<Mat> conv_w;
  std::vector<std::vector<double>> conv_b;
  Mat wf;
  std::vector<double> bf;
  Mat wy;
  std::vector<double> by;

  explicit GcnGrads(const GcnModel& m) {
    for (uint32_t l = 0; l < m.L; ++l) {
      conv_w.emplace_back(m.conv_w[l].rows, m.conv_w[l].cols);
      conv_b.emplace_back(m.H, 0.0);
    }
    wf = Mat(m.wf.rows, m.wf.cols);
    bf.assign(m.H, 0.0);
    wy = Mat(m.wy.rows, m.wy.cols);
    by.assign(m.classes, 0.0);
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    for (size_t l = 0; l < conv_w.size(); ++l) {
      fn(conv_w[l].d);
      fn(conv_b[l]);
    }
    fn(wf.d);
    fn(bf);
    fn(wy.d);
    fn(by);
  }
};

/// Accumulate the NLL gradient for one graph into `grads`; returns the loss.
inline double gcn_backward(const GcnModel& m, const GcnCache& c,
                           const Mat& ahat, int label, GcnGrads& grads) {
  const double loss = -c.logp[label];
  const size_t n = c.X.rows;

  std::vector<double> dlogits(m.classes);
  for (uint32_t k = 0; k < m.classes; ++k)
    dlogits[k] = std::exp(c.logp[k]) - (static_cast<int>(k) == label ? 1.0 : 0.0);
  for (uint32_t k = 0; k < m.classes; ++k) {
    grads.by[k] += dlogits[k];
    for (uint32_t j = 0; j < m.H; ++j)
      grads.wy.at(j, k) += c.r[j] * dlogits[k];
  }
  std::vector<double> dh(m.H, 0.0);
  for (uint32_t j = 0; j < m.H; ++j) {
    double acc = 0.0;
    for (uint32_t k = 0; k < m.classes; ++k)
      acc += dlogits[k] * m.wy.at(j, k);
    dh[j] = c.h[j] > 0.0 ? acc : 0.0;
  }
  for (uint32_t j = 0; j < m.H; ++j) grads.bf[j] += dh[j];
  Mat dv(n, m.H);
  for (size_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < m.H; ++j)
      dv.at(i, j) = dh[j] / static_cast<double>(n);
  const Mat dwf = matmul_tn(c.U, dv);
  for (size_t i = 0; i < dwf.d.size(); ++i) grads.wf.d[i] += dwf.d[i];
  const Mat du = matmul_nt(dv, m.wf);

  Mat de(n, m.H);
  for (size_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < m.H; ++j) de.at(i, j) = du.at(i, j);

  for (int l = static_cast<int>(m.L) - 1; l >= 0; --l) {
    Mat dz = de;
    for (size_t i = 0; i < dz.d.size(); ++i)
      if (c.Z[l].d[i] <= 0.0) dz.d[i] = 0.0;
    const Mat dw = matmul_tn(c.S[l], dz);
    for (size_t i = 0; i < dw.d.size(); ++i) grads.conv_w[l].d[i] += dw.d[i];
    for (size_t i = 0; i < dz.rows; ++i)
      for (uint32_t j = 0; j < m.H; ++j) grads.conv_b[l][j] += dz.at(i, j);
    if (l > 0) {
      const Mat dsl = matmul_nt(dz, m.conv_w[l]);
      de = matmul(ahat, dsl); // Ahat is symmetric
    }
  }
  return loss;
}

} // namespace detail

/// Log-probability vector over classes; Sum exp = 1 within 1e-9.
inline std::vector<double> forward(const GcnModel& m, const CircuitGraph& g) {
  return detail::gcn_forward(m, g, normalized_adjacency(g)).logp;
}

inline int predict(const GcnModel& m, const CircuitGraph& g) {
  const auto lp = forward(m, g);
  return static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
}

struct TrainConfig {
  uint32_t iterations = 400;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint32_t eval_interval = 10;
  uint64_t seed = 1;
};

struct Metrics {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  std::vector<std::vector<uint64_t>> confusion;
  std::vector<std::pair<uint32_t, double>> loss_curve;
  std::vector<std::pair<uint32_t, double>> acc_curve; // test accuracy
};

/// Metrics from a list of (true label, predicted label) pairs.
inline Metrics metrics_from_pairs(
    const std::vector<std::pair<int, int>>& pairs, size_t classes) {
  Metrics m;
  m.confusion.assign(classes, std::vector<uint64_t>(classes, 0));
  size_t correct = 0;
  for (const auto& [t, p] : pairs) {
    ++m.confusion[t][p];
    if (t == p) ++correct;
  }
  m.accuracy = pairs.empty() ? 0.0
                             : static_cast<double>(correct) /
                                   static_cast<double>(pairs.size());
  double psum = 0.0, rsum = 0.0;
  size_t pn = 0, rn = 0;
  for (size_t c = 0; c < classes; ++c) {
    uint64_t tp = m.confusion[c][c], fp = 0, fn = 0;
    for (size_t o = 0; o < classes; ++o) {
      if (o == c) continue;
      fp += m.confusion[o][c];
      fn += m.confusion[c][o];
    }
    if (tp + fp > 0) {
      psum += static_cast<double>(tp) / static_cast<double>(tp + fp);
      ++pn;
    }
    if (tp + fn > 0) {
      rsum += static_cast<double>(tp) / static_cast<double>(tp + fn);
      ++rn;
    }
  }
  m.macro_precision = pn ? psum / pn : 0.0;
  m.macro_recall = rn ? rsum / rn : 0.0;
  return m;
}

/// Fit the standardization statistics on the training split only.
inline void fit_standardization(GcnModel& m, const Dataset& d) {
  m.mu.assign(m.F, 0.0);
  m.sigma.assign(m.F, 0.0);
  size_t rows = 0;
  for (size_t gi : d.train_idx) {
    for (const auto& row : d.graphs[gi].node_features) {
      for (uint32_t j = 0; j < m.F; ++j) m.mu[j] += row[j];
      ++rows;
    }
  }
  for (uint32_t j = 0; j < m.F; ++j) m.mu[j] /= static_cast<double>(rows);
  for (size_t gi : d.train_idx)
    for (const auto& row : d.graphs[gi].node_features)
      for (uint32_t j = 0; j < m.F; ++j) {
        const double dv = row[j] - m.mu[j];
        m.sigma[j] += dv * dv;
      }
  for (uint32_t j = 0; j < m.F; ++j) {
    m.sigma[j] = std::sqrt(m.sigma[j] / static_cast<double>(rows));
    if (m.sigma[j] < 1e-9) m.sigma[j] = 1.0;
  }
}

namespace detail {

/// Adam state over the model's flattened parameter arrays.
struct Adam {
  std::vector<std::vector<double>> m1, m2;
  uint64_t t = 0;

  explicit Adam(GcnModel& model) {
    model.visit_params([&](std::vector<double>& p) {
      m1.emplace_back(p.size(), 0.0);
      m2.emplace_back(p.size(), 0.0);
    });
  }

  void step(GcnModel& model, GcnGrads& grads, const TrainConfig& cfg) {
    ++t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    size_t slot = 0;
    std::vector<std::vector<double>*> gptrs;
    grads.visit([&](std::vector<double>& g) { gptrs.push_back(&g); });
    model.visit_params([&](std::vector<double>& p) {
      std::vector<double>& g = *gptrs[slot];
      for (size_t i = 0; i < p.size(); ++i) {
        m1[slot][i] = cfg.beta1 * m1[slot][i] + (1.0 - cfg.beta1) * g[i];
        m2[slot][i] = cfg.beta2 * m2[slot][i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mhat = m1[slot][i] / bc1;
        const double vhat = m2[slot][i] / bc2;
        p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      }
      ++slot;
    });
  }
};

} // namespace detail

inline Metrics evaluate(const GcnModel& m, const Dataset& d,
                        const std::vector<size_t>& idx) {
  std::vector<std::pair<int, int>> pairs;
  for (size_t gi : idx)
    pairs.emplace_back(d.graphs[gi].label, predict(m, d.graphs[gi]));
  return metrics_from_pairs(pairs, d.n_classes());
}

inline Metrics evaluate(const GcnModel& m, const Dataset& d) {
  return evaluate(m, d, d.test_idx);
}

/// Full-batch Adam on the train split NLL; curves sampled every
/// eval_interval iterations. Deterministic per seed.
inline Metrics train(GcnModel& m, const Dataset& d, const TrainConfig& cfg) {
  if (d.feature_width() != m.F)
    throw std::invalid_argument("dataset/model feature width mismatch");
  if (d.n_classes() != m.classes)
    throw std::invalid_argument("dataset/model class count mismatch");
  fit_standardization(m, d);

  std::vector<Mat> ahat(d.graphs.size());
  for (size_t i = 0; i < d.graphs.size(); ++i)
    ahat[i] = normalized_adjacency(d.graphs[i]);

  detail::Adam adam(m);
  Metrics out;
  for (uint32_t it = 1; it <= cfg.iterations; ++it) {
    detail::GcnGrads grads(m);
    double loss = 0.0;
    for (size_t gi : d.train_idx) {
      const detail::GcnCache c = detail::gcn_forward(m, d.graphs[gi], ahat[gi]);
      loss += detail::gcn_backward(m, c, ahat[gi], d.graphs[gi].label, grads);
    }
    const double inv = 1.0 / static_cast<double>(d.train_idx.size());
    loss *= inv;
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged at iteration " +
                               std::to_string(it));
    grads.visit([&](std::vector<double>& g) {
      for (double& v : g) v *= inv;
    });
    adam.step(m, grads, cfg);
    if (it % cfg.eval_interval == 0 || it == cfg.iterations) {
      out.loss_curve.emplace_back(it, loss);
      out.acc_curve.emplace_back(it, evaluate(m, d).accuracy);
    }
  }
  const Metrics final_eval = evaluate(m, d);
  out.accuracy = final_eval.accuracy;
  out.macro_precision = final_eval.macro_precision;
  out.macro_recall = final_eval.macro_recall;
  out.confusion = final_eval.confusion;
  return out;
}

/// First curve iteration reaching `fraction` of the final accuracy.
inline uint32_t iterations_to_fraction(
    const std::vector<std::pair<uint32_t, double>>& curve, double fraction) {
  if (curve.empty()) throw std::invalid_argument("empty curve");
  const double target = fraction * curve.back().second;
  for (const auto& [it, acc] : curve)
    if (acc >= target) return it;
  return curve.back().first;
}

/// Max relative error between analytic gradients and central differences
/// over a random subsample of parameter coordinates.
inline double grad_check(GcnModel m, const CircuitGraph& g, double epsilon,
                         uint64_t seed = 7, size_t coords = 200) {
  if (epsilon < 1e-7 || epsilon > 1e-3)
    throw std::invalid_argument("epsilon outside [1e-7, 1e-3]");
  const Mat ahat = normalized_adjacency(g);
  detail::GcnGrads grads(m);
  detail::gcn_backward(m, detail::gcn_forward(m, g, ahat), ahat, g.label,
                       grads);

  std::vector<std::vector<double>*> params, gs;
  m.visit_params([&](std::vector<double>& p) { params.push_back(&p); });
  grads.visit([&](std::vector<double>& p) { gs.push_back(&p); });
  size_t total = 0;
  for (auto* p : params) total += p->size();

  Rng rng = Rng(seed).split(0x9cad);
  double max_rel = 0.0;
  for (size_t c = 0; c < std::min(coords, total); ++c) {
    size_t flat = rng.next_below(total);
    size_t slot = 0;
    while (flat >= params[slot]->size()) {
      flat -= params[slot]->size();
      ++slot;
    }
    double& p = (*params[slot])[flat];
    const double analytic = (*gs[slot])[flat];
    const double orig = p;
    p = orig + epsilon;
    const double lp = -detail::gcn_forward(m, g, ahat).logp[g.label];
    p = orig - epsilon;
    const double lm = -detail::gcn_forward(m, g, ahat).logp[g.label];
    p = orig;
    const double numeric = (lp - lm) / (2.0 * epsilon);
    const double denom = std::max(1e-8, std::abs(analytic) + std::abs(numeric));
    max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
  }
  return max_rel;
}

/// Text checkpoint with hexfloat values so reload is bit-exact.
inline void save_model(GcnModel& m, std::ostream& os) {
  os << "gcn " << m.F << " " << m.H << " " << m.classes << " " << m.L << "\n";
  os << std::hexfloat;
  for (double v : m.mu) os << v << " ";
  os << "\n";
  for (double v : m.sigma) os << v << " ";
  os << "\n";
  m.visit_params([&](std::vector<double>& p) {
    for (double v : p) os << v << " ";
    os << "\n";
  });
  os << std::defaultfloat;
}

inline GcnModel load_model(std::istream& is) {
  std::string tag;
  uint32_t F, H, classes, L;
  if (!(is >> tag >> F >> H >> classes >> L) || tag != "gcn")
    throw std::invalid_argument("malformed model checkpoint");
  GcnModel m = init_model(F, H, classes, L, 0);
  auto read_vec = [&](std::vector<double>& v) {
    for (double& x : v) {
      std::string s;
      if (!(is >> s)) throw std::invalid_argument("truncated checkpoint");
      x = std::strtod(s.c_str(), nullptr);
    }
  };
  read_vec(m.mu);
  read_vec(m.sigma);
  m.visit_params(read_vec);
  return m;
}

// ---------------------------------------------------------------------------
// Flat baselines: same optimizer machinery over flattened node features.

enum class BaselineKind { Logreg, Mlp };

namespace detail {

struct FlatModel {
  std::vector<Mat> w;
  std::vector<std::vector<double>> b;

  template <typename Fn>
  void visit(Fn&& fn) {
    for (size_t i = 0; i < w.size(); ++i) {
      fn(w[i].d);
      fn(b[i]);
    }
  }
};

inline std::vector<double> flat_forward(const FlatModel& m,
                                        const std::vector<double>& x,
                                        std::vector<std::vector<double>>* acts) {
  std::vector<double> cur = x;
  if (acts) acts->push_back(cur);
  for (size_t layer = 0; layer < m.w.size(); ++layer) {
    std::vector<double> next(m.w[layer].cols, 0.0);
    for (size_t j = 0; j < next.size(); ++j) next[j] = m.b[layer][j];
    for (size_t i = 0; i < cur.size(); ++i) {
      if (cur[i] == 0.0) continue;
      for (size_t j = 0; j < next.size(); ++j)
        next[j] += cur[i] * m.w[layer].at(i, j);
    }
    if (layer + 1 < m.w.size())
      for (double& v : next) v = std::max(0.0, v);
    cur = std::move(next);
    if (acts) acts->push_back(cur);
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : cur) mx = std::max(mx, v);
  double lse = 0.0;
  for (double v : cur) lse += std::exp(v - mx);
  lse = mx + std::log(lse);
  for (double& v : cur) v -= lse;
  if (acts) acts->back() = cur;
  return cur;
}

} // namespace detail

/// Classifier over flattened, zero-padded node-feature matrices; the graph
/// structure is deliberately discarded.
inline Metrics flat_baseline(const Dataset& d, BaselineKind kind,
                             const TrainConfig& cfg, uint32_t mlp_hidden = 64) {
  const size_t dim = static_cast<size_t>(d.graphs[0].n_nodes) *
                     d.feature_width();
  const size_t classes = d.n_classes();

  // standardize on the train split
  std::vector<double> mu(dim, 0.0), sigma(dim, 0.0);
  auto flatten = [&](const CircuitGraph& g) {
    std::vector<double> x(dim, 0.0);
    size_t k = 0;
    for (const auto& row : g.node_features)
      for (double v : row) x[k++] = v;
    return x;
  };
  for (size_t gi : d.train_idx) {
    const auto x = flatten(d.graphs[gi]);
    for (size_t i = 0; i < dim; ++i) mu[i] += x[i];
  }
  for (size_t i = 0; i < dim; ++i)
    mu[i] /= static_cast<double>(d.train_idx.size());
  for (size_t gi : d.train_idx) {
    const auto x = flatten(d.graphs[gi]);
    for (size_t i = 0; i < dim; ++i)
      sigma[i] += (x[i] - mu[i]) * (x[i] - mu[i]);
  }
  for (size_t i = 0; i < dim; ++i) {
    sigma[i] = std::sqrt(sigma[i] / static_cast<double>(d.train_idx.size()));
    if (sigma[i] < 1e-9) sigma[i] = 1.0;
  }
  auto features = [&](const CircuitGraph& g) {
    auto x = flatten(g);
    for (size_t i = 0; i < dim; ++i) x[i] = (x[i] - mu[i]) / sigma[i];
    return x;
  };

  detail::FlatModel m;
  Rng rng = Rng(cfg.seed).split(0xf1a7);
  auto xavier = [&](Mat& w) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    for (double& v : w.d) v = (2.0 * rng.next_double() - 1.0) * bound;
  };
  if (kind == BaselineKind::Logreg) {
    m.w.emplace_back(dim, classes);
    m.b.emplace_back(classes, 0.0);
  } else {
    m.w.emplace_back(dim, mlp_hidden);
    m.b.emplace_back(mlp_hidden, 0.0);
    m.w.emplace_back(mlp_hidden, classes);
    m.b.emplace_back(classes, 0.0);
  }
  for (Mat& w : m.w) xavier(w);

  // Adam state
  std::vector<std::vector<double>> a1, a2;
  m.visit([&](std::vector<double>& p) {
    a1.emplace_back(p.size(), 0.0);
    a2.emplace_back(p.size(), 0.0);
  });

  Metrics out;
  for (uint32_t it = 1; it <= cfg.iterations; ++it) {
    detail::FlatModel grads = m;
    grads.visit([](std::vector<double>& p) {
      std::fill(p.begin(), p.end(), 0.0);
    });
    double loss = 0.0;
    for (size_t gi : d.train_idx) {
      std::vector<std::vector<double>> acts;
      const auto x = features(d.graphs[gi]);
      const auto logp = detail::flat_forward(m, x, &acts);
      const int label = d.graphs[gi].label;
      loss += -logp[label];
      std::vector<double> delta(classes);
      for (size_t k = 0; k < classes; ++k)
        delta[k] =
            std::exp(logp[k]) - (static_cast<int>(k) == label ? 1.0 : 0.0);
      for (int layer = static_cast<int>(m.w.size()) - 1; layer >= 0; --layer) {
        const auto& in = acts[layer];
        for (size_t j = 0; j < delta.size(); ++j) grads.b[layer][j] += delta[j];
        for (size_t i = 0; i < in.size(); ++i) {
          if (in[i] == 0.0) continue;
          for (size_t j = 0; j < delta.size(); ++j)
            grads.w[layer].at(i, j) += in[i] * delta[j];
        }
        if (layer > 0) {
          std::vector<double> prev(in.size(), 0.0);
          for (size_t i = 0; i < in.size(); ++i) {
            double acc = 0.0;
            for (size_t j = 0; j < delta.size(); ++j)
              acc += delta[j] * m.w[layer].at(i, j);
            prev[i] = in[i] > 0.0 ? acc : 0.0;
          }
          delta = std::move(prev);
        }
      }
    }
    const double inv = 1.0 / static_cast<double>(d.train_idx.size());
    loss *= inv;
    if (!std::isfinite(loss))
      throw std::runtime_error("baseline diverged at iteration " +
                               std::to_string(it));
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(it));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(it));
    size_t slot = 0;
    std::vector<std::vector<double>*> gv;
    grads.visit([&](std::vector<double>& g) { gv.push_back(&g); });
    m.visit([&](std::vector<double>& p) {
      std::vector<double>& g = *gv[slot];
      for (size_t i = 0; i < p.size(); ++i) {
        const double gi2 = g[i] * inv;
        a1[slot][i] = cfg.beta1 * a1[slot][i] + (1.0 - cfg.beta1) * gi2;
        a2[slot][i] = cfg.beta2 * a2[slot][i] + (1.0 - cfg.beta2) * gi2 * gi2;
        p[i] -= cfg.learning_rate * (a1[slot][i] / bc1) /
                (std::sqrt(a2[slot][i] / bc2) + cfg.adam_eps);
      }
      ++slot;
    });
    if (it % cfg.eval_interval == 0 || it == cfg.iterations)
      out.loss_curve.emplace_back(it, loss);
  }

  std::vector<std::pair<int, int>> pairs;
  for (size_t gi : d.test_idx) {
    const auto logp = detail::flat_forward(m, features(d.graphs[gi]), nullptr);
    const int pred = static_cast<int>(
        std::max_element(logp.begin(), logp.end()) - logp.begin());
    pairs.emplace_back(d.graphs[gi].label, pred);
  }
  const Metrics ev = metrics_from_pairs(pairs, classes);
  out.accuracy = ev.accuracy;
  out.macro_precision = ev.macro_precision;
  out.macro_recall = ev.macro_recall;
  out.confusion = ev.confusion;
  return out;
}

} // namespace qsnoop

#endif
