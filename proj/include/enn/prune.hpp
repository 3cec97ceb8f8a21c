#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "enn/network.hpp"
#include "enn/train.hpp"

namespace enn {

struct PruneReport {
  double threshold = 0.0;
  std::size_t total_coeffs = 0;
  std::size_t pruned = 0;
  // per_layer_per_q[layer][q-1] = coefficients masked by this call; rows for
  // layers without trainable dct activations stay empty
  std::vector<std::vector<std::size_t>> per_layer_per_q;
  double mse_before = std::numeric_limits<double>::quiet_NaN();
  double mse_after = std::numeric_limits<double>::quiet_NaN();
};

// Masks every active dct coefficient with F^2 <= rho: the value becomes
// exactly 0 and the optimizer contract keeps it there. When a dataset is
// given the report carries the mean squared error before and after.
inline PruneReport prune_coefficients(Network& net, double rho, const Dataset* data = nullptr) {
  if (rho < 0.0) throw std::invalid_argument("prune_coefficients: rho must be >= 0");
  PruneReport report;
  report.threshold = rho;
  report.per_layer_per_q.resize(net.layers.size());
  if (data) report.mse_before = evaluate_mse(net, *data);

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Layer& layer = net.layers[l];
    if (layer.kind != ActivationKind::dct) continue;
    const std::size_t q = static_cast<std::size_t>(layer.dct.front().q_count());
    report.per_layer_per_q[l].assign(q, 0);
    for (DctActivation& act : layer.dct) {
      for (std::size_t qi = 0; qi < q; ++qi) {
        ++report.total_coeffs;
        if (!act.mask[qi]) continue;
        const double f = act.coeffs[qi];
        if (f * f <= rho) {
          act.coeffs[qi] = 0.0;
          act.mask[qi] = 0;
          ++report.pruned;
          ++report.per_layer_per_q[l][qi];
        }
      }
    }
  }
  if (data) report.mse_after = evaluate_mse(net, *data);
  return report;
}

// Smallest squared-magnitude value rho from the network's coefficient
// multiset such that pruning at rho removes at least the requested share.
// fraction 0 returns 0 (only exactly-zero coefficients qualify).
inline double threshold_for_fraction(const Network& net, double fraction) {
  if (fraction < 0.0 || fraction > 1.0)
    throw std::invalid_argument("threshold_for_fraction: fraction must be in [0,1]");
  std::vector<double> energies;
  for (const Layer& layer : net.layers) {
    if (layer.kind != ActivationKind::dct) continue;
    for (const DctActivation& act : layer.dct)
      for (double f : act.coeffs) energies.push_back(f * f);
  }
  if (energies.empty())
    throw std::invalid_argument("threshold_for_fraction: network has no dct coefficients");
  if (fraction == 0.0) return 0.0;

  std::sort(energies.begin(), energies.end());
  const std::size_t total = energies.size();
  for (std::size_t k = 0; k < total; ++k) {
    // ties: everything equal to energies[k] is pruned together
    if (k + 1 < total && energies[k + 1] == energies[k]) continue;
    if (static_cast<double>(k + 1) >= fraction * static_cast<double>(total))
      return energies[k];
  }
  return energies.back();
}

// 1 - cosine similarity; 0 for aligned vectors, 2 for opposite ones.
inline double coeff_distance(const Vector& f1, const Vector& f2) {
  if (f1.size() != f2.size()) throw std::invalid_argument("coeff_distance: length mismatch");
  double d = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    d += f1[i] * f2[i];
    n1 += f1[i] * f1[i];
    n2 += f2[i] * f2[i];
  }
  if (n1 == 0.0 || n2 == 0.0)
    throw std::domain_error("coeff_distance: undefined for a zero vector");
  return 1.0 - d / (std::sqrt(n1) * std::sqrt(n2));
}

// Angle in [0, pi] between two weight vectors (cosine similarity clamped
// before acos). Invariant under positive rescaling of either argument.
inline double bump_angle(const Vector& w1, const Vector& w2) {
  if (w1.size() != w2.size()) throw std::invalid_argument("bump_angle: length mismatch");
  double d = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < w1.size(); ++i) {
    d += w1[i] * w2[i];
    n1 += w1[i] * w1[i];
    n2 += w2[i] * w2[i];
  }
  if (n1 == 0.0 || n2 == 0.0) throw std::domain_error("bump_angle: undefined for a zero vector");
  double cosine = d / (std::sqrt(n1) * std::sqrt(n2));
  if (cosine > 1.0) cosine = 1.0;
  if (cosine < -1.0) cosine = -1.0;
  return std::acos(cosine);
}

struct RedundantPair {
  std::size_t layer = 0;
  std::size_t m = 0;        // kept neuron (lower index)
  std::size_t m_other = 0;  // merge candidate
  double coeff_distance = 0.0;
  double weight_angle = 0.0;
};

struct RedundancyReport {
  double dist_tol = 0.05;
  double angle_tol = 10.0 * std::numbers::pi / 180.0;
  std::vector<RedundantPair> pairs;
};

namespace detail {

inline Vector weight_column(const Layer& layer, std::size_t m) {
  Vector w(layer.w.rows());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = layer.w(i, m);
  return w;
}

inline bool all_zero(const Vector& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace detail

// Intra-layer neuron pairs whose activation coefficients and weight
// directions are both within tolerance. Pairs involving an all-zero
// coefficient or weight vector are skipped (distance undefined there).
inline RedundancyReport detect_redundant_bumps(const Network& net, double dist_tol,
                                               double angle_tol) {
  if (dist_tol <= 0.0 || angle_tol <= 0.0)
    throw std::invalid_argument("detect_redundant_bumps: tolerances must be > 0");
  RedundancyReport report;
  report.dist_tol = dist_tol;
  report.angle_tol = angle_tol;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (layer.kind != ActivationKind::dct) continue;
    const std::size_t width = layer.b.size();
    for (std::size_t m = 0; m + 1 < width; ++m) {
      if (detail::all_zero(layer.dct[m].coeffs)) continue;
      const Vector wm = detail::weight_column(layer, m);
      if (detail::all_zero(wm)) continue;
      for (std::size_t m2 = m + 1; m2 < width; ++m2) {
        if (detail::all_zero(layer.dct[m2].coeffs)) continue;
        const Vector wm2 = detail::weight_column(layer, m2);
        if (detail::all_zero(wm2)) continue;
        const double dist = coeff_distance(layer.dct[m].coeffs, layer.dct[m2].coeffs);
        if (dist >= dist_tol) continue;
        const double angle = bump_angle(wm, wm2);
        if (angle >= angle_tol) continue;
        report.pairs.push_back(RedundantPair{l, m, m2, dist, angle});
      }
    }
  }
  return report;
}

// Collapses each reported pair by keeping the lower-indexed neuron and adding
// the deleted neuron's outgoing weights onto it (exact when the two responses
// are identical, an approximation otherwise). Pairs touching an already
// deleted neuron are skipped in report order.
inline Network merge_redundant_neurons(const Network& net, const RedundancyReport& report) {
  Network out = net;
  std::vector<std::vector<char>> deleted(out.layers.size());
  for (std::size_t l = 0; l < out.layers.size(); ++l)
    deleted[l].assign(out.layers[l].b.size(), 0);

  for (const RedundantPair& pair : report.pairs) {
    if (pair.layer >= out.layers.size())
      throw std::invalid_argument("merge_redundant_neurons: layer out of range");
    if (pair.layer + 1 == out.layers.size())
      throw std::invalid_argument("merge_redundant_neurons: cannot merge the output layer");
    Layer& layer = out.layers[pair.layer];
    Layer& next = out.layers[pair.layer + 1];
    const std::size_t keep = std::min(pair.m, pair.m_other);
    const std::size_t drop = std::max(pair.m, pair.m_other);
    if (keep == drop || drop >= layer.b.size())
      throw std::invalid_argument("merge_redundant_neurons: bad neuron pair");
    if (pair.coeff_distance >= report.dist_tol || pair.weight_angle >= report.angle_tol)
      throw std::invalid_argument("merge_redundant_neurons: pair exceeds report tolerances");
    if (deleted[pair.layer][keep] || deleted[pair.layer][drop]) continue;  // greedy order
    for (std::size_t j = 0; j < next.b.size(); ++j) next.w(keep, j) += next.w(drop, j);
    deleted[pair.layer][drop] = 1;
  }

  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    const std::vector<char>& del = deleted[l];
    std::size_t survivors = 0;
    for (char d : del) survivors += d ? 0 : 1;
    if (survivors == del.size()) continue;

    Layer& layer = out.layers[l];
    Matrix w(layer.w.rows(), survivors);
    Vector b(survivors);
    std::vector<DctActivation> dct;
    std::vector<FourierActivation> fourier;
    std::size_t j2 = 0;
    for (std::size_t j = 0; j < del.size(); ++j) {
      if (del[j]) continue;
      for (std::size_t i = 0; i < layer.w.rows(); ++i) w(i, j2) = layer.w(i, j);
      b[j2] = layer.b[j];
      if (layer.kind == ActivationKind::dct) dct.push_back(layer.dct[j]);
      if (layer.kind == ActivationKind::fourier) fourier.push_back(layer.fourier[j]);
      ++j2;
    }
    layer.w = std::move(w);
    layer.b = std::move(b);
    layer.dct = std::move(dct);
    layer.fourier = std::move(fourier);

    // drop the matching rows of the next layer's weight matrix
    Layer& next = out.layers[l + 1];
    Matrix nw(survivors, next.b.size());
    std::size_t i2 = 0;
    for (std::size_t i = 0; i < del.size(); ++i) {
      if (del[i]) continue;
      for (std::size_t j = 0; j < next.b.size(); ++j) nw(i2, j) = next.w(i, j);
      ++i2;
    }
    next.w = std::move(nw);
  }
  out.cache = Workspace{};
  return out;
}

struct PrunedFrequencyCount {
  std::size_t layer = 0;
  int frequency = 0;  // odd index 2q-1
  std::size_t count = 0;
};

// Flattens the report's per-layer counts, keyed by odd frequency index.
inline std::vector<PrunedFrequencyCount> pruned_distribution(const PruneReport& report) {
  std::vector<PrunedFrequencyCount> out;
  for (std::size_t l = 0; l < report.per_layer_per_q.size(); ++l)
    for (std::size_t qi = 0; qi < report.per_layer_per_q[l].size(); ++qi)
      out.push_back(PrunedFrequencyCount{l, static_cast<int>(2 * qi + 1),
                                         report.per_layer_per_q[l][qi]});
  return out;
}

struct AngleHistogram {
  double lo = 0.0;
  double hi = std::numbers::pi;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
};

// Histogram of pairwise weight angles within one layer, over [0, pi].
inline AngleHistogram layer_angle_distribution(const Network& net, std::size_t layer_idx,
                                               int bins) {
  if (layer_idx >= net.layers.size())
    throw std::out_of_range("layer_angle_distribution: layer out of range");
  if (bins < 1) throw std::invalid_argument("layer_angle_distribution: bins must be >= 1");
  const Layer& layer = net.layers[layer_idx];
  AngleHistogram hist;
  hist.counts.assign(static_cast<std::size_t>(bins), 0);
  const std::size_t width = layer.b.size();
  std::vector<Vector> cols(width);
  for (std::size_t m = 0; m < width; ++m) cols[m] = detail::weight_column(layer, m);
  for (std::size_t m = 0; m + 1 < width; ++m) {
    if (detail::all_zero(cols[m])) continue;
    for (std::size_t m2 = m + 1; m2 < width; ++m2) {
      if (detail::all_zero(cols[m2])) continue;
      const double angle = bump_angle(cols[m], cols[m2]);
      std::size_t bin =
          static_cast<std::size_t>(angle / std::numbers::pi * static_cast<double>(bins));
      if (bin >= static_cast<std::size_t>(bins)) bin = static_cast<std::size_t>(bins) - 1;
      ++hist.counts[bin];
      ++hist.total;
    }
  }
  return hist;
}

inline double mean_layer_angle(const Network& net, std::size_t layer_idx) {
  const Layer& layer = net.layers.at(layer_idx);
  const std::size_t width = layer.b.size();
  std::vector<Vector> cols(width);
  for (std::size_t m = 0; m < width; ++m) cols[m] = detail::weight_column(layer, m);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m + 1 < width; ++m)
    for (std::size_t m2 = m + 1; m2 < width; ++m2) {
      sum += bump_angle(cols[m], cols[m2]);
      ++count;
    }
  if (count == 0) throw std::invalid_argument("mean_layer_angle: layer needs >= 2 neurons");
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// CSV exports

inline void write_prune_report_csv(const PruneReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_prune_report_csv: cannot open '" + path + "'");
  f << "threshold,total_coeffs,pruned,mse_before,mse_after\n";
  f << format_g17(report.threshold) << "," << report.total_coeffs << "," << report.pruned
    << ",";
  if (!std::isnan(report.mse_before)) f << format_g17(report.mse_before);
  f << ",";
  if (!std::isnan(report.mse_after)) f << format_g17(report.mse_after);
  f << "\n";
}

inline void write_pruned_distribution_csv(const PruneReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_pruned_distribution_csv: cannot open '" + path + "'");
  f << "layer,frequency,count\n";
  for (const PrunedFrequencyCount& row : pruned_distribution(report))
    f << row.layer << "," << row.frequency << "," << row.count << "\n";
}

inline void write_redundancy_csv(const RedundancyReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_redundancy_csv: cannot open '" + path + "'");
  f << "layer,m,m_prime,distance,angle\n";
  for (const RedundantPair& p : report.pairs)
    f << p.layer << "," << p.m << "," << p.m_other << "," << format_g17(p.coeff_distance)
      << "," << format_g17(p.weight_angle) << "\n";
}

inline void write_angle_histogram_csv(const AngleHistogram& hist, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_angle_histogram_csv: cannot open '" + path + "'");
  f << "bin_lo,bin_hi,count\n";
  const double step = (hist.hi - hist.lo) / static_cast<double>(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    f << format_g17(hist.lo + step * static_cast<double>(i)) << ","
      << format_g17(hist.lo + step * static_cast<double>(i + 1)) << "," << hist.counts[i]
      << "\n";
}

}  // namespace enn
