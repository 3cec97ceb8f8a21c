#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "enn/activation.hpp"
#include "enn/linalg.hpp"
#include "enn/rng.hpp"

namespace enn {

struct LayerSpec {
  int width = 1;
  ActivationKind kind = ActivationKind::dct;
  int q = 6;             // dct / fourier coefficient count
  int n = 512;           // dct resolution
  double omega = 30.0;   // sine frequency
  double period = 2.0;   // fourier period
};

inline LayerSpec dct_layer(int width, int q = 6, int n = 512) {
  return LayerSpec{width, ActivationKind::dct, q, n, 30.0, 2.0};
}

inline LayerSpec baseline_layer(int width, ActivationKind kind) {
  return LayerSpec{width, kind, 6, 512, 30.0, 2.0};
}

struct Layer {
  Matrix w;  // fan_in x width
  Vector b;  // width
  ActivationKind kind = ActivationKind::dct;
  std::vector<DctActivation> dct;          // one per neuron when kind == dct
  std::vector<FourierActivation> fourier;  // one per neuron when kind == fourier
  double omega = 30.0;

  int fan_in() const { return static_cast<int>(w.rows()); }
  int width() const { return static_cast<int>(b.size()); }

  // trainable activation coefficients per neuron (Q for dct, 2Q for fourier)
  int coeffs_per_neuron() const {
    if (kind == ActivationKind::dct) return dct.empty() ? 0 : dct.front().q_count();
    if (kind == ActivationKind::fourier)
      return fourier.empty() ? 0 : 2 * fourier.front().q_count();
    return 0;
  }
};

// Scratch space for one forward/backward pass. The network keeps one as its
// cache of the last forward call (z, zbar, s per layer); training loops that
// run shards in parallel give each shard its own.
struct Workspace {
  std::vector<Vector> z, zbar, s;
  std::vector<Vector> basis;  // dct: Q cos values per neuron; fourier: Q cos then Q sin
  std::vector<Vector> dact;   // d s[m] / d z[m], scale stage included
  Vector delta_a, delta_b;
};

struct Network {
  int input_dim = 0;
  std::uint64_t seed = 0;
  std::vector<Layer> layers;
  Workspace cache;
};

struct LayerGrads {
  Matrix dw;
  Vector db;
  std::vector<Vector> dcoeffs;  // per neuron; empty for fixed activations
};

struct Gradients {
  std::vector<LayerGrads> layers;
};

inline Gradients make_gradients(const Network& net) {
  Gradients g;
  g.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    g.layers[l].dw = Matrix(layer.w.rows(), layer.w.cols());
    g.layers[l].db.assign(layer.b.size(), 0.0);
    const int cc = layer.coeffs_per_neuron();
    if (cc > 0)
      g.layers[l].dcoeffs.assign(layer.b.size(), Vector(static_cast<std::size_t>(cc), 0.0));
  }
  return g;
}

inline void zero_gradients(Gradients& g) {
  for (LayerGrads& lg : g.layers) {
    std::fill(lg.dw.data().begin(), lg.dw.data().end(), 0.0);
    std::fill(lg.db.begin(), lg.db.end(), 0.0);
    for (Vector& c : lg.dcoeffs) std::fill(c.begin(), c.end(), 0.0);
  }
}

inline void scale_gradients(Gradients& g, double s) {
  for (LayerGrads& lg : g.layers) {
    for (double& v : lg.dw.data()) v *= s;
    for (double& v : lg.db) v *= s;
    for (Vector& c : lg.dcoeffs)
      for (double& v : c) v *= s;
  }
}

inline void add_gradients(Gradients& dst, const Gradients& src) {
  for (std::size_t l = 0; l < dst.layers.size(); ++l) {
    LayerGrads& a = dst.layers[l];
    const LayerGrads& b = src.layers[l];
    for (std::size_t i = 0; i < a.dw.data().size(); ++i) a.dw.data()[i] += b.dw.data()[i];
    for (std::size_t i = 0; i < a.db.size(); ++i) a.db[i] += b.db[i];
    for (std::size_t m = 0; m < a.dcoeffs.size(); ++m)
      for (std::size_t i = 0; i < a.dcoeffs[m].size(); ++i)
        a.dcoeffs[m][i] += b.dcoeffs[m][i];
  }
}

// Monotone ramp used to seed every trainable activation: a soft step from
// -1 to +1 across the basis grid, antisymmetric about the grid midpoint so
// it lies almost entirely in the span of the odd-frequency columns.
inline Vector activation_init_ramp(int n) {
  Vector f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    f[static_cast<std::size_t>(i)] =
        std::tanh(3.0 * static_cast<double>(2 * i + 1 - n) / static_cast<double>(n));
  return f;
}

namespace detail {

// Fourier-series least-squares fit of the init ramp over one period,
// sampled on a uniform 512-point grid.
inline void fourier_ramp_coeffs(int q, double period, Vector& a_out, Vector& b_out) {
  constexpr int kGrid = 512;
  a_out.assign(static_cast<std::size_t>(q), 0.0);
  b_out.assign(static_cast<std::size_t>(q), 0.0);
  for (int k = 0; k < kGrid; ++k) {
    const double z = -period / 2.0 + period * static_cast<double>(k) / kGrid;
    const double f = std::tanh(3.0 * (2.0 * z / period));
    for (int qi = 1; qi <= q; ++qi) {
      const double phi = 2.0 * std::numbers::pi * qi * z / period;
      a_out[static_cast<std::size_t>(qi - 1)] += f * std::cos(phi);
      b_out[static_cast<std::size_t>(qi - 1)] += f * std::sin(phi);
    }
  }
  for (double& v : a_out) v *= 2.0 / kGrid;
  for (double& v : b_out) v *= 2.0 / kGrid;
}

}  // namespace detail

// Builds a network with W ~ Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), zero
// biases, and each trainable activation set to the ramp projection plus
// Uniform(-0.01, 0.01) per-coefficient noise. Draw order is fixed: per layer
// all W entries row-major, then per neuron the coefficient noise.
inline Network init_network(const std::vector<LayerSpec>& spec, int input_dim,
                            std::uint64_t seed) {
  if (spec.empty()) throw std::invalid_argument("init_network: empty layer spec");
  if (input_dim < 1) throw std::invalid_argument("init_network: input_dim must be >= 1");
  for (const LayerSpec& ls : spec)
    if (ls.width < 1) throw std::invalid_argument("init_network: zero-width layer");
  if (spec.back().width != 1)
    throw std::invalid_argument("init_network: output layer must have width 1");

  Network net;
  net.input_dim = input_dim;
  net.seed = seed;
  Rng rng(seed);

  int fan_in = input_dim;
  for (const LayerSpec& ls : spec) {
    Layer layer;
    layer.kind = ls.kind;
    layer.omega = ls.omega;
    layer.w = Matrix(static_cast<std::size_t>(fan_in), static_cast<std::size_t>(ls.width));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : layer.w.data()) v = rng.uniform(-bound, bound);
    layer.b.assign(static_cast<std::size_t>(ls.width), 0.0);

    if (ls.kind == ActivationKind::dct) {
      const Vector base = project_function(activation_init_ramp(ls.n), ls.q, ls.n);
      layer.dct.reserve(static_cast<std::size_t>(ls.width));
      for (int m = 0; m < ls.width; ++m) {
        DctActivation act = make_dct_activation(ls.q, ls.n);
        for (int qi = 0; qi < ls.q; ++qi)
          act.coeffs[static_cast<std::size_t>(qi)] =
              base[static_cast<std::size_t>(qi)] + rng.uniform(-0.01, 0.01);
        layer.dct.push_back(std::move(act));
      }
    } else if (ls.kind == ActivationKind::fourier) {
      Vector a_base, b_base;
      detail::fourier_ramp_coeffs(ls.q, ls.period, a_base, b_base);
      layer.fourier.reserve(static_cast<std::size_t>(ls.width));
      for (int m = 0; m < ls.width; ++m) {
        FourierActivation act = make_fourier_activation(ls.q, ls.period);
        for (int qi = 0; qi < ls.q; ++qi)
          act.cos_coeffs[static_cast<std::size_t>(qi)] =
              a_base[static_cast<std::size_t>(qi)] + rng.uniform(-0.01, 0.01);
        for (int qi = 0; qi < ls.q; ++qi)
          act.sin_coeffs[static_cast<std::size_t>(qi)] =
              b_base[static_cast<std::size_t>(qi)] + rng.uniform(-0.01, 0.01);
        layer.fourier.push_back(std::move(act));
      }
    }

    fan_in = ls.width;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace detail {

inline void ensure_workspace(const Network& net, Workspace& ws) {
  const std::size_t n_layers = net.layers.size();
  if (ws.z.size() != n_layers) {
    ws.z.resize(n_layers);
    ws.zbar.resize(n_layers);
    ws.s.resize(n_layers);
    ws.basis.resize(n_layers);
    ws.dact.resize(n_layers);
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t width = net.layers[l].b.size();
    if (ws.z[l].size() != width) {
      ws.z[l].resize(width);
      ws.zbar[l].resize(width);
      ws.s[l].resize(width);
      ws.dact[l].resize(width);
    }
    const std::size_t basis_len =
        width * static_cast<std::size_t>(net.layers[l].coeffs_per_neuron());
    if (ws.basis[l].size() != basis_len) ws.basis[l].resize(basis_len);
  }
}

// z = W^T s_prev + b, accumulated with ascending fan-in index per output.
inline void linear_forward(const Layer& layer, const Vector& s_prev, Vector& z) {
  const std::size_t width = layer.b.size();
  for (std::size_t j = 0; j < width; ++j) z[j] = layer.b[j];
  for (std::size_t i = 0; i < layer.w.rows(); ++i) {
    const double si = s_prev[i];
    const double* w_row = layer.w.row(i);
    for (std::size_t j = 0; j < width; ++j) z[j] += w_row[j] * si;
  }
}

}  // namespace detail

// Full forward pass writing z, zbar, s (and, when want_grads is set, the
// per-neuron basis values and activation derivatives) into ws.
inline double forward_pass(const Network& net, const Vector& x, Workspace& ws,
                           bool want_grads) {
  if (static_cast<int>(x.size()) != net.input_dim)
    throw std::invalid_argument("forward: input length does not match input_dim");
  detail::ensure_workspace(net, ws);

  const Vector* s_prev = &x;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    Vector& z = ws.z[l];
    Vector& zbar = ws.zbar[l];
    Vector& s = ws.s[l];
    detail::linear_forward(layer, *s_prev, z);

    const std::size_t width = layer.b.size();
    switch (layer.kind) {
      case ActivationKind::dct: {
        const int q = layer.dct.front().q_count();
        const int n = layer.dct.front().resolution;
        double sin_buf[64];
        std::vector<double> sin_heap;
        double* sin_q = sin_buf;
        if (q > 64) {
          sin_heap.resize(static_cast<std::size_t>(q));
          sin_q = sin_heap.data();
        }
        for (std::size_t m = 0; m < width; ++m) {
          zbar[m] = scale_input(z[m], n);
          double* cos_q = ws.basis[l].data() + m * static_cast<std::size_t>(q);
          const Vector& f = layer.dct[m].coeffs;
          double val = 0.0;
          if (want_grads) {
            detail::odd_cosines_sines(zbar[m], n, q, cos_q, sin_q);
            double slope = 0.0;  // d s / d zbar, times N/2 from the scale stage
            for (int qi = 0; qi < q; ++qi) {
              val += f[static_cast<std::size_t>(qi)] * cos_q[qi];
              slope += f[static_cast<std::size_t>(qi)] * static_cast<double>(2 * qi + 1) *
                       sin_q[qi];
            }
            ws.dact[l][m] = -0.5 * std::numbers::pi * slope;
          } else {
            detail::odd_cosines(zbar[m], n, q, cos_q);
            for (int qi = 0; qi < q; ++qi) val += f[static_cast<std::size_t>(qi)] * cos_q[qi];
          }
          s[m] = val;
        }
        break;
      }
      case ActivationKind::fourier: {
        const int q = layer.fourier.front().q_count();
        for (std::size_t m = 0; m < width; ++m) {
          zbar[m] = z[m];
          const FourierActivation& act = layer.fourier[m];
          double* cos_q = ws.basis[l].data() + m * static_cast<std::size_t>(2 * q);
          double* sin_q = cos_q + q;
          const double phi = 2.0 * std::numbers::pi * z[m] / act.period;
          detail::harmonics(phi, q, cos_q, sin_q);
          double val = 0.0, slope = 0.0;
          const double w0 = 2.0 * std::numbers::pi / act.period;
          for (int qi = 0; qi < q; ++qi) {
            const double a = act.cos_coeffs[static_cast<std::size_t>(qi)];
            const double bq = act.sin_coeffs[static_cast<std::size_t>(qi)];
            val += a * cos_q[qi] + bq * sin_q[qi];
            slope += static_cast<double>(qi + 1) * w0 * (-a * sin_q[qi] + bq * cos_q[qi]);
          }
          s[m] = val;
          ws.dact[l][m] = slope;
        }
        break;
      }
      default: {
        BaselineActivation act(layer.kind);
        act.omega = layer.omega;
        for (std::size_t m = 0; m < width; ++m) {
          zbar[m] = z[m];
          s[m] = baseline_eval(act, z[m]);
          ws.dact[l][m] = baseline_grad(act, z[m]);
        }
        break;
      }
    }
    s_prev = &s;
  }
  return ws.s.back()[0];
}

// Forward pass through the network's own cache.
inline double forward(Network& net, const Vector& x) {
  return forward_pass(net, x, net.cache, true);
}

// Gradients of the squared error (y - yhat)^2 with respect to every weight,
// bias, and active activation coefficient. Recomputes the forward pass into
// ws, so a stale cache is never an issue. With accumulate set the gradients
// are added onto `grads` (used for batch averaging).
inline double backward_pass(const Network& net, const Vector& x, double y, Workspace& ws,
                            Gradients& grads, bool accumulate) {
  const double yhat = forward_pass(net, x, ws, true);
  if (!accumulate) zero_gradients(grads);

  const std::size_t n_layers = net.layers.size();
  Vector& delta = ws.delta_a;  // d loss / d s_l
  delta.assign(1, -2.0 * (y - yhat));

  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& layer = net.layers[li];
    LayerGrads& lg = grads.layers[li];
    const std::size_t width = layer.b.size();

    // activation-coefficient gradients, then fold dact into delta -> d loss / d z
    if (layer.kind == ActivationKind::dct) {
      const int q = layer.dct.front().q_count();
      for (std::size_t m = 0; m < width; ++m) {
        const double d = delta[m];
        const double* cos_q = ws.basis[li].data() + m * static_cast<std::size_t>(q);
        Vector& dcf = lg.dcoeffs[m];
        const auto& mask = layer.dct[m].mask;
        for (int qi = 0; qi < q; ++qi)
          if (mask[static_cast<std::size_t>(qi)])
            dcf[static_cast<std::size_t>(qi)] += d * cos_q[qi];
        delta[m] = d * ws.dact[li][m];
      }
    } else if (layer.kind == ActivationKind::fourier) {
      const int q = layer.fourier.front().q_count();
      for (std::size_t m = 0; m < width; ++m) {
        const double d = delta[m];
        const double* cos_q = ws.basis[li].data() + m * static_cast<std::size_t>(2 * q);
        const double* sin_q = cos_q + q;
        Vector& dcf = lg.dcoeffs[m];  // a_1..a_Q then b_1..b_Q
        for (int qi = 0; qi < q; ++qi) {
          dcf[static_cast<std::size_t>(qi)] += d * cos_q[qi];
          dcf[static_cast<std::size_t>(q + qi)] += d * sin_q[qi];
        }
        delta[m] = d * ws.dact[li][m];
      }
    } else {
      for (std::size_t m = 0; m < width; ++m) delta[m] *= ws.dact[li][m];
    }

    const Vector& s_prev = li == 0 ? x : ws.s[li - 1];
    for (std::size_t j = 0; j < width; ++j) lg.db[j] += delta[j];
    outer_accumulate(lg.dw, s_prev, delta);

    if (li > 0) {
      Vector& delta_prev = ws.delta_b;
      delta_prev.assign(layer.w.rows(), 0.0);
      for (std::size_t i = 0; i < layer.w.rows(); ++i) {
        const double* w_row = layer.w.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < width; ++j) acc += w_row[j] * delta[j];
        delta_prev[i] = acc;
      }
      std::swap(ws.delta_a, ws.delta_b);
    }
  }
  return yhat;
}

inline Gradients backward(Network& net, const Vector& x, double y) {
  Gradients grads = make_gradients(net);
  backward_pass(net, x, y, net.cache, grads, false);
  return grads;
}

// Number of trainable scalars: per neuron fan_in + 1, plus the activation
// coefficients (Q for dct neurons, 2Q for fourier). Masked coefficients are
// still counted; see active_param_count.
inline std::size_t param_count(const Network& net) {
  std::size_t total = 0;
  for (const Layer& layer : net.layers) {
    total += layer.w.rows() * layer.w.cols() + layer.b.size();
    total += layer.b.size() * static_cast<std::size_t>(layer.coeffs_per_neuron());
  }
  return total;
}

inline std::size_t active_param_count(const Network& net) {
  std::size_t total = 0;
  for (const Layer& layer : net.layers) {
    total += layer.w.rows() * layer.w.cols() + layer.b.size();
    if (layer.kind == ActivationKind::dct) {
      for (const DctActivation& act : layer.dct)
        for (std::uint8_t m : act.mask) total += m ? 1 : 0;
    } else if (layer.kind == ActivationKind::fourier) {
      total += layer.b.size() * static_cast<std::size_t>(layer.coeffs_per_neuron());
    }
  }
  return total;
}

// Hidden width sufficient for a single-hidden-layer representation of any
// continuous function of input_dim variables: 2 * input_dim + 1.
inline int kolmogorov_width(int input_dim) {
  if (input_dim < 1) throw std::invalid_argument("kolmogorov_width: input_dim must be >= 1");
  return 2 * input_dim + 1;
}

// sign(yhat) with ties (yhat == 0) mapped to +1.
inline int predict_class(Network& net, const Vector& x) {
  return forward(net, x) >= 0.0 ? 1 : -1;
}

namespace detail {

// Lattice coordinate conventions shared by rasters and decision maps:
// column c -> x1 = -1 + 2c/(g-1), row r -> x2 = 1 - 2r/(g-1) (top row +1).
inline double lattice_x1(int c, int grid) {
  return -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(grid - 1);
}
inline double lattice_x2(int r, int grid) {
  return 1.0 - 2.0 * static_cast<double>(r) / static_cast<double>(grid - 1);
}

}  // namespace detail

// Response surface of a single neuron over the input square [-1,1]^2:
// sigma(scale(w^T x + b)). Requires the layer's fan-in to be 2, i.e. in
// practice the first layer of a 2-input model.
inline Matrix bump_raster(const Network& net, std::size_t layer_idx, std::size_t neuron,
                          int grid) {
  if (net.input_dim != 2)
    throw std::invalid_argument("bump_raster: defined for 2-input networks");
  if (layer_idx >= net.layers.size()) throw std::out_of_range("bump_raster: layer out of range");
  const Layer& layer = net.layers[layer_idx];
  if (neuron >= layer.b.size()) throw std::out_of_range("bump_raster: neuron out of range");
  if (layer.fan_in() != 2)
    throw std::invalid_argument("bump_raster: layer fan-in must be 2");
  if (grid < 2) throw std::invalid_argument("bump_raster: grid must be >= 2");

  Matrix out(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
  BaselineActivation base(layer.kind);
  base.omega = layer.omega;
  for (int r = 0; r < grid; ++r) {
    const double x2 = detail::lattice_x2(r, grid);
    for (int c = 0; c < grid; ++c) {
      const double x1 = detail::lattice_x1(c, grid);
      // same accumulation order as the forward pass
      double z = layer.b[neuron];
      z += layer.w(0, neuron) * x1;
      z += layer.w(1, neuron) * x2;
      double val;
      if (layer.kind == ActivationKind::dct) {
        const DctActivation& act = layer.dct[neuron];
        val = dct_eval(act, scale_input(z, act.resolution));
      } else if (layer.kind == ActivationKind::fourier) {
        val = fourier_eval(layer.fourier[neuron], z);
      } else {
        val = baseline_eval(base, z);
      }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = val;
    }
  }
  return out;
}

// predict_class rasterized over the input square; entries are -1 or +1.
inline Matrix decision_map(Network& net, int grid) {
  if (net.input_dim != 2)
    throw std::invalid_argument("decision_map: defined for 2-input networks");
  if (grid < 2) throw std::invalid_argument("decision_map: grid must be >= 2");
  Matrix out(static_cast<std::size_t>(grid), static_cast<std::size_t>(grid));
  Vector x(2);
  for (int r = 0; r < grid; ++r) {
    x[1] = detail::lattice_x2(r, grid);
    for (int c = 0; c < grid; ++c) {
      x[0] = detail::lattice_x1(c, grid);
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          static_cast<double>(predict_class(net, x));
    }
  }
  return out;
}

}  // namespace enn
