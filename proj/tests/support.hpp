#pragma once

// Test-side oracles, independent of the library's computation paths.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "enn/enn.hpp"

namespace oracle {

// naive triple loop, no blocking
inline enn::Matrix matmul_naive(const enn::Matrix& a, const enn::Matrix& b) {
  enn::Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

// term-by-term cosine sum with direct std::cos calls per term
inline double dct_eval_naive(const std::vector<double>& coeffs,
                             const std::vector<std::uint8_t>& mask, int n, double zbar) {
  double acc = 0.0;
  for (std::size_t q = 0; q < coeffs.size(); ++q) {
    if (!mask.empty() && !mask[q]) continue;
    const double k = static_cast<double>(2 * (q + 1) - 1);
    acc += coeffs[q] * std::cos(std::numbers::pi * k * (2.0 * zbar - 1.0) / (2.0 * n));
  }
  return acc;
}

// central finite difference of a scalar callable
template <typename F>
double central_difference(F f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_error(double a, double b, double floor_scale = 1.0) {
  const double scale = std::max({std::abs(a), std::abs(b), floor_scale});
  return std::abs(a - b) / scale;
}

// Finite-difference gradient of the squared error with respect to every
// trainable scalar, probed by displacing parameters in place.
struct FdCheck {
  double max_rel_err = 0.0;
};

inline FdCheck finite_difference_check(enn::Network& net, const enn::Vector& x, double y,
                                       double h = 1e-5) {
  const enn::Gradients analytic = enn::backward(net, x, y);
  FdCheck result;

  auto loss = [&](void) {
    const double yhat = enn::forward(net, x);
    return (y - yhat) * (y - yhat);
  };
  auto probe = [&](double& p, double analytic_grad) {
    const double saved = p;
    p = saved + h;
    const double up = loss();
    p = saved - h;
    const double down = loss();
    p = saved;
    const double fd = (up - down) / (2.0 * h);
    result.max_rel_err = std::max(result.max_rel_err, rel_error(analytic_grad, fd));
  };

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    enn::Layer& layer = net.layers[l];
    const enn::LayerGrads& lg = analytic.layers[l];
    for (std::size_t i = 0; i < layer.w.data().size(); ++i)
      probe(layer.w.data()[i], lg.dw.data()[i]);
    for (std::size_t j = 0; j < layer.b.size(); ++j) probe(layer.b[j], lg.db[j]);
    if (layer.kind == enn::ActivationKind::dct) {
      for (std::size_t m = 0; m < layer.dct.size(); ++m)
        for (std::size_t qi = 0; qi < layer.dct[m].coeffs.size(); ++qi) {
          if (!layer.dct[m].mask[qi]) continue;
          probe(layer.dct[m].coeffs[qi], lg.dcoeffs[m][qi]);
        }
    } else if (layer.kind == enn::ActivationKind::fourier) {
      for (std::size_t m = 0; m < layer.fourier.size(); ++m) {
        const std::size_t q = layer.fourier[m].cos_coeffs.size();
        for (std::size_t qi = 0; qi < q; ++qi) {
          probe(layer.fourier[m].cos_coeffs[qi], lg.dcoeffs[m][qi]);
          probe(layer.fourier[m].sin_coeffs[qi], lg.dcoeffs[m][q + qi]);
        }
      }
    }
  }
  return result;
}

// random small ENN for gradient checks
inline enn::Network random_small_net(enn::Rng& rng, bool dct_only = true) {
  const int depth = 1 + static_cast<int>(rng.next() % 3);  // 1..3 layers
  const int input_dim = 1 + static_cast<int>(rng.next() % 3);
  std::vector<enn::LayerSpec> spec;
  for (int l = 0; l + 1 < depth; ++l) {
    const int width = 1 + static_cast<int>(rng.next() % 5);
    if (dct_only || rng.next() % 2 == 0) {
      spec.push_back(enn::dct_layer(width, 2 + static_cast<int>(rng.next() % 5), 64));
    } else {
      const enn::ActivationKind kinds[4] = {
          enn::ActivationKind::fourier, enn::ActivationKind::sine,
          enn::ActivationKind::tanh, enn::ActivationKind::linear};
      enn::LayerSpec ls = enn::baseline_layer(width, kinds[rng.next() % 4]);
      // moderate sine frequency: chained omega=30 units put the h^2 term of
      // the difference oracle above the tolerance it is checking
      ls.omega = 1.0 + rng.uniform01() * 3.0;
      spec.push_back(ls);
    }
  }
  spec.push_back(enn::dct_layer(1, 2 + static_cast<int>(rng.next() % 5), 64));
  enn::Network net = enn::init_network(spec, input_dim, rng.next());
  // scatter the parameters away from the common ramp init; the coefficient
  // scatter stays moderate so that composed slopes keep the h^2 truncation
  // term of the central-difference oracle well below its tolerance
  for (enn::Layer& layer : net.layers) {
    for (double& v : layer.w.data()) v += rng.uniform(-0.5, 0.5);
    for (double& v : layer.b) v += rng.uniform(-0.3, 0.3);
    for (enn::DctActivation& act : layer.dct)
      for (double& v : act.coeffs) v += rng.uniform(-0.25, 0.25);
    for (enn::FourierActivation& act : layer.fourier) {
      for (double& v : act.cos_coeffs) v += rng.uniform(-0.25, 0.25);
      for (double& v : act.sin_coeffs) v += rng.uniform(-0.25, 0.25);
    }
  }
  return net;
}

inline enn::Vector random_input(enn::Rng& rng, std::size_t dim, double lo = -1.0,
                                double hi = 1.0) {
  enn::Vector x(dim);
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

inline bool networks_identical(const enn::Network& a, const enn::Network& b) {
  if (a.input_dim != b.input_dim || a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const enn::Layer& la = a.layers[l];
    const enn::Layer& lb = b.layers[l];
    if (la.kind != lb.kind || la.w.data() != lb.w.data() || la.b != lb.b) return false;
    for (std::size_t m = 0; m < la.dct.size(); ++m)
      if (la.dct[m].coeffs != lb.dct[m].coeffs || la.dct[m].mask != lb.dct[m].mask)
        return false;
    for (std::size_t m = 0; m < la.fourier.size(); ++m)
      if (la.fourier[m].cos_coeffs != lb.fourier[m].cos_coeffs ||
          la.fourier[m].sin_coeffs != lb.fourier[m].sin_coeffs)
        return false;
  }
  return true;
}

}  // namespace oracle
