#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "enn/network.hpp"

namespace enn {

// Separate step sizes for the linear parameters (W, b) and the activation
// coefficients (F / fourier a,b).
struct LearningRates {
  double linear = 1e-3;
  double activation = 1e-3;
};

inline void validate_rates(const LearningRates& rates) {
  if (rates.linear <= 0.0 || rates.activation <= 0.0)
    throw std::invalid_argument("learning rates must be > 0");
}

namespace detail {

inline void check_grad_shapes(const Network& net, const Gradients& grads) {
  if (grads.layers.size() != net.layers.size())
    throw std::invalid_argument("gradient/network layer count mismatch");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    const LayerGrads& lg = grads.layers[l];
    if (!layer.w.same_shape(lg.dw) || layer.b.size() != lg.db.size())
      throw std::invalid_argument("gradient/network shape mismatch");
    const std::size_t cc = static_cast<std::size_t>(layer.coeffs_per_neuron());
    if (cc > 0) {
      if (lg.dcoeffs.size() != layer.b.size())
        throw std::invalid_argument("gradient/network coefficient shape mismatch");
      for (const Vector& c : lg.dcoeffs)
        if (c.size() != cc)
          throw std::invalid_argument("gradient/network coefficient shape mismatch");
    }
  }
}

}  // namespace detail

// p <- p - rate * g, linear rate for W and b, activation rate for the
// coefficients. Masked dct coefficients are never touched.
inline void sgd_step(Network& net, const Gradients& grads, const LearningRates& rates) {
  validate_rates(rates);
  detail::check_grad_shapes(net, grads);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Layer& layer = net.layers[l];
    const LayerGrads& lg = grads.layers[l];
    for (std::size_t i = 0; i < layer.w.data().size(); ++i)
      layer.w.data()[i] -= rates.linear * lg.dw.data()[i];
    for (std::size_t j = 0; j < layer.b.size(); ++j)
      layer.b[j] -= rates.linear * lg.db[j];
    if (layer.kind == ActivationKind::dct) {
      for (std::size_t m = 0; m < layer.dct.size(); ++m) {
        DctActivation& act = layer.dct[m];
        for (std::size_t qi = 0; qi < act.coeffs.size(); ++qi)
          if (act.mask[qi]) act.coeffs[qi] -= rates.activation * lg.dcoeffs[m][qi];
      }
    } else if (layer.kind == ActivationKind::fourier) {
      for (std::size_t m = 0; m < layer.fourier.size(); ++m) {
        FourierActivation& act = layer.fourier[m];
        const std::size_t q = act.cos_coeffs.size();
        for (std::size_t qi = 0; qi < q; ++qi) {
          act.cos_coeffs[qi] -= rates.activation * lg.dcoeffs[m][qi];
          act.sin_coeffs[qi] -= rates.activation * lg.dcoeffs[m][q + qi];
        }
      }
    }
  }
}

// First/second moment estimates mirroring the gradient layout.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  Gradients m;
  Gradients v;
};

inline AdamState make_adam_state(const Network& net, double beta1 = 0.9,
                                 double beta2 = 0.999, double epsilon = 1e-8) {
  AdamState st;
  st.beta1 = beta1;
  st.beta2 = beta2;
  st.epsilon = epsilon;
  st.m = make_gradients(net);
  st.v = make_gradients(net);
  return st;
}

namespace detail {

inline double adam_delta(double g, double& m, double& v, double rate, double b1, double b2,
                         double bc1, double bc2, double eps) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g * g;
  const double mhat = m / bc1;
  const double vhat = v / bc2;
  return rate * mhat / (std::sqrt(vhat) + eps);
}

}  // namespace detail

// Bias-corrected Adam with the same two-rate split as sgd_step.
inline void adam_step(Network& net, const Gradients& grads, const LearningRates& rates,
                      AdamState& state) {
  validate_rates(rates);
  detail::check_grad_shapes(net, grads);
  detail::check_grad_shapes(net, state.m);
  state.step += 1;
  const double b1 = state.beta1, b2 = state.beta2, eps = state.epsilon;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Layer& layer = net.layers[l];
    const LayerGrads& lg = grads.layers[l];
    LayerGrads& lm = state.m.layers[l];
    LayerGrads& lv = state.v.layers[l];

    for (std::size_t i = 0; i < layer.w.data().size(); ++i)
      layer.w.data()[i] -= detail::adam_delta(lg.dw.data()[i], lm.dw.data()[i],
                                              lv.dw.data()[i], rates.linear, b1, b2, bc1,
                                              bc2, eps);
    for (std::size_t j = 0; j < layer.b.size(); ++j)
      layer.b[j] -= detail::adam_delta(lg.db[j], lm.db[j], lv.db[j], rates.linear, b1, b2,
                                       bc1, bc2, eps);

    if (layer.kind == ActivationKind::dct) {
      for (std::size_t m = 0; m < layer.dct.size(); ++m) {
        DctActivation& act = layer.dct[m];
        for (std::size_t qi = 0; qi < act.coeffs.size(); ++qi)
          if (act.mask[qi])
            act.coeffs[qi] -= detail::adam_delta(lg.dcoeffs[m][qi], lm.dcoeffs[m][qi],
                                                 lv.dcoeffs[m][qi], rates.activation, b1, b2,
                                                 bc1, bc2, eps);
      }
    } else if (layer.kind == ActivationKind::fourier) {
      for (std::size_t m = 0; m < layer.fourier.size(); ++m) {
        FourierActivation& act = layer.fourier[m];
        const std::size_t q = act.cos_coeffs.size();
        for (std::size_t qi = 0; qi < q; ++qi) {
          act.cos_coeffs[qi] -= detail::adam_delta(lg.dcoeffs[m][qi], lm.dcoeffs[m][qi],
                                                   lv.dcoeffs[m][qi], rates.activation, b1,
                                                   b2, bc1, bc2, eps);
          act.sin_coeffs[qi] -=
              detail::adam_delta(lg.dcoeffs[m][q + qi], lm.dcoeffs[m][q + qi],
                                 lv.dcoeffs[m][q + qi], rates.activation, b1, b2, bc1, bc2,
                                 eps);
        }
      }
    }
  }
}

}  // namespace enn
