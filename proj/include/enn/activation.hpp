#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "enn/linalg.hpp"

namespace enn {

// Trainable activation built from a truncated cosine series over the
// odd frequencies of a DCT-II basis with resolution N:
//
//   sigma(zbar) = sum_{q=1..Q} F_q * cos( pi*(2q-1)*(2*zbar - 1) / (2N) )
//
// Pruned coefficients are masked out; a masked entry holds exactly 0.0 and
// is never updated again, so evaluating the full sum equals evaluating the
// active subset.
struct DctActivation {
  std::vector<double> coeffs;      // F_q, q = 1..Q
  std::vector<std::uint8_t> mask;  // 1 = active, 0 = pruned
  int resolution = 512;            // N

  int q_count() const { return static_cast<int>(coeffs.size()); }
};

inline DctActivation make_dct_activation(int q, int n) {
  if (q < 1) throw std::invalid_argument("dct activation: q must be >= 1");
  if (n < 2) throw std::invalid_argument("dct activation: resolution must be >= 2");
  DctActivation act;
  act.coeffs.assign(static_cast<std::size_t>(q), 0.0);
  act.mask.assign(static_cast<std::size_t>(q), 1);
  act.resolution = n;
  return act;
}

// Affine map from the normalized input range [-1,1] to the cosine-series
// domain [0,N]: zbar = N/2 * (z + 1). Inputs outside [-1,1] are allowed;
// the basis is periodic.
inline double scale_input(double z, int n) { return 0.5 * n * (z + 1.0); }

namespace detail {

// Evaluates cos(k*theta) for the odd multiples k = 1,3,...,2Q-1 where
// theta = pi*(2*zbar-1)/(2N), using the second-order recurrence
// cos((k+2)t) = 2*cos(2t)*cos(kt) - cos((k-2)t). Two trig calls total.
inline void odd_cosines(double zbar, int n, int q, double* out) {
  const double theta = std::numbers::pi * (2.0 * zbar - 1.0) / (2.0 * n);
  const double c = std::cos(theta);
  const double r = 2.0 * c * c - 1.0;  // cos(2*theta)
  double cur = c;                      // cos(1*theta)
  double prev = c;                     // cos(-1*theta)
  for (int i = 0; i < q; ++i) {
    out[i] = cur;
    const double nxt = 2.0 * r * cur - prev;
    prev = cur;
    cur = nxt;
  }
}

// Same recurrence for both cos(k*theta) and sin(k*theta), odd k.
inline void odd_cosines_sines(double zbar, int n, int q, double* cos_out, double* sin_out) {
  const double theta = std::numbers::pi * (2.0 * zbar - 1.0) / (2.0 * n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double r = 2.0 * c * c - 1.0;
  double ccur = c, cprev = c;   // cos(theta), cos(-theta)
  double scur = s, sprev = -s;  // sin(theta), sin(-theta)
  for (int i = 0; i < q; ++i) {
    cos_out[i] = ccur;
    sin_out[i] = scur;
    const double cn = 2.0 * r * ccur - cprev;
    const double sn = 2.0 * r * scur - sprev;
    cprev = ccur;
    ccur = cn;
    sprev = scur;
    scur = sn;
  }
}

}  // namespace detail

inline double dct_eval(const DctActivation& act, double zbar) {
  const int n = act.resolution;
  const double theta = std::numbers::pi * (2.0 * zbar - 1.0) / (2.0 * n);
  const double c = std::cos(theta);
  const double r = 2.0 * c * c - 1.0;
  double cur = c, prev = c, acc = 0.0;
  for (std::size_t q = 0; q < act.coeffs.size(); ++q) {
    acc += act.coeffs[q] * cur;
    const double nxt = 2.0 * r * cur - prev;
    prev = cur;
    cur = nxt;
  }
  return acc;
}

// d sigma / d zbar = -sum_q F_q * (pi*(2q-1)/N) * sin( pi*(2q-1)*(2*zbar-1) / (2N) )
inline double dct_grad_input(const DctActivation& act, double zbar) {
  const int n = act.resolution;
  const double theta = std::numbers::pi * (2.0 * zbar - 1.0) / (2.0 * n);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double r = 2.0 * c * c - 1.0;
  double scur = s, sprev = -s, acc = 0.0;
  const double unit = std::numbers::pi / n;
  for (std::size_t q = 0; q < act.coeffs.size(); ++q) {
    const double freq = static_cast<double>(2 * q + 1);
    acc -= act.coeffs[q] * unit * freq * scur;
    const double nxt = 2.0 * r * scur - sprev;
    sprev = scur;
    scur = nxt;
  }
  return acc;
}

// d sigma / d F_q = cos( pi*(2q-1)*(2*zbar-1) / (2N) ) for active q, else 0.
inline std::vector<double> dct_grad_coeffs(const DctActivation& act, double zbar) {
  std::vector<double> grad(act.coeffs.size(), 0.0);
  detail::odd_cosines(zbar, act.resolution, act.q_count(), grad.data());
  for (std::size_t q = 0; q < grad.size(); ++q)
    if (!act.mask[q]) grad[q] = 0.0;
  return grad;
}

// N x Q matrix of the odd-frequency cosine basis sampled on the grid
// zbar = n+1, n = 0..N-1:  B[n,q] = cos( pi*(2q-1)*(2n+1) / (2N) ).
// Columns are pairwise orthogonal with squared norm N/2 as long as 2Q <= N.
inline Matrix basis_matrix(int q, int n) {
  if (q < 1) throw std::invalid_argument("basis_matrix: q must be >= 1");
  if (n < 2) throw std::invalid_argument("basis_matrix: n must be >= 2");
  Matrix b(static_cast<std::size_t>(n), static_cast<std::size_t>(q));
  for (int row = 0; row < n; ++row)
    detail::odd_cosines(static_cast<double>(row) + 1.0, n, q, b.row(static_cast<std::size_t>(row)));
  return b;
}

// Least-squares coefficients of a function sampled on the basis grid:
// coeffs = (2/N) * B^T f. Exact for any f in the span of the basis columns.
inline std::vector<double> project_function(const Vector& samples, int q, int n) {
  if (samples.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("project_function: sample count must equal n");
  const Matrix b = basis_matrix(q, n);
  Vector coeffs = transpose_matvec(b, samples);
  const double scale = 2.0 / static_cast<double>(n);
  for (double& c : coeffs) c *= scale;
  return coeffs;
}

// ---------------------------------------------------------------------------
// Fixed and trainable baseline activations used by the benchmark models.

struct FourierActivation {
  std::vector<double> cos_coeffs;  // a_q
  std::vector<double> sin_coeffs;  // b_q
  double period = 2.0;             // T

  int q_count() const { return static_cast<int>(cos_coeffs.size()); }
};

inline FourierActivation make_fourier_activation(int q, double period = 2.0) {
  if (q < 1) throw std::invalid_argument("fourier activation: q must be >= 1");
  if (period <= 0.0) throw std::invalid_argument("fourier activation: period must be > 0");
  FourierActivation act;
  act.cos_coeffs.assign(static_cast<std::size_t>(q), 0.0);
  act.sin_coeffs.assign(static_cast<std::size_t>(q), 0.0);
  act.period = period;
  return act;
}

namespace detail {

// cos(q*phi) and sin(q*phi) for q = 1..Q via the Chebyshev recurrence.
inline void harmonics(double phi, int q, double* cos_out, double* sin_out) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  double ccur = c, cprev = 1.0;  // cos(phi), cos(0)
  double scur = s, sprev = 0.0;  // sin(phi), sin(0)
  for (int i = 0; i < q; ++i) {
    cos_out[i] = ccur;
    sin_out[i] = scur;
    const double cn = 2.0 * c * ccur - cprev;
    const double sn = 2.0 * c * scur - sprev;
    cprev = ccur;
    ccur = cn;
    sprev = scur;
    scur = sn;
  }
}

}  // namespace detail

// sum_q a_q cos(2 pi q z / T) + b_q sin(2 pi q z / T)
inline double fourier_eval(const FourierActivation& act, double z) {
  const double phi = 2.0 * std::numbers::pi * z / act.period;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  double ccur = c, cprev = 1.0, scur = s, sprev = 0.0, acc = 0.0;
  for (std::size_t q = 0; q < act.cos_coeffs.size(); ++q) {
    acc += act.cos_coeffs[q] * ccur + act.sin_coeffs[q] * scur;
    const double cn = 2.0 * c * ccur - cprev;
    const double sn = 2.0 * c * scur - sprev;
    cprev = ccur;
    ccur = cn;
    sprev = scur;
    scur = sn;
  }
  return acc;
}

inline double fourier_grad(const FourierActivation& act, double z) {
  const double w0 = 2.0 * std::numbers::pi / act.period;
  const double phi = w0 * z;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  double ccur = c, cprev = 1.0, scur = s, sprev = 0.0, acc = 0.0;
  for (std::size_t q = 0; q < act.cos_coeffs.size(); ++q) {
    const double qw = static_cast<double>(q + 1) * w0;
    acc += qw * (-act.cos_coeffs[q] * scur + act.sin_coeffs[q] * ccur);
    const double cn = 2.0 * c * ccur - cprev;
    const double sn = 2.0 * c * scur - sprev;
    cprev = ccur;
    ccur = cn;
    sprev = scur;
    scur = sn;
  }
  return acc;
}

enum class ActivationKind : std::uint8_t {
  dct = 0,
  relu = 1,
  fourier = 2,
  sine = 3,
  linear = 4,
  tanh = 5,  // symmetric sigmoid onto (-1,1); fixed output for baseline classifiers
};

// Fixed-shape baseline stages. `fourier` carries per-unit coefficients and
// is the only trainable one in this set.
struct BaselineActivation {
  ActivationKind kind = ActivationKind::relu;
  FourierActivation fourier;  // kind == fourier
  double omega = 30.0;        // kind == sine

  BaselineActivation() = default;
  explicit BaselineActivation(ActivationKind k) : kind(k) {}
};

inline double baseline_eval(const BaselineActivation& act, double z) {
  switch (act.kind) {
    case ActivationKind::relu:
      return z > 0.0 ? z : 0.0;
    case ActivationKind::fourier:
      return fourier_eval(act.fourier, z);
    case ActivationKind::sine:
      return std::sin(act.omega * z);
    case ActivationKind::linear:
      return z;
    case ActivationKind::tanh:
      return std::tanh(z);
    default:
      throw std::invalid_argument("baseline_eval: not a baseline activation");
  }
}

inline double baseline_grad(const BaselineActivation& act, double z) {
  switch (act.kind) {
    case ActivationKind::relu:
      return z > 0.0 ? 1.0 : 0.0;  // subgradient 0 at z == 0
    case ActivationKind::fourier:
      return fourier_grad(act.fourier, z);
    case ActivationKind::sine:
      return act.omega * std::cos(act.omega * z);
    case ActivationKind::linear:
      return 1.0;
    case ActivationKind::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    default:
      throw std::invalid_argument("baseline_grad: not a baseline activation");
  }
}

}  // namespace enn
