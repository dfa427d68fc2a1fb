#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gpass/core.hpp"
#include "gpass/fock.hpp"
#include "gpass/symplectic.hpp"

namespace gpass::testing {

struct RandomState {
  GaussianMomentState state;
  std::vector<double> nus;  // symplectic spectrum the state was built from
};

/// Thermal product with the given spectrum, conjugated by random elementary
/// operations and displaced.
inline RandomState random_state(std::mt19937_64& rng, std::size_t n, double nu_max = 10.0, double d_max = 3.0,
                                bool equal_frequencies = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> squeeze_r(-0.8, 0.8);
  std::uniform_int_distribution<std::size_t> mode(0, n - 1);

  std::vector<double> ws(n), nus(n);
  for (std::size_t k = 0; k < n; ++k) {
    ws[k] = equal_frequencies ? 1.3 : 0.5 + 2.5 * unit(rng);
    nus[k] = 1.0 + (nu_max - 1.0) * unit(rng);
  }
  Matrix g = Matrix::Zero(2 * n, 2 * n);
  for (std::size_t k = 0; k < n; ++k) g(2 * k, 2 * k) = g(2 * k + 1, 2 * k + 1) = nus[k];
  GaussianMomentState s{ModeSystem(ws), Vector::Zero(2 * n), g};

  const int count = 3 + static_cast<int>(6 * unit(rng));
  for (int k = 0; k < count; ++k) {
    const std::size_t i = mode(rng);
    std::size_t j = mode(rng);
    while (n > 1 && j == i) j = mode(rng);
    switch (static_cast<int>(4 * unit(rng))) {
      case 0: s = apply(rotation(angle(rng), i, n), s); break;
      case 1: s = apply(squeeze(squeeze_r(rng), i, n), s); break;
      case 2: if (n > 1) s = apply(two_mode_squeeze(squeeze_r(rng), i, j, n), s); break;
      default: if (n > 1) s = apply(beam_splitter(angle(rng), i, j, n), s); break;
    }
  }
  Vector d(2 * n);
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = angle(rng);
  d *= d_max * unit(rng) / d.norm();
  s = apply(displacement(d), s);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
  return {s, nus};
}

/// Sum_i w_i (nu_i - 1)/2 with the largest nu on the lowest frequency.
inline double sorted_energy(std::vector<double> nus, std::vector<double> ws) {
  std::sort(nus.rbegin(), nus.rend());
  std::sort(ws.begin(), ws.end());
  double e = 0.0;
  for (std::size_t k = 0; k < nus.size(); ++k) e += ws[k] * 0.5 * (nus[k] - 1.0);
  return e;
}

inline GaussianMomentState diagonal_state(std::vector<double> ws, std::vector<double> diag, std::vector<double> x = {}) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Vector xv = Vector::Zero(n);
  for (std::size_t k = 0; k < x.size(); ++k) xv(static_cast<Eigen::Index>(k)) = x[k];
  return {ModeSystem(std::move(ws)), xv, Eigen::Map<Vector>(diag.data(), n).asDiagonal()};
}

/// Coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!), computed by recursion.
inline fock::CVector coherent_vector(std::complex<double> alpha, int dim) {
  fock::CVector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

/// Squeezed vacuum (1/sqrt(cosh r)) sum_n (-tanh r)^n sqrt((2n)!)/(2^n n!) |2n>.
inline fock::CVector squeezed_vacuum_vector(double r, int dim) {
  fock::CVector v = fock::CVector::Zero(dim);
  double c = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 0; 2 * n < dim; ++n) {
    if (n > 0) c *= -std::tanh(r) * std::sqrt((2.0 * n - 1.0) / (2.0 * n));
    v(2 * n) = c;
  }
  return v;
}

}  // namespace gpass::testing
