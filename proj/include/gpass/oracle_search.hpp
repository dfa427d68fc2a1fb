#pragma once

// Direct numerical minimization of the two-mode energy over a 10-parameter family of
// Gaussian unitaries. Independent of the closed-form pipeline; used to cross-check it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "gpass/core.hpp"

namespace gpass {

struct SearchBudget {
  int starts = 16;
  int evaluations_per_start = 6000;
  double simplex_size_tol = 1e-9;
  std::uint64_t seed = 20240611;
};

struct SearchResult {
  double best_energy = std::numeric_limits<double>::infinity();
  /// theta1, r1, phi1, theta2, r2, phi2, r_tms, alpha1, alpha2, theta_bs
  std::array<double, 10> parameters{};
  long evaluations = 0;
  bool budget_exhausted = false;
};

namespace detail {

using Mat4 = Eigen::Matrix4d;

inline Eigen::Matrix2d rot2(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  return r;
}

inline Eigen::Matrix2d sq2(double r) { return Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal(); }

// Applied in order: local R(phi) S(r) R(theta) on each mode, two-mode squeeze,
// local rotations, beam splitter.
inline Mat4 family_symplectic(const double* v) {
  Mat4 local = Mat4::Zero();
  local.block<2, 2>(0, 0) = rot2(v[2]) * sq2(v[1]) * rot2(v[0]);
  local.block<2, 2>(2, 2) = rot2(v[5]) * sq2(v[4]) * rot2(v[3]);

  const double ch = std::cosh(v[6]), sh = std::sinh(v[6]);
  Mat4 tms = Mat4::Zero();
  tms.diagonal().setConstant(ch);
  tms(0, 2) = tms(2, 0) = sh;
  tms(1, 3) = tms(3, 1) = -sh;

  Mat4 phases = Mat4::Zero();
  phases.block<2, 2>(0, 0) = rot2(v[7]);
  phases.block<2, 2>(2, 2) = rot2(v[8]);

  const double c = std::cos(v[9]), s = std::sin(v[9]);
  Mat4 bs = Mat4::Zero();
  bs.block<2, 2>(0, 0) = c * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(0, 2) = s * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(2, 0) = s * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(2, 2) = -c * Eigen::Matrix2d::Identity();
  return bs * phases * tms * local;
}

struct FamilyObjective {
  Mat4 gamma;
  double w0, w1;
  long evaluations = 0;

  double operator()(const double* v) {
    ++evaluations;
    const Mat4 s = family_symplectic(v);
    const Mat4 g = s * gamma * s.transpose();
    const double e = w0 * 0.25 * (g(0, 0) + g(1, 1) - 2.0) + w1 * 0.25 * (g(2, 2) + g(3, 3) - 2.0);
    return std::isfinite(e) ? e : std::numeric_limits<double>::max();
  }
};

inline double gsl_objective(const gsl_vector* x, void* params) {
  return (*static_cast<FamilyObjective*>(params))(x->data);
}

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

// One Nelder-Mead descent; returns false if the evaluation cap was hit first.
inline bool descend(FamilyObjective& obj, std::array<double, 10>& point, double step, long cap, double size_tol) {
  std::unique_ptr<gsl_vector, GslVectorDeleter> x(gsl_vector_alloc(10)), steps(gsl_vector_alloc(10));
  for (std::size_t k = 0; k < 10; ++k) gsl_vector_set(x.get(), k, point[k]);
  gsl_vector_set_all(steps.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 10));
  gsl_multimin_function fn{&gsl_objective, 10, &obj};
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), steps.get());

  bool converged = false;
  while (obj.evaluations < cap) {
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), size_tol) == GSL_SUCCESS) {
      converged = true;
      break;
    }
  }
  for (std::size_t k = 0; k < 10; ++k) point[k] = gsl_vector_get(nm->x, k);
  return converged;
}

}  // namespace detail

/// Lowest energy found over the parametrized family, first moments set to zero.
inline SearchResult brute_force_min_energy(const GaussianMomentState& s, const SearchBudget& budget = {}) {
  if (s.num_modes() != 2) throw DimensionError("brute_force_min_energy handles two modes");
  require_valid(s);
  if (budget.starts < 1 || budget.evaluations_per_start < 1) throw DomainError("search budget must be positive");
  gsl_set_error_handler_off();

  detail::FamilyObjective obj{s.covariance, s.modes[0], s.modes[1]};
  std::mt19937_64 rng(budget.seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> squeeze(-1.0, 1.0);

  SearchResult best;
  for (int start = 0; start < budget.starts; ++start) {
    std::array<double, 10> point{};
    if (start > 0) {
      for (std::size_t k : {0u, 2u, 3u, 5u, 7u, 8u, 9u}) point[k] = angle(rng);
      for (std::size_t k : {1u, 4u, 6u}) point[k] = squeeze(rng);
    }
    const long cap = obj.evaluations + budget.evaluations_per_start;
    // Restarting from the result rebuilds a collapsed simplex.
    bool converged = false;
    for (double step : {0.5, 0.1, 0.02}) {
      converged = detail::descend(obj, point, step, cap, budget.simplex_size_tol);
      if (obj.evaluations >= cap) break;
    }
    if (!converged) best.budget_exhausted = true;
    const double e = obj(point.data());
    if (e < best.best_energy) {
      best.best_energy = e;
      best.parameters = point;
    }
  }
  best.evaluations = obj.evaluations;
  return best;
}

}  // namespace gpass
