#pragma once

// States whose energy Gaussian unitaries cannot reach but general unitaries can:
// pure non-Gaussian matches of Gaussian-passive moments, fixed-entropy rotations
// of thermal states, and the two-temperature population swap.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "gpass/core.hpp"
#include "gpass/extraction.hpp"
#include "gpass/fock.hpp"
#include "gpass/symplectic.hpp"

namespace gpass {

/// sqrt(p)|n> + sqrt(1 - p)|n + 3>.
struct PureMatchParams {
  int n = 0;
  double p = 1.0;
};

/// Pure state with vanishing first moments and covariance nu * identity.
inline PureMatchParams match_pure_state(double nu) {
  if (!(nu >= 1.0) || !std::isfinite(nu)) throw DomainError("match_pure_state needs a finite nu >= 1");
  const double mean = 0.5 * (nu - 1.0);
  const double n = std::floor(mean);
  if (n > static_cast<double>(std::numeric_limits<int>::max() - 3)) throw DomainError("nu too large to match");
  return {static_cast<int>(n), 1.0 - (mean - n) / 3.0};
}

inline fock::CVector pure_match_vector(const PureMatchParams& m, int dim) {
  if (dim < m.n + 4) throw TruncationError("cutoff too small for the matched pure state", m.n + 20);
  fock::CVector psi = fock::CVector::Zero(dim);
  psi(m.n) = std::sqrt(m.p);
  psi(m.n + 3) = std::sqrt(std::max(0.0, 1.0 - m.p));
  return psi;
}

struct PureMatchState {
  std::vector<PureMatchParams> per_mode;
  /// Energy-preserving beam splitter undone in Fock space for equal-frequency
  /// inputs with correlated quadratures.
  std::optional<double> beam_splitter_angle;
  fock::TruncatedDensityMatrix rho;
};

/// Pure (generally non-Gaussian) state with the same first and second moments as a
/// Gaussian-passive one- or two-mode state. Its entire energy is extractable.
inline PureMatchState match_pure_moments(const GaussianMomentState& s, int dim, double tol = kValidationTol) {
  require_valid(s);
  PureMatchState out;
  const std::size_t n = s.num_modes();
  if (n == 1) {
    const Eigen::Matrix2d block = mode_block(s.covariance, 0);
    if (detail::first_moment_residual(s) > tol || detail::anisotropy(block) > tol)
      throw DomainError("single-mode input is not Gaussian-passive");
    out.per_mode.push_back(match_pure_state(std::max(1.0, 0.5 * (block(0, 0) + block(1, 1)))));
    out.rho = fock::from_state_vector(pure_match_vector(out.per_mode[0], dim), dim, s.modes);
    return out;
  }
  if (n != 2) throw DimensionError("pure moment matching handles one or two modes");
  const auto verdict = is_gaussian_passive(s, tol);
  if (!verdict.passive) throw DomainError("input is not Gaussian-passive");

  Matrix diag = s.covariance;
  if (verdict.clause == Clause::standard_form) {
    const auto p = detail::read_standard_form(s.covariance, 0, 1);
    const double theta = bs_angle(p.a, p.b, 0.5 * (p.c1 + p.c2));
    out.beam_splitter_angle = theta;
    diag = apply(beam_splitter(theta, 0, 1, 2), s).covariance;
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const Eigen::Matrix2d block = mode_block(diag, k);
    out.per_mode.push_back(match_pure_state(std::max(1.0, 0.5 * (block(0, 0) + block(1, 1)))));
  }
  const int needed = out.per_mode[0].n + out.per_mode[1].n + 9;
  if (dim < needed) throw TruncationError("cutoff too small for the matched two-mode state", needed);
  const fock::CVector a = pure_match_vector(out.per_mode[0], dim);
  const fock::CVector b = pure_match_vector(out.per_mode[1], dim);
  fock::CVector psi(dim * dim);
  for (int i = 0; i < dim; ++i) psi.segment(i * dim, dim) = a(i) * b;
  out.rho = fock::from_state_vector(psi, dim, s.modes);
  // The beam splitter is its own inverse.
  if (out.beam_splitter_angle) out.rho = fock::evolve(beam_splitter(*out.beam_splitter_angle, 0, 1, 2), out.rho);
  return out;
}

/// Inverse temperature of a single thermal mode with a given entropy.
struct ThermalSolution {
  bool ground = false;  // S0 = 0: the ground state, beta = infinity
  double beta = std::numeric_limits<double>::infinity();
  double mean_occupation = 0.0;
};

namespace detail {

inline double occupation_at(double beta, double w) { return 1.0 / std::expm1(beta * w); }

template <class F>
double solve_bracketed(F f, double lo, double hi) {
  std::uintmax_t iters = 300;
  const auto root = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (root.first + root.second);
}

}  // namespace detail

inline ThermalSolution thermal_beta_for_entropy(double s0, double w) {
  if (!(s0 >= 0.0) || !std::isfinite(s0)) throw DomainError("entropy must be finite and non-negative");
  if (!(w > 0.0)) throw DomainError("frequency must be positive");
  if (s0 == 0.0) return {true, std::numeric_limits<double>::infinity(), 0.0};
  auto f = [s0](double m) { return thermal_entropy(m) - s0; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  const double m = detail::solve_bracketed(f, 0.0, hi);
  return {false, std::log1p(1.0 / m) / w, m};
}

struct FixedEntropyState {
  int n = 0;              // rotated pair |0>, |n>; 0 when no rotation was needed
  double sin2_phi = 0.0;
  ThermalSolution thermal;
  double thermal_nu = 1.0;
  fock::TruncatedDensityMatrix rho;
};

/// Thermal state of entropy s0 rotated in span{|0>, |n>} until its covariance is
/// nu_target * identity. The spectrum, hence the entropy, is untouched.
inline FixedEntropyState fixed_entropy_state(double nu_target, double s0, double w, int cutoff) {
  FixedEntropyState out;
  out.thermal = thermal_beta_for_entropy(s0, w);
  const double mean = out.thermal.mean_occupation;
  out.thermal_nu = 2.0 * mean + 1.0;
  double delta = 0.5 * (nu_target - out.thermal_nu);
  if (delta < -1e-12 * out.thermal_nu) throw DomainError("target nu is below the thermal value at this entropy");
  delta = std::max(0.0, delta);

  const double q = out.thermal.ground ? 0.0 : mean / (mean + 1.0);
  const double p0 = 1.0 - q;
  auto weight = [&](int n) { return n * (p0 - p0 * std::pow(q, n)); };
  if (delta > 0.0) {
    int n = 3;
    while (weight(n) < delta) {
      if (n > 1'000'000) throw DomainError("no rotation subspace reaches the target");
      ++n;
    }
    if (n >= cutoff / 2) throw TruncationError("cutoff too small for the rotation subspace", 2 * n + 2);
    out.n = n;
    out.sin2_phi = std::min(1.0, delta / weight(n));
  }
  out.rho = fock::thermal_state({mean}, cutoff, ModeSystem({w}));
  if (out.n > 0) {
    const double s = std::sqrt(out.sin2_phi), c = std::sqrt(1.0 - out.sin2_phi);
    // |0> -> c|0> + s|n>, |n> -> -s|0> + c|n>
    fock::CMatrix g = fock::CMatrix::Identity(cutoff, cutoff);
    g(0, 0) = c;
    g(out.n, 0) = s;
    g(0, out.n) = -s;
    g(out.n, out.n) = c;
    out.rho.matrix = g * out.rho.matrix * g.adjoint();
  }
  return out;
}

struct GapReport {
  double gaussian_extractable = 0.0;
  double total_extractable = 0.0;
  double gap = 0.0;
  double entropy = 0.0;
  /// E - T*S relative to the thermal state at the reference temperature.
  std::optional<double> free_energy_gap;
  std::optional<double> reference_temperature;

  friend bool operator==(const GapReport&, const GapReport&) = default;
};

/// Lowest energy of N modes at total entropy s0: a thermal product at one common beta.
inline double minimal_energy_at_entropy(const ModeSystem& modes, double s0) {
  if (!(s0 >= 0.0) || !std::isfinite(s0)) throw DomainError("entropy must be finite and non-negative");
  if (s0 == 0.0) return 0.0;
  auto entropy_at = [&](double log_beta) {
    double s = 0.0;
    for (double w : modes.frequencies()) s += thermal_entropy(detail::occupation_at(std::exp(log_beta), w));
    return s;
  };
  auto f = [&](double log_beta) { return entropy_at(log_beta) - s0; };
  double lo = -1.0, hi = 1.0;
  while (f(lo) < 0.0) lo -= 2.0;
  while (f(hi) > 0.0) hi += 2.0;
  const double beta = std::exp(detail::solve_bracketed(f, lo, hi));
  double e = 0.0;
  for (double w : modes.frequencies()) e += w * detail::occupation_at(beta, w);
  return e;
}

/// Gaussian versus unrestricted extractable energy for a state of entropy s0.
inline GapReport ergotropy_gap(const GaussianMomentState& s, double s0, std::optional<double> reference_temperature = {},
                               const ExtractionOptions& opts = {}) {
  require_valid(s);
  GapReport r;
  r.entropy = s0;
  const double energy = detail::energy_unchecked(s);
  const double floor = minimal_energy_at_entropy(s.modes, s0);
  const double tol = 1e-9 * std::max(1.0, energy);
  if (floor > energy + tol) throw DomainError("entropy exceeds what any state with this energy can have");
  r.gaussian_extractable = extract_work(s, opts).extracted_work;
  r.total_extractable = std::max(0.0, energy - floor);
  r.gap = r.total_extractable - r.gaussian_extractable;
  if (reference_temperature) {
    const double t = *reference_temperature;
    if (!(t > 0.0)) throw DomainError("reference temperature must be positive");
    double f_eq = 0.0;
    for (double w : s.modes.frequencies()) f_eq += t * std::log(-std::expm1(-w / t));
    r.free_energy_gap = energy - t * s0 - f_eq;
    r.reference_temperature = t;
  }
  return r;
}

/// Population exchange between two product levels of a two-temperature thermal state.
struct SwapWitness {
  int x = 0;
  std::pair<int, int> from_levels;
  std::pair<int, int> to_levels;
  double energy_drop = 0.0;

  friend bool operator==(const SwapWitness&, const SwapWitness&) = default;
};

namespace detail {

// Normalized thermal population of level k; T = 0 puts everything in the ground state.
inline double thermal_population(int k, double w, double t) {
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  return -std::expm1(-w / t) * std::exp(-k * w / t);
}

}  // namespace detail

/// Witness that two equal-frequency modes at temperatures ta < tb are not passive:
/// levels (x/2, x/2) and (0, x+1) have inverted populations.
inline std::optional<SwapWitness> thermal_swap_witness(double ta, double tb, double w = 1.0) {
  if (!(ta >= 0.0) || !(tb >= 0.0) || !std::isfinite(ta) || !std::isfinite(tb))
    throw DomainError("temperatures must be finite and non-negative");
  if (!(w > 0.0)) throw DomainError("frequency must be positive");
  if (!(tb > ta)) return std::nullopt;

  const double bound = 2.0 * ta / (tb - ta);
  if (bound > 1e8) throw DomainError("temperatures too close for an explicit witness");
  const int x = 2 * (static_cast<int>(std::floor(bound / 2.0)) + 1);
  SwapWitness out;
  out.x = x;
  out.from_levels = {x / 2, x / 2};
  out.to_levels = {0, x + 1};
  const auto [m, n] = out.from_levels;
  const auto [mp, np] = out.to_levels;
  if (!(m * tb + n * ta > mp * tb + np * ta)) throw NumericalError("witness inequality does not hold");
  const double lower = detail::thermal_population(m, w, ta) * detail::thermal_population(n, w, tb);
  const double upper = detail::thermal_population(mp, w, ta) * detail::thermal_population(np, w, tb);
  out.energy_drop = w * (mp + np - m - n) * (upper - lower);
  return out;
}

}  // namespace gpass
