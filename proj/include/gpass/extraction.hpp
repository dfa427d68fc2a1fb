#pragma once

// Gaussian passivity of two-mode (and N-mode) moment states, and the
// displacement / local reduction / two-mode squeezing / beam splitting
// protocol that lowers the energy to its Gaussian-reachable minimum.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpass/core.hpp"
#include "gpass/symplectic.hpp"

namespace gpass {

struct ExtractionOptions {
  /// Convergence threshold on |c1 - c2| and local block anisotropy, relative to max(1, max|Gamma|).
  double tol = 1e-12;
  int max_iters = 200;
  /// Absolute tolerance of the passivity certificate attached to the report.
  double passivity_tol = 1e-9;
};

enum class Clause { none, williamson, standard_form };

inline std::string_view to_string(Clause c) {
  switch (c) {
    case Clause::none: return "none";
    case Clause::williamson: return "(i)";
    case Clause::standard_form: return "(ii)";
  }
  return "none";
}

enum class ViolationKind { nonzero_first_moments, not_williamson_form, spectrum_ordering, off_diagonal_mismatch };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::nonzero_first_moments: return "nonzero_first_moments";
    case ViolationKind::not_williamson_form: return "not_williamson_form";
    case ViolationKind::spectrum_ordering: return "spectrum_ordering";
    case ViolationKind::off_diagonal_mismatch: return "off_diagonal_mismatch";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::vector<std::size_t> modes;
  double residual = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct PassivityVerdict {
  bool passive = false;
  Clause clause = Clause::none;
  std::vector<Violation> violations;
  double first_moment_residual = 0.0;

  friend bool operator==(const PassivityVerdict&, const PassivityVerdict&) = default;
};

/// Local blocks a*1, b*1 and cross block diag(c1, c2).
struct StandardFormParams {
  double a = 1.0;
  double b = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct ExtractionReport {
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double extracted_work = 0.0;
  std::vector<ProtocolStep> steps;
  GaussianMomentState final_state;
  PassivityVerdict passive_certificate;
  /// Reduction/squeeze rounds (two modes) or pair sweeps (N modes).
  int iterations = 0;
  /// final_energy minus the spectral lower bound.
  double spectral_gap = 0.0;
  bool gap_flagged = false;
};

/// Raised when the reduction loop does not converge; carries the partial protocol.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, ExtractionReport partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const ExtractionReport& partial() const noexcept { return partial_; }

 private:
  ExtractionReport partial_;
};

namespace detail {

inline bool same_frequency(double wa, double wb) { return std::abs(wa - wb) <= 1e-12 * std::max(wa, wb); }

inline double anisotropy(const Eigen::Matrix2d& b) {
  return std::max({std::abs(b(0, 0) - b(1, 1)), std::abs(b(0, 1)), std::abs(b(1, 0))});
}

inline double pair_scale(const Matrix& g, std::size_t i, std::size_t j) {
  double m = 1.0;
  for (std::size_t u : {i, j})
    for (std::size_t v : {i, j}) m = std::max(m, cross_block(g, u, v).cwiseAbs().maxCoeff());
  return m;
}

// Second-moment part of the two-mode characterization, restricted to modes (i, j).
inline Clause check_pair_form(const Matrix& g, const ModeSystem& modes, std::size_t i, std::size_t j, double tol,
                              std::vector<Violation>& out) {
  const auto before = out.size();
  const Eigen::Matrix2d A = mode_block(g, i), B = mode_block(g, j), C = cross_block(g, i, j);
  const double local = std::max(anisotropy(A), anisotropy(B));
  if (local > tol) out.push_back({ViolationKind::not_williamson_form, {i, j}, local});

  const double c_off = std::max(std::abs(C(0, 1)), std::abs(C(1, 0)));
  const double c_gap = std::abs(C(0, 0) - C(1, 1));
  const double c_mag = std::max({std::abs(C(0, 0)), std::abs(C(1, 1)), c_off});

  if (same_frequency(modes[i], modes[j])) {
    const double mismatch = std::max(c_off, c_gap);
    if (mismatch > tol) out.push_back({ViolationKind::off_diagonal_mismatch, {i, j}, mismatch});
    if (out.size() != before) return Clause::none;
    return c_mag <= tol ? Clause::williamson : Clause::standard_form;
  }

  if (c_mag > tol) out.push_back({ViolationKind::not_williamson_form, {i, j}, c_mag});
  const double a = 0.5 * (A(0, 0) + A(1, 1));
  const double b = 0.5 * (B(0, 0) + B(1, 1));
  // The lower-frequency mode must carry the larger symplectic eigenvalue.
  const double deficit = modes[i] < modes[j] ? b - a : a - b;
  if (deficit > tol) out.push_back({ViolationKind::spectrum_ordering, {i, j}, deficit});
  return out.size() == before ? Clause::williamson : Clause::none;
}

inline double first_moment_residual(const GaussianMomentState& s) {
  return s.first_moments.size() ? s.first_moments.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace detail

/// Two-mode Gaussian passivity: vanishing first moments and either a
/// correctly ordered Williamson form (i) or, for equal frequencies, a standard
/// form with proportional-to-identity cross block (ii).
inline PassivityVerdict is_gaussian_passive(const GaussianMomentState& s, double tol = kValidationTol) {
  if (s.num_modes() != 2) throw DimensionError("is_gaussian_passive handles two modes; use is_gaussian_passive_nmode");
  require_valid(s);
  PassivityVerdict v;
  v.first_moment_residual = detail::first_moment_residual(s);
  if (v.first_moment_residual > tol)
    v.violations.push_back({ViolationKind::nonzero_first_moments, {0, 1}, v.first_moment_residual});
  const Clause clause = detail::check_pair_form(s.covariance, s.modes, 0, 1, tol, v.violations);
  v.passive = v.violations.empty();
  v.clause = v.passive ? clause : Clause::none;
  return v;
}

/// N-mode passivity: every two-mode marginal passive (single mode: isotropic block).
inline PassivityVerdict is_gaussian_passive_nmode(const GaussianMomentState& s, double tol = kValidationTol) {
  require_valid(s);
  const std::size_t n = s.num_modes();
  PassivityVerdict v;
  v.first_moment_residual = detail::first_moment_residual(s);
  std::vector<std::size_t> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = k;
  if (v.first_moment_residual > tol) v.violations.push_back({ViolationKind::nonzero_first_moments, all, v.first_moment_residual});

  Clause clause = Clause::williamson;
  if (n == 1) {
    const double local = detail::anisotropy(mode_block(s.covariance, 0));
    if (local > tol) v.violations.push_back({ViolationKind::not_williamson_form, {0}, local});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (detail::check_pair_form(s.covariance, s.modes, i, j, tol, v.violations) == Clause::standard_form)
        clause = Clause::standard_form;
    }
  }
  v.passive = v.violations.empty();
  v.clause = v.passive ? clause : Clause::none;
  return v;
}

/// Two-mode squeezing strength that equalizes the cross-block diagonal.
inline double tms_parameter(const StandardFormParams& p) {
  const double arg = (p.c1 - p.c2) / (p.a + p.b);
  if (!(std::abs(arg) < 1.0)) throw ValidationError("|c1 - c2| >= a + b: not a valid covariance matrix");
  return -0.5 * std::atanh(arg);
}

/// Beam-splitter angle that moves the larger eigenvalue of [[a, c], [c, b]] onto the first mode.
inline double bs_angle(double a, double b, double c) {
  constexpr double pi = std::numbers::pi;
  if (a == b) {
    if (c == 0.0) return 0.0;
    return c > 0.0 ? pi / 4.0 : -pi / 4.0;
  }
  const double theta = 0.5 * std::atan(2.0 * c / (a - b));
  return a > b ? theta : theta + pi / 2.0;
}

/// Lowest energy on the symplectic orbit: largest nu on the lowest frequency.
inline double minimal_gaussian_energy(const WilliamsonSpectrum& spec, const ModeSystem& modes) {
  if (spec.nus.size() != modes.size()) throw DimensionError("spectrum and mode counts differ");
  std::vector<double> nus = spec.nus;
  std::vector<double> ws = modes.frequencies();
  std::sort(nus.begin(), nus.end(), std::greater<>());
  std::sort(ws.begin(), ws.end());
  double e = 0.0;
  for (std::size_t k = 0; k < nus.size(); ++k) e += ws[k] * 0.5 * (nus[k] - 1.0);
  return e;
}

/// Whether the product of thermal modes (w_a, T_a) and (w_b, T_b) is Gaussian-passive.
///
/// Equal frequencies are always passive; otherwise the lower-frequency mode
/// must have the larger coth(w / 2T), ties included.
inline bool thermal_product_passivity(double wa, double wb, double ta, double tb, double tol = kValidationTol) {
  if (!(wa > 0.0) || !(wb > 0.0) || ta < 0.0 || tb < 0.0)
    throw DomainError("thermal_product_passivity needs positive frequencies and non-negative temperatures");
  if (detail::same_frequency(wa, wb)) return true;
  if (wa > wb) {
    std::swap(wa, wb);
    std::swap(ta, tb);
  }
  if (tb == 0.0) return true;
  return thermal_nu(wa, ta) >= thermal_nu(wb, tb) - tol;
}

namespace detail {

struct Tracker {
  GaussianMomentState state;
  std::vector<ProtocolStep> steps;

  void push(AffineGaussianOp op, Stage stage) {
    state = apply(op, state);
    state.covariance = 0.5 * (state.covariance + state.covariance.transpose());
    steps.push_back({std::move(op), stage, energy_unchecked(state)});
  }
};

inline void displace_to_origin(Tracker& t, double tol) {
  if (first_moment_residual(t.state) <= tol) return;
  t.push(displacement(-t.state.first_moments), Stage::p1_displace);
}

// Rotation then squeeze taking the mode's block to sqrt(det) * identity.
inline void isotropize_mode(Tracker& t, std::size_t mode, Stage stage, double tol_abs) {
  const std::size_t n = t.state.num_modes();
  const Eigen::Matrix2d block = mode_block(t.state.covariance, mode);
  const double p = block(0, 0), q = 0.5 * (block(0, 1) + block(1, 0)), r = block(1, 1);
  if (std::hypot(p - r, 2.0 * q) <= tol_abs) return;

  constexpr double pi = std::numbers::pi;
  double phi = 0.5 * std::atan2(2.0 * q, p - r);
  if (phi > pi / 4.0) phi -= pi / 2.0;
  if (phi < -pi / 4.0) phi += pi / 2.0;
  if (phi != 0.0) t.push(rotation(phi, mode, n), stage);

  const Eigen::Matrix2d rotated = mode_block(t.state.covariance, mode);
  const double sq = 0.25 * std::log(rotated(0, 0) / rotated(1, 1));
  if (sq != 0.0) t.push(squeeze(sq, mode, n), stage);
}

// Proper-rotation SVD of the cross block, applied as local rotations.
inline void diagonalize_cross_block(Tracker& t, std::size_t i, std::size_t j, Stage stage, double tol_abs) {
  const Eigen::Matrix2d c = cross_block(t.state.covariance, i, j);
  if (std::max(std::abs(c(0, 1)), std::abs(c(1, 0))) <= tol_abs) return;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d u = svd.matrixU(), v = svd.matrixV();
  if (u.determinant() < 0.0) u.col(1) *= -1.0;
  if (v.determinant() < 0.0) v.col(1) *= -1.0;
  // R(theta) = U^T has R(0,1) = sin(theta) = U(1,0).
  const double theta_i = std::atan2(u(1, 0), u(0, 0));
  const double theta_j = std::atan2(v(1, 0), v(0, 0));
  const std::size_t n = t.state.num_modes();
  if (theta_i != 0.0) t.push(rotation(theta_i, i, n), stage);
  if (theta_j != 0.0) t.push(rotation(theta_j, j, n), stage);
}

inline StandardFormParams read_standard_form(const Matrix& g, std::size_t i, std::size_t j) {
  const Eigen::Matrix2d A = mode_block(g, i), B = mode_block(g, j), C = cross_block(g, i, j);
  return {0.5 * (A(0, 0) + A(1, 1)), 0.5 * (B(0, 0) + B(1, 1)), C(0, 0), C(1, 1)};
}

inline void reduce_pair_locally(Tracker& t, std::size_t i, std::size_t j, Stage stage, double tol) {
  const double tol_abs = tol * pair_scale(t.state.covariance, i, j);
  isotropize_mode(t, i, stage, tol_abs);
  isotropize_mode(t, j, stage, tol_abs);
  diagonalize_cross_block(t, i, j, stage, tol_abs);
}

// Alternate local reduction and two-mode squeezing until the cross block is c*1.
// Returns the number of rounds, or -1 without convergence.
inline int converge_pair(Tracker& t, std::size_t i, std::size_t j, const ExtractionOptions& opts) {
  for (int round = 0; round < opts.max_iters; ++round) {
    reduce_pair_locally(t, i, j, round == 0 ? Stage::p2_local : Stage::p3_realign, opts.tol);
    const auto p = read_standard_form(t.state.covariance, i, j);
    if (std::abs(p.c1 - p.c2) <= opts.tol * pair_scale(t.state.covariance, i, j)) return round + 1;
    t.push(two_mode_squeeze(tms_parameter(p), i, j, t.state.num_modes()), Stage::p3_tms);
  }
  return -1;
}

// Beam splitter putting the larger population on the lower-frequency mode.
inline void beam_split_pair(Tracker& t, std::size_t i, std::size_t j, double tol) {
  const ModeSystem& modes = t.state.modes;
  if (same_frequency(modes[i], modes[j])) return;
  const auto p = read_standard_form(t.state.covariance, i, j);
  const double c = 0.5 * (p.c1 + p.c2);
  const double tol_abs = tol * pair_scale(t.state.covariance, i, j);
  const bool low_first = modes[i] < modes[j];
  const bool misordered = low_first ? p.a < p.b - tol_abs : p.b < p.a - tol_abs;
  if (std::abs(c) <= tol_abs && !misordered) return;
  double theta = bs_angle(p.a, p.b, c);
  if (!low_first) theta += std::numbers::pi / 2.0;
  t.push(beam_splitter(theta, i, j, t.state.num_modes()), Stage::p4_beamsplit);
}

inline ExtractionReport finish_report(const GaussianMomentState& initial, Tracker& t, int iterations,
                                      const ExtractionOptions& opts, bool certify) {
  ExtractionReport r;
  r.initial_energy = energy_unchecked(initial);
  r.final_energy = energy_unchecked(t.state);
  r.extracted_work = r.initial_energy - r.final_energy;
  r.steps = std::move(t.steps);
  r.final_state = t.state;
  r.iterations = iterations;
  if (certify) {
    r.passive_certificate = initial.num_modes() == 2 ? is_gaussian_passive(t.state, opts.passivity_tol)
                                                     : is_gaussian_passive_nmode(t.state, opts.passivity_tol);
    const double bound = minimal_gaussian_energy(symplectic_spectrum(t.state.covariance), t.state.modes);
    r.spectral_gap = r.final_energy - bound;
    r.gap_flagged = std::abs(r.spectral_gap) > 100.0 * opts.tol * std::max(1.0, std::abs(r.final_energy));
  }
  return r;
}

}  // namespace detail

/// Local symplectic reduction of a centred two-mode state to standard form.
struct StandardFormResult {
  GaussianMomentState state;
  std::vector<ProtocolStep> steps;
  StandardFormParams params;
};

inline StandardFormResult reduce_to_standard_form(const GaussianMomentState& s, double tol = 1e-12) {
  if (s.num_modes() != 2) throw DimensionError("reduce_to_standard_form handles two modes");
  require_valid(s);
  if (detail::first_moment_residual(s) > kValidationTol)
    throw DomainError("reduce_to_standard_form needs vanishing first moments");
  detail::Tracker t{s, {}};
  detail::reduce_pair_locally(t, 0, 1, Stage::p2_local, tol);
  const auto params = detail::read_standard_form(t.state.covariance, 0, 1);
  return {std::move(t.state), std::move(t.steps), params};
}

/// Maximal work extractable from a two-mode state with Gaussian unitaries,
/// with the protocol realizing it.
inline ExtractionReport gaussian_ergotropy(const GaussianMomentState& s, const ExtractionOptions& opts = {}) {
  if (s.num_modes() != 2) throw DimensionError("gaussian_ergotropy handles two modes; use nmode_gaussian_ergotropy");
  require_valid(s);
  detail::Tracker t{s, {}};
  detail::displace_to_origin(t, opts.tol);
  const int rounds = detail::converge_pair(t, 0, 1, opts);
  if (rounds < 0) {
    throw ConvergenceError("two-mode reduction did not converge within " + std::to_string(opts.max_iters) + " rounds",
                           detail::finish_report(s, t, opts.max_iters, opts, false));
  }
  detail::beam_split_pair(t, 0, 1, opts.tol);
  return detail::finish_report(s, t, rounds, opts, true);
}

/// N-mode extraction by repeated lexicographic sweeps of the two-mode protocol over all pairs.
inline ExtractionReport nmode_gaussian_ergotropy(const GaussianMomentState& s, const ExtractionOptions& opts = {}) {
  const std::size_t n = s.num_modes();
  if (n < 2) throw DimensionError("nmode_gaussian_ergotropy needs N >= 2");
  require_valid(s);
  detail::Tracker t{s, {}};
  detail::displace_to_origin(t, opts.tol);
  for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
    double largest_drop = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double before = detail::energy_unchecked(t.state);
        if (detail::converge_pair(t, i, j, opts) < 0) {
          throw ConvergenceError("pair reduction did not converge in sweep " + std::to_string(sweep),
                                 detail::finish_report(s, t, sweep, opts, false));
        }
        detail::beam_split_pair(t, i, j, opts.tol);
        largest_drop = std::max(largest_drop, before - detail::energy_unchecked(t.state));
      }
    }
    if (largest_drop <= opts.tol * std::max(1.0, std::abs(detail::energy_unchecked(t.state))))
      return detail::finish_report(s, t, sweep, opts, true);
  }
  throw ConvergenceError("pair sweeps did not converge within " + std::to_string(opts.max_iters) + " sweeps",
                         detail::finish_report(s, t, opts.max_iters, opts, false));
}

/// Dispatches on the mode count; a single mode is displaced and isotropized.
inline ExtractionReport extract_work(const GaussianMomentState& s, const ExtractionOptions& opts = {}) {
  if (s.num_modes() == 2) return gaussian_ergotropy(s, opts);
  if (s.num_modes() > 2) return nmode_gaussian_ergotropy(s, opts);
  require_valid(s);
  detail::Tracker t{s, {}};
  detail::displace_to_origin(t, opts.tol);
  detail::isotropize_mode(t, 0, Stage::p2_local, opts.tol * std::max(1.0, s.covariance.cwiseAbs().maxCoeff()));
  return detail::finish_report(s, t, 1, opts, true);
}

}  // namespace gpass
