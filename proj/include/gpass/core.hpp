#pragma once

// Moment-based description of bosonic states and the scalar functionals
// computed from it. Units: hbar = k_B = 1. Quadratures are ordered
// (x_1, p_1, ..., x_N, p_N) with x = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gpass/errors.hpp"

namespace gpass {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance for symmetry and uncertainty-relation checks.
inline constexpr double kValidationTol = 1e-9;
/// Relative tolerance when pairing the +-nu eigenvalues of i*Omega*Gamma.
inline constexpr double kSpectrumPairTol = 1e-8;

/// Frequencies of N non-interacting modes.
class ModeSystem {
 public:
  ModeSystem() = default;

  explicit ModeSystem(std::vector<double> frequencies) : frequencies_(std::move(frequencies)) {
    if (frequencies_.empty()) throw DimensionError("mode system needs at least one mode");
    for (double w : frequencies_) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw ValidationError("mode frequencies must be finite and positive");
    }
  }

  std::size_t size() const noexcept { return frequencies_.size(); }
  double operator[](std::size_t i) const { return frequencies_[i]; }
  const std::vector<double>& frequencies() const noexcept { return frequencies_; }

  friend bool operator==(const ModeSystem&, const ModeSystem&) = default;

 private:
  std::vector<double> frequencies_;
};

/// Frequencies, first moments and covariance matrix of a (not necessarily Gaussian) state.
struct GaussianMomentState {
  ModeSystem modes;
  Vector first_moments;
  Matrix covariance;

  std::size_t num_modes() const noexcept { return modes.size(); }
};

/// Exact (bitwise) equality of two matrices, false on a shape mismatch.
template <class A, class B>
bool same_entries(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

inline bool operator==(const GaussianMomentState& a, const GaussianMomentState& b) {
  return a.modes == b.modes && same_entries(a.first_moments, b.first_moments) && same_entries(a.covariance, b.covariance);
}

/// Symplectic eigenvalues, sorted in descending order.
struct WilliamsonSpectrum {
  std::vector<double> nus;

  friend bool operator==(const WilliamsonSpectrum&, const WilliamsonSpectrum&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

inline Eigen::Matrix2d mode_block(const Matrix& gamma, std::size_t mode) {
  return gamma.block<2, 2>(2 * mode, 2 * mode);
}

inline Eigen::Matrix2d cross_block(const Matrix& gamma, std::size_t i, std::size_t j) {
  return gamma.block<2, 2>(2 * i, 2 * j);
}

/// Block-diagonal 2N x 2N form with blocks [[0, 1], [-1, 0]].
inline Matrix symplectic_form(std::size_t num_modes) {
  if (num_modes == 0) throw DimensionError("symplectic form needs N >= 1");
  Matrix omega = Matrix::Zero(2 * num_modes, 2 * num_modes);
  for (std::size_t k = 0; k < num_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Smallest eigenvalue of the Hermitian matrix Gamma + i*Omega.
inline double uncertainty_margin(const Matrix& gamma) {
  const auto n = static_cast<std::size_t>(gamma.rows() / 2);
  const Eigen::MatrixXcd h =
      gamma.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline ValidationReport validate_state(const GaussianMomentState& s, double tol = kValidationTol) {
  ValidationReport report;
  auto fail = [&](std::string what) {
    report.ok = false;
    report.violations.push_back(std::move(what));
  };

  const auto dim = static_cast<Eigen::Index>(2 * s.num_modes());
  if (s.num_modes() == 0) fail("no modes");
  if (s.first_moments.size() != dim) fail("first moments length differs from 2N");
  if (s.covariance.rows() != dim || s.covariance.cols() != dim) fail("covariance is not 2N x 2N");
  if (!report.ok) return report;

  if (!s.first_moments.allFinite()) fail("first moments not finite");
  if (!s.covariance.allFinite()) {
    fail("covariance not finite");
    return report;
  }
  if ((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() > tol) fail("covariance not symmetric");

  const Matrix sym = 0.5 * (s.covariance + s.covariance.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) fail("covariance not positive definite");
  if (uncertainty_margin(sym) < -tol) fail("uncertainty relation violated");
  return report;
}

inline void require_valid(const GaussianMomentState& s, double tol = kValidationTol) {
  const auto report = validate_state(s, tol);
  if (report.ok) return;
  std::string msg = "invalid state:";
  for (const auto& v : report.violations) msg += " " + v + ";";
  throw ValidationError(msg);
}

namespace detail {

inline double energy_unchecked(const ModeSystem& modes, const Vector& x, const Matrix& gamma) {
  double e = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    const double second = 0.25 * (gamma(k, k) + gamma(k + 1, k + 1) - 2.0);
    const double first = 0.5 * (x(k) * x(k) + x(k + 1) * x(k + 1));
    e += modes[i] * (second + first);
  }
  return e;
}

inline double energy_unchecked(const GaussianMomentState& s) {
  return energy_unchecked(s.modes, s.first_moments, s.covariance);
}

}  // namespace detail

/// Average energy sum_i w_i <a_i^dag a_i>.
///
/// The first-moment term carries coefficient 1/2: for a coherent state with
/// <X> = (x, p) the mean occupation is (x^2 + p^2)/2 under the quadrature
/// normalization above.
inline double mean_energy(const GaussianMomentState& s) {
  require_valid(s);
  return detail::energy_unchecked(s);
}

/// Tr(rho^2) of a Gaussian state with this covariance, 1/sqrt(det Gamma).
inline double purity(const Matrix& gamma) {
  const double det = gamma.determinant();
  if (!(det > 0.0)) throw ValidationError("covariance determinant is not positive");
  return 1.0 / std::sqrt(det);
}

namespace detail {

// Two-mode closed form from the local invariants.
inline WilliamsonSpectrum two_mode_spectrum(const Matrix& gamma) {
  const double det_a = mode_block(gamma, 0).determinant();
  const double det_b = mode_block(gamma, 1).determinant();
  const double det_c = cross_block(gamma, 0, 1).determinant();
  const double delta = det_a + det_b + 2.0 * det_c;
  const double det = gamma.determinant();
  double disc = delta * delta - 4.0 * det;
  if (disc < 0.0) {
    if (disc < -1e-10 * delta * delta) throw NumericalError("negative discriminant in two-mode symplectic spectrum");
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  const double plus = std::sqrt(0.5 * (delta + root));
  // det Gamma = (nu+ nu-)^2 avoids cancellation in (delta - root).
  const double minus = plus > 0.0 ? std::sqrt(det) / plus : 0.0;
  return {{plus, minus}};
}

// General route: eigenvalues of the Hermitian matrix i Gamma^{1/2} Omega Gamma^{1/2},
// which share the spectrum of i Omega Gamma.
inline WilliamsonSpectrum general_spectrum(const Matrix& gamma) {
  const auto n = static_cast<std::size_t>(gamma.rows() / 2);
  Eigen::SelfAdjointEigenSolver<Matrix> sqrt_solver(0.5 * (gamma + gamma.transpose()));
  const Matrix root = sqrt_solver.operatorSqrt();
  const Matrix antisym = root * symplectic_form(n) * root;
  const Eigen::MatrixXcd herm = std::complex<double>(0.0, 1.0) * antisym.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  std::vector<double> mags(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  for (double& m : mags) m = std::abs(m);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  WilliamsonSpectrum out;
  for (std::size_t k = 0; k < n; ++k) {
    const double hi = mags[2 * k];
    const double lo = mags[2 * k + 1];
    if (hi - lo > kSpectrumPairTol * std::max(1.0, hi))
      throw NumericalError("eigenvalues of i*Omega*Gamma do not pair into +-nu");
    out.nus.push_back(0.5 * (hi + lo));
  }
  return out;
}

}  // namespace detail

/// Symplectic eigenvalues of a covariance matrix, descending.
///
/// Every N goes through the Hermitian eigenproblem. The two-mode closed form
/// (detail::two_mode_spectrum) takes the square root of a discriminant that
/// vanishes for degenerate spectra and then loses about half the digits.
inline WilliamsonSpectrum symplectic_spectrum(const Matrix& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() % 2 != 0 || gamma.rows() == 0)
    throw DimensionError("covariance must be 2N x 2N");
  return detail::general_spectrum(gamma);
}

/// Entropy (nats) of a thermal mode with mean occupation m: (m+1)ln(m+1) - m ln m.
inline double thermal_entropy(double mean_occupation) {
  if (mean_occupation <= 0.0) return 0.0;
  const double m = mean_occupation;
  return (m + 1.0) * std::log1p(m) - m * std::log(m);
}

/// Symplectic eigenvalue coth(w / 2T) of a thermal mode; T = 0 gives 1.
inline double thermal_nu(double frequency, double temperature) {
  if (temperature < 0.0 || frequency <= 0.0) throw DomainError("thermal_nu needs w > 0, T >= 0");
  if (temperature == 0.0) return 1.0;
  return 1.0 / std::tanh(frequency / (2.0 * temperature));
}

/// Von Neumann entropy of the Gaussian state with this symplectic spectrum.
inline double gaussian_entropy(const WilliamsonSpectrum& spec, double tol = kValidationTol) {
  double s = 0.0;
  for (double nu : spec.nus) {
    if (nu < 1.0 - tol) throw DomainError("symplectic eigenvalue below 1");
    s += thermal_entropy(0.5 * (std::max(nu, 1.0) - 1.0));
  }
  return s;
}

}  // namespace gpass
