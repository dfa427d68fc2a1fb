#pragma once

// Replays an extraction protocol on a truncated Fock-space density matrix and
// compares every intermediate moment set with the phase-space prediction.

#include <algorithm>
#include <string>
#include <vector>

#include "gpass/extraction.hpp"
#include "gpass/fock.hpp"
#include "gpass/symplectic.hpp"

namespace gpass {

/// Truncated density matrix of a one- or two-mode Gaussian state: the thermal
/// product with its symplectic spectrum, carried back through the inverse protocol.
inline fock::TruncatedDensityMatrix gaussian_density(const GaussianMomentState& s, int dim) {
  if (s.num_modes() > 2) throw DimensionError("the Fock oracle handles one or two modes");
  const ExtractionReport report = extract_work(s);
  std::vector<AffineGaussianOp> ops;
  for (const auto& step : report.steps) ops.push_back(step.op);

  GaussianMomentState normal = report.final_state;
  if (s.num_modes() == 2) {
    const auto p = detail::read_standard_form(normal.covariance, 0, 1);
    const double c = 0.5 * (p.c1 + p.c2);
    if (std::abs(c) > 0.0) {
      ops.push_back(beam_splitter(bs_angle(p.a, p.b, c), 0, 1, 2));
      normal = apply(ops.back(), normal);
    }
  }
  std::vector<double> occupations;
  for (std::size_t k = 0; k < s.num_modes(); ++k) {
    const Eigen::Matrix2d block = mode_block(normal.covariance, k);
    occupations.push_back(std::max(0.0, 0.25 * (block(0, 0) + block(1, 1) - 2.0)));
  }
  fock::TruncatedDensityMatrix rho = fock::thermal_state(occupations, dim, s.modes);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) rho = fock::evolve(inverse(*it), rho);
  return rho;
}

struct StepResidual {
  std::string label;
  double moment_residual = 0.0;
  double energy_residual = 0.0;
  double tail_population = 0.0;
};

struct VerifyReport {
  int cutoff = 0;
  std::vector<StepResidual> steps;  // entry 0 is the reconstructed input state
  double max_moment_residual = 0.0;
  double max_energy_residual = 0.0;
  double max_residual = 0.0;
  bool truncation_warning = false;
};

namespace detail {

inline StepResidual compare(std::string label, const fock::TruncatedDensityMatrix& rho, const GaussianMomentState& expected) {
  const fock::MomentResult m = fock::moments_of(rho);
  StepResidual r{std::move(label)};
  r.moment_residual = std::max((m.first_moments - expected.first_moments).cwiseAbs().maxCoeff(),
                               (m.covariance - expected.covariance).cwiseAbs().maxCoeff());
  r.energy_residual = std::abs(fock::energy_of(rho) - energy_unchecked(expected));
  r.tail_population = m.tail_population;
  return r;
}

}  // namespace detail

/// Fock-space replay of a protocol applied to state s at the given cutoff.
inline VerifyReport verify_protocol(const GaussianMomentState& s, const std::vector<ProtocolStep>& steps, int dim) {
  VerifyReport out;
  out.cutoff = dim;
  fock::TruncatedDensityMatrix rho = gaussian_density(s, dim);
  GaussianMomentState expected = s;
  out.steps.push_back(detail::compare("input", rho, expected));
  for (const auto& step : steps) {
    rho = fock::evolve(step.op, rho);
    expected = apply(step.op, expected);
    out.steps.push_back(detail::compare(std::string(to_string(step.stage)) + " " + describe(step.op.label), rho, expected));
  }
  for (const auto& r : out.steps) {
    out.max_moment_residual = std::max(out.max_moment_residual, r.moment_residual);
    out.max_energy_residual = std::max(out.max_energy_residual, r.energy_residual);
    out.truncation_warning = out.truncation_warning || r.tail_population > fock::kTailWarning;
  }
  out.max_residual = std::max(out.max_moment_residual, out.max_energy_residual);
  return out;
}

}  // namespace gpass
