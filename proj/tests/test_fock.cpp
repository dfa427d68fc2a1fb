#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gpass/fock.hpp"
#include "gpass/oracle_verify.hpp"
#include "support.hpp"

using namespace gpass;
using fock::CMatrix;
using fock::CVector;
using gpass::testing::diagonal_state;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

fock::TruncatedDensityMatrix mixed_two_mode(int dim) {
  // 0.7 |psi><psi| + 0.3 thermal, psi a superposition with coherences of every order used by the moments.
  CVector psi = CVector::Zero(dim * dim);
  psi(0) = 0.8;
  psi(1) = std::complex<double>(0.3, 0.1);
  psi(dim) = std::complex<double>(0.0, -0.35);
  psi(dim + 1) = 0.2;
  psi(2 * dim) = 0.25;
  psi.normalize();
  auto rho = fock::thermal_state({0.1, 0.2}, dim, ModeSystem({1.0, 1.7}));
  rho.matrix = 0.3 * rho.matrix + 0.7 * psi * psi.adjoint();
  return rho;
}

}  // namespace

TEST(Ladder, Action) {
  const auto a = fock::ladder(8).matrix;
  CVector v0 = CVector::Zero(8);
  v0(0) = 1.0;
  EXPECT_EQ((a * v0).norm(), 0.0);
  CVector v3 = CVector::Zero(8);
  v3(3) = 1.0;
  const CVector out = a * v3;
  EXPECT_NEAR(std::abs(out(2) - std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(out.norm(), std::sqrt(3.0), 1e-15);
  const CMatrix n = CMatrix(fock::SparseC(a.adjoint() * a));
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(n(k, k).real(), k, 1e-14);
  EXPECT_THROW(fock::ladder(1), DimensionError);
}

TEST(Ladder, CommutatorDefectOnlyAtTop) {
  const int dim = 10;
  const auto a = fock::ladder(dim).matrix;
  const CMatrix comm = CMatrix(fock::SparseC(a * a.adjoint())) - CMatrix(fock::SparseC(a.adjoint() * a));
  for (int k = 0; k < dim - 1; ++k) EXPECT_NEAR(std::abs(comm(k, k) - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(comm(dim - 1, dim - 1).real(), 1.0 - dim, 1e-13);
}

TEST(Moments, Vacuum) {
  const auto m = fock::moments_of(fock::fock_state({0}, 10, ModeSystem({1.0})));
  EXPECT_TRUE(m.first_moments.isZero(0.0));
  EXPECT_LE(max_abs(m.covariance - Matrix::Identity(2, 2)), 1e-15);
}

TEST(Moments, FockThree) {
  const auto m = fock::moments_of(fock::fock_state({3}, 20, ModeSystem({1.0})));
  EXPECT_LE(max_abs(m.covariance - 7.0 * Matrix::Identity(2, 2)), 1e-13);
}

TEST(Moments, ThermalOneAtCutoffSixty) {
  // Missing tail weight is 2^-60.
  const auto m = fock::moments_of(fock::thermal_state({1.0}, 60, ModeSystem({1.0})));
  EXPECT_LE(max_abs(m.covariance - 3.0 * Matrix::Identity(2, 2)), 1e-9);
  EXPECT_FALSE(m.truncation_warning);
}

TEST(Moments, CoherentStateMatchesClosedForm) {
  const int dim = 50;
  const std::complex<double> alpha(0.9, -0.4);
  const auto rho = fock::from_state_vector(gpass::testing::coherent_vector(alpha, dim), dim, ModeSystem({2.0}));
  const auto m = fock::moments_of(rho);
  EXPECT_NEAR(m.first_moments(0), std::sqrt(2.0) * alpha.real(), 1e-12);
  EXPECT_NEAR(m.first_moments(1), std::sqrt(2.0) * alpha.imag(), 1e-12);
  EXPECT_LE(max_abs(m.covariance - Matrix::Identity(2, 2)), 1e-12);
  EXPECT_NEAR(fock::energy_of(rho), 2.0 * std::norm(alpha), 1e-12);
}

TEST(Moments, TailPolicy) {
  EXPECT_THROW(fock::moments_of(fock::thermal_state({3.0}, 20, ModeSystem({1.0}))), TruncationError);
  const auto m = fock::moments_of(fock::thermal_state({1.0}, 22, ModeSystem({1.0})));
  EXPECT_TRUE(m.truncation_warning);
}

TEST(Functionals, VacuumFockAndThermal) {
  const auto vac = fock::fock_state({0, 0}, 6, ModeSystem({1.0, 2.0}));
  EXPECT_EQ(fock::energy_of(vac), 0.0);
  EXPECT_NEAR(fock::entropy_of(vac), 0.0, 1e-14);
  const auto three = fock::fock_state({3}, 10, ModeSystem({1.0}));
  EXPECT_NEAR(fock::energy_of(three), 3.0, 1e-15);
  EXPECT_NEAR(fock::entropy_of(three), 0.0, 1e-14);
  const auto th = fock::thermal_state({1.0}, 80, ModeSystem({1.0}));
  EXPECT_NEAR(fock::energy_of(th), 1.0, 1e-12);
  EXPECT_NEAR(fock::entropy_of(th), 2.0 * std::numbers::ln2, 1e-12);
  EXPECT_NEAR(fock::purity_of(th), 1.0 / 3.0, 1e-12);
}

TEST(Unitary, IdentityOperation) {
  const auto u = fock::gaussian_unitary_matrix(rotation(0.0, 0, 1), 12);
  EXPECT_LE((CMatrix(u.matrix) - CMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-15);
  const auto d = fock::gaussian_unitary_matrix(displacement(Vector::Zero(4)), 6);
  EXPECT_LE((CMatrix(d.matrix) - CMatrix::Identity(36, 36)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Unitary, BeamSplitterQuarterTurnSwapsExcitation) {
  const int dim = 8;
  const auto u = fock::gaussian_unitary_matrix(beam_splitter(std::numbers::pi / 2, 0, 1, 2), dim);
  CVector in = CVector::Zero(dim * dim), target = CVector::Zero(dim * dim);
  in(1 * dim + 0) = 1.0;
  target(0 * dim + 1) = 1.0;
  const CVector out = u.matrix * in;
  EXPECT_GE(std::norm(target.dot(out)), 1.0 - 1e-8);
}

TEST(Unitary, SqueezedVacuumMoments) {
  const auto rho = fock::evolve(squeeze(0.5, 0, 1), fock::fock_state({0}, 40, ModeSystem({1.0})));
  const auto m = fock::moments_of(rho);
  EXPECT_NEAR(m.covariance(0, 0), std::exp(-1.0), 1e-6);
  EXPECT_NEAR(m.covariance(1, 1), std::exp(1.0), 1e-6);
  EXPECT_NEAR(m.covariance(0, 1), 0.0, 1e-6);
}

TEST(Unitary, SqueezedVacuumMatchesClosedFormVector) {
  const int dim = 60;
  const auto rho = fock::evolve(squeeze(1.0, 0, 1), fock::fock_state({0}, dim, ModeSystem({1.0})));
  // Both sides miss the same ~1e-8 tail above the cutoff, so compare normalized.
  const CVector psi = gpass::testing::squeezed_vacuum_vector(1.0, dim).normalized();
  const double overlap = (psi.adjoint() * rho.matrix * psi)(0, 0).real() / rho.matrix.trace().real();
  EXPECT_GE(overlap, 1.0 - 1e-8);
  const double closed = std::pow(std::sinh(1.0), 2);
  EXPECT_NEAR(fock::energy_of(rho), closed, 1e-5);
  EXPECT_NEAR(mean_energy(apply(squeeze(1.0, 0, 1), diagonal_state({1.0}, {1, 1}))), closed, 1e-12);
}

TEST(Unitary, Errors) {
  EXPECT_THROW(fock::gaussian_unitary_matrix(compose({rotation(0.1, 0, 1), squeeze(0.1, 0, 1)}), 10), DomainError);
  EXPECT_THROW(fock::gaussian_unitary_matrix(squeeze(2.0, 0, 1), 20), TruncationError);
  EXPECT_THROW(fock::gaussian_unitary_matrix(rotation(0.1, 0, 3), 10), DimensionError);
  EXPECT_THROW(fock::gaussian_unitary_matrix(rotation(0.1, 0, 1), fock::kMaxCutoff + 1), DimensionError);
}

TEST(TransformationLaw, EveryKindOnMixedState) {
  const int dim = 26;
  const auto rho = mixed_two_mode(dim);
  const auto before = fock::moments_of(rho).as_state(rho.frequencies);
  for (const auto& op : {rotation(0.7, 1, 2), squeeze(-0.3, 0, 2), two_mode_squeeze(0.25, 0, 1, 2),
                         beam_splitter(0.6, 1, 0, 2), displacement(Eigen::Vector4d(0.3, -0.2, 0.1, 0.4))}) {
    const auto after = fock::moments_of(fock::evolve(op, rho));
    const auto expected = apply(op, before);
    EXPECT_LE(max_abs(after.covariance - expected.covariance), 1e-6) << describe(op.label);
    EXPECT_LE((after.first_moments - expected.first_moments).cwiseAbs().maxCoeff(), 1e-6) << describe(op.label);
  }
}

TEST(TransformationLaw, EntropyInvariantUnderConjugation) {
  const int dim = 26;
  const auto rho = mixed_two_mode(dim);
  const double s = fock::entropy_of(rho);
  for (const auto& op : {squeeze(0.3, 1, 2), two_mode_squeeze(-0.2, 0, 1, 2), beam_splitter(1.1, 0, 1, 2)})
    EXPECT_NEAR(fock::entropy_of(fock::evolve(op, rho)), s, 1e-8) << describe(op.label);
}

TEST(MomentsProperty, ValidWhenWarningClear) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 16;
    CVector psi(dim);
    for (int k = 0; k < dim; ++k) psi(k) = std::complex<double>(g(rng), g(rng)) * std::exp(-0.6 * k);
    psi.normalize();
    const auto m = fock::moments_of(fock::from_state_vector(psi, dim, ModeSystem({1.0})));
    if (!m.truncation_warning) {
      EXPECT_TRUE(validate_state(m.as_state(ModeSystem({1.0}))).ok);
    }
  }
}

TEST(GaussianDensity, ReproducesMoments) {
  auto s = diagonal_state({1.0, 1.3}, {1.3, 1.3, 1.1, 1.1});
  for (const auto& op : {squeeze(0.2, 0, 2), two_mode_squeeze(0.15, 0, 1, 2), beam_splitter(0.4, 0, 1, 2),
                         displacement(Eigen::Vector4d(0.3, 0.0, -0.2, 0.1))})
    s = apply(op, s);
  const auto rho = gaussian_density(s, 30);
  const auto m = fock::moments_of(rho);
  EXPECT_LE(max_abs(m.covariance - s.covariance), 1e-6);
  EXPECT_LE((m.first_moments - s.first_moments).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(fock::purity_of(rho), purity(s.covariance), 1e-6);
}

TEST(VerifyProtocol, MisorderedThermalSwap) {
  const auto s = diagonal_state({1.0, 2.0}, {1.5, 1.5, 3, 3});
  const auto report = extract_work(s);
  const auto v = verify_protocol(s, report.steps, 40);
  EXPECT_EQ(v.steps.size(), report.steps.size() + 1);
  EXPECT_LE(v.max_residual, 1e-6);
}
