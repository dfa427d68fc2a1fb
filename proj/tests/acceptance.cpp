// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Exit status is the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gpass/fock.hpp"
#include "gpass/gap.hpp"
#include "gpass/io.hpp"
#include "gpass/oracle_search.hpp"
#include "gpass/oracle_verify.hpp"
#include "support.hpp"

using namespace gpass;
using gpass::testing::diagonal_state;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double relative_error(double value, double target) { return std::abs(value - target) / std::max(1.0, std::abs(target)); }

bool monotone(const ExtractionReport& r, double tol) {
  double prev = r.initial_energy;
  for (const auto& step : r.steps) {
    if (step.energy_after > prev + tol * std::max(1.0, prev)) return false;
    prev = step.energy_after;
  }
  return true;
}

std::vector<gpass::testing::RandomState> seeded_states() {
  std::mt19937_64 rng(20240611);
  std::vector<gpass::testing::RandomState> out;
  for (int k = 0; k < 200; ++k) out.push_back(gpass::testing::random_state(rng, 2, 10.0, 3.0));
  return out;
}

void pipeline_optimality(Outcome& o) {
  double worst = 0.0;
  for (const auto& rs : seeded_states()) {
    const auto r = extract_work(rs.state);
    const double bound = gpass::testing::sorted_energy(rs.nus, rs.state.modes.frequencies());
    worst = std::max(worst, relative_error(r.final_energy, bound));
    o.require(monotone(r, 1e-10), "energy trace not monotone");
    o.require(r.passive_certificate.passive, "final state not certified passive");
  }
  o.require(worst <= 1e-8, "relative energy error above 1e-8");
  o.detail << "worst relative error " << worst;
}

void oracle_agreement(Outcome& o) {
  const auto states = seeded_states();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int k = 0; k < 20; ++k) {
    const auto& s = states[static_cast<std::size_t>(k)].state;
    const double diff = brute_force_min_energy(s).best_energy - extract_work(s).final_energy;
    lo = std::min(lo, diff);
    hi = std::max(hi, diff);
  }
  o.require(lo >= -1e-4 && hi <= 1e-3, "search result outside [-1e-4, 1e-3] of the pipeline");
  o.detail << "search minus pipeline in [" << lo << ", " << hi << "]";
}

void thermal_boundary(Outcome& o) {
  int mismatches = 0, boundary = 0;
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j <= 20; ++j) {
      const double ta = 0.25 * i, tb = 0.25 * j;
      const double na = 1.0 / std::tanh(0.5 / ta), nb = 1.0 / std::tanh(1.0 / tb);
      const bool direct = is_gaussian_passive(diagonal_state({1.0, 2.0}, {na, na, nb, nb})).passive;
      const bool closed = thermal_product_passivity(1.0, 2.0, ta, tb);
      if (direct != closed) ++mismatches;
      if (2 * i == j) {
        ++boundary;
        o.require(direct && closed, "equality boundary not passive");
      }
    }
  }
  o.require(mismatches == 0, "verdicts disagree");
  o.detail << "400 grid points, " << mismatches << " mismatches, " << boundary << " on the boundary";
}

void closed_form_work(Outcome& o) {
  const auto squeezed = diagonal_state({1.0, 1.0}, {std::exp(-2.0), std::exp(2.0), 1, 1});
  const auto a = extract_work(squeezed);
  const double target_a = std::pow(std::sinh(1.0), 2);
  const auto mis = diagonal_state({1.0, 2.0}, {1.5, 1.5, 3, 3});
  const auto b = extract_work(mis);
  o.require(std::abs(a.extracted_work - target_a) <= 1e-9, "squeezed vacuum work");
  o.require(std::abs(b.extracted_work - 0.75) <= 1e-9, "mis-ordered thermal work");

  // Fock-space confirmation of the same numbers.
  const auto vac = fock::fock_state({0}, 60, ModeSystem({1.0}));
  const double oracle_a = fock::energy_of(fock::evolve(squeeze(1.0, 0, 1), vac));
  const auto verify = verify_protocol(mis, b.steps, 40);
  o.require(std::abs(oracle_a - target_a) <= 1e-5, "oracle squeezed vacuum energy");
  o.require(verify.max_residual <= 1e-6, "oracle protocol residual");
  o.detail << "work " << a.extracted_work << " and " << b.extracted_work << "; oracle energy " << oracle_a
           << ", protocol residual " << verify.max_residual;
}

void pure_match(Outcome& o) {
  double worst_cov = 0.0, worst_x = 0.0, worst_purity = 0.0;
  for (double nu : {1.0, 2.2, 4.0, 7.0, 11.6}) {
    const auto params = match_pure_state(nu);
    const int dim = params.n + 20;
    const auto rho = fock::from_state_vector(pure_match_vector(params, dim), dim, ModeSystem({1.0}));
    const auto m = fock::moments_of(rho);
    worst_cov = std::max(worst_cov, max_abs(m.covariance - nu * Matrix::Identity(2, 2)));
    worst_x = std::max(worst_x, m.first_moments.norm());
    worst_purity = std::max(worst_purity, 1.0 - fock::purity_of(rho));
  }
  o.require(worst_cov <= 1e-9, "covariance residual");
  o.require(worst_x <= 1e-12, "first moments");
  o.require(worst_purity <= 1e-10, "purity");
  o.detail << "covariance " << worst_cov << ", |x| " << worst_x << ", 1-purity " << worst_purity;
}

void fixed_entropy(Outcome& o) {
  const double s0 = 2.0 * std::numbers::ln2;
  const auto f = fixed_entropy_state(5.0, s0, 1.0, 60);
  const auto m = fock::moments_of(f.rho);
  const double entropy_res = std::abs(fock::entropy_of(f.rho) - s0);
  const double moment_res = std::max(max_abs(m.covariance - 5.0 * Matrix::Identity(2, 2)), m.first_moments.cwiseAbs().maxCoeff());
  const double energy = fock::energy_of(f.rho);
  o.require(f.n == 3, "subspace index");
  o.require(std::abs(f.sin2_phi - 16.0 / 21.0) <= 1e-12, "rotation angle");
  o.require(entropy_res <= 1e-10, "entropy residual");
  o.require(moment_res <= 1e-9, "moment residual");
  o.require(std::abs(energy - 2.0) <= 1e-9, "energy");
  o.detail << "n=" << f.n << ", sin^2=" << f.sin2_phi << ", entropy residual " << entropy_res << ", moment residual "
           << moment_res << ", energy " << energy;
}

void swap_witness(Outcome& o) {
  struct Case {
    double ta, tb;
    int x;
    std::pair<int, int> from, to;
  };
  const int dim = 40;
  for (const Case& c : {Case{1, 2, 4, {2, 2}, {0, 5}}, Case{1, 3, 2, {1, 1}, {0, 3}}}) {
    const auto w = thermal_swap_witness(c.ta, c.tb);
    o.require(w.has_value(), "no witness");
    if (!w) continue;
    o.require(w->x == c.x && w->from_levels == c.from && w->to_levels == c.to, "witness levels");
    auto occ = [](double t) { return 1.0 / std::expm1(1.0 / t); };
    auto rho = fock::thermal_state({occ(c.ta), occ(c.tb)}, dim, ModeSystem({1.0, 1.0}));
    const double before = fock::energy_of(rho);
    const int i = w->from_levels.first * dim + w->from_levels.second;
    const int j = w->to_levels.first * dim + w->to_levels.second;
    std::swap(rho.matrix(i, i), rho.matrix(j, j));
    const double drop = before - fock::energy_of(rho);
    o.require(drop > 0.0, "swap does not lower the energy");
    o.detail << "(" << c.ta << "," << c.tb << ") x=" << w->x << " drop " << drop << "; ";
  }
}

void convention_audit(Outcome& o) {
  const auto s = diagonal_state({2.0}, {1, 1}, {2.0, 0.0});
  const std::complex<double> alpha(std::sqrt(2.0), 0.0);
  const int dim = 40;
  const auto rho = fock::from_state_vector(gpass::testing::coherent_vector(alpha, dim), dim, s.modes);
  const double oracle = fock::energy_of(rho);
  const double moments = mean_energy(s);
  o.require(std::abs(oracle - 4.0) <= 1e-9, "oracle coherent energy");
  o.require(std::abs(moments - 4.0) <= 1e-12, "moment-formula coherent energy");
  const auto j = to_json(protocol_from_report(extract_work(s)));
  o.require(j.contains("energy_convention") && j["energy_convention"].get<std::string>().find("1/2") != std::string::npos,
            "report lacks the energy convention");
  o.detail << "oracle " << oracle << ", moments " << moments << "; report says: " << kEnergyConvention;
}

fock::TruncatedDensityMatrix low_energy_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 0.25);
  fock::CVector psi = fock::CVector::Zero(dim * dim);
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) psi(m * dim + n) = std::complex<double>(g(rng), g(rng)) * std::exp(-0.8 * (m + n));
  psi.normalize();
  auto rho = fock::thermal_state({u(rng), u(rng)}, dim, ModeSystem({1.0, 1.6}));
  const double mix = u(rng) * 2.0;
  rho.matrix = mix * rho.matrix + (1.0 - mix) * psi * psi.adjoint();
  return rho;
}

void transformation_law(Outcome& o) {
  const int dim = 40;
  std::mt19937_64 rng(99);
  std::vector<fock::TruncatedDensityMatrix> states;
  for (int k = 0; k < 10; ++k) states.push_back(low_energy_state(rng, dim));
  double worst = 0.0;
  for (const auto& op : {rotation(0.7, 1, 2), squeeze(-0.3, 0, 2), two_mode_squeeze(0.25, 0, 1, 2),
                         beam_splitter(0.6, 1, 0, 2), displacement(Eigen::Vector4d(0.3, -0.2, 0.1, 0.4))}) {
    const auto u = fock::gaussian_unitary_factors(op, dim);
    for (const auto& rho : states) {
      const auto expected = apply(op, fock::moments_of(rho).as_state(rho.frequencies));
      const auto got = fock::moments_of(fock::conjugate(u, rho));
      worst = std::max({worst, max_abs(got.covariance - expected.covariance),
                        (got.first_moments - expected.first_moments).cwiseAbs().maxCoeff()});
    }
  }
  o.require(worst <= 1e-6, "moment residual above 1e-6");
  o.detail << "50 conjugations, worst residual " << worst;
}

void nmode_sweeps(Outcome& o) {
  const std::vector<double> nus{1.2, 2.0, 3.0};
  const auto s = diagonal_state({1.0, 2.0, 3.0}, {nus[0], nus[0], nus[1], nus[1], nus[2], nus[2]});
  ExtractionOptions opts;
  opts.max_iters = 5;
  try {
    const auto r = nmode_gaussian_ergotropy(s, opts);
    const double bound = gpass::testing::sorted_energy(nus, s.modes.frequencies());
    o.require(std::abs(r.final_energy - bound) <= 1e-8, "not at the spectral minimum");
    o.require(r.iterations <= 5, "too many sweeps");
    o.detail << "final " << r.final_energy << " vs minimum " << bound << " after " << r.iterations << " sweeps";
  } catch (const ConvergenceError& e) {
    o.require(false, std::string("no convergence in 5 sweeps: ") + e.what());
  }
}

struct Criterion {
  int id;
  const char* name;
  double max_seconds;  // 0 means no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "pipeline optimality on 200 random states", 10.0, pipeline_optimality},
      {2, "brute-force oracle agreement on 20 states", 60.0, oracle_agreement},
      {3, "thermal-product passivity grid", 1.0, thermal_boundary},
      {4, "closed-form work values", 0.0, closed_form_work},
      {5, "pure states matching thermal moments", 0.0, pure_match},
      {6, "fixed-entropy rotated thermal state", 0.0, fixed_entropy},
      {7, "thermal swap witness", 0.0, swap_witness},
      {8, "energy convention audit", 0.0, convention_audit},
      {9, "Fock transformation law", 30.0, transformation_law},
      {10, "three-mode sweeps", 0.0, nmode_sweeps},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0.0) o.require(secs <= c.max_seconds, "runtime over " + std::to_string(c.max_seconds) + " s");
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s [%.2f s]  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
