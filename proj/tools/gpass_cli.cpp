// gpass: command-line front end for Gaussian passivity and work extraction.
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "gpass/core.hpp"
#include "gpass/extraction.hpp"
#include "gpass/gap.hpp"
#include "gpass/io.hpp"
#include "gpass/oracle_search.hpp"
#include "gpass/oracle_verify.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNumerical = 2 };

void print(const gpass::Json& j) { std::cout << j.dump(2) << '\n'; }

gpass::GaussianMomentState load_valid_state(const std::string& path) {
  auto s = gpass::state_from_json(gpass::read_json_file(path));
  gpass::require_valid(s);
  return s;
}

int cmd_validate(const std::string& path) {
  const auto s = gpass::state_from_json(gpass::read_json_file(path));
  const auto report = gpass::validate_state(s);
  print({{"ok", report.ok}, {"violations", report.violations}});
  return report.ok ? kOk : kInvalid;
}

int cmd_check(const std::string& path, double tol) {
  const auto s = load_valid_state(path);
  const auto v = s.num_modes() == 2 ? gpass::is_gaussian_passive(s, tol) : gpass::is_gaussian_passive_nmode(s, tol);
  print(gpass::to_json(v));
  return kOk;
}

struct ExtractArgs {
  std::string path, out, trace;
  double tol = 1e-12;
  int max_iters = 200;
  bool nmode = false;
};

void write_trace(const std::string& path, const std::vector<gpass::ProtocolStep>& steps) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw gpass::FormatError("cannot write '" + path + "'");
  out << gpass::trace_csv(steps);
}

int cmd_extract(const ExtractArgs& a) {
  const auto s = load_valid_state(a.path);
  if (s.num_modes() != 2 && !(a.nmode && s.num_modes() >= 2))
    throw gpass::DimensionError("extract needs a two-mode state, or --nmode with N >= 2");
  gpass::ExtractionOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  gpass::ExtractionReport report;
  try {
    report = a.nmode ? gpass::nmode_gaussian_ergotropy(s, opts) : gpass::gaussian_ergotropy(s, opts);
  } catch (const gpass::ConvergenceError& e) {
    write_trace(a.trace, e.partial().steps);
    throw;
  }
  write_trace(a.trace, report.steps);
  const auto protocol = gpass::protocol_from_report(report);
  if (!a.out.empty()) {
    gpass::write_json_file(a.out, gpass::to_json(protocol));
    print({{"extracted_work", report.extracted_work},
           {"initial_energy", report.initial_energy},
           {"final_energy", report.final_energy},
           {"steps", report.steps.size()},
           {"passive", report.passive_certificate.passive},
           {"energy_convention", gpass::kEnergyConvention}});
  } else {
    print(gpass::to_json(protocol));
  }
  return kOk;
}

int cmd_spectrum(const std::string& path) {
  const auto s = load_valid_state(path);
  const auto spec = gpass::symplectic_spectrum(s.covariance);
  print({{"nus", spec.nus},
         {"entropy", gpass::gaussian_entropy(spec)},
         {"purity", gpass::purity(s.covariance)},
         {"mean_energy", gpass::mean_energy(s)},
         {"minimal_gaussian_energy", gpass::minimal_gaussian_energy(spec, s.modes)}});
  return kOk;
}

int cmd_gap(const std::string& path, double entropy, std::optional<double> temperature) {
  const auto s = load_valid_state(path);
  print(gpass::to_json(gpass::ergotropy_gap(s, entropy, temperature)));
  return kOk;
}

int cmd_witness(double ta, double tb, double omega) {
  print(gpass::to_json(gpass::thermal_swap_witness(ta, tb, omega)));
  return kOk;
}

struct VerifyArgs {
  std::string path, protocol;
  int cutoff = 40;
  std::uint64_t seed = gpass::SearchBudget{}.seed;
  int starts = gpass::SearchBudget{}.starts;
  double threshold = 1e-6;
};

int cmd_oracle_verify(const VerifyArgs& a) {
  const auto s = load_valid_state(a.path);
  if (s.num_modes() > 2) throw gpass::DimensionError("oracle-verify handles one or two modes");
  gpass::ProtocolFile protocol = a.protocol.empty() ? gpass::protocol_from_report(gpass::extract_work(s))
                                                    : gpass::protocol_from_json(gpass::read_json_file(a.protocol));
  if (protocol.final_state.num_modes() != s.num_modes()) throw gpass::DimensionError("protocol and state mode counts differ");
  const auto report = gpass::verify_protocol(s, protocol.steps, a.cutoff);
  gpass::Json out = gpass::to_json(report);
  out["threshold"] = a.threshold;
  out["within_threshold"] = report.max_residual <= a.threshold;
  if (s.num_modes() == 2) {
    gpass::SearchBudget budget;
    budget.seed = a.seed;
    budget.starts = a.starts;
    const auto search = gpass::brute_force_min_energy(s, budget);
    const double pipeline = gpass::detail::energy_unchecked(gpass::replay(protocol, s));
    out["search"] = {{"seed", a.seed},
                     {"best_energy", search.best_energy},
                     {"protocol_final_energy", pipeline},
                     {"difference", search.best_energy - pipeline},
                     {"evaluations", search.evaluations},
                     {"budget_exhausted", search.budget_exhausted}};
  }
  print(out);
  return report.max_residual <= a.threshold ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian passivity, work extraction and Fock-space checks for bosonic moment states"};
  app.require_subcommand(1);

  std::string path;
  double tol = gpass::kValidationTol;

  auto* validate = app.add_subcommand("validate", "Check a state file against the covariance invariants");
  validate->add_option("state", path, "State file (JSON)")->required();

  auto* check = app.add_subcommand("check", "Decide Gaussian passivity");
  check->add_option("state", path, "State file (JSON)")->required();
  check->add_option("--tol", tol, "Absolute tolerance on residuals")->capture_default_str();

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Lower the energy with Gaussian unitaries and emit the protocol");
  extract->add_option("state", ex.path, "State file (JSON)")->required();
  extract->add_option("--out", ex.out, "Protocol file to write (JSON); printed to stdout if absent");
  extract->add_option("--trace", ex.trace, "Per-step energy trace (CSV)");
  extract->add_option("--tol", ex.tol, "Convergence tolerance")->capture_default_str();
  extract->add_option("--max-iters", ex.max_iters, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  extract->add_flag("--nmode", ex.nmode, "Pairwise sweeps for N >= 2 modes");

  auto* spectrum = app.add_subcommand("spectrum", "Symplectic eigenvalues, entropy, purity and minimal energy");
  spectrum->add_option("state", path, "State file (JSON)")->required();

  double entropy = 0.0;
  std::optional<double> temperature;
  auto* gap = app.add_subcommand("gap", "Gaussian versus unrestricted extractable energy at fixed entropy");
  gap->add_option("state", path, "State file (JSON)")->required();
  gap->add_option("--entropy", entropy, "Entropy S0 in nats")->required();
  gap->add_option("--temperature", temperature, "Reference temperature for the free-energy bookkeeping");

  double ta = 0.0, tb = 0.0, omega = 1.0;
  auto* witness = app.add_subcommand("witness", "Population swap showing a two-temperature product is not passive");
  witness->add_option("--ta", ta, "Temperature of mode a")->required();
  witness->add_option("--tb", tb, "Temperature of mode b")->required();
  witness->add_option("--omega", omega, "Common mode frequency")->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("oracle-verify", "Replay the protocol in a truncated Fock space");
  verify->add_option("state", va.path, "State file (JSON)")->required();
  verify->add_option("--cutoff", va.cutoff, "Fock levels per mode")->required()->check(CLI::Range(2, gpass::fock::kMaxCutoff));
  verify->add_option("--protocol", va.protocol, "Protocol file to replay instead of computing one");
  verify->add_option("--seed", va.seed, "Seed of the multi-start energy search")->capture_default_str();
  verify->add_option("--starts", va.starts, "Number of search starts")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--threshold", va.threshold, "Largest acceptable residual")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) return cmd_validate(path);
    if (*check) return cmd_check(path, tol);
    if (*extract) return cmd_extract(ex);
    if (*spectrum) return cmd_spectrum(path);
    if (*gap) return cmd_gap(path, entropy, temperature);
    if (*witness) return cmd_witness(ta, tb, omega);
    if (*verify) return cmd_oracle_verify(va);
  } catch (const gpass::TruncationError& e) {
    std::cerr << "error: " << e.what();
    if (e.suggested_cutoff() > 0) std::cerr << " (try a cutoff of at least " << e.suggested_cutoff() << ")";
    std::cerr << '\n';
    return kNumerical;
  } catch (const gpass::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const gpass::Error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kInvalid;
}
