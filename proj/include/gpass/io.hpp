#pragma once

// JSON files: moment states in, protocols and reports out. Matrices are row-major
// nested lists. Doubles are written with round-trip precision, so parse(emit(x)) == x.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpass/core.hpp"
#include "gpass/extraction.hpp"
#include "gpass/gap.hpp"
#include "gpass/oracle_verify.hpp"
#include "gpass/symplectic.hpp"

namespace gpass {

using Json = nlohmann::ordered_json;

/// Malformed or structurally inconsistent file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kEnergyConvention =
    "E = sum_i w_i (1/4 [Tr Gamma_i - 2] + 1/2 |x_i|^2) with x = (a + a^dag)/sqrt(2), p = -i(a - a^dag)/sqrt(2). "
    "The first-moment coefficient is 1/2: a coherent state with <X> = (x, p) has <a^dag a> = (x^2 + p^2)/2. "
    "A 1/4 coefficient, as sometimes printed for this formula, undercounts the coherent energy by a factor of 2.";

struct StateFile {
  GaussianMomentState state;
  std::optional<std::string> name;
  std::optional<std::string> comment;

  friend bool operator==(const StateFile&, const StateFile&) = default;
};

struct ProtocolFile {
  std::vector<ProtocolStep> steps;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double extracted_work = 0.0;
  GaussianMomentState final_state;
  WilliamsonSpectrum spectrum;
  PassivityVerdict passive_certificate;

  friend bool operator==(const ProtocolFile&, const ProtocolFile&) = default;
};

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) throw FormatError("covariance must be a square matrix");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

inline Vector vector_from(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

inline Json to_json(const GaussianMomentState& s) {
  Json j;
  Json modes = Json::array();
  for (double w : s.modes.frequencies()) modes.push_back({{"frequency", w}});
  j["modes"] = std::move(modes);
  j["first_moments"] = std::vector<double>(s.first_moments.data(), s.first_moments.data() + s.first_moments.size());
  j["covariance"] = detail::matrix_json(s.covariance);
  return j;
}

/// Reads the state without checking the physical invariants (see validate_state).
inline GaussianMomentState state_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("state must be a JSON object");
  const Json modes = detail::field<Json>(j, "modes");
  if (!modes.is_array() || modes.empty()) throw FormatError("'modes' must be a non-empty list");
  std::vector<double> freqs;
  for (const auto& m : modes) freqs.push_back(detail::field<double>(m, "frequency"));
  GaussianMomentState s{ModeSystem(std::move(freqs)),
                        detail::vector_from(detail::field<std::vector<double>>(j, "first_moments")),
                        detail::matrix_from(detail::field<std::vector<std::vector<double>>>(j, "covariance"))};
  const auto dim = static_cast<Eigen::Index>(2 * s.num_modes());
  if (s.first_moments.size() != dim) throw FormatError("first_moments must have 2N entries");
  if (s.covariance.rows() != dim) throw FormatError("covariance must be 2N x 2N");
  return s;
}

inline Json to_json(const StateFile& f) {
  Json j;
  if (f.name) j["name"] = *f.name;
  if (f.comment) j["comment"] = *f.comment;
  const Json state = to_json(f.state);
  for (const auto& [k, v] : state.items()) j[k] = v;
  return j;
}

inline StateFile state_file_from_json(const Json& j) {
  StateFile f{state_from_json(j), {}, {}};
  if (j.contains("name")) f.name = detail::field<std::string>(j, "name");
  if (j.contains("comment")) f.comment = detail::field<std::string>(j, "comment");
  return f;
}

inline Json to_json(const ProtocolStep& step) {
  return {{"stage", to_string(step.stage)},
          {"kind", to_string(step.op.label.kind)},
          {"parameters", step.op.label.parameters},
          {"target_modes", step.op.label.modes},
          {"energy_after", step.energy_after}};
}

inline ProtocolStep step_from_json(const Json& j, std::size_t num_modes) {
  const auto stage = stage_from_string(detail::field<std::string>(j, "stage"));
  const auto kind = op_kind_from_string(detail::field<std::string>(j, "kind"));
  if (!stage) throw FormatError("unknown stage '" + j.at("stage").get<std::string>() + "'");
  if (!kind || *kind == OpKind::composite) throw FormatError("unknown or non-elementary operation kind");
  OpLabel label{*kind, detail::field<std::vector<double>>(j, "parameters"),
                detail::field<std::vector<std::size_t>>(j, "target_modes")};
  AffineGaussianOp op = make_op(label, num_modes);
  if (op.label != label) throw FormatError("target modes inconsistent with the operation kind");
  return {std::move(op), *stage, detail::field<double>(j, "energy_after")};
}

inline Json to_json(const PassivityVerdict& v) {
  Json violations = Json::array();
  for (const auto& x : v.violations)
    violations.push_back({{"kind", to_string(x.kind)}, {"modes", x.modes}, {"residual", x.residual}});
  return {{"passive", v.passive},
          {"clause", to_string(v.clause)},
          {"violations", std::move(violations)},
          {"first_moment_residual", v.first_moment_residual}};
}

inline PassivityVerdict verdict_from_json(const Json& j) {
  PassivityVerdict v;
  v.passive = detail::field<bool>(j, "passive");
  const auto clause = detail::field<std::string>(j, "clause");
  bool known = false;
  for (Clause c : {Clause::none, Clause::williamson, Clause::standard_form}) {
    if (to_string(c) == clause) {
      v.clause = c;
      known = true;
    }
  }
  if (!known) throw FormatError("unknown clause '" + clause + "'");
  for (const auto& x : detail::field<Json>(j, "violations")) {
    const auto kind = detail::field<std::string>(x, "kind");
    Violation out{ViolationKind::nonzero_first_moments, detail::field<std::vector<std::size_t>>(x, "modes"),
                  detail::field<double>(x, "residual")};
    known = false;
    for (ViolationKind k : {ViolationKind::nonzero_first_moments, ViolationKind::not_williamson_form,
                            ViolationKind::spectrum_ordering, ViolationKind::off_diagonal_mismatch}) {
      if (to_string(k) == kind) {
        out.kind = k;
        known = true;
      }
    }
    if (!known) throw FormatError("unknown violation kind '" + kind + "'");
    v.violations.push_back(std::move(out));
  }
  v.first_moment_residual = detail::field<double>(j, "first_moment_residual");
  return v;
}

inline ProtocolFile protocol_from_report(const ExtractionReport& r) {
  return {r.steps,       r.initial_energy, r.final_energy, r.extracted_work, r.final_state,
          symplectic_spectrum(r.final_state.covariance), r.passive_certificate};
}

inline Json to_json(const ProtocolFile& p) {
  Json steps = Json::array();
  for (const auto& s : p.steps) steps.push_back(to_json(s));
  return {{"energy_convention", kEnergyConvention},
          {"initial_energy", p.initial_energy},
          {"final_energy", p.final_energy},
          {"extracted_work", p.extracted_work},
          {"steps", std::move(steps)},
          {"final_state", to_json(p.final_state)},
          {"spectrum", p.spectrum.nus},
          {"passive_certificate", to_json(p.passive_certificate)}};
}

inline ProtocolFile protocol_from_json(const Json& j) {
  ProtocolFile p;
  p.initial_energy = detail::field<double>(j, "initial_energy");
  p.final_energy = detail::field<double>(j, "final_energy");
  p.extracted_work = detail::field<double>(j, "extracted_work");
  p.final_state = state_from_json(detail::field<Json>(j, "final_state"));
  for (const auto& s : detail::field<Json>(j, "steps")) p.steps.push_back(step_from_json(s, p.final_state.num_modes()));
  p.spectrum.nus = detail::field<std::vector<double>>(j, "spectrum");
  p.passive_certificate = verdict_from_json(detail::field<Json>(j, "passive_certificate"));
  return p;
}

/// Applies the protocol's operations to a state, in order.
inline GaussianMomentState replay(const ProtocolFile& p, const GaussianMomentState& initial) {
  GaussianMomentState s = initial;
  for (const auto& step : p.steps) s = apply(step.op, s);
  return s;
}

inline Json to_json(const GapReport& g) {
  Json j{{"gaussian_extractable", g.gaussian_extractable},
         {"total_extractable", g.total_extractable},
         {"gap", g.gap},
         {"entropy", g.entropy}};
  if (g.free_energy_gap) j["free_energy_gap"] = *g.free_energy_gap;
  if (g.reference_temperature) j["reference_temperature"] = *g.reference_temperature;
  return j;
}

inline GapReport gap_from_json(const Json& j) {
  GapReport g;
  g.gaussian_extractable = detail::field<double>(j, "gaussian_extractable");
  g.total_extractable = detail::field<double>(j, "total_extractable");
  g.gap = detail::field<double>(j, "gap");
  g.entropy = detail::field<double>(j, "entropy");
  if (j.contains("free_energy_gap")) g.free_energy_gap = detail::field<double>(j, "free_energy_gap");
  if (j.contains("reference_temperature")) g.reference_temperature = detail::field<double>(j, "reference_temperature");
  return g;
}

inline Json to_json(const std::optional<SwapWitness>& w) {
  if (!w) return {{"witness", "none"}};
  return {{"witness", "swap"},
          {"x", w->x},
          {"from_levels", {w->from_levels.first, w->from_levels.second}},
          {"to_levels", {w->to_levels.first, w->to_levels.second}},
          {"energy_drop", w->energy_drop}};
}

inline std::optional<SwapWitness> witness_from_json(const Json& j) {
  const auto kind = detail::field<std::string>(j, "witness");
  if (kind == "none") return std::nullopt;
  if (kind != "swap") throw FormatError("unknown witness kind '" + kind + "'");
  const auto from = detail::field<std::vector<int>>(j, "from_levels");
  const auto to = detail::field<std::vector<int>>(j, "to_levels");
  if (from.size() != 2 || to.size() != 2) throw FormatError("levels must be pairs");
  return SwapWitness{detail::field<int>(j, "x"), {from[0], from[1]}, {to[0], to[1]}, detail::field<double>(j, "energy_drop")};
}

inline Json to_json(const VerifyReport& v) {
  Json steps = Json::array();
  for (const auto& s : v.steps)
    steps.push_back({{"label", s.label},
                     {"moment_residual", s.moment_residual},
                     {"energy_residual", s.energy_residual},
                     {"tail_population", s.tail_population}});
  return {{"cutoff", v.cutoff},
          {"max_moment_residual", v.max_moment_residual},
          {"max_energy_residual", v.max_energy_residual},
          {"max_residual", v.max_residual},
          {"truncation_warning", v.truncation_warning},
          {"steps", std::move(steps)}};
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("parse error: ") + e.what());
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("write to '" + path + "' failed");
}

/// step_index,stage,description,energy_after
inline std::string trace_csv(const std::vector<ProtocolStep>& steps) {
  std::ostringstream out;
  out.precision(17);
  out << "step_index,stage,description,energy_after\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    out << k << ',' << to_string(steps[k].stage) << ",\"" << describe(steps[k].op.label) << "\"," << steps[k].energy_after
        << '\n';
  }
  return out.str();
}

}  // namespace gpass
