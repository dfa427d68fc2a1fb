#pragma once

// Elementary Gaussian unitaries as affine symplectic maps X -> S X + d.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpass/core.hpp"

namespace gpass {

enum class OpKind { rotation, squeeze, two_mode_squeeze, beam_splitter, displacement, composite };

inline std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::rotation: return "rotation";
    case OpKind::squeeze: return "squeeze";
    case OpKind::two_mode_squeeze: return "two_mode_squeeze";
    case OpKind::beam_splitter: return "beam_splitter";
    case OpKind::displacement: return "displacement";
    case OpKind::composite: return "composite";
  }
  return "unknown";
}

inline std::optional<OpKind> op_kind_from_string(std::string_view name) {
  for (OpKind k : {OpKind::rotation, OpKind::squeeze, OpKind::two_mode_squeeze, OpKind::beam_splitter,
                   OpKind::displacement, OpKind::composite}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

/// Structured description of an operation: enough to rebuild it exactly.
///
/// parameters: rotation {theta}, squeeze {r}, two_mode_squeeze {r},
/// beam_splitter {theta}, displacement {d_1, ..., d_2N}. modes lists the
/// targets (all modes for a displacement).
struct OpLabel {
  OpKind kind = OpKind::composite;
  std::vector<double> parameters;
  std::vector<std::size_t> modes;

  friend bool operator==(const OpLabel&, const OpLabel&) = default;
};

struct AffineGaussianOp {
  Matrix symplectic;
  Vector displacement;
  OpLabel label;

  std::size_t num_modes() const noexcept { return static_cast<std::size_t>(symplectic.rows() / 2); }
};

inline bool operator==(const AffineGaussianOp& a, const AffineGaussianOp& b) {
  return a.label == b.label && same_entries(a.symplectic, b.symplectic) && same_entries(a.displacement, b.displacement);
}

inline double symplectic_residual(const Matrix& s) {
  const Matrix omega = symplectic_form(static_cast<std::size_t>(s.rows() / 2));
  return (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
}

inline bool is_symplectic(const Matrix& s, double tol = 1e-10) {
  return s.rows() == s.cols() && s.rows() % 2 == 0 && s.rows() > 0 && symplectic_residual(s) <= tol;
}

namespace detail {

inline void check_mode(std::size_t mode, std::size_t n) {
  if (n == 0) throw DimensionError("operation needs N >= 1");
  if (mode >= n) throw DimensionError("mode index " + std::to_string(mode) + " out of range for N = " + std::to_string(n));
}

inline void check_pair(std::size_t i, std::size_t j, std::size_t n) {
  check_mode(i, n);
  check_mode(j, n);
  if (i == j) throw DimensionError("two-mode operation needs distinct modes");
}

inline AffineGaussianOp local_op(const Eigen::Matrix2d& block, std::size_t mode, std::size_t n, OpLabel label) {
  check_mode(mode, n);
  Matrix s = Matrix::Identity(2 * n, 2 * n);
  s.block<2, 2>(2 * mode, 2 * mode) = block;
  return {std::move(s), Vector::Zero(2 * n), std::move(label)};
}

inline AffineGaussianOp pair_op(const Eigen::Matrix2d& aa, const Eigen::Matrix2d& ab, const Eigen::Matrix2d& ba,
                                const Eigen::Matrix2d& bb, std::size_t i, std::size_t j, std::size_t n, OpLabel label) {
  check_pair(i, j, n);
  Matrix s = Matrix::Identity(2 * n, 2 * n);
  s.block<2, 2>(2 * i, 2 * i) = aa;
  s.block<2, 2>(2 * i, 2 * j) = ab;
  s.block<2, 2>(2 * j, 2 * i) = ba;
  s.block<2, 2>(2 * j, 2 * j) = bb;
  return {std::move(s), Vector::Zero(2 * n), std::move(label)};
}

}  // namespace detail

/// Phase rotation [[cos, sin], [-sin, cos]] on one mode.
inline AffineGaussianOp rotation(double theta, std::size_t mode, std::size_t n) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return detail::local_op(r, mode, n, {OpKind::rotation, {theta}, {mode}});
}

/// Single-mode squeezer diag(e^-r, e^r).
inline AffineGaussianOp squeeze(double r, std::size_t mode, std::size_t n) {
  const Eigen::Matrix2d m = Eigen::Vector2d(std::exp(-r), std::exp(r)).asDiagonal();
  return detail::local_op(m, mode, n, {OpKind::squeeze, {r}, {mode}});
}

inline AffineGaussianOp two_mode_squeeze(double r, std::size_t mode_a, std::size_t mode_b, std::size_t n) {
  const Eigen::Matrix2d diag = std::cosh(r) * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d off = Eigen::Vector2d(std::sinh(r), -std::sinh(r)).asDiagonal();
  return detail::pair_op(diag, off, off, diag, mode_a, mode_b, n,
                         {OpKind::two_mode_squeeze, {r}, {mode_a, mode_b}});
}

/// [[cos 1, sin 1], [sin 1, -cos 1]]: orthogonal, symplectic and its own inverse.
inline AffineGaussianOp beam_splitter(double theta, std::size_t mode_a, std::size_t mode_b, std::size_t n) {
  const Eigen::Matrix2d c = std::cos(theta) * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d s = std::sin(theta) * Eigen::Matrix2d::Identity();
  return detail::pair_op(c, s, s, -c, mode_a, mode_b, n, {OpKind::beam_splitter, {theta}, {mode_a, mode_b}});
}

inline AffineGaussianOp displacement(const Vector& d) {
  if (d.size() == 0 || d.size() % 2 != 0) throw DimensionError("displacement needs a vector of length 2N");
  if (!d.allFinite()) throw DomainError("displacement must be finite");
  const auto n = static_cast<std::size_t>(d.size() / 2);
  OpLabel label{OpKind::displacement, std::vector<double>(d.data(), d.data() + d.size()), {}};
  for (std::size_t k = 0; k < n; ++k) label.modes.push_back(k);
  return {Matrix::Identity(2 * n, 2 * n), d, std::move(label)};
}

inline AffineGaussianOp identity_op(std::size_t n) {
  return {Matrix::Identity(2 * n, 2 * n), Vector::Zero(2 * n), {OpKind::composite, {}, {}}};
}

/// Rebuilds an elementary operation from its label on an N-mode system.
inline AffineGaussianOp make_op(const OpLabel& label, std::size_t n) {
  auto param = [&](std::size_t count) {
    if (label.parameters.size() != count) throw DimensionError("wrong parameter count for " + std::string(to_string(label.kind)));
  };
  auto targets = [&](std::size_t count) {
    if (label.modes.size() != count) throw DimensionError("wrong target count for " + std::string(to_string(label.kind)));
  };
  switch (label.kind) {
    case OpKind::rotation: param(1); targets(1); return rotation(label.parameters[0], label.modes[0], n);
    case OpKind::squeeze: param(1); targets(1); return squeeze(label.parameters[0], label.modes[0], n);
    case OpKind::two_mode_squeeze:
      param(1); targets(2);
      return two_mode_squeeze(label.parameters[0], label.modes[0], label.modes[1], n);
    case OpKind::beam_splitter:
      param(1); targets(2);
      return beam_splitter(label.parameters[0], label.modes[0], label.modes[1], n);
    case OpKind::displacement: {
      param(2 * n);
      return displacement(Eigen::Map<const Vector>(label.parameters.data(), static_cast<Eigen::Index>(2 * n)));
    }
    case OpKind::composite: break;
  }
  throw DomainError("composite operations cannot be rebuilt from their label");
}

/// Exact inverse, built per kind (negated parameters; beam splitters are involutions).
inline AffineGaussianOp inverse(const AffineGaussianOp& op) {
  const std::size_t n = op.num_modes();
  const auto& l = op.label;
  switch (l.kind) {
    case OpKind::rotation: return rotation(-l.parameters.at(0), l.modes.at(0), n);
    case OpKind::squeeze: return squeeze(-l.parameters.at(0), l.modes.at(0), n);
    case OpKind::two_mode_squeeze: return two_mode_squeeze(-l.parameters.at(0), l.modes.at(0), l.modes.at(1), n);
    case OpKind::beam_splitter: return beam_splitter(l.parameters.at(0), l.modes.at(0), l.modes.at(1), n);
    case OpKind::displacement: return displacement(-op.displacement);
    case OpKind::composite: break;
  }
  // S^-1 = -Omega S^T Omega for symplectic S.
  const Matrix omega = symplectic_form(n);
  Matrix s_inv = -omega * op.symplectic.transpose() * omega;
  Vector d_inv = -(s_inv * op.displacement);
  return {std::move(s_inv), std::move(d_inv), {OpKind::composite, {}, {}}};
}

/// Gamma -> S Gamma S^T, x -> S x + d.
inline GaussianMomentState apply(const AffineGaussianOp& op, const GaussianMomentState& s) {
  if (op.num_modes() != s.num_modes() || s.first_moments.size() != op.displacement.size() ||
      s.covariance.rows() != op.symplectic.rows())
    throw DimensionError("operation and state dimensions differ");
  GaussianMomentState out{s.modes, op.symplectic * s.first_moments + op.displacement,
                          op.symplectic * s.covariance * op.symplectic.transpose()};
  if (op.label.kind == OpKind::displacement) out.covariance = s.covariance;
  return out;
}

/// Single operation equivalent to applying ops in order (first element first).
inline AffineGaussianOp compose(const std::vector<AffineGaussianOp>& ops) {
  if (ops.empty()) throw DimensionError("compose needs at least one operation");
  const std::size_t n = ops.front().num_modes();
  Matrix s = Matrix::Identity(2 * n, 2 * n);
  Vector d = Vector::Zero(2 * n);
  for (const auto& op : ops) {
    if (op.num_modes() != n) throw DimensionError("compose: operations act on different mode counts");
    s = op.symplectic * s;
    d = op.symplectic * d + op.displacement;
  }
  return {std::move(s), std::move(d), {OpKind::composite, {}, {}}};
}

/// Stages of the energy-lowering protocol.
enum class Stage { p1_displace, p2_local, p3_tms, p3_realign, p4_beamsplit };

inline std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::p1_displace: return "P1-displace";
    case Stage::p2_local: return "P2-local";
    case Stage::p3_tms: return "P3-tms";
    case Stage::p3_realign: return "P3-realign";
    case Stage::p4_beamsplit: return "P4-beamsplit";
  }
  return "unknown";
}

inline std::optional<Stage> stage_from_string(std::string_view name) {
  for (Stage s : {Stage::p1_displace, Stage::p2_local, Stage::p3_tms, Stage::p3_realign, Stage::p4_beamsplit}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

struct ProtocolStep {
  AffineGaussianOp op;
  Stage stage = Stage::p2_local;
  double energy_after = 0.0;

  friend bool operator==(const ProtocolStep&, const ProtocolStep&) = default;
};

/// Short human-readable description, e.g. "squeeze(r=0.5) on mode 1".
inline std::string describe(const OpLabel& label) {
  std::string out(to_string(label.kind));
  if (label.kind == OpKind::displacement) {
    out += "(|d|=";
    double norm2 = 0.0;
    for (double v : label.parameters) norm2 += v * v;
    out += std::to_string(std::sqrt(norm2)) + ")";
    return out;
  }
  if (!label.parameters.empty()) {
    const bool angle = label.kind == OpKind::rotation || label.kind == OpKind::beam_splitter;
    out += std::string("(") + (angle ? "theta=" : "r=") + std::to_string(label.parameters[0]) + ")";
  }
  if (!label.modes.empty()) {
    out += label.modes.size() == 1 ? " on mode " : " on modes ";
    for (std::size_t k = 0; k < label.modes.size(); ++k) {
      if (k) out += "&";
      out += std::to_string(label.modes[k]);
    }
  }
  return out;
}

}  // namespace gpass
