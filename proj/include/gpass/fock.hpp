#pragma once

// Truncated Fock-space engine for one or two modes. Used as an independent
// check of the moment-level formulas: expectation values are evaluated from
// density matrices, and Gaussian unitaries are exponentiated from their
// quadratic generators.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "gpass/core.hpp"
#include "gpass/symplectic.hpp"

namespace gpass::fock {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseC = Eigen::SparseMatrix<Complex>;

inline constexpr int kMaxCutoff = 80;
inline constexpr double kTailWarning = 1e-8;
inline constexpr double kTailError = 1e-4;

/// Levels 0..dim-1 per mode; two-mode index |m, n> -> m * dim + n.
struct TruncatedOperator {
  int dim = 0;
  int modes = 1;
  SparseC matrix;
};

struct TruncatedDensityMatrix {
  int dim = 0;
  int modes = 1;
  CMatrix matrix;
  ModeSystem frequencies;
};

namespace detail {

inline int space_size(int dim, int modes) { return modes == 1 ? dim : dim * dim; }

inline void check_shape(int dim, int modes) {
  if (dim < 2) throw DimensionError("Fock cutoff must be at least 2");
  if (modes != 1 && modes != 2) throw DimensionError("Fock oracle handles one or two modes");
}

inline SparseC identity(int n) {
  SparseC id(n, n);
  id.setIdentity();
  return id;
}

inline SparseC single_ladder(int dim) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int n = 1; n < dim; ++n) entries.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  SparseC a(dim, dim);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

inline SparseC embed(const SparseC& single, int mode, int modes, int dim) {
  if (modes == 1) return single;
  SparseC out = mode == 0 ? SparseC(Eigen::kroneckerProduct(single, identity(dim)))
                          : SparseC(Eigen::kroneckerProduct(identity(dim), single));
  out.makeCompressed();
  return out;
}

// Tr(rho O) for sparse O.
inline Complex expect(const CMatrix& rho, const SparseC& op) {
  Complex sum = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseC::InnerIterator it(op, k); it; ++it) sum += it.value() * rho(it.col(), it.row());
  return sum;
}

// Connected components of the symmetric sparsity graph of a square matrix; the matrix is
// block diagonal over them.
inline std::vector<std::vector<int>> components(const SparseC& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseC::InnerIterator it(m, k); it; ++it) {
      const int a = find(static_cast<int>(it.row())), b = find(static_cast<int>(it.col()));
      if (a != b) parent[a] = b;
    }
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

inline CMatrix dense_block(const SparseC& m, const std::vector<int>& members, std::vector<int>& local) {
  const int size = static_cast<int>(members.size());
  for (int k = 0; k < size; ++k) local[members[k]] = k;
  CMatrix block = CMatrix::Zero(size, size);
  for (int idx : members)
    for (SparseC::InnerIterator it(m, idx); it; ++it) block(local[it.row()], local[it.col()]) = it.value();
  return block;
}

// exp(G) assembled from dense exponentials of the connected components of G's sparsity graph.
inline SparseC block_exponential(const SparseC& gen) {
  const int n = static_cast<int>(gen.rows());
  std::vector<int> local(n);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (const auto& members : components(gen)) {
    const int m = static_cast<int>(members.size());
    const CMatrix e = dense_block(gen, members, local).exp();
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        if (e(r, c) != Complex(0.0)) entries.emplace_back(members[r], members[c], e(r, c));
  }
  SparseC out(n, n);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

// Keeps rows/columns whose per-mode levels are below dim.
inline SparseC project(const SparseC& big, int big_dim, int dim, int modes) {
  auto map = [&](int idx) -> int {
    if (modes == 1) return idx < dim ? idx : -1;
    const int m = idx / big_dim, n = idx % big_dim;
    return (m < dim && n < dim) ? m * dim + n : -1;
  };
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int k = 0; k < big.outerSize(); ++k)
    for (SparseC::InnerIterator it(big, k); it; ++it) {
      const int r = map(static_cast<int>(it.row())), c = map(static_cast<int>(it.col()));
      if (r >= 0 && c >= 0) entries.emplace_back(r, c, it.value());
    }
  const int size = space_size(dim, modes);
  SparseC out(size, size);
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

inline int enlarged_cutoff(int dim) { return std::max(static_cast<int>(std::ceil(1.5 * dim)), dim + 10); }

}  // namespace detail

/// Single-mode annihilation operator, a|n> = sqrt(n)|n-1>.
inline TruncatedOperator ladder(int dim) {
  if (dim < 2) throw DimensionError("ladder needs dim >= 2");
  return {dim, 1, detail::single_ladder(dim)};
}

/// Annihilation operator of one mode inside a one- or two-mode space.
inline TruncatedOperator annihilation(int mode, int modes, int dim) {
  detail::check_shape(dim, modes);
  if (mode < 0 || mode >= modes) throw DimensionError("mode index out of range");
  return {dim, modes, detail::embed(detail::single_ladder(dim), mode, modes, dim)};
}

inline TruncatedDensityMatrix from_state_vector(const CVector& psi, int dim, const ModeSystem& freqs) {
  const int modes = static_cast<int>(freqs.size());
  detail::check_shape(dim, modes);
  if (psi.size() != detail::space_size(dim, modes)) throw DimensionError("state vector size does not match cutoff");
  return {dim, modes, psi * psi.adjoint(), freqs};
}

/// Product of Fock states |levels[0], levels[1], ...>.
inline TruncatedDensityMatrix fock_state(const std::vector<int>& levels, int dim, const ModeSystem& freqs) {
  const int modes = static_cast<int>(freqs.size());
  detail::check_shape(dim, modes);
  if (static_cast<int>(levels.size()) != modes) throw DimensionError("one level per mode");
  int idx = 0;
  for (int l : levels) {
    if (l < 0 || l >= dim) throw TruncationError("Fock level outside cutoff", l + 1);
    idx = idx * dim + l;
  }
  CVector psi = CVector::Zero(detail::space_size(dim, modes));
  psi(idx) = 1.0;
  return from_state_vector(psi, dim, freqs);
}

/// Product of thermal states with the given mean occupations, truncated (not renormalized).
inline TruncatedDensityMatrix thermal_state(const std::vector<double>& mean_occupations, int dim, const ModeSystem& freqs) {
  const int modes = static_cast<int>(freqs.size());
  detail::check_shape(dim, modes);
  if (static_cast<int>(mean_occupations.size()) != modes) throw DimensionError("one occupation per mode");
  std::vector<std::vector<double>> pops;
  for (double m : mean_occupations) {
    if (m < 0.0) throw DomainError("mean occupation must be non-negative");
    std::vector<double> p(dim, 0.0);
    const double q = m / (m + 1.0);
    for (int n = 0; n < dim; ++n) p[n] = (1.0 - q) * std::pow(q, n);
    pops.push_back(std::move(p));
  }
  const int size = detail::space_size(dim, modes);
  CMatrix rho = CMatrix::Zero(size, size);
  for (int idx = 0; idx < size; ++idx) {
    rho(idx, idx) = modes == 1 ? pops[0][idx] : pops[0][idx / dim] * pops[1][idx % dim];
  }
  return {dim, modes, std::move(rho), freqs};
}

/// Largest per-mode marginal population in the top two levels.
inline double tail_population(const TruncatedDensityMatrix& rho) {
  double worst = 0.0;
  const int size = detail::space_size(rho.dim, rho.modes);
  for (int mode = 0; mode < rho.modes; ++mode) {
    double tail = 0.0;
    for (int idx = 0; idx < size; ++idx) {
      const int level = rho.modes == 1 ? idx : (mode == 0 ? idx / rho.dim : idx % rho.dim);
      if (level >= rho.dim - 2) tail += rho.matrix(idx, idx).real();
    }
    worst = std::max(worst, tail);
  }
  return worst;
}

struct DensityCheck {
  double hermiticity = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = true;
};

inline DensityCheck check_density(const TruncatedDensityMatrix& rho) {
  DensityCheck c;
  c.hermiticity = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  c.trace_defect = std::abs(rho.matrix.trace() - Complex(1.0));
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = solver.eigenvalues().minCoeff();
  c.ok = c.hermiticity <= 1e-12 && c.trace_defect <= 1e-10 && c.min_eigenvalue >= -1e-10;
  return c;
}

struct MomentResult {
  Vector first_moments;
  Matrix covariance;
  double tail_population = 0.0;
  bool truncation_warning = false;

  GaussianMomentState as_state(const ModeSystem& modes) const { return {modes, first_moments, covariance}; }
};

/// First moments and covariance matrix from normal-ordered ladder expectations.
inline MomentResult moments_of(const TruncatedDensityMatrix& rho) {
  const int modes = rho.modes, dim = rho.dim;
  MomentResult out;
  out.tail_population = tail_population(rho);
  if (out.tail_population > kTailError)
    throw TruncationError("population near the Fock cutoff exceeds " + std::to_string(kTailError), 2 * dim);
  out.truncation_warning = out.tail_population > kTailWarning;

  std::vector<SparseC> a;
  for (int m = 0; m < modes; ++m) a.push_back(detail::embed(detail::single_ladder(dim), m, modes, dim));

  std::vector<Complex> mean(modes), sq(modes);
  std::vector<double> occ(modes);
  for (int m = 0; m < modes; ++m) {
    const SparseC adag = a[m].adjoint();
    mean[m] = detail::expect(rho.matrix, a[m]);
    sq[m] = detail::expect(rho.matrix, SparseC(a[m] * a[m]));
    occ[m] = detail::expect(rho.matrix, SparseC(adag * a[m])).real();
  }

  out.first_moments = Vector::Zero(2 * modes);
  for (int m = 0; m < modes; ++m) {
    out.first_moments(2 * m) = std::sqrt(2.0) * mean[m].real();
    out.first_moments(2 * m + 1) = std::sqrt(2.0) * mean[m].imag();
  }

  // Symmetrized second moments <X_u X_v + X_v X_u>.
  Matrix sym = Matrix::Zero(2 * modes, 2 * modes);
  for (int m = 0; m < modes; ++m) {
    sym(2 * m, 2 * m) = 2.0 * sq[m].real() + 2.0 * occ[m] + 1.0;
    sym(2 * m + 1, 2 * m + 1) = -2.0 * sq[m].real() + 2.0 * occ[m] + 1.0;
    sym(2 * m, 2 * m + 1) = sym(2 * m + 1, 2 * m) = 2.0 * sq[m].imag();
  }
  for (int i = 0; i < modes; ++i) {
    for (int j = i + 1; j < modes; ++j) {
      const Complex z = detail::expect(rho.matrix, SparseC(a[i] * a[j]));
      const Complex w = detail::expect(rho.matrix, SparseC(SparseC(a[i].adjoint()) * a[j]));
      const double xx = z.real() + w.real();
      const double pp = -z.real() + w.real();
      const double xp = z.imag() + w.imag();
      const double px = z.imag() - w.imag();
      sym(2 * i, 2 * j) = sym(2 * j, 2 * i) = 2.0 * xx;
      sym(2 * i + 1, 2 * j + 1) = sym(2 * j + 1, 2 * i + 1) = 2.0 * pp;
      sym(2 * i, 2 * j + 1) = sym(2 * j + 1, 2 * i) = 2.0 * xp;
      sym(2 * i + 1, 2 * j) = sym(2 * j, 2 * i + 1) = 2.0 * px;
    }
  }
  out.covariance = sym - 2.0 * out.first_moments * out.first_moments.transpose();
  return out;
}

/// Sum_i w_i Tr(rho a_i^dag a_i).
inline double energy_of(const TruncatedDensityMatrix& rho) {
  double e = 0.0;
  const int size = detail::space_size(rho.dim, rho.modes);
  for (int idx = 0; idx < size; ++idx) {
    const double p = rho.matrix(idx, idx).real();
    if (rho.modes == 1) {
      e += rho.frequencies[0] * idx * p;
    } else {
      e += (rho.frequencies[0] * (idx / rho.dim) + rho.frequencies[1] * (idx % rho.dim)) * p;
    }
  }
  return e;
}

/// -Tr(rho ln rho) over the positive eigenvalues.
inline double entropy_of(const TruncatedDensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double l = solver.eigenvalues()(k);
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

inline double purity_of(const TruncatedDensityMatrix& rho) {
  return (rho.matrix * rho.matrix).trace().real();
}

/// Unitary of an elementary operation on a one- or two-mode truncated space.
///
/// The generator is exponentiated on an enlarged cutoff (1.5x, at least +10
/// levels) and projected back, so population leaking upward does not corrupt
/// the kept levels. Conventions (Heisenberg action U^dag X U = S X + d):
///   rotation     exp(-i theta n)
///   squeeze      exp(r/2 (a^2 - a^dag^2))
///   two-mode sq. exp(r (a^dag b^dag - a b))
///   beam split.  exp(theta (a b^dag - a^dag b)) (-1)^{n_b}
///   displacement exp(alpha a^dag - alpha* a), alpha = (d_x + i d_p)/sqrt(2)
inline TruncatedOperator gaussian_unitary_matrix(const AffineGaussianOp& op, int dim) {
  const int modes = static_cast<int>(op.num_modes());
  detail::check_shape(dim, modes);
  if (dim > kMaxCutoff) throw DimensionError("Fock cutoff above " + std::to_string(kMaxCutoff));
  const auto& label = op.label;
  if (label.kind == OpKind::composite) throw DomainError("only elementary operations can be exponentiated");

  // Mean occupation the operation injects into the vacuum must stay well inside the cutoff.
  double injected = 0.0;
  if (label.kind == OpKind::squeeze || label.kind == OpKind::two_mode_squeeze)
    injected = std::pow(std::sinh(label.parameters[0]), 2);
  if (label.kind == OpKind::displacement) injected = 0.5 * op.displacement.squaredNorm();
  if (injected > dim / 8.0)
    throw TruncationError("cutoff too small for the requested operation strength",
                          static_cast<int>(std::ceil(8.0 * injected)));

  const int big = std::min(detail::enlarged_cutoff(dim), static_cast<int>(1.5 * kMaxCutoff));
  const SparseC a1 = detail::single_ladder(big);
  const int big_size = detail::space_size(big, modes);

  auto single_mode_unitary = [&](const SparseC& gen1) { return detail::block_exponential(gen1); };

  SparseC u_big;
  switch (label.kind) {
    case OpKind::rotation: {
      const int mode = static_cast<int>(label.modes[0]);
      std::vector<Eigen::Triplet<Complex>> entries;
      for (int idx = 0; idx < big_size; ++idx) {
        const int n = modes == 1 ? idx : (mode == 0 ? idx / big : idx % big);
        entries.emplace_back(idx, idx, std::exp(Complex(0.0, -label.parameters[0] * n)));
      }
      u_big.resize(big_size, big_size);
      u_big.setFromTriplets(entries.begin(), entries.end());
      break;
    }
    case OpKind::squeeze: {
      const SparseC adag = a1.adjoint();
      const SparseC gen = Complex(0.5 * label.parameters[0]) * (SparseC(a1 * a1) - SparseC(adag * adag));
      u_big = detail::embed(single_mode_unitary(gen), static_cast<int>(label.modes[0]), modes, big);
      break;
    }
    case OpKind::two_mode_squeeze:
    case OpKind::beam_splitter: {
      const SparseC a = detail::embed(a1, static_cast<int>(label.modes[0]), 2, big);
      const SparseC b = detail::embed(a1, static_cast<int>(label.modes[1]), 2, big);
      const SparseC adag = a.adjoint(), bdag = b.adjoint();
      const double p = label.parameters[0];
      if (label.kind == OpKind::two_mode_squeeze) {
        u_big = detail::block_exponential(Complex(p) * (SparseC(adag * bdag) - SparseC(a * b)));
      } else {
        u_big = detail::block_exponential(Complex(p) * (SparseC(a * bdag) - SparseC(adag * b)));
        std::vector<Eigen::Triplet<Complex>> flips;
        const int mode_b = static_cast<int>(label.modes[1]);
        for (int idx = 0; idx < big_size; ++idx) {
          const int nb = mode_b == 0 ? idx / big : idx % big;
          flips.emplace_back(idx, idx, nb % 2 ? -1.0 : 1.0);
        }
        SparseC parity(big_size, big_size);
        parity.setFromTriplets(flips.begin(), flips.end());
        u_big = u_big * parity;
      }
      break;
    }
    case OpKind::displacement: {
      const SparseC adag = a1.adjoint();
      std::vector<SparseC> per_mode;
      for (int m = 0; m < modes; ++m) {
        const Complex alpha(op.displacement(2 * m) / std::sqrt(2.0), op.displacement(2 * m + 1) / std::sqrt(2.0));
        per_mode.push_back(alpha == Complex(0.0) ? detail::identity(big)
                                                 : single_mode_unitary(SparseC(alpha * adag - std::conj(alpha) * a1)));
      }
      u_big = modes == 1 ? per_mode[0] : SparseC(Eigen::kroneckerProduct(per_mode[0], per_mode[1]));
      break;
    }
    case OpKind::composite: break;
  }
  return {dim, modes, detail::project(u_big, big, dim, modes)};
}

/// U rho U^dag.
inline TruncatedDensityMatrix conjugate(const TruncatedOperator& u, const TruncatedDensityMatrix& rho) {
  if (u.dim != rho.dim || u.modes != rho.modes) throw DimensionError("operator and state truncations differ");
  // Every elementary unitary is block diagonal up to a permutation (for a single-mode
  // op on two modes, one block per level of the other mode), so each block is applied
  // as a small dense product instead of one large sparse-dense product.
  const auto blocks = detail::components(u.matrix);
  std::vector<int> local(static_cast<std::size_t>(u.matrix.rows()));
  std::vector<CMatrix> adjoints;
  adjoints.reserve(blocks.size());
  for (const auto& members : blocks) adjoints.push_back(detail::dense_block(u.matrix, members, local).adjoint());
  auto times_u_dagger = [&](const CMatrix& a) {
    CMatrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      if (blocks[k].size() == 1)
        out.col(blocks[k][0]) = a.col(blocks[k][0]) * adjoints[k](0, 0);
      else
        out(Eigen::all, blocks[k]) = a(Eigen::all, blocks[k]) * adjoints[k];
    }
    return out;
  };
  const CMatrix x = times_u_dagger(rho.matrix);         // rho U^dag
  const CMatrix y = times_u_dagger(CMatrix(x.adjoint()));  // (U rho U^dag)^dag
  return {rho.dim, rho.modes, CMatrix(y.adjoint()), rho.frequencies};
}

/// Sparse factors whose product is the operation's unitary. A two-mode displacement
/// D(d_a) (x) D(d_b) is dense as one matrix, so it comes back as one factor per mode.
inline std::vector<TruncatedOperator> gaussian_unitary_factors(const AffineGaussianOp& op, int dim) {
  if (op.label.kind != OpKind::displacement || op.num_modes() != 2) return {gaussian_unitary_matrix(op, dim)};
  std::vector<TruncatedOperator> out;
  for (int m = 0; m < 2; ++m) {
    Vector d = Vector::Zero(4);
    d.segment<2>(2 * m) = op.displacement.segment<2>(2 * m);
    if (!d.isZero(0.0)) out.push_back(gaussian_unitary_matrix(displacement(d), dim));
  }
  return out;
}

inline TruncatedDensityMatrix conjugate(const std::vector<TruncatedOperator>& factors, TruncatedDensityMatrix rho) {
  for (const auto& u : factors) rho = conjugate(u, rho);
  return rho;
}

/// rho -> U rho U^dag for an elementary operation.
inline TruncatedDensityMatrix evolve(const AffineGaussianOp& op, const TruncatedDensityMatrix& rho) {
  return conjugate(gaussian_unitary_factors(op, rho.dim), rho);
}

}  // namespace gpass::fock
