#include "hqc/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "hqc/error.hpp"
#include "hqc/kernels.hpp"

namespace hqc {

namespace {

int log2_exact(std::uint64_t dim, const char* what) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " dimension is not a power of two");
  }
  return std::countr_zero(dim);
}

void check_register_size(int n) {
  if (n < 1 || n > kMaxSimQubits) {
    throw Error(ErrorCode::TooManyQubits, "register of " + std::to_string(n) + " qubits is outside 1.." +
                                              std::to_string(kMaxSimQubits));
  }
}

void check_gate(const CMatrix& u, const QubitIndexSet& wires, int n_qubits) {
  wires.check(n_qubits);
  const auto k = static_cast<Eigen::Index>(wires.size());
  if (k < 1 || k > 3 || u.rows() != (Eigen::Index{1} << k)) {
    throw Error(ErrorCode::DimensionMismatch, "gate matrix does not match its wire count");
  }
  if (!is_unitary(u)) throw Error(ErrorCode::NonUnitaryMatrix, "u^dagger u differs from I by more than 1e-10");
}

// Offsets of every configuration of `qubits` (first qubit most significant)
// inside an n-qubit basis index.
std::vector<std::uint64_t> config_offsets(int n, std::span<const int> qubits) {
  const auto k = qubits.size();
  std::vector<std::uint64_t> out(std::size_t{1} << k, 0);
  for (std::size_t m = 0; m < out.size(); ++m) {
    std::uint64_t off = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if ((m >> (k - 1 - j)) & 1) off |= std::uint64_t{1} << (n - 1 - qubits[j]);
    }
    out[m] = off;
  }
  return out;
}

double entropy_of_spectrum(const Eigen::VectorXd& eig) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double p = std::clamp(eig[i], 0.0, 1.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace

QubitIndexSet::QubitIndexSet(std::initializer_list<int> indices) : QubitIndexSet(std::vector<int>(indices)) {}

QubitIndexSet::QubitIndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0) throw Error(ErrorCode::WireOutOfRange, "negative qubit index");
    for (std::size_t j = 0; j < i; ++j) {
      if (indices_[i] == indices_[j]) throw Error(ErrorCode::InvalidArgument, "duplicate qubit index");
    }
  }
}

void QubitIndexSet::check(int n_qubits) const {
  for (int q : indices_) {
    if (q >= n_qubits) {
      throw Error(ErrorCode::WireOutOfRange,
                  "qubit " + std::to_string(q) + " on a " + std::to_string(n_qubits) + "-qubit register");
    }
  }
}

bool QubitIndexSet::contains(int q) const { return std::find(indices_.begin(), indices_.end(), q) != indices_.end(); }

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  check_register_size(n_qubits);
  amps_ = CVector::Zero(Eigen::Index{1} << n_qubits);
  amps_[0] = 1.0;
}

Statevector Statevector::from_amplitudes(CVector amps) {
  const int n = log2_exact(static_cast<std::uint64_t>(amps.size()), "statevector");
  check_register_size(n);
  if (std::abs(amps.squaredNorm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "statevector is not normalized");
  }
  return Statevector(n, std::move(amps));
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
  Statevector s(n_qubits);
  if (index >= s.dim()) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
  return s;
}

Statevector Statevector::product(std::span<const std::array<Complex, 2>> qubits) {
  const int n = static_cast<int>(qubits.size());
  check_register_size(n);
  CVector amps(Eigen::Index{1} << n);
  amps[0] = 1.0;
  Eigen::Index len = 1;
  for (const auto& q : qubits) {
    // Expand in place from the back: new[2i + b] = old[i] * q[b].
    for (Eigen::Index i = len - 1; i >= 0; --i) {
      const Complex v = amps[i];
      amps[2 * i] = v * q[0];
      amps[2 * i + 1] = v * q[1];
    }
    len *= 2;
  }
  return from_amplitudes(std::move(amps));
}

DensityMatrix::DensityMatrix(int n_qubits) : n_qubits_(n_qubits) {
  check_register_size(n_qubits);
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  rho_ = CMatrix::Zero(d, d);
  rho_(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_matrix(CMatrix rho) {
  if (rho.rows() != rho.cols()) throw Error(ErrorCode::InvalidArgument, "density matrix is not square");
  const int n = log2_exact(static_cast<std::uint64_t>(rho.rows()), "density matrix");
  check_register_size(n);
  if (std::abs(rho.trace() - Complex(1.0)) > 1e-10) throw Error(ErrorCode::InvalidArgument, "trace differs from 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "density matrix is not Hermitian");
  }
  return DensityMatrix(n, std::move(rho));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  check_register_size(n_qubits);
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  return DensityMatrix(n_qubits, CMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  const CMatrix g = u.adjoint() * u;
  return (g - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

Statevector apply_unitary(const Statevector& state, const CMatrix& u, const QubitIndexSet& wires) {
  check_gate(u, wires, state.n_qubits());
  Statevector out = state;
  kernel::apply_matrix(out.mutable_amps(), out.n_qubits(), u, wires.span());
  return out;
}

double expectation_projector0(const Statevector& state, int qubit) {
  QubitIndexSet{qubit}.check(state.n_qubits());
  const std::uint64_t mask = std::uint64_t{1} << (state.n_qubits() - 1 - qubit);
  double p = 0.0;
  for (std::size_t k = 0; k < state.dim(); ++k) {
    if ((k & mask) == 0) p += std::norm(state[k]);
  }
  return std::clamp(p, 0.0, 1.0);
}

std::int64_t sample_binomial(double p0, std::int64_t shots, std::uint64_t rng_seed) {
  if (shots < 1) throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
  std::mt19937_64 rng(rng_seed);
  std::binomial_distribution<std::int64_t> dist(shots, std::clamp(p0, 0.0, 1.0));
  return dist(rng);
}

std::int64_t sample_shots(const Statevector& state, int qubit, std::int64_t shots, std::uint64_t rng_seed) {
  return sample_binomial(expectation_projector0(state, qubit), shots, rng_seed);
}

DensityMatrix to_density(const Statevector& state) {
  return DensityMatrix::from_matrix(state.amps() * state.amps().adjoint());
}

DensityMatrix apply_unitary_dm(const DensityMatrix& dm, const CMatrix& u, const QubitIndexSet& wires) {
  check_gate(u, wires, dm.n_qubits());
  DensityMatrix out = dm;
  kernel::conjugate(out.mutable_matrix(), out.n_qubits(), u, wires.span());
  return out;
}

DensityMatrix depolarize(const DensityMatrix& dm, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorCode::NoiseOutOfRange, "noise must lie in [0, 1]");
  DensityMatrix out = dm;
  CMatrix& rho = out.mutable_matrix();
  rho *= (1.0 - noise);
  rho.diagonal().array() += noise / static_cast<double>(rho.rows());
  return out;
}

double expectation_projector0(const DensityMatrix& dm, int qubit) {
  QubitIndexSet{qubit}.check(dm.n_qubits());
  const std::uint64_t mask = std::uint64_t{1} << (dm.n_qubits() - 1 - qubit);
  double p = 0.0;
  for (Eigen::Index k = 0; k < dm.dim(); ++k) {
    if ((static_cast<std::uint64_t>(k) & mask) == 0) p += dm.matrix()(k, k).real();
  }
  return std::clamp(p, 0.0, 1.0);
}

DensityMatrix partial_trace(const DensityMatrix& dm, const QubitIndexSet& keep) {
  const int n = dm.n_qubits();
  keep.check(n);
  if (keep.empty() || static_cast<int>(keep.size()) >= n) {
    throw Error(ErrorCode::InvalidPartition, "kept qubits must be a nonempty proper subset");
  }
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!keep.contains(q)) traced.push_back(q);
  }
  const auto keep_off = config_offsets(n, keep.span());
  const auto tr_off = config_offsets(n, traced);
  const auto d = static_cast<Eigen::Index>(keep_off.size());
  CMatrix out = CMatrix::Zero(d, d);
  const CMatrix& rho = dm.matrix();
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      Complex acc = 0.0;
      for (std::uint64_t t : tr_off) {
        acc += rho(static_cast<Eigen::Index>(keep_off[a] | t), static_cast<Eigen::Index>(keep_off[b] | t));
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix::from_matrix(std::move(out));
}

double von_neumann_entropy(const DensityMatrix& dm) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(dm.matrix(), Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(solver.eigenvalues());
}

double max_bipartite_entropy(const Statevector& state) {
  const int n = state.n_qubits();
  if (n > kMaxEntropyQubits) {
    throw Error(ErrorCode::TooManyQubits, "bipartition scan supports at most 12 qubits");
  }
  if (n < 2) return 0.0;
  double best = 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver;
  const std::uint32_t full = (1u << n) - 1;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const int size_a = std::popcount(mask);
    if (2 * size_a > n) continue;
    // Equal halves appear twice; keep the one containing qubit 0.
    if (2 * size_a == n && !(mask & (1u << (n - 1)))) continue;
    std::vector<int> a, b;
    for (int q = 0; q < n; ++q) ((mask >> (n - 1 - q)) & 1 ? a : b).push_back(q);
    const auto off_a = config_offsets(n, a);
    const auto off_b = config_offsets(n, b);
    CMatrix m(static_cast<Eigen::Index>(off_a.size()), static_cast<Eigen::Index>(off_b.size()));
    for (std::size_t i = 0; i < off_a.size(); ++i)
      for (std::size_t j = 0; j < off_b.size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = state[off_a[i] | off_b[j]];
    const CMatrix rho_a = m * m.adjoint();
    solver.compute(rho_a, Eigen::EigenvaluesOnly);
    best = std::max(best, entropy_of_spectrum(solver.eigenvalues()));
  }
  return best;
}

}  // namespace hqc
