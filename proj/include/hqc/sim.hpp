#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hqc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest register the dense simulator will allocate. Ancilla models over
/// eight data qubits need fifteen wires, so this sits above that.
inline constexpr int kMaxSimQubits = 20;

/// Largest register accepted by the bipartition entropy scan.
inline constexpr int kMaxEntropyQubits = 12;

/// Ordered set of distinct qubit positions. Qubit 0 is the most significant
/// bit of the basis-state index.
class QubitIndexSet {
 public:
  QubitIndexSet() = default;
  QubitIndexSet(std::initializer_list<int> indices);
  explicit QubitIndexSet(std::vector<int> indices);

  /// Throws WireOutOfRange unless every index is below `n_qubits`.
  void check(int n_qubits) const;

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t i) const { return indices_[i]; }
  bool contains(int q) const;
  std::span<const int> span() const { return indices_; }
  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  std::vector<int> indices_;
};

/// Dense pure state over n qubits.
class Statevector {
 public:
  /// |0...0> over n qubits.
  explicit Statevector(int n_qubits);

  /// Takes ownership of amplitudes; throws InvalidArgument if the length is
  /// not a power of two or the norm differs from one by more than 1e-10.
  static Statevector from_amplitudes(CVector amps);
  static Statevector basis(int n_qubits, std::uint64_t index);
  /// Tensor product of single-qubit states (each a pair (a0, a1)), first
  /// factor on qubit 0.
  static Statevector product(std::span<const std::array<Complex, 2>> qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amps() const { return amps_; }
  Complex operator[](std::size_t k) const { return amps_[static_cast<Eigen::Index>(k)]; }
  double norm_squared() const { return amps_.squaredNorm(); }

  /// Unchecked mutable access for kernels that preserve the norm.
  CVector& mutable_amps() { return amps_; }

 private:
  Statevector(int n_qubits, CVector amps) : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  int n_qubits_ = 0;
  CVector amps_;
};

/// Dense density matrix over n qubits.
class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits);  // |0...0><0...0|

  /// Throws InvalidArgument unless rho is square, power-of-two sized, has
  /// unit trace and is Hermitian (all within 1e-10).
  static DensityMatrix from_matrix(CMatrix rho);
  static DensityMatrix maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return rho_.rows(); }
  const CMatrix& matrix() const { return rho_; }
  Complex trace() const { return rho_.trace(); }
  double purity() const;

  CMatrix& mutable_matrix() { return rho_; }

 private:
  DensityMatrix(int n_qubits, CMatrix rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {}

  int n_qubits_ = 0;
  CMatrix rho_;
};

/// True if u is square with side 2^k and u^dagger u = I within tol.
bool is_unitary(const CMatrix& u, double tol = 1e-10);

Statevector apply_unitary(const Statevector& state, const CMatrix& u, const QubitIndexSet& wires);

/// Probability of reading 0 on `qubit`.
double expectation_projector0(const Statevector& state, int qubit);

/// Number of 0 outcomes in `shots` projective measurements of `qubit`.
std::int64_t sample_shots(const Statevector& state, int qubit, std::int64_t shots, std::uint64_t rng_seed);

/// Same as sample_shots for an arbitrary outcome-0 probability; shared by the
/// mixed-state path.
std::int64_t sample_binomial(double p0, std::int64_t shots, std::uint64_t rng_seed);

DensityMatrix to_density(const Statevector& state);

DensityMatrix apply_unitary_dm(const DensityMatrix& dm, const CMatrix& u, const QubitIndexSet& wires);

/// (1 - noise) rho + noise I / 2^n. `noise` is 0 for a noiseless channel.
DensityMatrix depolarize(const DensityMatrix& dm, double noise);

double expectation_projector0(const DensityMatrix& dm, int qubit);

/// Reduced state on `keep` (in the order given).
DensityMatrix partial_trace(const DensityMatrix& dm, const QubitIndexSet& keep);

/// Entropy in bits; eigenvalues are clamped to [0, 1] and 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& dm);

/// Maximum entanglement entropy (bits) over every bipartition of a pure state.
double max_bipartite_entropy(const Statevector& state);

}  // namespace hqc
