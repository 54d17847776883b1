#pragma once

// Unchecked in-place kernels shared by the simulator front end and the
// circuit executor. Callers validate wires and unitarity once, up front.

#include <cstdint>
#include <span>

#include "hqc/sim.hpp"

namespace hqc::kernel {

/// Index offsets of the 2^k local basis states of `wires` inside an n-qubit
/// register, plus the sorted bit positions used to enumerate group bases.
struct GateLayout {
  int n_qubits = 0;
  int k = 0;
  std::uint64_t offsets[8] = {};
  int sorted_bits[3] = {};

  GateLayout(int n_qubits, std::span<const int> wires);

  std::uint64_t groups() const { return std::uint64_t{1} << (n_qubits - k); }

  /// Base index of group g (all gate bits cleared).
  std::uint64_t base(std::uint64_t g) const {
    for (int j = 0; j < k; ++j) {
      const std::uint64_t low = g & ((std::uint64_t{1} << sorted_bits[j]) - 1);
      g = ((g ^ low) << 1) | low;
    }
    return g;
  }
};

/// amps <- (u acting on wires) amps.
void apply_matrix(Complex* amps, const GateLayout& layout, const CMatrix& u);

inline void apply_matrix(CVector& amps, int n_qubits, const CMatrix& u, std::span<const int> wires) {
  apply_matrix(amps.data(), GateLayout(n_qubits, wires), u);
}

/// env(a, b) += weight * sum_g psi[g, a] * conj(lambda[g, b]), i.e. the local
/// operator E with <lambda|(D (x) I)|psi> = weight^-1 * Tr(D E) accumulated.
void accumulate_env(const Complex* psi, const Complex* lambda, const GateLayout& layout, Complex weight,
                    CMatrix& env);

/// rho <- U rho U^dagger with U = u on wires.
void conjugate(CMatrix& rho, int n_qubits, const CMatrix& u, std::span<const int> wires);

}  // namespace hqc::kernel
