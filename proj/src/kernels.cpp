#include "hqc/kernels.hpp"

#include <algorithm>

namespace hqc::kernel {

GateLayout::GateLayout(int n, std::span<const int> wires) : n_qubits(n), k(static_cast<int>(wires.size())) {
  for (int m = 0; m < (1 << k); ++m) {
    std::uint64_t off = 0;
    for (int j = 0; j < k; ++j) {
      if ((m >> (k - 1 - j)) & 1) off |= std::uint64_t{1} << (n - 1 - wires[j]);
    }
    offsets[m] = off;
  }
  for (int j = 0; j < k; ++j) sorted_bits[j] = n - 1 - wires[j];
  std::sort(sorted_bits, sorted_bits + k);
}

namespace {

template <int K>
void apply_fixed(Complex* amps, const GateLayout& layout, const CMatrix& u) {
  constexpr int D = 1 << K;
  Complex m[D][D];
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) m[r][c] = u(r, c);
  Complex in[D];
  const std::uint64_t groups = layout.groups();
  for (std::uint64_t g = 0; g < groups; ++g) {
    const std::uint64_t b = layout.base(g);
    for (int c = 0; c < D; ++c) in[c] = amps[b + layout.offsets[c]];
    for (int r = 0; r < D; ++r) {
      Complex acc = 0.0;
      for (int c = 0; c < D; ++c) acc += m[r][c] * in[c];
      amps[b + layout.offsets[r]] = acc;
    }
  }
}

template <int K>
void env_fixed(const Complex* psi, const Complex* lambda, const GateLayout& layout, Complex weight, CMatrix& env) {
  constexpr int D = 1 << K;
  Complex acc[D][D] = {};
  const std::uint64_t groups = layout.groups();
  for (std::uint64_t g = 0; g < groups; ++g) {
    const std::uint64_t b = layout.base(g);
    Complex p[D], l[D];
    for (int c = 0; c < D; ++c) {
      p[c] = psi[b + layout.offsets[c]];
      l[c] = std::conj(lambda[b + layout.offsets[c]]);
    }
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) acc[r][c] += p[r] * l[c];
  }
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) env(r, c) += weight * acc[r][c];
}

}  // namespace

void apply_matrix(Complex* amps, const GateLayout& layout, const CMatrix& u) {
  switch (layout.k) {
    case 1: apply_fixed<1>(amps, layout, u); break;
    case 2: apply_fixed<2>(amps, layout, u); break;
    case 3: apply_fixed<3>(amps, layout, u); break;
    default: break;
  }
}

void accumulate_env(const Complex* psi, const Complex* lambda, const GateLayout& layout, Complex weight,
                    CMatrix& env) {
  switch (layout.k) {
    case 1: env_fixed<1>(psi, lambda, layout, weight, env); break;
    case 2: env_fixed<2>(psi, lambda, layout, weight, env); break;
    case 3: env_fixed<3>(psi, lambda, layout, weight, env); break;
    default: break;
  }
}

void conjugate(CMatrix& rho, int n_qubits, const CMatrix& u, std::span<const int> wires) {
  const GateLayout layout(n_qubits, wires);
  for (Eigen::Index c = 0; c < rho.cols(); ++c) apply_matrix(rho.col(c).data(), layout, u);
  CMatrix t = rho.adjoint();
  for (Eigen::Index c = 0; c < t.cols(); ++c) apply_matrix(t.col(c).data(), layout, u);
  rho = t.adjoint();
}

}  // namespace hqc::kernel
