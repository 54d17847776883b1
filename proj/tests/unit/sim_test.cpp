#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hqc/error.hpp"
#include "hqc/gates.hpp"
#include "hqc/sim.hpp"
#include "test_util.hpp"

namespace hqc {
namespace {

using testing::dense_operator;
using testing::max_abs;
using testing::random_state;
using testing::random_unitary;

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

CMatrix pauli_x() {
  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

Statevector bell() {
  CVector v = CVector::Zero(4);
  v[0] = v[3] = kInvSqrt2;
  return Statevector::from_amplitudes(v);
}

TEST(ApplyUnitary, IdentityLeavesAmplitudesUnchanged) {
  std::mt19937_64 rng(1);
  const Statevector s = random_state(3, rng);
  const Statevector out = apply_unitary(s, CMatrix::Identity(2, 2), {1});
  EXPECT_EQ(out.amps(), s.amps());
}

TEST(ApplyUnitary, XOnWireZeroIsMostSignificantBit) {
  const Statevector out = apply_unitary(Statevector(2), pauli_x(), {0});
  EXPECT_EQ(out[2], Complex(1.0));  // |10>
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-15);
}

TEST(ApplyUnitary, CnotMakesBellState) {
  CVector v = CVector::Zero(4);
  v[0] = v[2] = kInvSqrt2;  // (|00> + |10>)/sqrt2
  const Statevector out = apply_unitary(Statevector::from_amplitudes(v), cnot_matrix(), {0, 1});
  EXPECT_NEAR(std::abs(out[0] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[3] - kInvSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[2]), 0.0, 1e-15);
}

TEST(ApplyUnitary, MatchesDenseOperatorOnNonAdjacentWires) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    const Statevector s = random_state(n, rng);
    const int k = 1 + trial % 3;
    std::vector<int> wires = {4, 1, 3};
    wires.resize(static_cast<std::size_t>(k));
    const CMatrix u = random_unitary(1 << k, rng);
    const CVector expect = dense_operator(u, wires, n) * s.amps();
    const Statevector got = apply_unitary(s, u, QubitIndexSet(wires));
    EXPECT_LT((got.amps() - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ApplyUnitary, RejectsNonUnitaryAndBadWires) {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(0, 0) = 2.0;
  try {
    apply_unitary(Statevector(2), bad, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonUnitaryMatrix);
  }
  try {
    apply_unitary(Statevector(2), pauli_x(), {2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WireOutOfRange);
  }
}

TEST(ApplyUnitary, NormAndAdjointProperties) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    Statevector s = random_state(n, rng);
    const Statevector start = s;
    std::vector<std::pair<CMatrix, QubitIndexSet>> applied;
    for (int g = 0; g < 10; ++g) {
      const int k = 1 + static_cast<int>(rng() % std::min(3, n));
      std::vector<int> all(static_cast<std::size_t>(n));
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(static_cast<std::size_t>(k));
      applied.emplace_back(random_unitary(1 << k, rng), QubitIndexSet(all));
      s = apply_unitary(s, applied.back().first, applied.back().second);
      EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-9);
    }
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) s = apply_unitary(s, it->first.adjoint(), it->second);
    EXPECT_LT((s.amps() - start.amps()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Projector0, BasicValues) {
  EXPECT_DOUBLE_EQ(expectation_projector0(Statevector(1), 0), 1.0);
  CVector plus(2);
  plus << kInvSqrt2, kInvSqrt2;
  EXPECT_NEAR(expectation_projector0(Statevector::from_amplitudes(plus), 0), 0.5, 1e-15);
  EXPECT_THROW(expectation_projector0(Statevector(2), 2), Error);
}

TEST(Projector0, AgreesWithDensityTrace) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Statevector s = random_state(4, rng);
    const int q = trial % 4;
    CMatrix p0 = CMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    const CMatrix full = dense_operator(p0, {q}, 4);
    const double via_trace = (full * to_density(s).matrix()).trace().real();
    EXPECT_NEAR(expectation_projector0(s, q), via_trace, 1e-10);
    EXPECT_NEAR(expectation_projector0(to_density(s), q), via_trace, 1e-10);
  }
}

TEST(SampleShots, DeterministicEdgesAndBinomialSpread) {
  EXPECT_EQ(sample_shots(Statevector(1), 0, 401, 5), 401);
  EXPECT_EQ(sample_shots(Statevector::basis(1, 1), 0, 401, 5), 0);
  CVector plus(2);
  plus << kInvSqrt2, kInvSqrt2;
  const Statevector s = Statevector::from_amplitudes(plus);
  // sd of the fraction is 5e-4, so [0.498, 0.502] is a 4-sigma window.
  const double frac = static_cast<double>(sample_shots(s, 0, 1000000, 42)) / 1e6;
  EXPECT_GE(frac, 0.498);
  EXPECT_LE(frac, 0.502);
  EXPECT_EQ(sample_shots(s, 0, 401, 9), sample_shots(s, 0, 401, 9));
  EXPECT_THROW(sample_shots(s, 0, 0, 1), Error);
}

TEST(Density, OuterProducts) {
  const DensityMatrix d0 = to_density(Statevector(1));
  EXPECT_EQ(d0.matrix()(0, 0), Complex(1.0));
  EXPECT_EQ(d0.matrix()(1, 1), Complex(0.0));
  CVector plus(2);
  plus << kInvSqrt2, kInvSqrt2;
  const DensityMatrix dp = to_density(Statevector::from_amplitudes(plus));
  EXPECT_LT(max_abs(dp.matrix() - CMatrix::Constant(2, 2, 0.5)), 1e-15);

  std::mt19937_64 rng(5);
  const Statevector s = random_state(3, rng);
  const DensityMatrix d = to_density(s);
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j) EXPECT_LT(std::abs(d.matrix()(i, j) - s.amps()[i] * std::conj(s.amps()[j])), 1e-15);
  EXPECT_NEAR(d.purity(), 1.0, 1e-10);
}

TEST(Density, ConjugationMatchesPureStateAndDenseOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Statevector s = random_state(4, rng);
    const CMatrix u = random_unitary(4, rng);
    const QubitIndexSet w{3, 1};
    const DensityMatrix lhs = to_density(apply_unitary(s, u, w));
    const DensityMatrix rhs = apply_unitary_dm(to_density(s), u, w);
    EXPECT_LT(max_abs(lhs.matrix() - rhs.matrix()), 1e-10);

    // Mixed input against the dense 2^N conjugation.
    const DensityMatrix mixed = depolarize(to_density(random_state(4, rng)), 0.3);
    const CMatrix full = dense_operator(u, {3, 1}, 4);
    const CMatrix expect = full * mixed.matrix() * full.adjoint();
    EXPECT_LT(max_abs(apply_unitary_dm(mixed, u, w).matrix() - expect), 1e-12);
  }
  const DensityMatrix mm = DensityMatrix::maximally_mixed(2);
  EXPECT_EQ(apply_unitary_dm(mm, CMatrix::Identity(2, 2), {0}).matrix(), mm.matrix());
}

TEST(Depolarize, EndpointsAndHalf) {
  std::mt19937_64 rng(2);
  const DensityMatrix rho = to_density(random_state(2, rng));
  EXPECT_EQ(depolarize(rho, 0.0).matrix(), rho.matrix());
  EXPECT_LT(max_abs(depolarize(rho, 1.0).matrix() - CMatrix::Identity(4, 4) / 4.0), 1e-16);
  const DensityMatrix half = depolarize(to_density(Statevector(1)), 0.5);
  EXPECT_DOUBLE_EQ(half.matrix()(0, 0).real(), 0.75);
  EXPECT_DOUBLE_EQ(half.matrix()(1, 1).real(), 0.25);
  EXPECT_NEAR(depolarize(rho, 0.37).trace().real(), 1.0, 1e-12);
  try {
    depolarize(rho, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoiseOutOfRange);
  }
}

TEST(Depolarize, IsAffine) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix r1 = to_density(random_state(3, rng));
    const DensityMatrix r2 = depolarize(to_density(random_state(3, rng)), 0.4);
    const double alpha = std::uniform_real_distribution<double>(0, 1)(rng);
    const double noise = std::uniform_real_distribution<double>(0, 1)(rng);
    const DensityMatrix mix = DensityMatrix::from_matrix(alpha * r1.matrix() + (1 - alpha) * r2.matrix());
    const CMatrix lhs = depolarize(mix, noise).matrix();
    const CMatrix rhs = alpha * depolarize(r1, noise).matrix() + (1 - alpha) * depolarize(r2, noise).matrix();
    EXPECT_LT(max_abs(lhs - rhs), 1e-12);
  }
}

TEST(PartialTrace, ProductBellAndOracle) {
  CVector v(4);
  v << kInvSqrt2, kInvSqrt2, 0.0, 0.0;  // |0> (x) |+>
  const DensityMatrix keep1 = partial_trace(to_density(Statevector::from_amplitudes(v)), {1});
  EXPECT_LT(max_abs(keep1.matrix() - CMatrix::Constant(2, 2, 0.5)), 1e-15);

  for (int q : {0, 1}) {
    const DensityMatrix r = partial_trace(to_density(bell()), {q});
    EXPECT_LT(max_abs(r.matrix() - CMatrix::Identity(2, 2) / 2.0), 1e-15);
  }

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = depolarize(to_density(random_state(4, rng)), 0.2 * trial / 10.0);
    for (const std::vector<int>& keep : {std::vector<int>{0, 2}, std::vector<int>{3, 1}, std::vector<int>{2}}) {
      const DensityMatrix r = partial_trace(rho, QubitIndexSet(keep));
      EXPECT_LT(max_abs(r.matrix() - testing::brute_partial_trace(rho.matrix(), keep, 4)), 1e-9);
      EXPECT_NEAR(r.trace().real(), 1.0, 1e-10);
      EXPECT_LT(max_abs(r.matrix() - r.matrix().adjoint()), 1e-12);
    }
  }
  EXPECT_THROW(partial_trace(to_density(bell()), QubitIndexSet{}), Error);
  try {
    partial_trace(to_density(bell()), {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPartition);
  }
}

TEST(Entropy, KnownValues) {
  std::mt19937_64 rng(8);
  EXPECT_NEAR(von_neumann_entropy(to_density(random_state(3, rng))), 0.0, 1e-8);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(1)), 1.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(3)), 3.0, 1e-12);
}

TEST(Entropy, ComplementaryBipartitionsAgree) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = to_density(random_state(5, rng));
    const double a = von_neumann_entropy(partial_trace(rho, {0, 3}));
    const double b = von_neumann_entropy(partial_trace(rho, {1, 2, 4}));
    EXPECT_NEAR(a, b, 1e-8);
  }
}

TEST(MaxBipartiteEntropy, ProductGhzAndLimit) {
  std::vector<std::array<Complex, 2>> qubits;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, std::numbers::pi);
  for (int q = 0; q < 6; ++q) {
    const double t = u(rng);
    qubits.push_back({std::cos(t), std::sin(t)});
  }
  EXPECT_NEAR(max_bipartite_entropy(Statevector::product(qubits)), 0.0, 1e-8);

  CVector ghz = CVector::Zero(256);
  ghz[0] = ghz[255] = kInvSqrt2;
  EXPECT_NEAR(max_bipartite_entropy(Statevector::from_amplitudes(ghz)), 1.0, 1e-10);

  try {
    max_bipartite_entropy(Statevector(13));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyQubits);
  }
}

TEST(MaxBipartiteEntropy, MatchesExhaustiveScanViaPartialTrace) {
  std::mt19937_64 rng(19);
  const int n = 4;
  for (int trial = 0; trial < 5; ++trial) {
    const Statevector s = random_state(n, rng);
    const DensityMatrix rho = to_density(s);
    double best = 0.0;
    for (unsigned mask = 1; mask < (1u << n) - 1; ++mask) {
      std::vector<int> keep;
      for (int q = 0; q < n; ++q)
        if (mask & (1u << q)) keep.push_back(q);
      const CMatrix r = testing::brute_partial_trace(rho.matrix(), keep, n);
      best = std::max(best, von_neumann_entropy(DensityMatrix::from_matrix(r)));
    }
    EXPECT_NEAR(max_bipartite_entropy(s), best, 1e-9);
  }
}

TEST(Statevector, ProductOrderingPutsFirstFactorOnQubitZero) {
  const std::vector<std::array<Complex, 2>> q = {{0.0, 1.0}, {1.0, 0.0}};
  const Statevector s = Statevector::product(q);
  EXPECT_EQ(s[2], Complex(1.0));  // |10>
}

}  // namespace
}  // namespace hqc
