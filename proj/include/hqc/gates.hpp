#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/sim.hpp"

namespace hqc {

enum class GateFamily { Simple, General, Ancilla };
enum class Field { Real, Complex };

enum class GateKind { SimpleReal, SimpleComplex, GeneralReal, GeneralComplex, AncillaReal, AncillaComplex };

inline constexpr GateKind kAllGateKinds[] = {GateKind::SimpleReal,  GateKind::SimpleComplex,
                                             GateKind::GeneralReal, GateKind::GeneralComplex,
                                             GateKind::AncillaReal, GateKind::AncillaComplex};

GateKind make_kind(GateFamily family, Field field);
GateFamily family_of(GateKind kind);
Field field_of(GateKind kind);

/// 2 for Simple/General, 3 for Ancilla (the last wire is the ancilla).
int gate_qubits(GateKind kind);

/// SimpleReal 2, SimpleComplex 6, GeneralReal 6, GeneralComplex 15,
/// AncillaReal 28, AncillaComplex 63.
int param_count(GateKind kind);

std::string_view to_string(GateKind kind);
std::string_view to_string(GateFamily family);
std::string_view to_string(Field field);
GateKind parse_gate_kind(std::string_view name);
GateFamily parse_family(std::string_view name);
Field parse_field(std::string_view name);

/// A parameterized two- or three-qubit unitary placed on concrete wires.
struct UnitaryBlock {
  GateKind kind = GateKind::SimpleReal;
  std::vector<double> params;
  QubitIndexSet wires;
  bool cnot_reversed = false;  // Simple kinds only
};

/// Single-qubit rotation applied before the |0><0| readout: Ry(theta) for the
/// real field, Rz(a) Ry(b) Rz(c) for the complex field.
struct MeasurementRotation {
  Field field = Field::Real;
  std::vector<double> params;
  int qubit = 0;
};

int measurement_param_count(Field field);

struct GateMatrices {
  CMatrix u;
  std::vector<CMatrix> grads;  // d u / d theta_k
};

/// Hermitian generator basis of su(dim) as generalized Gell-Mann matrices:
/// symmetric pairs (j<k, row-major), antisymmetric pairs, then the diagonal
/// family. The real field keeps only the antisymmetric pairs, so that
/// i * G_k = E_jk - E_kj and exp(i sum theta_k G_k) lies in SO(dim).
const std::vector<CMatrix>& lie_generators(int dim, Field field);

CMatrix build_unitary(const UnitaryBlock& block);
GateMatrices build_unitary_and_grads(const UnitaryBlock& block);
GateMatrices measurement_rotation_matrix(const MeasurementRotation& m);

/// Span-based forms used on the hot path; they validate only the parameter
/// count.
GateMatrices gate_matrices(GateKind kind, std::span<const double> params, bool cnot_reversed, bool with_grads);
GateMatrices rotation_matrices(Field field, std::span<const double> params, bool with_grads);

CMatrix ry_matrix(double theta);
CMatrix rz_matrix(double theta);
/// CNOT on a two-wire local register; control on local wire 0 unless reversed.
CMatrix cnot_matrix(bool reversed = false);

struct NativeGate {
  enum class Op { Ry, Cx };
  Op op = Op::Ry;
  double angle = 0.0;  // Ry only
  int wire0 = 0;       // Ry target, or Cx control
  int wire1 = -1;      // Cx target

  bool operator==(const NativeGate&) const = default;
};

/// ry/ry/cx sequence reproducing a SimpleReal block. Throws UnsupportedKind
/// for every other kind.
std::vector<NativeGate> decompose_simple_to_native(const UnitaryBlock& block);

CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace hqc
