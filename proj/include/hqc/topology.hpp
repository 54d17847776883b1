#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/gates.hpp"
#include "hqc/sim.hpp"

namespace hqc {

enum class Layout { TTN, MERA };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view name);

enum class BlockRole { Tree, Disentangler };

/// Placement of one unitary block. Parameters live in the flat ParamVector.
struct BlockSpec {
  BlockRole role = BlockRole::Tree;
  int layer = 0;
  QubitIndexSet wires;     // two data wires, then the ancilla for ancilla kinds
  bool cnot_reversed = false;
  int discarded = -1;      // data wire dropped after this block (tree blocks)
  int ancilla = -1;        // ancilla wire, dropped after this block

  bool operator==(const BlockSpec& o) const {
    return role == o.role && layer == o.layer && wires.indices() == o.wires.indices() &&
           cnot_reversed == o.cnot_reversed && discarded == o.discarded && ancilla == o.ancilla;
  }
};

/// Flat parameter vector: every block's parameters in block order, then the
/// measurement rotation.
using ParamVector = std::vector<double>;

/// A hierarchical classifier circuit. Wires 0..n_data-1 carry the input;
/// ancilla wires follow, one per block, in block order.
class ClassifierModel {
 public:
  ClassifierModel(Layout layout, GateKind kind, int n_data, std::vector<BlockSpec> blocks, int readout);

  Layout layout() const { return layout_; }
  GateKind kind() const { return kind_; }
  Field field() const { return field_of(kind_); }
  int n_data() const { return n_data_; }
  int n_qubits() const { return n_qubits_; }
  int readout_qubit() const { return readout_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }

  std::size_t n_params() const { return n_params_; }
  std::size_t block_offset(std::size_t i) const { return offsets_[i]; }
  std::size_t measurement_offset() const { return offsets_.back(); }
  std::span<const double> block_params(std::size_t i, std::span<const double> params) const;
  std::span<const double> measurement_params(std::span<const double> params) const;

  UnitaryBlock unitary_block(std::size_t i, std::span<const double> params) const;
  MeasurementRotation measurement(std::span<const double> params) const;

  /// Throws DimensionMismatch if params has the wrong length.
  void check_params(std::span<const double> params) const;

  bool operator==(const ClassifierModel&) const = default;

 private:
  Layout layout_;
  GateKind kind_;
  int n_data_;
  int n_qubits_;
  std::vector<BlockSpec> blocks_;
  int readout_;
  std::vector<std::size_t> offsets_;  // blocks, then measurement
  std::size_t n_params_ = 0;
};

ClassifierModel build_ttn(int n_data, GateKind kind);
ClassifierModel build_mera(int n_data, GateKind kind);
ClassifierModel build_model(Layout layout, int n_data, GateKind kind);

struct ModelWithParams {
  ClassifierModel model;
  ParamVector params;
};

/// MERA whose tree blocks copy the trained TTN and whose disentanglers are
/// the identity (all generator coefficients zero). Simple kinds have no
/// identity setting and raise UnsupportedKind.
ModelWithParams hybrid_init(const ClassifierModel& ttn, std::span<const double> ttn_params);

/// Evaluates one model at fixed parameters. The statevector runs up to the
/// first block after which discarded wires outnumber live ones; the rest of
/// the circuit is folded into a Heisenberg-picture observable on the live
/// wires, so ancilla models never materialize the full register.
class CircuitExecutor {
 public:
  CircuitExecutor(const ClassifierModel& model, std::span<const double> params, bool with_grads);

  double expectation(const Statevector& input) const;

  /// Evaluates the expectation f, then accumulates weight_of(f) * df/dtheta.
  /// Returns f. Gradients are only available after finish_gradient().
  double accumulate(const Statevector& input, const std::function<double(double)>& weight_of);

  /// Folds the accumulated mixed-state contribution and per-gate
  /// environments into `grad` (length n_params) and resets the accumulators.
  void finish_gradient(std::span<double> grad);

  int split_block() const { return split_; }

 private:
  struct DmStep {
    enum class Op { AddAncilla, Gate, Discard } op;
    int gate = -1;                // index into gates_ (blocks, then measurement)
    std::vector<int> positions;   // register positions for Gate, position for Discard
  };

  void check_input(const Statevector& input) const;
  void forward_sv(const Statevector& input, std::vector<CVector>* trail, CVector& out) const;
  double observe(const CVector& psi, CVector* lambda) const;
  CMatrix reduced_live(const CVector& psi) const;

  const ClassifierModel& model_;
  bool with_grads_;
  std::vector<GateMatrices> gates_;     // blocks in order, then measurement
  std::vector<std::size_t> gate_offsets_;

  int split_ = 0;                        // blocks [0, split_) run on the statevector
  int sv_qubits_ = 0;
  std::vector<std::vector<int>> sv_positions_;
  std::vector<int> live_positions_;      // live wires at the split, in register order
  std::vector<int> dead_positions_;
  std::vector<std::uint64_t> live_offsets_;
  std::vector<std::uint64_t> dead_offsets_;
  int dm_initial_qubits_ = 0;
  std::vector<DmStep> dm_steps_;
  std::vector<int> dm_step_qubits_;      // register size before each step
  int readout_position_ = 0;
  CMatrix observable_;                   // Heisenberg observable on live wires at the split

  std::vector<CMatrix> sv_env_;
  CMatrix mixed_accum_;
};

double predict_expectation(const ClassifierModel& model, std::span<const double> params, const Statevector& input);

std::vector<double> predict_batch(const ClassifierModel& model, std::span<const double> params,
                                  std::span<const Statevector> inputs);

/// Label 1 iff the expectation is at least 0.5.
int predict_label(const ClassifierModel& model, std::span<const double> params, const Statevector& input);

/// Majority vote over `shots` samples of the readout qubit (outcome 0 votes
/// for label 1; ties go to label 1).
int predict_label_sampled(const ClassifierModel& model, std::span<const double> params, const Statevector& input,
                          std::int64_t shots, std::uint64_t seed);

/// Plain evaluation on the full register with every ancilla allocated up
/// front and never touched again. Used as the reference in tests and by the
/// finite-difference oracle.
double predict_expectation_reference(const ClassifierModel& model, std::span<const double> params,
                                     const Statevector& input);

/// Readout probability of the circuit run as a density matrix with the
/// depolarizing channel applied to the whole register after every gate:
/// each ry and cx of a simple-real block, each block otherwise, and the
/// measurement rotation.
double predict_expectation_noisy(const ClassifierModel& model, std::span<const double> params,
                                 const Statevector& input, double noise);

/// Native gate list for a SimpleReal model, including the measurement
/// rotation as a final ry on the readout wire.
std::vector<NativeGate> native_circuit(const ClassifierModel& model, std::span<const double> params);

/// OpenQASM 2.0 text for a SimpleReal model.
std::string export_qasm(const ClassifierModel& model, std::span<const double> params);

struct ParsedQasm {
  int n_qubits = 0;
  std::vector<NativeGate> gates;
  int measured_qubit = -1;
};

/// Reads back the ry/cx/measure subset emitted by export_qasm.
ParsedQasm parse_qasm(std::string_view text);

/// Outcome-0 probability of the measured qubit after running a parsed
/// circuit on `input`.
double simulate_qasm(const ParsedQasm& circuit, const Statevector& input);

}  // namespace hqc
