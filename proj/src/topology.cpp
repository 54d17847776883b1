#include "hqc/topology.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "hqc/error.hpp"
#include "hqc/kernels.hpp"

namespace hqc {

std::string_view to_string(Layout layout) { return layout == Layout::TTN ? "ttn" : "mera"; }

Layout parse_layout(std::string_view name) {
  if (name == "ttn") return Layout::TTN;
  if (name == "mera") return Layout::MERA;
  throw Error(ErrorCode::ParseError, "unknown layout '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Model

ClassifierModel::ClassifierModel(Layout layout, GateKind kind, int n_data, std::vector<BlockSpec> blocks, int readout)
    : layout_(layout), kind_(kind), n_data_(n_data), blocks_(std::move(blocks)), readout_(readout) {
  n_qubits_ = n_data;
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    if (static_cast<int>(b.wires.size()) != gate_qubits(kind)) {
      throw Error(ErrorCode::DimensionMismatch, "block wire count does not match the gate kind");
    }
    if (b.ancilla >= 0) n_qubits_ = std::max(n_qubits_, b.ancilla + 1);
    offsets_.push_back(off);
    off += static_cast<std::size_t>(param_count(kind));
  }
  offsets_.push_back(off);
  n_params_ = off + static_cast<std::size_t>(measurement_param_count(field_of(kind)));
  for (const auto& b : blocks_) b.wires.check(n_qubits_);
  QubitIndexSet{readout}.check(n_data);
}

std::span<const double> ClassifierModel::block_params(std::size_t i, std::span<const double> params) const {
  return params.subspan(offsets_[i], static_cast<std::size_t>(param_count(kind_)));
}

std::span<const double> ClassifierModel::measurement_params(std::span<const double> params) const {
  return params.subspan(offsets_.back(), static_cast<std::size_t>(measurement_param_count(field())));
}

UnitaryBlock ClassifierModel::unitary_block(std::size_t i, std::span<const double> params) const {
  check_params(params);
  const auto p = block_params(i, params);
  return UnitaryBlock{kind_, {p.begin(), p.end()}, blocks_[i].wires, blocks_[i].cnot_reversed};
}

MeasurementRotation ClassifierModel::measurement(std::span<const double> params) const {
  check_params(params);
  const auto p = measurement_params(params);
  return MeasurementRotation{field(), {p.begin(), p.end()}, readout_};
}

void ClassifierModel::check_params(std::span<const double> params) const {
  if (params.size() != n_params_) {
    throw Error(ErrorCode::DimensionMismatch, "model expects " + std::to_string(n_params_) + " parameters, got " +
                                                  std::to_string(params.size()));
  }
}

namespace {

void check_size(int n_data, GateKind kind) {
  if (n_data < 2 || n_data > 16 || !std::has_single_bit(static_cast<unsigned>(n_data))) {
    throw Error(ErrorCode::UnsupportedSize, "data qubit count must be a power of two in 2..16");
  }
  (void)kind;
}

// Tree blocks pair neighbouring live wires. Even-numbered blocks in a layer
// keep their upper (higher-index) wire and odd-numbered ones their lower
// wire, so survivors of adjacent blocks meet in the next layer. A simple
// block keeps the CNOT target, hence the reversal on lower survivors.
std::vector<BlockSpec> tree_layer(const std::vector<int>& live, int layer, GateKind kind, std::vector<int>& next) {
  std::vector<BlockSpec> out;
  next.clear();
  for (std::size_t j = 0; 2 * j + 1 < live.size(); ++j) {
    const int lo = live[2 * j], hi = live[2 * j + 1];
    const bool keep_lower = (j % 2) == 1;
    BlockSpec b;
    b.role = BlockRole::Tree;
    b.layer = layer;
    b.wires = QubitIndexSet{lo, hi};
    b.cnot_reversed = family_of(kind) == GateFamily::Simple && keep_lower;
    b.discarded = keep_lower ? hi : lo;
    next.push_back(keep_lower ? lo : hi);
    out.push_back(std::move(b));
  }
  return out;
}

ClassifierModel assemble(Layout layout, int n_data, GateKind kind) {
  check_size(n_data, kind);
  std::vector<int> live(static_cast<std::size_t>(n_data));
  for (int q = 0; q < n_data; ++q) live[static_cast<std::size_t>(q)] = q;
  std::vector<BlockSpec> blocks;
  std::vector<int> next;
  for (int layer = 0; live.size() > 1; ++layer) {
    if (layout == Layout::MERA) {
      // Disentanglers straddle each pair of neighbouring tree blocks of the
      // upcoming layer: upper wire of block j with lower wire of block j+1.
      for (std::size_t j = 0; 2 * j + 3 < live.size(); ++j) {
        BlockSpec d;
        d.role = BlockRole::Disentangler;
        d.layer = layer;
        d.wires = QubitIndexSet{live[2 * j + 1], live[2 * j + 2]};
        blocks.push_back(std::move(d));
      }
    }
    auto tree = tree_layer(live, layer, kind, next);
    blocks.insert(blocks.end(), tree.begin(), tree.end());
    live = next;
  }
  if (family_of(kind) == GateFamily::Ancilla) {
    int anc = n_data;
    for (auto& b : blocks) {
      b.ancilla = anc++;
      b.wires = QubitIndexSet{b.wires[0], b.wires[1], b.ancilla};
    }
    if (anc > kMaxSimQubits) throw Error(ErrorCode::UnsupportedSize, "ancilla register exceeds simulator limit");
  }
  return ClassifierModel(layout, kind, n_data, std::move(blocks), live.front());
}

}  // namespace

ClassifierModel build_ttn(int n_data, GateKind kind) { return assemble(Layout::TTN, n_data, kind); }
ClassifierModel build_mera(int n_data, GateKind kind) { return assemble(Layout::MERA, n_data, kind); }

ClassifierModel build_model(Layout layout, int n_data, GateKind kind) { return assemble(layout, n_data, kind); }

ModelWithParams hybrid_init(const ClassifierModel& ttn, std::span<const double> ttn_params) {
  if (ttn.layout() != Layout::TTN) throw Error(ErrorCode::InvalidArgument, "hybrid_init expects a TTN source");
  if (family_of(ttn.kind()) == GateFamily::Simple) {
    throw Error(ErrorCode::UnsupportedKind, "simple blocks have no identity setting for disentanglers");
  }
  ttn.check_params(ttn_params);
  ClassifierModel mera = build_mera(ttn.n_data(), ttn.kind());
  ParamVector params(mera.n_params(), 0.0);
  std::size_t tree = 0;
  for (std::size_t i = 0; i < mera.blocks().size(); ++i) {
    if (mera.blocks()[i].role != BlockRole::Tree) continue;
    const auto src = ttn.block_params(tree++, ttn_params);
    std::copy(src.begin(), src.end(), params.begin() + static_cast<std::ptrdiff_t>(mera.block_offset(i)));
  }
  const auto meas = ttn.measurement_params(ttn_params);
  std::copy(meas.begin(), meas.end(), params.begin() + static_cast<std::ptrdiff_t>(mera.measurement_offset()));
  return {std::move(mera), std::move(params)};
}

// ---------------------------------------------------------------------------
// Executor

namespace {

std::uint64_t insert_bit(std::uint64_t x, int bitpos, std::uint64_t b) {
  const std::uint64_t low = x & ((std::uint64_t{1} << bitpos) - 1);
  return ((x ^ low) << 1) | (b << bitpos) | low;
}

std::uint64_t remove_bit(std::uint64_t x, int bitpos) {
  const std::uint64_t low = x & ((std::uint64_t{1} << bitpos) - 1);
  return ((x >> (bitpos + 1)) << bitpos) | low;
}

// R (x) |0><0| with the new qubit as the last register position.
CMatrix add_ancilla(const CMatrix& r) {
  const Eigen::Index d = r.rows();
  CMatrix out = CMatrix::Zero(2 * d, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) out(2 * i, 2 * j) = r(i, j);
  return out;
}

// Adjoint of add_ancilla: <0|O|0> on the last position.
CMatrix restrict_ancilla(const CMatrix& o) {
  const Eigen::Index d = o.rows() / 2;
  CMatrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = o(2 * i, 2 * j);
  return out;
}

CMatrix trace_out(const CMatrix& r, int n, int position) {
  const int bit = n - 1 - position;
  const Eigen::Index d = r.rows() / 2;
  CMatrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto i0 = static_cast<Eigen::Index>(insert_bit(static_cast<std::uint64_t>(i), bit, 0));
      const auto j0 = static_cast<Eigen::Index>(insert_bit(static_cast<std::uint64_t>(j), bit, 0));
      const auto i1 = static_cast<Eigen::Index>(insert_bit(static_cast<std::uint64_t>(i), bit, 1));
      const auto j1 = static_cast<Eigen::Index>(insert_bit(static_cast<std::uint64_t>(j), bit, 1));
      out(i, j) = r(i0, j0) + r(i1, j1);
    }
  }
  return out;
}

// Adjoint of trace_out: O (x) I at `position` of an n-qubit register.
CMatrix embed_identity(const CMatrix& o, int n, int position) {
  const int bit = n - 1 - position;
  const Eigen::Index d = o.rows() * 2;
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (((i >> bit) & 1) != ((j >> bit) & 1)) continue;
      out(i, j) = o(static_cast<Eigen::Index>(remove_bit(static_cast<std::uint64_t>(i), bit)),
                    static_cast<Eigen::Index>(remove_bit(static_cast<std::uint64_t>(j), bit)));
    }
  }
  return out;
}

// E(b, a) = sum_rest M((b, rest), (a, rest)) keeping `positions` in order.
CMatrix local_trace(const CMatrix& m, int n, std::span<const int> positions) {
  const kernel::GateLayout layout(n, positions);
  const int dl = 1 << layout.k;
  CMatrix out = CMatrix::Zero(dl, dl);
  for (std::uint64_t g = 0; g < layout.groups(); ++g) {
    const std::uint64_t base = layout.base(g);
    for (int a = 0; a < dl; ++a)
      for (int b = 0; b < dl; ++b)
        out(b, a) += m(static_cast<Eigen::Index>(base + layout.offsets[b]),
                       static_cast<Eigen::Index>(base + layout.offsets[a]));
  }
  return out;
}

std::vector<std::uint64_t> offsets_of(int n, const std::vector<int>& positions) {
  const auto k = positions.size();
  std::vector<std::uint64_t> out(std::size_t{1} << k, 0);
  for (std::size_t m = 0; m < out.size(); ++m)
    for (std::size_t j = 0; j < k; ++j)
      if ((m >> (k - 1 - j)) & 1) out[m] |= std::uint64_t{1} << (n - 1 - positions[j]);
  return out;
}

int position_of(const std::vector<int>& reg, int wire) {
  return static_cast<int>(std::find(reg.begin(), reg.end(), wire) - reg.begin());
}

}  // namespace

CircuitExecutor::CircuitExecutor(const ClassifierModel& model, std::span<const double> params, bool with_grads)
    : model_(model), with_grads_(with_grads) {
  model.check_params(params);
  const auto& blocks = model.blocks();
  const int nb = static_cast<int>(blocks.size());
  for (int i = 0; i < nb; ++i) {
    gates_.push_back(gate_matrices(model.kind(), model.block_params(static_cast<std::size_t>(i), params),
                                   blocks[static_cast<std::size_t>(i)].cnot_reversed, with_grads));
    gate_offsets_.push_back(model.block_offset(static_cast<std::size_t>(i)));
  }
  gates_.push_back(rotation_matrices(model.field(), model.measurement_params(params), with_grads));
  gate_offsets_.push_back(model.measurement_offset());

  // Split point: first block after which discarded wires outnumber live ones.
  int live = model.n_data(), dead = 0;
  split_ = nb;
  for (int i = 0; i < nb; ++i) {
    const auto& b = blocks[static_cast<std::size_t>(i)];
    if (b.ancilla >= 0) ++dead;
    if (b.discarded >= 0) {
      --live;
      ++dead;
    }
    if (dead >= live) {
      split_ = i + 1;
      break;
    }
  }

  // Statevector register: data wires, then ancillas of the statevector phase.
  std::vector<int> sv_wires(static_cast<std::size_t>(model.n_data()));
  for (int q = 0; q < model.n_data(); ++q) sv_wires[static_cast<std::size_t>(q)] = q;
  std::vector<bool> discarded(static_cast<std::size_t>(model.n_qubits()), false);
  for (int i = 0; i < split_; ++i) {
    const auto& b = blocks[static_cast<std::size_t>(i)];
    if (b.ancilla >= 0) {
      sv_wires.push_back(b.ancilla);
      discarded[static_cast<std::size_t>(b.ancilla)] = true;
    }
    if (b.discarded >= 0) discarded[static_cast<std::size_t>(b.discarded)] = true;
  }
  sv_qubits_ = static_cast<int>(sv_wires.size());
  for (int i = 0; i < split_; ++i) {
    std::vector<int> pos;
    for (int w : blocks[static_cast<std::size_t>(i)].wires) pos.push_back(position_of(sv_wires, w));
    sv_positions_.push_back(std::move(pos));
  }
  std::vector<int> reg;  // mixed-state register, by wire id
  for (int p = 0; p < sv_qubits_; ++p) {
    const int w = sv_wires[static_cast<std::size_t>(p)];
    if (discarded[static_cast<std::size_t>(w)]) {
      dead_positions_.push_back(p);
    } else {
      live_positions_.push_back(p);
      reg.push_back(w);
    }
  }
  dm_initial_qubits_ = static_cast<int>(reg.size());
  live_offsets_ = offsets_of(sv_qubits_, live_positions_);
  dead_offsets_ = offsets_of(sv_qubits_, dead_positions_);

  for (int i = split_; i < nb; ++i) {
    const auto& b = blocks[static_cast<std::size_t>(i)];
    if (b.ancilla >= 0) {
      dm_step_qubits_.push_back(static_cast<int>(reg.size()));
      dm_steps_.push_back({DmStep::Op::AddAncilla, -1, {}});
      reg.push_back(b.ancilla);
    }
    std::vector<int> pos;
    for (int w : b.wires) pos.push_back(position_of(reg, w));
    dm_step_qubits_.push_back(static_cast<int>(reg.size()));
    dm_steps_.push_back({DmStep::Op::Gate, i, std::move(pos)});
    for (int w : {b.ancilla, b.discarded}) {
      if (w < 0) continue;
      const int p = position_of(reg, w);
      dm_step_qubits_.push_back(static_cast<int>(reg.size()));
      dm_steps_.push_back({DmStep::Op::Discard, -1, {p}});
      reg.erase(reg.begin() + p);
    }
  }
  readout_position_ = position_of(reg, model.readout_qubit());
  dm_step_qubits_.push_back(static_cast<int>(reg.size()));
  dm_steps_.push_back({DmStep::Op::Gate, nb, {readout_position_}});

  // Heisenberg observable: |0><0| on the readout, pulled back to the split.
  const int nf = static_cast<int>(reg.size());
  CMatrix o = CMatrix::Zero(Eigen::Index{1} << nf, Eigen::Index{1} << nf);
  for (Eigen::Index k = 0; k < o.rows(); ++k) {
    if (((k >> (nf - 1 - readout_position_)) & 1) == 0) o(k, k) = 1.0;
  }
  for (int s = static_cast<int>(dm_steps_.size()) - 1; s >= 0; --s) {
    const auto& step = dm_steps_[static_cast<std::size_t>(s)];
    const int n = dm_step_qubits_[static_cast<std::size_t>(s)];
    switch (step.op) {
      case DmStep::Op::Gate:
        kernel::conjugate(o, n, gates_[static_cast<std::size_t>(step.gate)].u.adjoint(), step.positions);
        break;
      case DmStep::Op::Discard: o = embed_identity(o, n, step.positions[0]); break;
      case DmStep::Op::AddAncilla: o = restrict_ancilla(o); break;
    }
  }
  observable_ = std::move(o);

  if (with_grads_) {
    for (int i = 0; i < split_; ++i) {
      const Eigen::Index d = Eigen::Index{1} << gate_qubits(model.kind());
      sv_env_.push_back(CMatrix::Zero(d, d));
    }
    mixed_accum_ = CMatrix::Zero(observable_.rows(), observable_.cols());
  }
}

void CircuitExecutor::check_input(const Statevector& input) const {
  if (input.n_qubits() != model_.n_data()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(input.n_qubits()) +
                                                  " qubits, model expects " + std::to_string(model_.n_data()));
  }
}

void CircuitExecutor::forward_sv(const Statevector& input, std::vector<CVector>* trail, CVector& out) const {
  const int n_anc = sv_qubits_ - model_.n_data();
  out = CVector::Zero(Eigen::Index{1} << sv_qubits_);
  for (Eigen::Index k = 0; k < input.amps().size(); ++k) out[k << n_anc] = input.amps()[k];
  for (int i = 0; i < split_; ++i) {
    if (trail) trail->push_back(out);
    kernel::apply_matrix(out, sv_qubits_, gates_[static_cast<std::size_t>(i)].u, sv_positions_[static_cast<std::size_t>(i)]);
  }
}

double CircuitExecutor::observe(const CVector& psi, CVector* lambda) const {
  const auto& live = live_offsets_;
  const auto& dead = dead_offsets_;
  const auto dl = static_cast<Eigen::Index>(live.size());
  CVector v(dl), w(dl);
  if (lambda) *lambda = CVector::Zero(psi.size());
  double value = 0.0;
  for (std::uint64_t t : dead) {
    for (Eigen::Index a = 0; a < dl; ++a) v[a] = psi[static_cast<Eigen::Index>(live[a] | t)];
    w.noalias() = observable_ * v;
    value += v.dot(w).real();
    if (lambda) {
      for (Eigen::Index a = 0; a < dl; ++a) (*lambda)[static_cast<Eigen::Index>(live[a] | t)] = w[a];
    }
  }
  return value;
}

CMatrix CircuitExecutor::reduced_live(const CVector& psi) const {
  const auto& live = live_offsets_;
  const auto& dead = dead_offsets_;
  CMatrix m(static_cast<Eigen::Index>(live.size()), static_cast<Eigen::Index>(dead.size()));
  for (std::size_t t = 0; t < dead.size(); ++t)
    for (std::size_t a = 0; a < live.size(); ++a)
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = psi[static_cast<Eigen::Index>(live[a] | dead[t])];
  return m * m.adjoint();
}

double CircuitExecutor::expectation(const Statevector& input) const {
  check_input(input);
  CVector psi;
  forward_sv(input, nullptr, psi);
  return std::clamp(observe(psi, nullptr), 0.0, 1.0);
}

double CircuitExecutor::accumulate(const Statevector& input, const std::function<double(double)>& weight_of) {
  if (!with_grads_) throw Error(ErrorCode::InvalidArgument, "executor was built without gradients");
  check_input(input);
  std::vector<CVector> trail;
  CVector psi, lambda;
  forward_sv(input, &trail, psi);
  const double value = observe(psi, &lambda);
  const double weight = weight_of(value);
  mixed_accum_ += weight * reduced_live(psi);
  for (int i = split_ - 1; i >= 0; --i) {
    const auto& pos = sv_positions_[static_cast<std::size_t>(i)];
    const kernel::GateLayout layout(sv_qubits_, pos);
    const CVector& before = trail[static_cast<std::size_t>(i)];
    kernel::accumulate_env(before.data(), lambda.data(), layout, weight, sv_env_[static_cast<std::size_t>(i)]);
    if (i > 0) kernel::apply_matrix(lambda.data(), layout, gates_[static_cast<std::size_t>(i)].u.adjoint());
  }
  return value;
}

void CircuitExecutor::finish_gradient(std::span<double> grad) {
  if (!with_grads_) throw Error(ErrorCode::InvalidArgument, "executor was built without gradients");
  for (int i = 0; i < split_; ++i) {
    const auto& g = gates_[static_cast<std::size_t>(i)];
    const CMatrix& env = sv_env_[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < g.grads.size(); ++k) {
      grad[gate_offsets_[static_cast<std::size_t>(i)] + k] += 2.0 * (g.grads[k].cwiseProduct(env.transpose())).sum().real();
    }
    sv_env_[static_cast<std::size_t>(i)].setZero();
  }

  // Mixed-state phase: forward the weighted reduced state, pairing each gate
  // with the observable pulled back to just after it.
  std::vector<CMatrix> after(dm_steps_.size());
  {
    const int nf = dm_step_qubits_.back();
    CMatrix o = CMatrix::Zero(Eigen::Index{1} << nf, Eigen::Index{1} << nf);
    for (Eigen::Index k = 0; k < o.rows(); ++k) {
      if (((k >> (nf - 1 - readout_position_)) & 1) == 0) o(k, k) = 1.0;
    }
    for (int s = static_cast<int>(dm_steps_.size()) - 1; s >= 0; --s) {
      const auto& step = dm_steps_[static_cast<std::size_t>(s)];
      const int n = dm_step_qubits_[static_cast<std::size_t>(s)];
      if (step.op == DmStep::Op::Gate) after[static_cast<std::size_t>(s)] = o;
      switch (step.op) {
        case DmStep::Op::Gate:
          kernel::conjugate(o, n, gates_[static_cast<std::size_t>(step.gate)].u.adjoint(), step.positions);
          break;
        case DmStep::Op::Discard: o = embed_identity(o, n, step.positions[0]); break;
        case DmStep::Op::AddAncilla: o = restrict_ancilla(o); break;
      }
    }
  }
  CMatrix r = std::move(mixed_accum_);
  for (std::size_t s = 0; s < dm_steps_.size(); ++s) {
    const auto& step = dm_steps_[s];
    const int n = dm_step_qubits_[s];
    switch (step.op) {
      case DmStep::Op::Gate: {
        const auto& g = gates_[static_cast<std::size_t>(step.gate)];
        CMatrix ur = r;
        const kernel::GateLayout layout(n, step.positions);
        for (Eigen::Index c = 0; c < ur.cols(); ++c) kernel::apply_matrix(ur.col(c).data(), layout, g.u);
        const CMatrix m = ur.adjoint() * after[s];
        const CMatrix env = local_trace(m, n, step.positions);
        for (std::size_t k = 0; k < g.grads.size(); ++k) {
          grad[gate_offsets_[static_cast<std::size_t>(step.gate)] + k] +=
              2.0 * (g.grads[k].cwiseProduct(env.transpose())).sum().real();
        }
        kernel::conjugate(r, n, g.u, step.positions);
        break;
      }
      case DmStep::Op::Discard: r = trace_out(r, n, step.positions[0]); break;
      case DmStep::Op::AddAncilla: r = add_ancilla(r); break;
    }
  }
  mixed_accum_ = CMatrix::Zero(observable_.rows(), observable_.cols());
}

// ---------------------------------------------------------------------------
// Predictions

double predict_expectation(const ClassifierModel& model, std::span<const double> params, const Statevector& input) {
  return CircuitExecutor(model, params, false).expectation(input);
}

std::vector<double> predict_batch(const ClassifierModel& model, std::span<const double> params,
                                  std::span<const Statevector> inputs) {
  const CircuitExecutor exec(model, params, false);
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& s : inputs) out.push_back(exec.expectation(s));
  return out;
}

int predict_label(const ClassifierModel& model, std::span<const double> params, const Statevector& input) {
  return predict_expectation(model, params, input) >= 0.5 ? 1 : 0;
}

int predict_label_sampled(const ClassifierModel& model, std::span<const double> params, const Statevector& input,
                          std::int64_t shots, std::uint64_t seed) {
  const std::int64_t zeros = sample_binomial(predict_expectation(model, params, input), shots, seed);
  return 2 * zeros >= shots ? 1 : 0;
}

namespace {

Statevector embed_input(const ClassifierModel& model, const Statevector& input) {
  if (input.n_qubits() != model.n_data()) throw Error(ErrorCode::DimensionMismatch, "input size mismatch");
  const int n_anc = model.n_qubits() - model.n_data();
  CVector amps = CVector::Zero(Eigen::Index{1} << model.n_qubits());
  for (Eigen::Index k = 0; k < input.amps().size(); ++k) amps[k << n_anc] = input.amps()[k];
  return Statevector::from_amplitudes(std::move(amps));
}

}  // namespace

double predict_expectation_reference(const ClassifierModel& model, std::span<const double> params,
                                     const Statevector& input) {
  Statevector state = embed_input(model, input);
  for (std::size_t i = 0; i < model.blocks().size(); ++i) {
    state = apply_unitary(state, build_unitary(model.unitary_block(i, params)), model.blocks()[i].wires);
  }
  const auto m = model.measurement(params);
  state = apply_unitary(state, measurement_rotation_matrix(m).u, QubitIndexSet{m.qubit});
  return expectation_projector0(state, model.readout_qubit());
}

double predict_expectation_noisy(const ClassifierModel& model, std::span<const double> params,
                                 const Statevector& input, double noise) {
  DensityMatrix rho = to_density(embed_input(model, input));
  auto step = [&](const CMatrix& u, const QubitIndexSet& wires) {
    rho = depolarize(apply_unitary_dm(rho, u, wires), noise);
  };
  const Field field = model.field();
  for (std::size_t i = 0; i < model.blocks().size(); ++i) {
    const auto& b = model.blocks()[i];
    const auto p = model.block_params(i, params);
    if (family_of(model.kind()) == GateFamily::Simple) {
      const std::size_t per = static_cast<std::size_t>(measurement_param_count(field));
      step(rotation_matrices(field, p.subspan(0, per), false).u, QubitIndexSet{b.wires[0]});
      step(rotation_matrices(field, p.subspan(per, per), false).u, QubitIndexSet{b.wires[1]});
      step(cnot_matrix(b.cnot_reversed), QubitIndexSet{b.wires[0], b.wires[1]});
    } else {
      step(build_unitary(model.unitary_block(i, params)), b.wires);
    }
  }
  const auto m = model.measurement(params);
  step(measurement_rotation_matrix(m).u, QubitIndexSet{m.qubit});
  return expectation_projector0(rho, model.readout_qubit());
}

// ---------------------------------------------------------------------------
// OpenQASM

std::vector<NativeGate> native_circuit(const ClassifierModel& model, std::span<const double> params) {
  if (model.kind() != GateKind::SimpleReal) {
    throw Error(ErrorCode::UnsupportedKind, "only simple_real models map onto ry/cx");
  }
  std::vector<NativeGate> out;
  for (std::size_t i = 0; i < model.blocks().size(); ++i) {
    const auto gates = decompose_simple_to_native(model.unitary_block(i, params));
    out.insert(out.end(), gates.begin(), gates.end());
  }
  const auto m = model.measurement(params);
  out.push_back({NativeGate::Op::Ry, m.params[0], m.qubit, -1});
  return out;
}

std::string export_qasm(const ClassifierModel& model, std::span<const double> params) {
  const auto gates = native_circuit(model, params);
  std::ostringstream out;
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << model.n_qubits() << "];\ncreg c[1];\n";
  char buf[64];
  for (const auto& g : gates) {
    if (g.op == NativeGate::Op::Ry) {
      std::snprintf(buf, sizeof buf, "%.17g", g.angle);
      out << "ry(" << buf << ") q[" << g.wire0 << "];\n";
    } else {
      out << "cx q[" << g.wire0 << "],q[" << g.wire1 << "];\n";
    }
  }
  out << "measure q[" << model.readout_qubit() << "] -> c[0];\n";
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_qubit_ref(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s.size() < 4 || s.substr(0, 2) != "q[" || s.back() != ']') {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad qubit reference");
  }
  int q = 0;
  const auto body = s.substr(2, s.size() - 3);
  if (std::from_chars(body.data(), body.data() + body.size(), q).ec != std::errc{}) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad qubit index");
  }
  return q;
}

}  // namespace

ParsedQasm parse_qasm(std::string_view text) {
  ParsedQasm out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.starts_with("//") || line.starts_with("OPENQASM") || line.starts_with("include") ||
        line.starts_with("creg")) {
      continue;
    }
    if (line.back() != ';') throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing ';'");
    line.remove_suffix(1);
    if (line.starts_with("qreg")) {
      out.n_qubits = parse_qubit_ref(line.substr(4), line_no);
    } else if (line.starts_with("ry(")) {
      const auto close = line.find(')');
      if (close == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated ry angle");
      const auto arg = line.substr(3, close - 3);
      double angle = 0.0;
      if (std::from_chars(arg.data(), arg.data() + arg.size(), angle).ec != std::errc{}) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad angle");
      }
      out.gates.push_back({NativeGate::Op::Ry, angle, parse_qubit_ref(line.substr(close + 1), line_no), -1});
    } else if (line.starts_with("cx")) {
      const auto args = line.substr(2);
      const auto comma = args.find(',');
      if (comma == std::string_view::npos) throw Error(ErrorCode::ParseError, "cx needs two operands");
      out.gates.push_back({NativeGate::Op::Cx, 0.0, parse_qubit_ref(args.substr(0, comma), line_no),
                           parse_qubit_ref(args.substr(comma + 1), line_no)});
    } else if (line.starts_with("measure")) {
      const auto arrow = line.find("->");
      out.measured_qubit = parse_qubit_ref(line.substr(7, arrow - 7), line_no);
    } else {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unsupported statement");
    }
  }
  for (const auto& g : out.gates) {
    QubitIndexSet{g.wire0}.check(out.n_qubits);
    if (g.op == NativeGate::Op::Cx) QubitIndexSet{g.wire1}.check(out.n_qubits);
  }
  if (out.measured_qubit < 0) throw Error(ErrorCode::ParseError, "no measurement");
  QubitIndexSet{out.measured_qubit}.check(out.n_qubits);
  return out;
}

double simulate_qasm(const ParsedQasm& circuit, const Statevector& input) {
  if (input.n_qubits() != circuit.n_qubits) throw Error(ErrorCode::DimensionMismatch, "input size mismatch");
  Statevector s = input;
  for (const auto& g : circuit.gates) {
    if (g.op == NativeGate::Op::Ry) {
      s = apply_unitary(s, ry_matrix(g.angle), QubitIndexSet{g.wire0});
    } else {
      s = apply_unitary(s, cnot_matrix(false), QubitIndexSet{g.wire0, g.wire1});
    }
  }
  return expectation_projector0(s, circuit.measured_qubit);
}

}  // namespace hqc
