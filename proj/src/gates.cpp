#include "hqc/gates.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hqc/error.hpp"

namespace hqc {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_count(std::size_t got, int expected, std::string_view what) {
  if (static_cast<int>(got) != expected) {
    throw Error(ErrorCode::ParamCountMismatch, std::string(what) + " expects " + std::to_string(expected) +
                                                   " parameters, got " + std::to_string(got));
  }
}

CMatrix dry_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  CMatrix m(2, 2);
  m << -s / 2, -c / 2, c / 2, -s / 2;
  return m;
}

CMatrix drz_matrix(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = -kI / 2.0 * std::exp(-kI * theta / 2.0);
  m(1, 1) = kI / 2.0 * std::exp(kI * theta / 2.0);
  return m;
}

// Rz(a) Ry(b) Rz(c) and its three partials.
GateMatrices euler_zyz(std::span<const double> p, bool with_grads) {
  const CMatrix za = rz_matrix(p[0]), yb = ry_matrix(p[1]), zc = rz_matrix(p[2]);
  GateMatrices out{za * yb * zc, {}};
  if (with_grads) {
    out.grads.push_back(drz_matrix(p[0]) * yb * zc);
    out.grads.push_back(za * dry_matrix(p[1]) * zc);
    out.grads.push_back(za * yb * drz_matrix(p[2]));
  }
  return out;
}

GateMatrices single_rotation(Field field, std::span<const double> p, bool with_grads) {
  if (field == Field::Real) {
    GateMatrices out{ry_matrix(p[0]), {}};
    if (with_grads) out.grads.push_back(dry_matrix(p[0]));
    return out;
  }
  return euler_zyz(p, with_grads);
}

GateMatrices simple_gate(Field field, std::span<const double> p, bool reversed, bool with_grads) {
  const std::size_t per = field == Field::Real ? 1 : 3;
  const GateMatrices r0 = single_rotation(field, p.subspan(0, per), with_grads);
  const GateMatrices r1 = single_rotation(field, p.subspan(per, per), with_grads);
  const CMatrix cx = cnot_matrix(reversed);
  GateMatrices out{cx * kron(r0.u, r1.u), {}};
  if (with_grads) {
    for (const auto& g : r0.grads) out.grads.push_back(cx * kron(g, r1.u));
    for (const auto& g : r1.grads) out.grads.push_back(cx * kron(r0.u, g));
  }
  return out;
}

// exp(i H), H = sum_k theta_k G_k, with derivatives from the spectral
// (Daleckii-Krein) formula: dU = V ((V^dag G_k V) o F) V^dag where
// F_ab = i e^{i(l_a+l_b)/2} sinc((l_a-l_b)/2).
GateMatrices exponential_gate(int dim, Field field, std::span<const double> p, bool with_grads) {
  const auto& gens = lie_generators(dim, field);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < gens.size(); ++k) h += p[k] * gens[k];
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const CMatrix& v = solver.eigenvectors();
  const Eigen::VectorXd& lam = solver.eigenvalues();
  CVector phase(dim);
  for (int a = 0; a < dim; ++a) phase[a] = std::exp(kI * lam[a]);
  GateMatrices out{v * phase.asDiagonal() * v.adjoint(), {}};
  if (with_grads) {
    CMatrix f(dim, dim);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const double half = 0.5 * (lam[a] - lam[b]);
        const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
        f(a, b) = kI * std::exp(kI * 0.5 * (lam[a] + lam[b])) * sinc;
      }
    }
    out.grads.reserve(gens.size());
    for (const auto& g : gens) {
      const CMatrix gv = v.adjoint() * g * v;
      out.grads.push_back(v * gv.cwiseProduct(f) * v.adjoint());
    }
  }
  if (field == Field::Real) {
    out.u = out.u.real().cast<Complex>();
    for (auto& g : out.grads) g = g.real().cast<Complex>();
  }
  return out;
}

std::vector<CMatrix> make_generators(int dim, Field field) {
  std::vector<CMatrix> gens;
  if (field == Field::Complex) {
    for (int j = 0; j < dim; ++j) {
      for (int k = j + 1; k < dim; ++k) {
        CMatrix g = CMatrix::Zero(dim, dim);
        g(j, k) = 1.0;
        g(k, j) = 1.0;
        gens.push_back(std::move(g));
      }
    }
  }
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      CMatrix g = CMatrix::Zero(dim, dim);
      g(j, k) = -kI;
      g(k, j) = kI;
      gens.push_back(std::move(g));
    }
  }
  if (field == Field::Complex) {
    for (int l = 1; l < dim; ++l) {
      CMatrix g = CMatrix::Zero(dim, dim);
      const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) g(j, j) = scale;
      g(l, l) = -l * scale;
      gens.push_back(std::move(g));
    }
  }
  return gens;
}

}  // namespace

GateKind make_kind(GateFamily family, Field field) {
  const bool real = field == Field::Real;
  switch (family) {
    case GateFamily::Simple: return real ? GateKind::SimpleReal : GateKind::SimpleComplex;
    case GateFamily::General: return real ? GateKind::GeneralReal : GateKind::GeneralComplex;
    case GateFamily::Ancilla: return real ? GateKind::AncillaReal : GateKind::AncillaComplex;
  }
  return GateKind::SimpleReal;
}

GateFamily family_of(GateKind kind) {
  switch (kind) {
    case GateKind::SimpleReal:
    case GateKind::SimpleComplex: return GateFamily::Simple;
    case GateKind::GeneralReal:
    case GateKind::GeneralComplex: return GateFamily::General;
    case GateKind::AncillaReal:
    case GateKind::AncillaComplex: return GateFamily::Ancilla;
  }
  return GateFamily::Simple;
}

Field field_of(GateKind kind) {
  switch (kind) {
    case GateKind::SimpleReal:
    case GateKind::GeneralReal:
    case GateKind::AncillaReal: return Field::Real;
    default: return Field::Complex;
  }
}

int gate_qubits(GateKind kind) { return family_of(kind) == GateFamily::Ancilla ? 3 : 2; }

int param_count(GateKind kind) {
  switch (kind) {
    case GateKind::SimpleReal: return 2;
    case GateKind::SimpleComplex: return 6;
    case GateKind::GeneralReal: return 6;
    case GateKind::GeneralComplex: return 15;
    case GateKind::AncillaReal: return 28;
    case GateKind::AncillaComplex: return 63;
  }
  return 0;
}

int measurement_param_count(Field field) { return field == Field::Real ? 1 : 3; }

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::SimpleReal: return "simple_real";
    case GateKind::SimpleComplex: return "simple_complex";
    case GateKind::GeneralReal: return "general_real";
    case GateKind::GeneralComplex: return "general_complex";
    case GateKind::AncillaReal: return "ancilla_real";
    case GateKind::AncillaComplex: return "ancilla_complex";
  }
  return "?";
}

std::string_view to_string(GateFamily family) {
  switch (family) {
    case GateFamily::Simple: return "simple";
    case GateFamily::General: return "general";
    case GateFamily::Ancilla: return "ancilla";
  }
  return "?";
}

std::string_view to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

GateKind parse_gate_kind(std::string_view name) {
  for (GateKind k : kAllGateKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ParseError, "unknown gate kind '" + std::string(name) + "'");
}

GateFamily parse_family(std::string_view name) {
  for (GateFamily f : {GateFamily::Simple, GateFamily::General, GateFamily::Ancilla}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::ParseError, "unknown gate family '" + std::string(name) + "'");
}

Field parse_field(std::string_view name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw Error(ErrorCode::ParseError, "unknown field '" + std::string(name) + "'");
}

const std::vector<CMatrix>& lie_generators(int dim, Field field) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<CMatrix>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_pair(dim, static_cast<int>(field));
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_generators(dim, field)).first;
  return it->second;
}

CMatrix ry_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  CMatrix m(2, 2);
  m << c, -s, s, c;
  return m;
}

CMatrix rz_matrix(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(-kI * theta / 2.0);
  m(1, 1) = std::exp(kI * theta / 2.0);
  return m;
}

CMatrix cnot_matrix(bool reversed) {
  CMatrix m = CMatrix::Zero(4, 4);
  if (!reversed) {
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
  } else {
    m(0, 0) = m(2, 2) = 1.0;
    m(1, 3) = m(3, 1) = 1.0;
  }
  return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

GateMatrices gate_matrices(GateKind kind, std::span<const double> params, bool cnot_reversed, bool with_grads) {
  check_count(params.size(), param_count(kind), to_string(kind));
  switch (family_of(kind)) {
    case GateFamily::Simple: return simple_gate(field_of(kind), params, cnot_reversed, with_grads);
    case GateFamily::General: return exponential_gate(4, field_of(kind), params, with_grads);
    case GateFamily::Ancilla: return exponential_gate(8, field_of(kind), params, with_grads);
  }
  return {};
}

GateMatrices rotation_matrices(Field field, std::span<const double> params, bool with_grads) {
  check_count(params.size(), measurement_param_count(field), "measurement rotation");
  return single_rotation(field, params, with_grads);
}

CMatrix build_unitary(const UnitaryBlock& block) {
  if (static_cast<int>(block.wires.size()) != gate_qubits(block.kind)) {
    throw Error(ErrorCode::DimensionMismatch, "block wire count does not match its kind");
  }
  return gate_matrices(block.kind, block.params, block.cnot_reversed, false).u;
}

GateMatrices build_unitary_and_grads(const UnitaryBlock& block) {
  if (static_cast<int>(block.wires.size()) != gate_qubits(block.kind)) {
    throw Error(ErrorCode::DimensionMismatch, "block wire count does not match its kind");
  }
  return gate_matrices(block.kind, block.params, block.cnot_reversed, true);
}

GateMatrices measurement_rotation_matrix(const MeasurementRotation& m) {
  for (double v : m.params) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite measurement angle");
  }
  return rotation_matrices(m.field, m.params, true);
}

std::vector<NativeGate> decompose_simple_to_native(const UnitaryBlock& block) {
  if (block.kind != GateKind::SimpleReal) {
    throw Error(ErrorCode::UnsupportedKind,
                std::string(to_string(block.kind)) + " blocks need compilation to reach ry/cx");
  }
  check_count(block.params.size(), 2, "simple_real");
  const int w0 = block.wires[0], w1 = block.wires[1];
  std::vector<NativeGate> out;
  out.push_back({NativeGate::Op::Ry, block.params[0], w0, -1});
  out.push_back({NativeGate::Op::Ry, block.params[1], w1, -1});
  if (block.cnot_reversed) {
    out.push_back({NativeGate::Op::Cx, 0.0, w1, w0});
  } else {
    out.push_back({NativeGate::Op::Cx, 0.0, w0, w1});
  }
  return out;
}

}  // namespace hqc
