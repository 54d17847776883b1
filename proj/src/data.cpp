#include "hqc/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <array>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "hqc/error.hpp"
#include "hqc/gates.hpp"
#include "hqc/kernels.hpp"

namespace hqc {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

}  // namespace

RawDataset load_iris(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::vector<std::array<double, 4>> rows;
  std::vector<int> labels;
  std::map<std::string, int> classes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::array<double, 4> x{};
    std::string cell;
    for (int j = 0; j < 4; ++j) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": too few fields");
      try {
        std::size_t used = 0;
        x[static_cast<std::size_t>(j)] = std::stod(trim(cell), &used);
        if (used != trim(cell).size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (!std::getline(ss, cell) || trim(cell).empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": missing class name");
    }
    const std::string name = trim(cell);
    auto it = classes.find(name);
    if (it == classes.end()) it = classes.emplace(name, static_cast<int>(classes.size()) + 1).first;
    if (it->second > 3) throw Error(ErrorCode::ParseError, "more than three iris classes");
    rows.push_back(x);
    labels.push_back(it->second);
  }
  RawDataset out;
  out.source = DataSource::IrisCSV;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < 4; ++j) out.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  out.labels = std::move(labels);
  out.origin.assign(out.labels.size(), 0);
  out.row_id.resize(out.labels.size());
  for (std::size_t i = 0; i < out.row_id.size(); ++i) out.row_id[i] = static_cast<int>(i);
  return out;
}

RawDataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels, int origin) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);
  if (img.size() < 16 || lab.size() < 8) throw Error(ErrorCode::TruncatedFile, "IDX header incomplete");
  if (be32(img, 0) != 0x00000803) throw Error(ErrorCode::MagicMismatch, images.string() + " is not an IDX image file");
  if (be32(lab, 0) != 0x00000801) throw Error(ErrorCode::MagicMismatch, labels.string() + " is not an IDX label file");
  const std::size_t n = be32(img, 4), rows = be32(img, 8), cols = be32(img, 12);
  if (be32(lab, 4) != n) throw Error(ErrorCode::DimensionMismatch, "image and label counts differ");
  const std::size_t pixels = rows * cols;
  if (img.size() < 16 + n * pixels || lab.size() < 8 + n) throw Error(ErrorCode::TruncatedFile, "IDX payload shorter than header says");
  RawDataset out;
  out.source = DataSource::MnistIDX;
  out.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < pixels; ++p)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = img[16 + i * pixels + p] / 255.0;
  out.labels.resize(n);
  out.row_id.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[i] = lab[8 + i];
    out.row_id[i] = static_cast<int>(i);
  }
  out.origin.assign(n, origin);
  return out;
}

RawDataset concat(const RawDataset& a, const RawDataset& b) {
  if (a.features.cols() != b.features.cols()) throw Error(ErrorCode::DimensionMismatch, "feature counts differ");
  RawDataset out;
  out.source = a.source;
  out.features.resize(a.features.rows() + b.features.rows(), a.features.cols());
  out.features << a.features, b.features;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  out.origin = a.origin;
  out.origin.insert(out.origin.end(), b.origin.begin(), b.origin.end());
  out.row_id = a.row_id;
  out.row_id.insert(out.row_id.end(), b.row_id.begin(), b.row_id.end());
  return out;
}

std::string_view to_string(BinaryTask task) {
  switch (task) {
    case BinaryTask::ZeroOrOne: return "0or1";
    case BinaryTask::TwoOrSeven: return "2or7";
    case BinaryTask::IsEven: return "even";
    case BinaryTask::IsGreaterThan4: return "gt4";
    case BinaryTask::Iris12: return "iris12";
    case BinaryTask::Iris23: return "iris23";
    case BinaryTask::Iris13: return "iris13";
  }
  return "?";
}

BinaryTask parse_binary_task(std::string_view name) {
  for (BinaryTask t : {BinaryTask::ZeroOrOne, BinaryTask::TwoOrSeven, BinaryTask::IsEven, BinaryTask::IsGreaterThan4,
                       BinaryTask::Iris12, BinaryTask::Iris23, BinaryTask::Iris13}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown task '" + std::string(name) + "'");
}

RawDataset make_binary_task(const RawDataset& raw, BinaryTask task) {
  auto pair = [](int a, int b) {
    return [a, b](int y) { return y == a ? 0 : y == b ? 1 : -1; };
  };
  std::function<int(int)> map;
  switch (task) {
    case BinaryTask::ZeroOrOne: map = pair(0, 1); break;
    case BinaryTask::TwoOrSeven: map = pair(2, 7); break;
    case BinaryTask::IsEven: map = [](int y) { return y % 2 == 0 ? 1 : 0; }; break;
    case BinaryTask::IsGreaterThan4: map = [](int y) { return y > 4 ? 1 : 0; }; break;
    case BinaryTask::Iris12: map = pair(1, 2); break;
    case BinaryTask::Iris23: map = pair(2, 3); break;
    case BinaryTask::Iris13: map = pair(1, 3); break;
  }
  std::vector<Eigen::Index> keep;
  std::vector<int> labels;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const int y = map(raw.labels[i]);
    if (y < 0) continue;
    keep.push_back(static_cast<Eigen::Index>(i));
    labels.push_back(y);
  }
  RawDataset out;
  out.source = raw.source;
  out.features = raw.features(keep, Eigen::all);
  out.labels = std::move(labels);
  for (Eigen::Index i : keep) {
    out.origin.push_back(raw.origin[static_cast<std::size_t>(i)]);
    out.row_id.push_back(raw.row_id[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::vector<Split> split_labels(std::span<const int> labels, const SplitSpec& spec, std::uint64_t seed) {
  if (spec.scheme == SplitSpec::Scheme::MnistCanonical) {
    throw Error(ErrorCode::InvalidArgument, "the canonical MNIST split needs row provenance");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<Split> out(labels.size(), Split::Train);
  std::mt19937_64 rng(seed);
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t n_test, n_val;
    if (spec.scheme == SplitSpec::Scheme::Fraction) {
      n_test = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * spec.test_fraction));
      n_val = static_cast<std::size_t>(std::lround(static_cast<double>(idx.size()) * spec.val_fraction));
    } else {
      n_test = static_cast<std::size_t>(spec.test_per_class);
      n_val = static_cast<std::size_t>(spec.val_per_class);
    }
    if (n_test + n_val > idx.size()) {
      throw Error(ErrorCode::InvalidArgument, "class " + std::to_string(label) + " too small for the requested split");
    }
    for (std::size_t j = 0; j < n_test; ++j) out[idx[j]] = Split::Test;
    for (std::size_t j = n_test; j < n_test + n_val; ++j) out[idx[j]] = Split::Val;
  }
  return out;
}

std::vector<Split> split_dataset(const RawDataset& raw, const SplitSpec& spec, std::uint64_t seed) {
  if (spec.scheme != SplitSpec::Scheme::MnistCanonical) return split_labels(raw.labels, spec, seed);
  std::vector<Split> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw.origin[i] != 0) out[i] = Split::Test;
    else out[i] = raw.row_id[i] >= spec.val_start ? Split::Val : Split::Train;
  }
  return out;
}

std::vector<std::size_t> rows_in(std::span<const Split> splits, Split which) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == which) out.push_back(i);
  return out;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

PcaTransform fit_pca(const Eigen::MatrixXd& x, int k) {
  if (k < 1 || x.rows() < 2 || k > x.cols()) throw Error(ErrorCode::RankDeficient, "too few rows or columns for PCA");
  PcaTransform t;
  t.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - t.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  const Eigen::Index n = ev.size();
  const double tol = std::max(ev[n - 1], 1.0) * 1e-12 * static_cast<double>(n);
  if (ev[n - k] <= tol) throw Error(ErrorCode::RankDeficient, "fewer than " + std::to_string(k) + " nonzero components");
  t.components.resize(k, x.cols());
  t.variance.resize(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1 - i);
    // Fix the sign so the largest-magnitude entry is positive.
    Eigen::Index at;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0) v = -v;
    t.components.row(i) = v.transpose();
    t.variance[i] = ev[n - 1 - i];
  }
  return t;
}

Eigen::MatrixXd apply_pca(const PcaTransform& t, const Eigen::MatrixXd& features) {
  if (features.cols() != t.mean.size()) throw Error(ErrorCode::DimensionMismatch, "PCA input width differs from fit");
  return (features.rowwise() - t.mean.transpose()) * t.components.transpose();
}

FeatureScaler fit_scaler(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw Error(ErrorCode::MissingSplit, "no training rows to fit the scaler");
  FeatureScaler s{train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
  for (Eigen::Index j = 0; j < s.lo.size(); ++j) {
    if (!(s.hi[j] > s.lo[j])) throw Error(ErrorCode::DegenerateFeature, "feature " + std::to_string(j) + " is constant");
  }
  return s;
}

Eigen::MatrixXd apply_scaler(const FeatureScaler& s, const Eigen::MatrixXd& f) {
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double scale = kHalfPi / (s.hi[j] - s.lo[j]);
    for (Eigen::Index i = 0; i < f.rows(); ++i) out(i, j) = std::clamp((f(i, j) - s.lo[j]) * scale, 0.0, kHalfPi);
  }
  return out;
}

Statevector encode_sample(std::span<const double> angles) {
  std::vector<std::array<Complex, 2>> q(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) q[i] = {std::cos(angles[i]), std::sin(angles[i])};
  return Statevector::product(q);
}

std::size_t EncodedDataset::count(Split s) const {
  return static_cast<std::size_t>(std::count(splits.begin(), splits.end(), s));
}

EncodedDataset rescale_and_encode(const Eigen::MatrixXd& features, std::span<const int> labels,
                                  std::span<const Split> splits) {
  if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.size() != splits.size()) {
    throw Error(ErrorCode::DimensionMismatch, "features, labels and splits differ in length");
  }
  const auto train = rows_in(splits, Split::Train);
  const FeatureScaler s = fit_scaler(select_rows(features, train));
  const Eigen::MatrixXd angles = apply_scaler(s, features);
  EncodedDataset out;
  out.states.reserve(labels.size());
  std::vector<double> row(static_cast<std::size_t>(angles.cols()));
  for (Eigen::Index i = 0; i < angles.rows(); ++i) {
    for (Eigen::Index j = 0; j < angles.cols(); ++j) row[static_cast<std::size_t>(j)] = angles(i, j);
    out.states.push_back(encode_sample(row));
  }
  out.labels.assign(labels.begin(), labels.end());
  out.splits.assign(splits.begin(), splits.end());
  return out;
}

std::vector<Statevector> gen_quantum_class(int n_qubits, int depth, int count, std::uint64_t seed) {
  if (depth < 1 || count < 1) throw Error(ErrorCode::InvalidArgument, "depth and count must be positive");
  if (n_qubits < 2 || n_qubits > kMaxSimQubits) throw Error(ErrorCode::TooManyQubits, "bad register size");
  const CMatrix cx = cnot_matrix();
  std::vector<kernel::GateLayout> cx_layouts;
  for (int i = 0; i < n_qubits; ++i)
    for (int j = i + 1; j < n_qubits; ++j) {
      const int w[2] = {i, j};
      cx_layouts.emplace_back(n_qubits, w);
    }
  std::vector<kernel::GateLayout> single;
  for (int q = 0; q < n_qubits; ++q) single.emplace_back(n_qubits, std::span<const int>(&q, 1));

  std::vector<Statevector> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int s = 0; s < count; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    Statevector psi(n_qubits);
    CVector& a = psi.mutable_amps();
    for (int b = 0; b < depth; ++b) {
      for (int q = 0; q < n_qubits; ++q) {
        const double z1 = angle(rng), y = angle(rng), z2 = angle(rng);
        const CMatrix r = rz_matrix(z1) * ry_matrix(y) * rz_matrix(z2);
        kernel::apply_matrix(a.data(), single[static_cast<std::size_t>(q)], r);
      }
      for (const auto& l : cx_layouts) kernel::apply_matrix(a.data(), l, cx);
    }
    out.push_back(std::move(psi));
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'H', 'Q', 'C', 'D'};
constexpr std::uint32_t kFileVersion = 1;

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) bits = std::bit_cast<std::uint64_t>(v);
  else bits = static_cast<std::uint64_t>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorCode::TruncatedFile, "quantum data file ends early");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{b[i]} << (8 * i);
  if constexpr (std::is_same_v<T, double>) return std::bit_cast<double>(bits);
  else return static_cast<T>(bits);
}

}  // namespace

void save_quantum_class(const std::filesystem::path& path, const QuantumClassFile& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kFileVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.n_qubits));
  put_le<std::uint64_t>(out, data.states.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(data.depth));
  put_le<std::uint64_t>(out, data.seed);
  for (const auto& s : data.states) {
    if (s.n_qubits() != data.n_qubits) throw Error(ErrorCode::DimensionMismatch, "state size differs from header");
    for (Eigen::Index k = 0; k < s.amps().size(); ++k) {
      put_le<double>(out, s.amps()[k].real());
      put_le<double>(out, s.amps()[k].imag());
    }
  }
}

QuantumClassFile load_quantum_class(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4)) throw Error(ErrorCode::TruncatedFile, "missing header");
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::MagicMismatch, path.string() + " is not a HQCD file");
  if (get_le<std::uint32_t>(in) != kFileVersion) throw Error(ErrorCode::VersionError, "unsupported HQCD version");
  QuantumClassFile f;
  f.n_qubits = static_cast<int>(get_le<std::uint32_t>(in));
  const auto count = get_le<std::uint64_t>(in);
  f.depth = static_cast<int>(get_le<std::uint32_t>(in));
  f.seed = get_le<std::uint64_t>(in);
  if (f.n_qubits < 1 || f.n_qubits > kMaxSimQubits) throw Error(ErrorCode::TooManyQubits, "bad register size in header");
  const Eigen::Index dim = Eigen::Index{1} << f.n_qubits;
  for (std::uint64_t i = 0; i < count; ++i) {
    CVector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double re = get_le<double>(in);
      v[k] = Complex(re, get_le<double>(in));
    }
    f.states.push_back(Statevector::from_amplitudes(std::move(v)));
  }
  return f;
}

LogisticResult logistic_baseline(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 std::span<const Split> splits) {
  const auto train = rows_in(splits, Split::Train);
  const auto test = rows_in(splits, Split::Test);
  if (train.empty() || test.empty()) throw Error(ErrorCode::MissingSplit, "logistic baseline needs train and test rows");

  // Standardize with train statistics, dropping constant columns.
  const Eigen::MatrixXd xt = select_rows(features, train);
  const Eigen::VectorXd mean = xt.colwise().mean().transpose();
  const Eigen::VectorXd sd = ((xt.rowwise() - mean.transpose()).array().square().colwise().mean()).sqrt().transpose();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < sd.size(); ++j)
    if (sd[j] > 1e-12) cols.push_back(j);
  const auto design = [&](const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()) + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const Eigen::Index j = cols[c];
        x(r, static_cast<Eigen::Index>(c)) = (features(static_cast<Eigen::Index>(rows[i]), j) - mean[j]) / sd[j];
      }
      x(r, x.cols() - 1) = 1.0;
    }
    return x;
  };
  const Eigen::MatrixXd x = design(train);
  Eigen::VectorXd y(x.rows());
  for (std::size_t i = 0; i < train.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[train[i]];

  const double ridge = 1e-6;
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, ridge);
  penalty[p - 1] = 0.0;  // bias is not penalized

  auto loss = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd z = x * w;
    double l = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      // log(1 + e^z) - y z, stable for either sign of z
      l += std::max(z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i]))) - y[i] * z[i];
    }
    return l * inv_n + 0.5 * w.cwiseProduct(penalty).dot(w);
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  LogisticResult res;
  double f = loss(w);
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd z = x * w;
    Eigen::VectorXd prob(z.size()), weight(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      prob[i] = 1.0 / (1.0 + std::exp(-z[i]));
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd grad = x.transpose() * (prob - y) * inv_n + penalty.cwiseProduct(w);
    res.grad_norm = grad.norm();
    res.iterations = it;
    if (res.grad_norm < 1e-6) break;
    Eigen::MatrixXd h = Eigen::MatrixXd(p, p).setZero();
    h.selfadjointView<Eigen::Lower>().rankUpdate((x.array().colwise() * weight.array().sqrt()).matrix().transpose(), inv_n);
    h.diagonal() += penalty;
    h.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = h.selfadjointView<Eigen::Lower>().ldlt().solve(grad);
    // Backtracking keeps Newton stable on nearly separable data.
    double t = 1.0;
    Eigen::VectorXd next = w - step;
    double fn = loss(next);
    while (fn > f - 1e-4 * t * grad.dot(step) && t > 1e-8) {
      t *= 0.5;
      next = w - t * step;
      fn = loss(next);
    }
    w = next;
    f = fn;
    res.iterations = it + 1;
  }

  auto accuracy = [&](const std::vector<std::size_t>& rows) {
    const Eigen::VectorXd z = design(rows) * w;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) hits += (z[static_cast<Eigen::Index>(i)] >= 0.0 ? 1 : 0) == labels[rows[i]];
    return static_cast<double>(hits) / static_cast<double>(rows.size());
  };
  res.train_accuracy = accuracy(train);
  res.test_accuracy = accuracy(test);
  return res;
}

}  // namespace hqc
