#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hqc/data.hpp"
#include "hqc/error.hpp"
#include "test_util.hpp"

namespace hqc {
namespace {

namespace fs = std::filesystem;
using testing::dense_operator;

fs::path iris_path() { return fs::path(HQC_TEST_DATA_DIR) / "iris.data"; }

fs::path mnist_dir() {
  if (const char* env = std::getenv("HQC_DATA_DIR")) return fs::path(env) / "mnist";
  return fs::path(HQC_DEFAULT_DATA_DIR) / "mnist";
}

bool have_mnist() { return fs::exists(mnist_dir() / "train-labels-idx1-ubyte"); }

TEST(Iris, LoadsAllRows) {
  const RawDataset d = load_iris(iris_path());
  ASSERT_EQ(d.size(), 150u);
  EXPECT_EQ(d.features.rows(), 150);
  EXPECT_EQ(d.features.cols(), 4);
  std::map<int, int> counts;
  for (int l : d.labels) ++counts[l];
  EXPECT_EQ(counts, (std::map<int, int>{{1, 50}, {2, 50}, {3, 50}}));
  EXPECT_DOUBLE_EQ(d.features(0, 0), 5.1);
  EXPECT_DOUBLE_EQ(d.features(149, 3), 1.8);
}

TEST(Iris, MalformedLineIsParseError) {
  const fs::path p = fs::temp_directory_path() / "hqc_bad_iris.data";
  std::ofstream(p) << "5.1,3.5,1.4,0.2,Iris-setosa\n5.1,abc,1.4\n";
  try {
    load_iris(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Iris, BinaryTasks) {
  const RawDataset d = load_iris(iris_path());
  const RawDataset t12 = make_binary_task(d, BinaryTask::Iris12);
  ASSERT_EQ(t12.size(), 100u);
  EXPECT_EQ(t12.labels.front(), 0);
  EXPECT_EQ(t12.labels.back(), 1);
  const RawDataset t23 = make_binary_task(d, BinaryTask::Iris23);
  EXPECT_EQ(t23.size(), 100u);
  EXPECT_EQ(std::count(t23.labels.begin(), t23.labels.end(), 1), 50);
  EXPECT_DOUBLE_EQ(t23.features(0, 0), d.features(50, 0));
}

TEST(Mnist, MatchesIndependentReader) {
  if (!have_mnist()) GTEST_SKIP() << "MNIST not found under " << mnist_dir();
  std::ifstream raw(mnist_dir() / "train-labels-idx1-ubyte", std::ios::binary);
  raw.seekg(8);
  const int first_label = raw.get();
  EXPECT_EQ(first_label, 5);

  const RawDataset train = load_mnist(mnist_dir() / "train-images-idx3-ubyte", mnist_dir() / "train-labels-idx1-ubyte", 0);
  const RawDataset test = load_mnist(mnist_dir() / "t10k-images-idx3-ubyte", mnist_dir() / "t10k-labels-idx1-ubyte", 1);
  const RawDataset all = concat(train, test);
  ASSERT_EQ(all.size(), 70000u);
  EXPECT_EQ(all.features.cols(), 784);
  EXPECT_EQ(all.labels[0], first_label);
  EXPECT_GE(all.features.minCoeff(), 0.0);
  EXPECT_LE(all.features.maxCoeff(), 1.0);

  // image pixels start at byte 16 of the file
  std::ifstream img(mnist_dir() / "train-images-idx3-ubyte", std::ios::binary);
  img.seekg(16 + 14 * 28 + 14);
  EXPECT_DOUBLE_EQ(all.features(0, 14 * 28 + 14), img.get() / 255.0);

  const auto splits = split_dataset(all, SplitSpec{.scheme = SplitSpec::Scheme::MnistCanonical}, 0);
  EXPECT_EQ(rows_in(splits, Split::Train).size(), 55000u);
  EXPECT_EQ(rows_in(splits, Split::Val).size(), 5000u);
  EXPECT_EQ(rows_in(splits, Split::Test).size(), 10000u);

  const RawDataset gt4 = make_binary_task(all, BinaryTask::IsGreaterThan4);
  EXPECT_EQ(gt4.size(), 70000u);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(gt4.labels[i], all.labels[i] > 4 ? 1 : 0);
  const RawDataset even = make_binary_task(all, BinaryTask::IsEven);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(even.labels[i], all.labels[i] % 2 == 0 ? 1 : 0);
}

TEST(Mnist, BadMagicAndTruncation) {
  const fs::path dir = fs::temp_directory_path();
  const fs::path labels = dir / "hqc_labels", images = dir / "hqc_images";
  {
    std::ofstream l(labels, std::ios::binary);
    const unsigned char hdr[] = {0, 0, 8, 1, 0, 0, 0, 2, 3, 4};
    l.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    std::ofstream im(images, std::ios::binary);
    const unsigned char ih[] = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 1, 2, 3};
    im.write(reinterpret_cast<const char*>(ih), sizeof ih);
  }
  try {
    load_mnist(images, labels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncatedFile);
  }
  try {
    load_mnist(images, images);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MagicMismatch);
  }
}

TEST(Pca, AxisAlignedData) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(500, 4);
  for (int i = 0; i < 500; ++i) x.row(i) << 0.5 * g(rng), 0.01 * g(rng), 3.0 * g(rng), 0.1 * g(rng);
  const PcaTransform t = fit_pca(x, 2);
  ASSERT_EQ(t.components.rows(), 2);
  EXPECT_NEAR(t.components(0, 2), 1.0, 1e-3);
  EXPECT_NEAR(t.components(1, 0), 1.0, 1e-3);
  EXPECT_GT(t.variance[0], t.variance[1]);
}

TEST(Pca, CapturesMoreVarianceThanRandomProjections) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(20, 12);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 12; ++j) x(i, j) = g(rng) * (1.0 + j);
  const int k = 3;
  const PcaTransform t = fit_pca(x, k);

  const Eigen::MatrixXd gram = t.components * t.components.transpose();
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10);

  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  auto captured = [&](const Eigen::MatrixXd& w) { return (centered * w.transpose()).squaredNorm(); };
  const double best = captured(t.components);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::MatrixXd a(12, k);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd q = (qr.householderQ() * Eigen::MatrixXd::Identity(12, k)).transpose();
    ASSERT_LE(captured(q), best * (1 + 1e-12));
  }

  const Eigen::MatrixXd proj = apply_pca(t, x);
  EXPECT_LT((proj - centered * t.components.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pca, RankDeficientRaises) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 4);
  x.col(0).setLinSpaced(10, 0.0, 1.0);
  EXPECT_THROW(fit_pca(x, 3), Error);
}

TEST(Encoding, KnownAngles) {
  const double a0[] = {0.0};
  EXPECT_NEAR(std::abs(encode_sample(a0)[0] - Complex(1.0)), 0.0, 1e-15);
  const double a1[] = {std::numbers::pi / 2};
  EXPECT_NEAR(std::abs(encode_sample(a1)[1] - Complex(1.0)), 0.0, 1e-15);
  const double a2[] = {std::numbers::pi / 4};
  EXPECT_NEAR(encode_sample(a2)[0].real(), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(encode_sample(a2)[1].real(), std::sqrt(0.5), 1e-15);
  // qubit 0 is the most significant bit
  const double a3[] = {std::numbers::pi / 2, 0.0};
  EXPECT_NEAR(std::abs(encode_sample(a3)[2]), 1.0, 1e-15);
}

TEST(Encoding, ScalerMapsTrainRangeAndClips) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 10, 1, 20, 2, 30, 5, -100;
  const FeatureScaler s = fit_scaler(x.topRows(3));
  const Eigen::MatrixXd y = apply_scaler(s, x);
  EXPECT_NEAR(y(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(y(2, 0), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(y(1, 1), std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(y(3, 0), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(y(3, 1), 0.0, 1e-15);

  Eigen::MatrixXd flat(3, 1);
  flat << 2, 2, 2;
  EXPECT_THROW(fit_scaler(flat), Error);
}

TEST(Splits, FractionSizesAndStratification) {
  std::vector<int> iris(100);
  for (int i = 0; i < 100; ++i) iris[static_cast<std::size_t>(i)] = i < 50 ? 0 : 1;
  const auto s = split_labels(iris, SplitSpec{}, 3);
  EXPECT_EQ(rows_in(s, Split::Test).size(), 34u);
  EXPECT_EQ(rows_in(s, Split::Val).size(), 0u);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> labels;
    std::map<int, int> n;
    for (int i = 0; i < 300; ++i) {
      const int l = static_cast<int>(rng() % 3);
      labels.push_back(l);
      ++n[l];
    }
    SplitSpec spec;
    spec.test_fraction = 0.3;
    spec.val_fraction = 0.1;
    const auto sp = split_labels(labels, spec, rng());
    std::map<int, int> nt, nv;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (sp[i] == Split::Test) ++nt[labels[i]];
      if (sp[i] == Split::Val) ++nv[labels[i]];
    }
    for (auto [l, c] : n) {
      EXPECT_LE(std::abs(nt[l] - 0.3 * c), 1.0);
      EXPECT_LE(std::abs(nv[l] - 0.1 * c), 1.0);
    }
  }
}

TEST(Splits, PerClassCountsAndDeterminism) {
  std::vector<int> labels(10000);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < 5000 ? 0 : 1;
  SplitSpec spec;
  spec.scheme = SplitSpec::Scheme::PerClassCount;
  spec.test_per_class = 1000;
  spec.val_per_class = 500;
  const auto a = split_labels(labels, spec, 9);
  EXPECT_EQ(rows_in(a, Split::Test).size(), 2000u);
  EXPECT_EQ(rows_in(a, Split::Val).size(), 1000u);
  EXPECT_EQ(rows_in(a, Split::Train).size(), 7000u);
  EXPECT_EQ(a, split_labels(labels, spec, 9));
  EXPECT_NE(a, split_labels(labels, spec, 10));
}

// Independent rebuild of one generated sample with dense matrices.
Statevector generator_oracle(int n, int depth, std::uint64_t seed, std::uint32_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  auto rz = [](double t) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -t / 2);
    m(1, 1) = std::polar(1.0, t / 2);
    return m;
  };
  auto ry = [](double t) {
    CMatrix m(2, 2);
    m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
    return m;
  };
  CMatrix cx = CMatrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  v[0] = 1.0;
  for (int b = 0; b < depth; ++b) {
    for (int q = 0; q < n; ++q) {
      const double z1 = angle(rng), y = angle(rng), z2 = angle(rng);
      v = dense_operator(rz(z1) * ry(y) * rz(z2), {q}, n) * v;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) v = dense_operator(cx, {i, j}, n) * v;
  }
  return Statevector::from_amplitudes(v);
}

TEST(QuantumData, MatchesDenseOracle) {
  for (int depth : {1, 2, 3}) {
    const auto states = gen_quantum_class(4, depth, 5, 77 + depth);
    for (std::uint32_t i = 0; i < 5; ++i) {
      const Statevector ref = generator_oracle(4, depth, 77 + depth, i);
      EXPECT_LT((states[i].amps() - ref.amps()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_NEAR(states[i].norm_squared(), 1.0, 1e-12);
    }
  }
}

TEST(QuantumData, DeterministicAndSeedSensitive) {
  const auto a = gen_quantum_class(8, 2, 10, 5);
  const auto b = gen_quantum_class(8, 2, 10, 5);
  const auto c = gen_quantum_class(8, 2, 10, 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].amps(), b[i].amps());
    EXPECT_GT((a[i].amps() - c[i].amps()).norm(), 1e-3);
  }
  // a prefix of a larger draw equals the smaller draw
  const auto d = gen_quantum_class(8, 2, 3, 5);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d[i].amps(), a[i].amps());
}

TEST(QuantumData, FileRoundTrip) {
  const fs::path p = fs::temp_directory_path() / "hqc_class.bin";
  QuantumClassFile f{.n_qubits = 3, .depth = 2, .seed = 0x123456789abcULL, .states = gen_quantum_class(3, 2, 4, 11)};
  save_quantum_class(p, f);
  const QuantumClassFile g = load_quantum_class(p);
  EXPECT_EQ(g.n_qubits, 3);
  EXPECT_EQ(g.depth, 2);
  EXPECT_EQ(g.seed, f.seed);
  ASSERT_EQ(g.states.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g.states[i].amps(), f.states[i].amps());

  const auto size = fs::file_size(p);
  fs::resize_file(p, size - 5);
  try {
    load_quantum_class(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncatedFile);
  }
  std::ofstream(p, std::ios::binary) << "NOPE0000000000000000000000000000";
  try {
    load_quantum_class(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MagicMismatch);
  }
}

TEST(Logistic, SeparableDataIsPerfect) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(200, 3);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    const int l = i % 2;
    y[static_cast<std::size_t>(i)] = l;
    x.row(i) << (l ? 3.0 : -3.0) + 0.3 * g(rng), g(rng), 4.0;  // last column is constant
  }
  std::vector<Split> s(200, Split::Train);
  for (int i = 150; i < 200; ++i) s[static_cast<std::size_t>(i)] = Split::Test;
  const LogisticResult r = logistic_baseline(x, y, s);
  EXPECT_DOUBLE_EQ(r.train_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.test_accuracy, 1.0);
}

TEST(Logistic, MatchesBayesRateOnOverlappingClasses) {
  // two unit Gaussians at +-0.5: the optimal linear rule errs with Phi(-0.5) ~ 0.3085
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const int n = 20000;
  Eigen::MatrixXd x(n, 1);
  std::vector<int> y(n);
  std::vector<Split> s(n, Split::Train);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2;
    x(i, 0) = (i % 2 ? 0.5 : -0.5) + g(rng);
    if (i >= n / 2) s[static_cast<std::size_t>(i)] = Split::Test;
  }
  const LogisticResult r = logistic_baseline(x, y, s);
  EXPECT_NEAR(r.test_accuracy, 1.0 - 0.5 * std::erfc(0.5 / std::sqrt(2.0)), 0.015);
  EXPECT_LT(r.grad_norm, 1e-6);
}

}  // namespace
}  // namespace hqc
