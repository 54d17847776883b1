#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hqc/sim.hpp"

namespace hqc {

enum class DataSource { IrisCSV, MnistIDX, Synthetic };

/// Feature rows with integer class labels. `origin` and `row_id` record where
/// each row came from (file index and position in that file) so splits can
/// follow the canonical MNIST partition after filtering.
struct RawDataset {
  Eigen::MatrixXd features;  // D x N
  std::vector<int> labels;
  DataSource source = DataSource::Synthetic;
  std::vector<int> origin;
  std::vector<int> row_id;

  std::size_t size() const { return labels.size(); }
};

/// UCI iris.data layout: four floats and a class name per line. Classes map
/// to 1, 2, 3 in file order of first appearance (setosa, versicolor,
/// virginica). Blank lines are skipped.
RawDataset load_iris(const std::filesystem::path& path);

/// IDX image and label files. Pixels are scaled to [0, 1]; `origin` is
/// stored on every row.
RawDataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels, int origin = 0);

/// Row-wise concatenation.
RawDataset concat(const RawDataset& a, const RawDataset& b);

enum class BinaryTask { ZeroOrOne, TwoOrSeven, IsEven, IsGreaterThan4, Iris12, Iris23, Iris13 };

std::string_view to_string(BinaryTask task);
BinaryTask parse_binary_task(std::string_view name);

/// Keeps the rows relevant to `task` and relabels them 0/1. Pair tasks map
/// the smaller original class to 0. IsEven labels even digits 1 and
/// IsGreaterThan4 labels digits above four 1.
RawDataset make_binary_task(const RawDataset& raw, BinaryTask task);

enum class Split : std::uint8_t { Train, Val, Test };

std::string_view to_string(Split split);

struct SplitSpec {
  enum class Scheme {
    MnistCanonical,  // test file -> Test, train-file rows >= val_start -> Val
    Fraction,        // per class: round(n * test_fraction) Test, round(n * val_fraction) Val
    PerClassCount,   // per class: test_per_class Test, val_per_class Val
  } scheme = Scheme::Fraction;
  double test_fraction = 1.0 / 3.0;
  double val_fraction = 0.0;
  int test_per_class = 0;
  int val_per_class = 0;
  int val_start = 55000;
};

std::vector<Split> split_labels(std::span<const int> labels, const SplitSpec& spec, std::uint64_t seed);
std::vector<Split> split_dataset(const RawDataset& raw, const SplitSpec& spec, std::uint64_t seed);

std::vector<std::size_t> rows_in(std::span<const Split> splits, Split which);
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);

struct PcaTransform {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // k x N, orthonormal rows, by decreasing variance
  Eigen::VectorXd variance;    // explained variance per component
};

PcaTransform fit_pca(const Eigen::MatrixXd& train_features, int k = 8);
Eigen::MatrixXd apply_pca(const PcaTransform& t, const Eigen::MatrixXd& features);

/// Per-feature affine map of the train rows onto [0, pi/2]; other rows are
/// clipped into the same range.
struct FeatureScaler {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

FeatureScaler fit_scaler(const Eigen::MatrixXd& train_features);
Eigen::MatrixXd apply_scaler(const FeatureScaler& s, const Eigen::MatrixXd& features);

/// cos(x)|0> + sin(x)|1> per feature, first feature on qubit 0.
Statevector encode_sample(std::span<const double> angles);

struct EncodedDataset {
  std::vector<Statevector> states;
  std::vector<int> labels;
  std::vector<Split> splits;

  std::size_t size() const { return states.size(); }
  std::size_t count(Split s) const;
};

/// Rescale using the train rows, then encode every row. Constant train
/// features raise DegenerateFeature.
EncodedDataset rescale_and_encode(const Eigen::MatrixXd& features, std::span<const int> labels,
                                  std::span<const Split> splits);

/// `count` states made of `depth` building blocks on |0...0>. Each block is
/// a ZYZ rotation with uniform angles on every qubit followed by CNOT(i, j)
/// for all i < j in lexicographic order. Sample i draws from its own
/// generator seeded with (seed, i).
std::vector<Statevector> gen_quantum_class(int n_qubits, int depth, int count, std::uint64_t seed);

/// Binary container: "HQCD", u32 version, u32 n_qubits, u64 count, u32 depth,
/// u64 seed, then (re, im) doubles, all little-endian.
struct QuantumClassFile {
  int n_qubits = 0;
  int depth = 0;
  std::uint64_t seed = 0;
  std::vector<Statevector> states;
};

void save_quantum_class(const std::filesystem::path& path, const QuantumClassFile& data);
QuantumClassFile load_quantum_class(const std::filesystem::path& path);

struct LogisticResult {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Binary logistic regression on standardized features, fit on the train
/// rows by Newton's method with a small ridge term (1e-6 per row) until the
/// gradient norm drops below 1e-6. Constant train columns are dropped.
LogisticResult logistic_baseline(const Eigen::MatrixXd& features, std::span<const int> labels,
                                 std::span<const Split> splits);

}  // namespace hqc
