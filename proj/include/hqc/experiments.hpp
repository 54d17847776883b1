#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/data.hpp"
#include "hqc/trainer.hpp"

namespace hqc {

enum class TaskId { Iris12, Iris13, Iris23, Mnist01, Mnist27, MnistEven, MnistGt4, Quantum1v10, Quantum3v10, Quantum2v5 };

std::string_view to_string(TaskId task);
TaskId parse_task(std::string_view name);
std::vector<TaskId> all_tasks();

enum class TaskFamily { Iris, Mnist, Quantum };
TaskFamily task_family(TaskId task);

struct ClassifierSpec {
  Layout layout = Layout::TTN;
  bool hybrid = false;  // TTN pre-training, then MERA from hybrid_init
  GateFamily family = GateFamily::General;
  Field field = Field::Real;

  GateKind kind() const { return make_kind(family, field); }
  /// e.g. "ttn/simple/real", "hybrid/general/complex"
  std::string name() const;
};

/// Throws InvalidArgument for hybrid with simple gates.
void validate_spec(const ClassifierSpec& spec);

/// Dataset locations. MNIST IDX files live under <root>/mnist; the iris
/// file defaults to <root>/iris.data.
struct DataPaths {
  std::filesystem::path root;
  std::filesystem::path iris;

  /// Root from $HQC_DATA_DIR, falling back to `fallback`.
  static DataPaths from_env(const std::filesystem::path& fallback);
};

/// Loads raw sources once and builds encoded task datasets on demand.
class DataRepository {
 public:
  explicit DataRepository(DataPaths paths) : paths_(std::move(paths)) {}

  const DataPaths& paths() const { return paths_; }
  const RawDataset& iris();
  /// Train file rows carry origin 0, test file rows origin 1.
  const RawDataset& mnist();

  /// Binary task with its splits, PCA (MNIST) and encoding applied.
  /// Iris: stratified 1/3 test per class, no validation. MNIST: 55000 /
  /// 5000 / 10000 canonical split, 8 PCA components fit on train rows.
  /// Quantum: 5000 states per class, 1000 test and 500 validation per class.
  /// `seed` drives the iris split and the quantum generator.
  EncodedDataset task(TaskId task, std::uint64_t seed);

  /// Raw features (PCA-8 or full pixels) and splits for the baseline.
  struct Features {
    Eigen::MatrixXd x;
    std::vector<int> labels;
    std::vector<Split> splits;
  };
  Features classical_features(TaskId task, bool pca, std::uint64_t seed);

 private:
  DataPaths paths_;
  std::optional<RawDataset> iris_;
  std::optional<RawDataset> mnist_;
};

int task_qubits(TaskId task);

/// Seed used to generate quantum class `depth` from a dataset seed.
std::uint64_t quantum_class_seed(std::uint64_t data_seed, int depth);

/// Depth pair of a quantum task, e.g. {1, 10}.
std::pair<int, int> quantum_depths(TaskId task);

/// Protocol defaults per task family (batch, schedule, selection), with the
/// init scheme chosen for the gate kind.
TrainConfig default_config(TaskId task, GateKind kind);

struct SeedRun {
  std::uint64_t seed = 0;
  double test_acc = 0.0;
  double val_acc = 0.0;
  double test_cost = 0.0;
  int steps = 0;       // total steps to the selected parameters
  int pre_steps = 0;   // hybrid only: TTN pre-training steps
  int post_steps = 0;  // hybrid only: MERA steps after initialization
  double wall_seconds = 0.0;
  ParamVector params;
  TrainReport report;
};

struct ExperimentResult {
  TaskId task = TaskId::Iris12;
  ClassifierSpec spec;
  TrainConfig config;
  std::vector<SeedRun> runs;
  double mean_acc = 0.0;
  double std_acc = 0.0;  // n - 1 denominator; 0 for a single seed
  double wall_seconds = 0.0;
};

double mean_of(const std::vector<double>& xs);
double sample_std(const std::vector<double>& xs);

using ProgressFn = std::function<void(const std::string&)>;

/// One training run per seed; seed k sets both the init and batch order.
ExperimentResult run_experiment(TaskId task, const EncodedDataset& data, const ClassifierSpec& spec,
                                const std::vector<std::uint64_t>& seeds, const TrainConfig& config,
                                const ProgressFn& progress = {});

/// Model for a spec on a task (the MERA for hybrid specs).
ClassifierModel model_for(TaskId task, const ClassifierSpec& spec);

std::string result_to_json(const ExperimentResult& result);

/// Learning curves of every seed as CSV: seed,iteration,train_cost,...
std::string curves_csv(const ExperimentResult& result);

struct NoisePoint {
  double noise = 0.0;
  double mean_acc = 0.0;
  double std_acc = 0.0;
  double exact_acc = 0.0;  // thresholded noisy expectation, no shot noise
};

/// For each noise level, each test state's outcome-0 probability under the
/// noisy circuit is computed once; each repeat then draws `shots` binomial
/// samples per state and takes the majority vote.
std::vector<NoisePoint> noise_sweep(const ClassifierModel& model, std::span<const double> params,
                                    std::span<const Statevector> states, std::span<const int> labels,
                                    double noise_max, double noise_step, std::int64_t shots, int repeats,
                                    std::uint64_t seed);

std::string noise_csv(const std::vector<NoisePoint>& points);

struct EntropyHistogram {
  int depth = 0;
  std::vector<double> entropies;
  std::vector<int> counts;  // `bins` equal bins over [0, n/2]
};

std::vector<EntropyHistogram> entropy_histograms(const std::vector<int>& depths, int n_qubits, int count,
                                                 std::uint64_t seed, int bins);

/// Columns: bin_lo, bin_hi, then one count column per class.
std::string histogram_csv(const std::vector<EntropyHistogram>& hists, int n_qubits);

}  // namespace hqc
