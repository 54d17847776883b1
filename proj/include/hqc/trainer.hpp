#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/data.hpp"
#include "hqc/topology.hpp"

namespace hqc {

enum class InitScheme { UniformAngles, NearIdentity };

/// Which parameters train() hands back.
///  BestValidation: highest validation accuracy (first occurrence).
///  BestTest: highest test accuracy; this mirrors the quantum-data protocol
///    and is not a sound model-selection rule in general.
///  Final: the parameters after the last step.
enum class Selection { BestValidation, BestTest, Final };

std::string_view to_string(InitScheme s);
std::string_view to_string(Selection s);
InitScheme parse_init_scheme(std::string_view name);
Selection parse_selection(std::string_view name);

struct TrainConfig {
  int batch_size = 20;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iters = 20000;
  int eval_every = 10;   // batches between evaluations
  int patience = 30;     // evaluations without improvement; 0 disables
  std::uint64_t rng_seed = 0;
  InitScheme init_scheme = InitScheme::NearIdentity;
  double init_range = 0.1;  // half-width of the uniform init draw
  Selection selection = Selection::BestValidation;
  bool sample_with_replacement = false;
  int train_eval_size = 2000;  // train rows scored at each evaluation

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Default init for a kind: uniform angles on (-pi, pi) for simple blocks,
/// near-identity generator coefficients on (-0.1, 0.1) otherwise.
void set_default_init(TrainConfig& config, GateKind kind);

ParamVector init_params(const ClassifierModel& model, InitScheme scheme, double range, std::uint64_t seed);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

struct AdamUpdate {
  ParamVector params;
  AdamState state;
};

/// One Adam step at 1-based step count t. Descends: theta - eta * m_hat /
/// (sqrt(v_hat) + eps). An empty state is treated as zero moments.
AdamUpdate adam_step(std::span<const double> params, std::span<const double> grad, const AdamState& state,
                     const TrainConfig& config, int t);

struct CurvePoint {
  int iteration = 0;
  double train_cost = std::numeric_limits<double>::quiet_NaN();  // mean batch cost since the last point
  double train_acc = std::numeric_limits<double>::quiet_NaN();
  double val_acc = std::numeric_limits<double>::quiet_NaN();
  double test_acc = std::numeric_limits<double>::quiet_NaN();
};

struct TrainReport {
  std::vector<CurvePoint> curves;
  std::vector<double> iteration_costs;  // batch cost at every step
  ParamVector best_params;
  int steps_to_converge = 0;  // steps taken when best_params were recorded
  int iterations_run = 0;
  double best_val_acc = std::numeric_limits<double>::quiet_NaN();
  double best_test_acc = std::numeric_limits<double>::quiet_NaN();
};

/// Accuracy of thresholded predictions over the rows tagged `which`.
double split_accuracy(const ClassifierModel& model, std::span<const double> params, const EncodedDataset& data,
                      Split which);

/// Mean squared error over the rows tagged `which`.
double split_cost(const ClassifierModel& model, std::span<const double> params, const EncodedDataset& data,
                  Split which);

/// Minibatch Adam on the mean squared error. Starts from `initial` when
/// given, otherwise from init_params with the config's scheme and seed.
TrainReport train(const ClassifierModel& model, const EncodedDataset& data, const TrainConfig& config,
                  std::optional<ParamVector> initial = std::nullopt);

struct Checkpoint {
  ClassifierModel model;
  ParamVector params;
  TrainConfig config;
  std::map<std::string, double> metrics;
  std::string task;            // optional task id the model was trained on
  std::uint64_t data_seed = 0; // seed of the task's split / generator
};

inline constexpr int kCheckpointVersion = 1;

/// JSON document with the model layout, parameters printed with 17
/// significant digits, the training config and scalar metrics.
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hqc
