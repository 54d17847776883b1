#pragma once

#include <span>
#include <vector>

#include "hqc/topology.hpp"

namespace hqc {

/// One labelled input. The state is borrowed from the owning dataset.
struct Example {
  const Statevector* state = nullptr;
  int label = 0;
};

struct GradientResult {
  std::vector<double> grad;  // aligned with the model's ParamVector
  double cost = 0.0;
};

/// Mean squared error between readout expectations and labels over `batch`
/// and its exact gradient. Samples are reduced in the order given.
GradientResult cost_and_grad(const ClassifierModel& model, std::span<const double> params,
                             std::span<const Example> batch);

double batch_cost(const ClassifierModel& model, std::span<const double> params, std::span<const Example> batch);

/// Central differences of the cost, evaluated with the reference simulator
/// path. O(P) cost evaluations; meant as a test oracle.
std::vector<double> finite_diff_grad(const ClassifierModel& model, std::span<const double> params,
                                     std::span<const Example> batch, double step = 1e-6);

}  // namespace hqc
