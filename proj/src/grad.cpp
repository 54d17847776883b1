#include "hqc/grad.hpp"

#include "hqc/error.hpp"

namespace hqc {

namespace {

void check_batch(std::span<const Example> batch) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "batch has no examples");
  for (const auto& ex : batch) {
    if (ex.label != 0 && ex.label != 1) throw Error(ErrorCode::LabelOutOfRange, "labels must be 0 or 1");
  }
}

double reference_cost(const ClassifierModel& model, std::span<const double> params, std::span<const Example> batch) {
  double cost = 0.0;
  for (const auto& ex : batch) {
    const double r = predict_expectation_reference(model, params, *ex.state) - ex.label;
    cost += r * r;
  }
  return cost / static_cast<double>(batch.size());
}

}  // namespace

GradientResult cost_and_grad(const ClassifierModel& model, std::span<const double> params,
                             std::span<const Example> batch) {
  check_batch(batch);
  CircuitExecutor exec(model, params, true);
  const double inv_d = 1.0 / static_cast<double>(batch.size());
  GradientResult out;
  out.grad.assign(model.n_params(), 0.0);
  for (const auto& ex : batch) {
    exec.accumulate(*ex.state, [&](double f) {
      const double r = f - ex.label;
      out.cost += r * r;
      return 2.0 * r * inv_d;
    });
  }
  out.cost *= inv_d;
  exec.finish_gradient(out.grad);
  return out;
}

double batch_cost(const ClassifierModel& model, std::span<const double> params, std::span<const Example> batch) {
  check_batch(batch);
  const CircuitExecutor exec(model, params, false);
  double cost = 0.0;
  for (const auto& ex : batch) {
    const double r = exec.expectation(*ex.state) - ex.label;
    cost += r * r;
  }
  return cost / static_cast<double>(batch.size());
}

std::vector<double> finite_diff_grad(const ClassifierModel& model, std::span<const double> params,
                                     std::span<const Example> batch, double step) {
  check_batch(batch);
  model.check_params(params);
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double orig = p[k];
    p[k] = orig + step;
    const double up = reference_cost(model, p, batch);
    p[k] = orig - step;
    const double down = reference_cost(model, p, batch);
    p[k] = orig;
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace hqc
