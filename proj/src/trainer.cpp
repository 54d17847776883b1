#include "hqc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hqc/error.hpp"
#include "hqc/grad.hpp"

namespace hqc {

using Json = nlohmann::ordered_json;

std::string_view to_string(InitScheme s) { return s == InitScheme::UniformAngles ? "uniform_angles" : "near_identity"; }

std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::BestValidation: return "best_validation";
    case Selection::BestTest: return "best_test";
    case Selection::Final: return "final";
  }
  return "?";
}

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "uniform_angles") return InitScheme::UniformAngles;
  if (name == "near_identity") return InitScheme::NearIdentity;
  throw Error(ErrorCode::InvalidArgument, "unknown init scheme '" + std::string(name) + "'");
}

Selection parse_selection(std::string_view name) {
  for (Selection s : {Selection::BestValidation, Selection::BestTest, Selection::Final})
    if (to_string(s) == name) return s;
  throw Error(ErrorCode::InvalidArgument, "unknown selection '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (batch_size < 1) fail("batch_size must be at least 1");
  if (!(learning_rate > 0)) fail("learning_rate must be positive");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1)) fail("Adam betas must lie in (0, 1)");
  if (!(epsilon > 0)) fail("epsilon must be positive");
  if (max_iters < 0 || eval_every < 1 || patience < 0) fail("iteration counts out of range");
  if (!(init_range >= 0)) fail("init_range must be non-negative");
}

void set_default_init(TrainConfig& config, GateKind kind) {
  if (family_of(kind) == GateFamily::Simple) {
    config.init_scheme = InitScheme::UniformAngles;
    config.init_range = std::numbers::pi;
  } else {
    config.init_scheme = InitScheme::NearIdentity;
    config.init_range = 0.1;
  }
}

ParamVector init_params(const ClassifierModel& model, InitScheme scheme, double range, std::uint64_t seed) {
  (void)scheme;  // both schemes are uniform draws; they differ only in the default range
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  ParamVector p(model.n_params());
  for (auto& x : p) x = u(rng);
  return p;
}

AdamUpdate adam_step(std::span<const double> params, std::span<const double> grad, const AdamState& state,
                     const TrainConfig& config, int t) {
  if (grad.size() != params.size()) throw Error(ErrorCode::DimensionMismatch, "gradient length differs from params");
  if (t < 1) throw Error(ErrorCode::InvalidArgument, "Adam step count is 1-based");
  const std::size_t n = params.size();
  AdamUpdate out{ParamVector(params.begin(), params.end()), state};
  if (out.state.m.empty()) out.state.m.assign(n, 0.0);
  if (out.state.v.empty()) out.state.v.assign(n, 0.0);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    double& m = out.state.m[i];
    double& v = out.state.v[i];
    m = config.beta1 * m + (1.0 - config.beta1) * grad[i];
    v = config.beta2 * v + (1.0 - config.beta2) * grad[i] * grad[i];
    out.params[i] -= config.learning_rate * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
  }
  return out;
}

double split_accuracy(const ClassifierModel& model, std::span<const double> params, const EncodedDataset& data,
                      Split which) {
  const CircuitExecutor exec(model, params, false);
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.splits[i] != which) continue;
    ++total;
    hits += (exec.expectation(data.states[i]) >= 0.5 ? 1 : 0) == data.labels[i];
  }
  if (total == 0) throw Error(ErrorCode::MissingSplit, "no rows tagged " + std::string(to_string(which)));
  return static_cast<double>(hits) / static_cast<double>(total);
}

double split_cost(const ClassifierModel& model, std::span<const double> params, const EncodedDataset& data,
                  Split which) {
  std::vector<Example> ex;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.splits[i] == which) ex.push_back({&data.states[i], data.labels[i]});
  if (ex.empty()) throw Error(ErrorCode::MissingSplit, "no rows tagged " + std::string(to_string(which)));
  return batch_cost(model, params, ex);
}

namespace {

double subset_accuracy(const CircuitExecutor& exec, const EncodedDataset& data, std::span<const std::size_t> rows) {
  std::size_t hits = 0;
  for (std::size_t i : rows) hits += (exec.expectation(data.states[i]) >= 0.5 ? 1 : 0) == data.labels[i];
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

}  // namespace

TrainReport train(const ClassifierModel& model, const EncodedDataset& data, const TrainConfig& config,
                  std::optional<ParamVector> initial) {
  config.validate();
  const auto train_rows = rows_in(data.splits, Split::Train);
  const auto val_rows = rows_in(data.splits, Split::Val);
  const auto test_rows = rows_in(data.splits, Split::Test);
  if (train_rows.empty()) throw Error(ErrorCode::MissingSplit, "training split is empty");
  if ((config.selection == Selection::BestValidation || config.patience > 0) && val_rows.empty()) {
    throw Error(ErrorCode::MissingSplit, "validation split is required for this selection/patience setting");
  }
  if (config.selection == Selection::BestTest && test_rows.empty()) {
    throw Error(ErrorCode::MissingSplit, "test split is required for best-test selection");
  }

  ParamVector params = initial ? std::move(*initial) : init_params(model, config.init_scheme, config.init_range, config.rng_seed);
  model.check_params(params);

  std::mt19937_64 rng(config.rng_seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order = train_rows;
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;
  std::vector<std::size_t> train_probe(order.begin(),
                                       order.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                           order.size(), static_cast<std::size_t>(config.train_eval_size))));
  std::sort(train_probe.begin(), train_probe.end());

  TrainReport report;
  report.best_params = params;
  double best_score = -1.0;
  int since_best = 0;
  double cost_sum = 0.0;
  int cost_count = 0;
  AdamState adam;
  std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);

  auto evaluate = [&](int iteration) {
    const CircuitExecutor exec(model, params, false);
    CurvePoint pt;
    pt.iteration = iteration;
    if (cost_count > 0) pt.train_cost = cost_sum / cost_count;
    pt.train_acc = subset_accuracy(exec, data, train_probe);
    if (!val_rows.empty()) pt.val_acc = subset_accuracy(exec, data, val_rows);
    if (!test_rows.empty()) pt.test_acc = subset_accuracy(exec, data, test_rows);
    report.curves.push_back(pt);
    cost_sum = 0.0;
    cost_count = 0;

    double score = 0.0;
    switch (config.selection) {
      case Selection::BestValidation: score = pt.val_acc; break;
      case Selection::BestTest: score = pt.test_acc; break;
      case Selection::Final: score = static_cast<double>(iteration); break;
    }
    if (score > best_score) {
      best_score = score;
      since_best = 0;
      report.best_params = params;
      report.steps_to_converge = iteration;
      report.best_val_acc = pt.val_acc;
      report.best_test_acc = pt.test_acc;
    } else {
      ++since_best;
    }
    return config.patience > 0 && since_best >= config.patience;
  };

  evaluate(0);
  std::vector<Example> batch(static_cast<std::size_t>(config.batch_size));
  for (int it = 1; it <= config.max_iters; ++it) {
    for (auto& ex : batch) {
      std::size_t row;
      if (config.sample_with_replacement) {
        row = order[pick(rng)];
      } else {
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        row = order[cursor++];
      }
      ex = {&data.states[row], data.labels[row]};
    }
    const GradientResult g = cost_and_grad(model, params, batch);
    report.iteration_costs.push_back(g.cost);
    cost_sum += g.cost;
    ++cost_count;
    AdamUpdate up = adam_step(params, g.grad, adam, config, it);
    params = std::move(up.params);
    adam = std::move(up.state);
    report.iterations_run = it;
    const bool last = it == config.max_iters;
    if (it % config.eval_every == 0 || last) {
      if (evaluate(it)) break;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

Json config_to_json(const TrainConfig& c) {
  Json j;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  j["max_iters"] = c.max_iters;
  j["eval_every"] = c.eval_every;
  j["patience"] = c.patience;
  j["rng_seed"] = c.rng_seed;
  j["init_scheme"] = to_string(c.init_scheme);
  j["init_range"] = c.init_range;
  j["selection"] = to_string(c.selection);
  j["sample_with_replacement"] = c.sample_with_replacement;
  j["train_eval_size"] = c.train_eval_size;
  return j;
}

TrainConfig config_from_json(const Json& j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.max_iters = j.at("max_iters").get<int>();
  c.eval_every = j.at("eval_every").get<int>();
  c.patience = j.at("patience").get<int>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.init_scheme = parse_init_scheme(j.at("init_scheme").get<std::string>());
  c.init_range = j.at("init_range").get<double>();
  c.selection = parse_selection(j.at("selection").get<std::string>());
  c.sample_with_replacement = j.at("sample_with_replacement").get<bool>();
  c.train_eval_size = j.at("train_eval_size").get<int>();
  return c;
}

std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr const char* kParamsMarker = "@@PARAMS@@";

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  const ClassifierModel& m = ckpt.model;
  m.check_params(ckpt.params);
  Json j;
  j["format_version"] = kCheckpointVersion;
  j["layout"] = to_string(m.layout());
  j["n_qubits"] = m.n_data();
  j["total_qubits"] = m.n_qubits();
  j["gate_kind"] = to_string(m.kind());
  Json wires = Json::array(), flags = Json::array();
  for (const auto& b : m.blocks()) {
    wires.push_back(b.wires.indices());
    flags.push_back(b.cnot_reversed);
  }
  j["wire_table"] = wires;
  j["cnot_reversal_flags"] = flags;
  j["readout_qubit"] = m.readout_qubit();
  j["params"] = kParamsMarker;
  j["task"] = ckpt.task;
  j["data_seed"] = ckpt.data_seed;
  j["train_config"] = config_to_json(ckpt.config);
  Json metrics = Json::object();
  for (const auto& [k, v] : ckpt.metrics) metrics[k] = v;
  j["metrics"] = metrics;

  std::string text = j.dump(2);
  std::string arr = "[";
  for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
    if (!std::isfinite(ckpt.params[i])) throw Error(ErrorCode::InvalidArgument, "non-finite parameter");
    arr += (i ? ", " : "") + format_g17(ckpt.params[i]);
  }
  arr += "]";
  const std::string quoted = std::string("\"") + kParamsMarker + "\"";
  text.replace(text.find(quoted), quoted.size(), arr);
  return text + "\n";
}

Checkpoint checkpoint_from_string(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw Error(ErrorCode::VersionError, "checkpoint format " + std::to_string(version) + ", expected " +
                                               std::to_string(kCheckpointVersion));
    }
    ClassifierModel model = build_model(parse_layout(j.at("layout").get<std::string>()), j.at("n_qubits").get<int>(),
                                        parse_gate_kind(j.at("gate_kind").get<std::string>()));
    const auto& wires = j.at("wire_table");
    const auto& flags = j.at("cnot_reversal_flags");
    bool same = wires.size() == model.blocks().size() && flags.size() == model.blocks().size() &&
                j.at("readout_qubit").get<int>() == model.readout_qubit();
    for (std::size_t i = 0; same && i < model.blocks().size(); ++i) {
      same = wires[i].get<std::vector<int>>() == model.blocks()[i].wires.indices() &&
             flags[i].get<bool>() == model.blocks()[i].cnot_reversed;
    }
    if (!same) throw Error(ErrorCode::ParseError, "checkpoint layout table does not match the rebuilt model");
    ParamVector params = j.at("params").get<std::vector<double>>();
    model.check_params(params);
    std::map<std::string, double> metrics;
    for (const auto& [k, v] : j.at("metrics").items())
      metrics[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    return Checkpoint{std::move(model),    std::move(params),          config_from_json(j.at("train_config")),
                      std::move(metrics), j.at("task").get<std::string>(), j.at("data_seed").get<std::uint64_t>()};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string text = checkpoint_to_string(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace hqc
