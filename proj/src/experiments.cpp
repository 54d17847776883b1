#include "hqc/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hqc/error.hpp"

namespace hqc {

using Json = nlohmann::ordered_json;

namespace {

struct TaskEntry {
  TaskId id;
  const char* name;
};

constexpr TaskEntry kTasks[] = {
    {TaskId::Iris12, "iris12"},        {TaskId::Iris13, "iris13"},       {TaskId::Iris23, "iris23"},
    {TaskId::Mnist01, "mnist01"},      {TaskId::Mnist27, "mnist27"},     {TaskId::MnistEven, "mnist_even"},
    {TaskId::MnistGt4, "mnist_gt4"},   {TaskId::Quantum1v10, "q1v10"},   {TaskId::Quantum3v10, "q3v10"},
    {TaskId::Quantum2v5, "q2v5"},
};

BinaryTask binary_task(TaskId t) {
  switch (t) {
    case TaskId::Iris12: return BinaryTask::Iris12;
    case TaskId::Iris13: return BinaryTask::Iris13;
    case TaskId::Iris23: return BinaryTask::Iris23;
    case TaskId::Mnist01: return BinaryTask::ZeroOrOne;
    case TaskId::Mnist27: return BinaryTask::TwoOrSeven;
    case TaskId::MnistEven: return BinaryTask::IsEven;
    case TaskId::MnistGt4: return BinaryTask::IsGreaterThan4;
    default: throw Error(ErrorCode::InvalidArgument, "quantum tasks have no classical source");
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(TaskId task) {
  for (const auto& e : kTasks)
    if (e.id == task) return e.name;
  return "?";
}

TaskId parse_task(std::string_view name) {
  for (const auto& e : kTasks)
    if (name == e.name) return e.id;
  throw Error(ErrorCode::InvalidArgument, "unknown task '" + std::string(name) + "'");
}

std::vector<TaskId> all_tasks() {
  std::vector<TaskId> out;
  for (const auto& e : kTasks) out.push_back(e.id);
  return out;
}

TaskFamily task_family(TaskId task) {
  switch (task) {
    case TaskId::Iris12:
    case TaskId::Iris13:
    case TaskId::Iris23: return TaskFamily::Iris;
    case TaskId::Mnist01:
    case TaskId::Mnist27:
    case TaskId::MnistEven:
    case TaskId::MnistGt4: return TaskFamily::Mnist;
    default: return TaskFamily::Quantum;
  }
}

std::string ClassifierSpec::name() const {
  const std::string l = hybrid ? "hybrid" : std::string(to_string(layout));
  return l + "/" + std::string(to_string(family)) + "/" + std::string(to_string(field));
}

void validate_spec(const ClassifierSpec& spec) {
  if (spec.hybrid && spec.family == GateFamily::Simple) {
    throw Error(ErrorCode::InvalidArgument, "hybrid initialization needs general or ancilla gates");
  }
}

DataPaths DataPaths::from_env(const std::filesystem::path& fallback) {
  DataPaths p;
  const char* env = std::getenv("HQC_DATA_DIR");
  p.root = env && *env ? std::filesystem::path(env) : fallback;
  p.iris = p.root / "iris.data";
  return p;
}

const RawDataset& DataRepository::iris() {
  if (!iris_) iris_ = load_iris(paths_.iris);
  return *iris_;
}

const RawDataset& DataRepository::mnist() {
  if (!mnist_) {
    const auto dir = paths_.root / "mnist";
    mnist_ = concat(load_mnist(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte", 0),
                    load_mnist(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte", 1));
  }
  return *mnist_;
}

int task_qubits(TaskId task) { return task_family(task) == TaskFamily::Iris ? 4 : 8; }

std::uint64_t quantum_class_seed(std::uint64_t data_seed, int depth) {
  return data_seed * 1000003ULL + static_cast<std::uint64_t>(depth);
}

std::pair<int, int> quantum_depths(TaskId task) {
  switch (task) {
    case TaskId::Quantum1v10: return {1, 10};
    case TaskId::Quantum3v10: return {3, 10};
    case TaskId::Quantum2v5: return {2, 5};
    default: throw Error(ErrorCode::InvalidArgument, "not a quantum task");
  }
}

DataRepository::Features DataRepository::classical_features(TaskId task, bool pca, std::uint64_t seed) {
  Features f;
  if (task_family(task) == TaskFamily::Iris) {
    const RawDataset raw = make_binary_task(iris(), binary_task(task));
    SplitSpec spec;
    spec.scheme = SplitSpec::Scheme::Fraction;
    f.splits = split_dataset(raw, spec, seed);
    f.x = raw.features;
    f.labels = raw.labels;
    return f;
  }
  if (task_family(task) != TaskFamily::Mnist) throw Error(ErrorCode::InvalidArgument, "quantum tasks have no features");
  RawDataset raw = make_binary_task(mnist(), binary_task(task));
  SplitSpec spec;
  spec.scheme = SplitSpec::Scheme::MnistCanonical;
  f.splits = split_dataset(raw, spec, seed);
  f.labels = std::move(raw.labels);
  if (pca) {
    const PcaTransform t = fit_pca(select_rows(raw.features, rows_in(f.splits, Split::Train)), 8);
    f.x = apply_pca(t, raw.features);
  } else {
    f.x = std::move(raw.features);
  }
  return f;
}

EncodedDataset DataRepository::task(TaskId task, std::uint64_t seed) {
  if (task_family(task) == TaskFamily::Quantum) {
    const auto [a, b] = quantum_depths(task);
    const int per_class = 5000;
    EncodedDataset out;
    out.states = gen_quantum_class(8, a, per_class, quantum_class_seed(seed, a));
    auto second = gen_quantum_class(8, b, per_class, quantum_class_seed(seed, b));
    out.states.insert(out.states.end(), std::make_move_iterator(second.begin()), std::make_move_iterator(second.end()));
    out.labels.assign(per_class, 0);
    out.labels.resize(2 * per_class, 1);
    SplitSpec spec;
    spec.scheme = SplitSpec::Scheme::PerClassCount;
    spec.test_per_class = 1000;
    spec.val_per_class = 500;
    out.splits = split_labels(out.labels, spec, seed);
    return out;
  }
  Features f = classical_features(task, true, seed);
  return rescale_and_encode(f.x, f.labels, f.splits);
}

TrainConfig default_config(TaskId task, GateKind kind) {
  TrainConfig c;
  switch (task_family(task)) {
    case TaskFamily::Iris:
      c.batch_size = 10;
      c.learning_rate = 0.05;
      c.max_iters = 300;
      c.eval_every = 10;
      c.patience = 0;
      c.selection = Selection::Final;
      break;
    case TaskFamily::Mnist:
      c.batch_size = 20;
      c.learning_rate = 0.01;
      c.max_iters = 20000;
      c.eval_every = 10;
      c.patience = 30;
      c.selection = Selection::BestValidation;
      break;
    case TaskFamily::Quantum:
      c.batch_size = 40;
      c.learning_rate = 0.01;
      c.max_iters = 4000;
      c.eval_every = 50;
      c.patience = 0;
      c.selection = Selection::BestTest;
      break;
  }
  set_default_init(c, kind);
  return c;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

ClassifierModel model_for(TaskId task, const ClassifierSpec& spec) {
  validate_spec(spec);
  const Layout layout = spec.hybrid ? Layout::MERA : spec.layout;
  return build_model(layout, task_qubits(task), spec.kind());
}

ExperimentResult run_experiment(TaskId task, const EncodedDataset& data, const ClassifierSpec& spec,
                                const std::vector<std::uint64_t>& seeds, const TrainConfig& config,
                                const ProgressFn& progress) {
  validate_spec(spec);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.task = task;
  res.spec = spec;
  res.config = config;
  const ClassifierModel model = model_for(task, spec);
  std::vector<double> accs;
  for (std::uint64_t seed : seeds) {
    const auto ts = std::chrono::steady_clock::now();
    TrainConfig c = config;
    c.rng_seed = seed;
    SeedRun run;
    run.seed = seed;
    if (spec.hybrid) {
      const ClassifierModel ttn = build_ttn(task_qubits(task), spec.kind());
      const TrainReport pre = train(ttn, data, c);
      ModelWithParams init = hybrid_init(ttn, pre.best_params);
      run.report = train(init.model, data, c, std::move(init.params));
      run.pre_steps = pre.steps_to_converge;
      run.post_steps = run.report.steps_to_converge;
      run.steps = run.pre_steps + run.post_steps;
    } else {
      run.report = train(model, data, c);
      run.steps = run.report.steps_to_converge;
    }
    run.params = run.report.best_params;
    run.test_acc = split_accuracy(model, run.params, data, Split::Test);
    run.test_cost = split_cost(model, run.params, data, Split::Test);
    run.val_acc = data.count(Split::Val) ? split_accuracy(model, run.params, data, Split::Val)
                                         : std::numeric_limits<double>::quiet_NaN();
    run.wall_seconds = seconds_since(ts);
    accs.push_back(run.test_acc);
    if (progress) {
      std::ostringstream msg;
      msg << to_string(task) << " " << spec.name() << " seed " << seed << ": test " << run.test_acc * 100 << "% after "
          << run.steps << " steps (" << run.wall_seconds << " s)";
      progress(msg.str());
    }
    res.runs.push_back(std::move(run));
  }
  res.mean_acc = mean_of(accs);
  res.std_acc = sample_std(accs);
  res.wall_seconds = seconds_since(t0);
  return res;
}

std::string result_to_json(const ExperimentResult& r) {
  Json j;
  j["schema_version"] = 1;
  j["task"] = to_string(r.task);
  j["classifier"] = r.spec.name();
  j["layout"] = r.spec.hybrid ? "hybrid" : to_string(r.spec.layout);
  j["family"] = to_string(r.spec.family);
  j["field"] = to_string(r.spec.field);
  Json cfg;
  cfg["batch_size"] = r.config.batch_size;
  cfg["learning_rate"] = r.config.learning_rate;
  cfg["max_iters"] = r.config.max_iters;
  cfg["eval_every"] = r.config.eval_every;
  cfg["patience"] = r.config.patience;
  cfg["selection"] = to_string(r.config.selection);
  cfg["init_scheme"] = to_string(r.config.init_scheme);
  cfg["init_range"] = r.config.init_range;
  j["config"] = cfg;
  Json runs = Json::array();
  std::vector<double> accs;
  for (const auto& run : r.runs) {
    Json x;
    x["seed"] = run.seed;
    x["test_accuracy"] = run.test_acc * 100.0;
    x["val_accuracy"] = run.val_acc * 100.0;
    x["test_cost"] = run.test_cost;
    x["steps"] = run.steps;
    if (r.spec.hybrid) {
      x["pre_steps"] = run.pre_steps;
      x["post_steps"] = run.post_steps;
    }
    x["wall_seconds"] = run.wall_seconds;
    runs.push_back(x);
  }
  j["runs"] = runs;
  j["per_seed_accuracy"] = [&] {
    Json a = Json::array();
    for (const auto& run : r.runs) a.push_back(run.test_acc * 100.0);
    return a;
  }();
  j["mean_accuracy"] = r.mean_acc * 100.0;
  j["std_accuracy"] = r.std_acc * 100.0;
  if (r.spec.hybrid) {
    double pre = 0, post = 0;
    for (const auto& run : r.runs) {
      pre += run.pre_steps;
      post += run.post_steps;
    }
    j["mean_pre_steps"] = r.runs.empty() ? 0.0 : pre / static_cast<double>(r.runs.size());
    j["mean_post_steps"] = r.runs.empty() ? 0.0 : post / static_cast<double>(r.runs.size());
    j["post_to_pre_ratio"] = pre > 0 ? post / pre : 0.0;
  }
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

std::string curves_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out.precision(10);
  out << "seed,iteration,train_cost,train_acc,val_acc,test_acc\n";
  for (const auto& run : r.runs)
    for (const auto& p : run.report.curves)
      out << run.seed << "," << p.iteration << "," << p.train_cost << "," << p.train_acc << "," << p.val_acc << ","
          << p.test_acc << "\n";
  return out.str();
}

std::vector<NoisePoint> noise_sweep(const ClassifierModel& model, std::span<const double> params,
                                    std::span<const Statevector> states, std::span<const int> labels,
                                    double noise_max, double noise_step, std::int64_t shots, int repeats,
                                    std::uint64_t seed) {
  if (states.size() != labels.size() || states.empty()) throw Error(ErrorCode::EmptyBatch, "no test states");
  if (!(noise_step > 0) || noise_max < 0 || shots < 1 || repeats < 1) {
    throw Error(ErrorCode::InvalidArgument, "bad sweep settings");
  }
  const int levels = static_cast<int>(std::floor(noise_max / noise_step + 1e-9)) + 1;
  std::vector<NoisePoint> out;
  for (int l = 0; l < levels; ++l) {
    NoisePoint pt;
    pt.noise = l * noise_step;
    std::vector<double> p0(states.size());
    std::size_t exact_hits = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      p0[i] = predict_expectation_noisy(model, params, states[i], pt.noise);
      exact_hits += (p0[i] >= 0.5 ? 1 : 0) == labels[i];
    }
    pt.exact_acc = static_cast<double>(exact_hits) / static_cast<double>(states.size());
    std::vector<double> accs;
    for (int r = 0; r < repeats; ++r) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < states.size(); ++i) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(r),
                          static_cast<std::uint32_t>(i)};
        std::array<std::uint32_t, 2> words{};
        seq.generate(words.begin(), words.end());
        const std::uint64_t s = (std::uint64_t{words[0]} << 32) | words[1];
        const std::int64_t zeros = sample_binomial(p0[i], shots, s);
        hits += (2 * zeros >= shots ? 1 : 0) == labels[i];
      }
      accs.push_back(static_cast<double>(hits) / static_cast<double>(states.size()));
    }
    pt.mean_acc = mean_of(accs);
    pt.std_acc = sample_std(accs);
    out.push_back(pt);
  }
  return out;
}

std::string noise_csv(const std::vector<NoisePoint>& points) {
  std::ostringstream out;
  out.precision(10);
  out << "noise,mean_accuracy,std_accuracy,exact_accuracy\n";
  for (const auto& p : points) out << p.noise << "," << p.mean_acc << "," << p.std_acc << "," << p.exact_acc << "\n";
  return out.str();
}

std::vector<EntropyHistogram> entropy_histograms(const std::vector<int>& depths, int n_qubits, int count,
                                                 std::uint64_t seed, int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bin count must be positive");
  const double top = n_qubits / 2.0;
  std::vector<EntropyHistogram> out;
  for (int d : depths) {
    EntropyHistogram h;
    h.depth = d;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (const auto& s : gen_quantum_class(n_qubits, d, count, quantum_class_seed(seed, d))) {
      const double e = max_bipartite_entropy(s);
      h.entropies.push_back(e);
      const int b = std::clamp(static_cast<int>(e / top * bins), 0, bins - 1);
      h.counts[static_cast<std::size_t>(b)]++;
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::string histogram_csv(const std::vector<EntropyHistogram>& hists, int n_qubits) {
  std::ostringstream out;
  out.precision(10);
  out << "bin_lo,bin_hi";
  for (const auto& h : hists) out << ",class_" << h.depth;
  out << "\n";
  if (hists.empty()) return out.str();
  const std::size_t bins = hists.front().counts.size();
  const double width = n_qubits / 2.0 / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out << b * width << "," << (b + 1) * width;
    for (const auto& h : hists) out << "," << h.counts[b];
    out << "\n";
  }
  return out.str();
}

}  // namespace hqc
