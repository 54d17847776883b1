// hqc: train and evaluate hierarchical quantum classifiers.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqc/error.hpp"
#include "hqc/experiments.hpp"

#ifndef HQC_DEFAULT_DATA_DIR
#define HQC_DEFAULT_DATA_DIR "data"
#endif

namespace {

using namespace hqc;
using Json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

void apply_overrides(TrainConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  for (const auto& [key, v] : j.items()) {
    if (key == "batch_size") c.batch_size = v.get<int>();
    else if (key == "learning_rate") c.learning_rate = v.get<double>();
    else if (key == "beta1") c.beta1 = v.get<double>();
    else if (key == "beta2") c.beta2 = v.get<double>();
    else if (key == "epsilon") c.epsilon = v.get<double>();
    else if (key == "max_iters") c.max_iters = v.get<int>();
    else if (key == "eval_every") c.eval_every = v.get<int>();
    else if (key == "patience") c.patience = v.get<int>();
    else if (key == "init_scheme") c.init_scheme = parse_init_scheme(v.get<std::string>());
    else if (key == "init_range") c.init_range = v.get<double>();
    else if (key == "selection") c.selection = parse_selection(v.get<std::string>());
    else if (key == "sample_with_replacement") c.sample_with_replacement = v.get<bool>();
    else if (key == "train_eval_size") c.train_eval_size = v.get<int>();
    else throw UsageError("unknown config key '" + key + "'");
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("bad integer list '" + s + "'");
    }
  }
  return out;
}

DataPaths make_paths(const std::string& data_dir, const std::string& iris) {
  DataPaths p = DataPaths::from_env(HQC_DEFAULT_DATA_DIR);
  if (!data_dir.empty()) {
    p.root = data_dir;
    p.iris = p.root / "iris.data";
  }
  if (!iris.empty()) p.iris = iris;
  return p;
}

// Rebuilds the test split a checkpoint was evaluated on.
EncodedDataset checkpoint_data(const Checkpoint& ckpt, DataRepository& repo) {
  if (ckpt.task.empty()) throw UsageError("checkpoint does not record its task");
  return repo.task(parse_task(ckpt.task), ckpt.data_seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical quantum classifiers: training, noise and entanglement studies"};
  app.require_subcommand(1);
  std::string data_dir, iris_path;
  app.add_option("--data-dir", data_dir, "Dataset root (default $HQC_DATA_DIR)");
  app.add_option("--iris", iris_path, "Iris CSV (default <data-dir>/iris.data)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a classifier over several seeds");
  std::string task_name, layout_name = "ttn", family_name = "general", field_name = "real", config_path, out_path,
                         curves_path, ckpt_out;
  int n_seeds = 5;
  std::uint64_t first_seed = 1, data_seed = 0;
  int max_iters = -1;
  bool quiet = false;
  train_cmd->add_option("--task", task_name, "iris12|iris13|iris23|mnist01|mnist27|mnist_even|mnist_gt4|q1v10|q3v10|q2v5")
      ->required();
  train_cmd->add_option("--layout", layout_name, "ttn|mera|hybrid")->check(CLI::IsMember({"ttn", "mera", "hybrid"}));
  train_cmd->add_option("--kind", family_name, "simple|general|ancilla")
      ->check(CLI::IsMember({"simple", "general", "ancilla"}));
  train_cmd->add_option("--field", field_name, "real|complex")->check(CLI::IsMember({"real", "complex"}));
  train_cmd->add_option("--seeds", n_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  train_cmd->add_option("--first-seed", first_seed, "First seed; seeds run consecutively");
  train_cmd->add_option("--data-seed", data_seed, "Seed for the iris split and quantum data");
  train_cmd->add_option("--config", config_path, "JSON file overriding training settings");
  train_cmd->add_option("--max-iters", max_iters, "Override the iteration cap");
  train_cmd->add_option("--out", out_path, "Result JSON (default stdout)");
  train_cmd->add_option("--curves", curves_path, "Learning-curve CSV");
  train_cmd->add_option("--checkpoint", ckpt_out, "Checkpoint of the first seed");
  train_cmd->add_flag("--quiet", quiet, "No per-seed progress on stderr");

  // noise-sweep
  auto* noise_cmd = app.add_subcommand("noise-sweep", "Accuracy under depolarizing and shot noise");
  std::string ckpt_in, noise_out;
  double lambda_max = 0.2, lambda_step = 0.01;
  std::int64_t shots = 401;
  int repeats = 200;
  std::uint64_t noise_seed = 0;
  noise_cmd->add_option("--checkpoint", ckpt_in, "Trained checkpoint")->required();
  noise_cmd->add_option("--lambda-max", lambda_max, "Largest noise level");
  noise_cmd->add_option("--lambda-step", lambda_step, "Noise grid step");
  noise_cmd->add_option("--shots", shots, "Shots per prediction")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--repeats", repeats, "Accuracy repetitions")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--seed", noise_seed, "Sampling seed");
  noise_cmd->add_option("--out", noise_out, "CSV output (default stdout)");

  // entropy-hist
  auto* ent_cmd = app.add_subcommand("entropy-hist", "Histograms of maximum bipartite entanglement entropy");
  std::string classes = "1,2,3,5,10", hist_out;
  int count = 5000, bins = 64, qubits = 8;
  std::uint64_t ent_seed = 0;
  ent_cmd->add_option("--classes", classes, "Comma-separated circuit depths");
  ent_cmd->add_option("--count", count, "States per class")->check(CLI::PositiveNumber);
  ent_cmd->add_option("--seed", ent_seed, "Generator seed");
  ent_cmd->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
  ent_cmd->add_option("--qubits", qubits, "Register size")->check(CLI::Range(2, kMaxEntropyQubits));
  ent_cmd->add_option("--out", hist_out, "CSV output (default stdout)");

  // export-qasm
  auto* qasm_cmd = app.add_subcommand("export-qasm", "OpenQASM 2.0 for a simple/real checkpoint");
  std::string qasm_ckpt, qasm_out;
  qasm_cmd->add_option("--checkpoint", qasm_ckpt, "Trained checkpoint")->required();
  qasm_cmd->add_option("--out", qasm_out, "QASM output (default stdout)");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "Logistic-regression baseline");
  std::string base_task, pca = "on", base_out;
  base_cmd->add_option("--task", base_task, "Classical task id")->required();
  base_cmd->add_option("--pca", pca, "on|off")->check(CLI::IsMember({"on", "off"}));
  base_cmd->add_option("--data-seed", data_seed, "Seed for the iris split");
  base_cmd->add_option("--out", base_out, "Result JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    DataRepository repo(make_paths(data_dir, iris_path));

    if (*train_cmd) {
      TaskId task;
      try {
        task = parse_task(task_name);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      ClassifierSpec spec;
      spec.hybrid = layout_name == "hybrid";
      spec.layout = spec.hybrid ? Layout::MERA : parse_layout(layout_name);
      spec.family = parse_family(family_name);
      spec.field = parse_field(field_name);
      try {
        validate_spec(spec);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      TrainConfig config = default_config(task, spec.kind());
      if (!config_path.empty()) apply_overrides(config, config_path);
      if (max_iters >= 0) config.max_iters = max_iters;
      try {
        config.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_seeds));
      std::iota(seeds.begin(), seeds.end(), first_seed);

      const EncodedDataset data = repo.task(task, data_seed);
      ProgressFn progress;
      if (!quiet) progress = [](const std::string& s) { std::cerr << s << std::endl; };
      const ExperimentResult res = run_experiment(task, data, spec, seeds, config, progress);
      write_text(out_path, result_to_json(res));
      if (!curves_path.empty()) write_text(curves_path, curves_csv(res));
      if (!ckpt_out.empty()) {
        const SeedRun& run = res.runs.front();
        Checkpoint ck{model_for(task, spec), run.params, config, {}, std::string(to_string(task)), data_seed};
        ck.config.rng_seed = run.seed;
        ck.metrics["test_accuracy"] = run.test_acc;
        ck.metrics["test_cost"] = run.test_cost;
        ck.metrics["steps"] = run.steps;
        save_checkpoint(ckpt_out, ck);
      }
      return 0;
    }

    if (*noise_cmd) {
      const Checkpoint ck = load_checkpoint(ckpt_in);
      const EncodedDataset data = checkpoint_data(ck, repo);
      std::vector<Statevector> states;
      std::vector<int> labels;
      for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.splits[i] != Split::Test) continue;
        states.push_back(data.states[i]);
        labels.push_back(data.labels[i]);
      }
      const auto pts = noise_sweep(ck.model, ck.params, states, labels, lambda_max, lambda_step, shots, repeats, noise_seed);
      write_text(noise_out, noise_csv(pts));
      return 0;
    }

    if (*ent_cmd) {
      const auto hists = entropy_histograms(parse_int_list(classes), qubits, count, ent_seed, bins);
      write_text(hist_out, histogram_csv(hists, qubits));
      return 0;
    }

    if (*qasm_cmd) {
      const Checkpoint ck = load_checkpoint(qasm_ckpt);
      if (ck.model.kind() != GateKind::SimpleReal) throw UsageError("QASM export needs a simple/real model");
      write_text(qasm_out, export_qasm(ck.model, ck.params));
      if (!ck.task.empty()) {
        const EncodedDataset data = checkpoint_data(ck, repo);
        std::fprintf(stderr, "test accuracy %.2f%%, test cost %.4f (%zu examples)\n",
                     100.0 * split_accuracy(ck.model, ck.params, data, Split::Test),
                     split_cost(ck.model, ck.params, data, Split::Test), data.count(Split::Test));
      }
      return 0;
    }

    if (*base_cmd) {
      const TaskId task = parse_task(base_task);
      if (task_family(task) == TaskFamily::Quantum) throw UsageError("baseline needs a classical task");
      const auto f = repo.classical_features(task, pca == "on", data_seed);
      const LogisticResult r = logistic_baseline(f.x, f.labels, f.splits);
      Json j;
      j["task"] = base_task;
      j["pca"] = pca == "on";
      j["train_accuracy"] = 100.0 * r.train_accuracy;
      j["test_accuracy"] = 100.0 * r.test_accuracy;
      j["newton_iterations"] = r.iterations;
      j["grad_norm"] = r.grad_norm;
      write_text(base_out, j.dump(2) + "\n");
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
