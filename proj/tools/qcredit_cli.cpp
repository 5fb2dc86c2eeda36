// qcredit: synthetic data generation, single-partition QNN training, and
// cross-validated evaluation with classical benchmarks.
//
// Exit codes: 0 success, 2 usage or I/O, 3 input parse, 4 contract
// violation, 1 internal.

#include "qcredit/errors.hpp"
#include "qcredit/format.hpp"
#include "qcredit/metrics.hpp"
#include "qcredit/pipeline.hpp"
#include "qcredit/serialize.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace qcredit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitContract = 4;
constexpr const char *kOutDirEnv = "QCREDIT_OUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by train and crossval. Each override applies only when given
// on the command line, after the config file.
struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double lr = 0.0;
  std::string variant;
  std::vector<std::size_t> batch_sizes;
  std::string threshold;
  bool out_of_fold = false;

  std::vector<std::pair<std::string, CLI::Option *>> options;
};

void add_overrides(CLI::App &cmd, Overrides &o) {
  const pipeline::CrossValidationConfig d;
  cmd.add_option("--config", o.config_path, "JSON config; keys mirror the training options")
      ->check(CLI::ExistingFile);
  o.options = {
      {"seed", cmd.add_option("--seed", o.seed, "Master seed")->default_str(std::to_string(d.master_seed))},
      {"epochs", cmd.add_option("--epochs", o.epochs, "Training epochs")->default_str(std::to_string(d.train.epochs))},
      {"lr", cmd.add_option("--lr", o.lr, "Learning rate")->default_str(format_double(d.train.learning_rate))},
      {"variant", cmd.add_option("--variant", o.variant, "Ansatz variant: simulation or hardware")
                      ->default_str(std::string(ansatz::to_string(d.ansatz.variant)))},
      {"batch_sizes", cmd.add_option("--batch-sizes", o.batch_sizes, "Batch size per partition")
                          ->delimiter(',')
                          ->default_str("64,64,32,32,32,64,128,128,32,32")},
      {"threshold", cmd.add_option("--threshold", o.threshold, "Operating threshold: ks or a number")
                        ->default_str("ks")},
      {"out_of_fold", cmd.add_flag("--out-of-fold", o.out_of_fold, "Stack training features out of fold")},
  };
}

std::string read_text(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pipeline::CrossValidationConfig resolve_config(const Overrides &o) {
  pipeline::CrossValidationConfig config;
  if (!o.config_path.empty()) {
    serialize::Json doc;
    try {
      doc = serialize::Json::parse(read_text(o.config_path));
    } catch (const serialize::Json::parse_error &e) {
      throw ParseError(o.config_path + ": " + e.what());
    }
    serialize::merge_config(config, doc);
  }
  for (const auto &[name, opt] : o.options) {
    if (opt->count() == 0) {
      continue;
    }
    if (name == "seed") {
      config.master_seed = o.seed;
    } else if (name == "epochs") {
      config.train.epochs = o.epochs;
    } else if (name == "lr") {
      config.train.learning_rate = o.lr;
    } else if (name == "variant") {
      const auto v = ansatz::variant_from_string(o.variant);
      if (!v) {
        throw UsageError("--variant must be simulation or hardware");
      }
      config.ansatz.variant = *v;
    } else if (name == "batch_sizes") {
      config.batch_sizes = o.batch_sizes;
    } else if (name == "threshold") {
      serialize::Json t = o.threshold == "ks" ? serialize::Json("ks") : serialize::Json();
      if (t.is_null()) {
        try {
          std::size_t used = 0;
          t = std::stod(o.threshold, &used);
          if (used != o.threshold.size()) {
            throw std::invalid_argument("trailing");
          }
        } catch (const std::exception &) {
          throw UsageError("--threshold must be 'ks' or a number");
        }
      }
      serialize::merge_config(config, serialize::Json{{"threshold", t}});
    } else if (name == "out_of_fold") {
      config.stacking.out_of_fold = o.out_of_fold;
    }
  }
  config.validate();
  return config;
}

pipeline::Dataset load_dataset(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UsageError("cannot read " + path);
  }
  try {
    return pipeline::read_dataset_csv(in);
  } catch (const ParseError &e) {
    throw ParseError(path + ": " + e.what());
  }
}

fs::path output_dir(const std::string &flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char *env = std::getenv(kOutDirEnv);
    dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("cannot create output directory " + dir.string());
  }
  return dir;
}

void write_file(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) {
    throw UsageError("cannot write " + path.string());
  }
}

std::string partition_stem(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "partition_%02d", id);
  return buf;
}

std::string report_csv(const metrics::MetricsReport &report) {
  return metrics::csv_header() + "\n" + metrics::to_csv_row(report) + "\n";
}

int cmd_gen_data(const std::string &out, std::uint64_t seed) {
  std::ostringstream ss;
  pipeline::write_dataset_csv(ss, pipeline::generate_synthetic_dataset(seed));
  write_file(out, ss.str());
  return kExitOk;
}

int cmd_train(const std::string &data_path, int partition, const Overrides &o, const std::string &out) {
  const auto config = resolve_config(o);
  if (partition < 1 || static_cast<std::size_t>(partition) > config.n_partitions) {
    throw ContractError("--partition must lie in [1, " + std::to_string(config.n_partitions) + "], got " +
                        std::to_string(partition));
  }
  const auto data = load_dataset(data_path);
  const fs::path dir = output_dir(out);
  const auto plans = pipeline::plan_partitions(data, config);
  const auto &plan = plans.at(static_cast<std::size_t>(partition - 1));
  const auto outcome = pipeline::run_partition(pipeline::prepare_partition(data, plan, config), config);

  const std::string stem = partition_stem(partition);
  write_file(dir / (stem + "_trace.json"), serialize::to_json(outcome.training.trace).dump(2) + "\n");
  write_file(dir / (stem + ".csv"), report_csv(outcome.report));
  serialize::Json report = serialize::to_json(outcome.report);
  report["best_epoch"] = outcome.training.best_epoch;
  report["best_params"] = outcome.training.best_params;
  report["final_params"] = outcome.training.final_params;
  write_file(dir / (stem + ".json"), report.dump(2) + "\n");
  std::cout << metrics::csv_header() << "\n" << metrics::to_csv_row(outcome.report) << "\n";
  return kExitOk;
}

int cmd_crossval(const std::string &data_path, const Overrides &o, const std::string &out, std::size_t jobs,
                 bool jobs_given, bool traces) {
  auto config = resolve_config(o);
  if (jobs_given) {
    config.jobs = jobs;
    config.validate();
  }
  const auto data = load_dataset(data_path);
  const fs::path dir = output_dir(out);
  const auto result = pipeline::run_cross_validation(data, config);
  const auto reports = result.reports();
  const auto rows = pipeline::run_benchmarks(data, result.plans, config, reports);

  for (const auto &outcome : result.outcomes) {
    const std::string stem = partition_stem(outcome.report.partition);
    write_file(dir / (stem + ".csv"), report_csv(outcome.report));
    if (traces) {
      write_file(dir / (stem + "_trace.json"), serialize::to_json(outcome.training.trace).dump(2) + "\n");
    }
  }
  write_file(dir / "aggregate.json", serialize::to_json(result.aggregate).dump(2) + "\n");
  std::ostringstream bench;
  pipeline::write_benchmark_csv(bench, rows);
  write_file(dir / "benchmark.csv", bench.str());
  std::cout << bench.str();
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Quantum neural network credit scoring on stacked classical features"};
  app.require_subcommand(1);

  std::string gen_out;
  std::uint64_t gen_seed = 0;
  auto *gen = app.add_subcommand("gen-data", "Write the synthetic 279-borrower dataset as CSV");
  gen->add_option("--out", gen_out, "Output CSV path")->required();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();

  std::string train_data;
  std::string train_out;
  int train_partition = 0;
  Overrides train_overrides;
  auto *train = app.add_subcommand("train", "Train the QNN on one partition and write its trace and report");
  train->add_option("--data", train_data, "Dataset CSV")->required();
  train->add_option("--partition", train_partition, "Partition id, 1-based")->required();
  train->add_option("--out", train_out, std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  add_overrides(*train, train_overrides);

  std::string cv_data;
  std::string cv_out;
  std::size_t cv_jobs = 1;
  bool cv_traces = false;
  Overrides cv_overrides;
  auto *cv = app.add_subcommand("crossval", "Cross-validate the QNN and the classical benchmarks");
  cv->add_option("--data", cv_data, "Dataset CSV")->required();
  cv->add_option("--out", cv_out, std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  auto *jobs_opt = cv->add_option("--jobs", cv_jobs, "Partitions trained concurrently")->capture_default_str();
  cv->add_flag("--traces", cv_traces, "Also write per-partition trace JSON");
  add_overrides(*cv, cv_overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) {
      return cmd_gen_data(gen_out, gen_seed);
    }
    if (*train) {
      return cmd_train(train_data, train_partition, train_overrides, train_out);
    }
    return cmd_crossval(cv_data, cv_overrides, cv_out, cv_jobs, jobs_opt->count() > 0, cv_traces);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ContractError &e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const DegenerateDataError &e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
