#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "ngar/dataset_io.hpp"
#include "ngar/errors.hpp"
#include "ngar/harness.hpp"
#include "ngar/neural/checkpoint.hpp"
#include "ngar/neural/train.hpp"

using namespace ngar;

namespace {

struct GeneratorFlags {
  std::string generator = "rotational";
  int p = 1;
  int c = 11;
  int nodes = 5;
  int features = 2;
  double sigma = 0.001;
  double amplitude = 0.01;
  std::uint64_t seed = 0;

  GgpConfig make(std::uint64_t structural_seed) const {
    if (generator == "rotational")
      return make_rotational_config(nodes, p, structural_seed, sigma, amplitude);
    return make_pmlds_config(nodes, features, c, structural_seed, sigma);
  }
};

void add_generator_flags(CLI::App* cmd, GeneratorFlags& g, bool levels = true) {
  cmd->add_option("--generator", g.generator, "Graph-generating process")
      ->check(CLI::IsMember({"rotational", "pmlds"}))
      ->capture_default_str();
  if (levels) {
    cmd->add_option("--p", g.p, "Rotational order")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--c", g.c, "PMLDS latent dimension")->check(CLI::PositiveNumber)->capture_default_str();
  }
  cmd->add_option("--nodes", g.nodes, "Nodes per graph")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--features", g.features, "PMLDS node feature dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sigma", g.sigma, "Process noise std")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--amplitude", g.amplitude, "Rotational amplitude alpha")->capture_default_str();
}

struct EvalFlags {
  int k = 20;
  std::string methods = "mean,mart,move,var,ngar";
  double test_fraction = 0.1;
  std::string correspondence = "identity";
  double edge_weight = 1.0;
  double ridge = 1e-6;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& e) {
  cmd->add_option("--methods", e.methods, "Comma-separated subset of mean,mart,move,var,ngar")
      ->capture_default_str();
  cmd->add_option("--test-fraction", e.test_fraction, "Final share of the sequence held out")
      ->capture_default_str();
  cmd->add_option("--correspondence", e.correspondence, "Node correspondence for the GED")
      ->check(CLI::IsMember({"identity", "optimal_permutation"}))
      ->capture_default_str();
  cmd->add_option("--edge-weight", e.edge_weight, "Edge term weight alpha_E")->capture_default_str();
  cmd->add_option("--ridge", e.ridge, "VAR ridge penalty")->capture_default_str();
}

struct TrainFlags {
  int max_epochs = 200;
  int patience = 20;
  int batch_size = 256;
  double learning_rate = 0.001;
};

void add_train_flags(CLI::App* cmd, TrainFlags& t) {
  cmd->add_option("--max-epochs", t.max_epochs, "Epoch cap")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--patience", t.patience, "Early-stopping patience")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--batch-size", t.batch_size, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
}

NgarConfig ngar_config(const TrainFlags& t, int k, std::uint64_t seed) {
  NgarConfig c;
  c.window = k;
  c.max_epochs = t.max_epochs;
  c.patience = t.patience;
  c.batch_size = t.batch_size;
  c.learning_rate = t.learning_rate;
  c.seed = seed;
  return c;
}

ExperimentConfig experiment_config(const EvalFlags& e, int k, std::uint64_t seed) {
  ExperimentConfig c;
  c.window = k;
  c.methods = parse_methods(e.methods);
  c.test_fraction = e.test_fraction;
  c.distance.edge_weight = e.edge_weight;
  c.distance.correspondence = e.correspondence == "identity" ? Correspondence::identity
                                                             : Correspondence::optimal_permutation;
  c.var_ridge = e.ridge;
  c.seed = seed;
  return c;
}

Logger stderr_logger(bool quiet) {
  if (quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

void print_summary(const ExperimentReport& report) {
  std::printf("%-6s %12s %12s %12s %12s\n", "method", "median", "q1", "q3", "mean");
  for (const auto& m : report.methods)
    std::printf("%-6s %12.6g %12.6g %12.6g %12.6g\n", method_name(m.method), m.summary.median,
                m.summary.q1, m.summary.q3, m.summary.mean);
  if (report.ngar_metrics) {
    const auto& n = *report.ngar_metrics;
    std::printf("ngar test loss %.6g  feature mse %.6g  adjacency logloss %.6g  accuracy %.4f\n",
                n.loss, n.feature_mse, n.adjacency_logloss, n.adjacency_accuracy);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph autoregression experiments: generate, train, evaluate, sweep"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  GeneratorFlags gen;
  EvalFlags eval;
  TrainFlags tr;
  int k = 20;
  long steps = 20000;
  std::uint64_t seed = 0;
  std::string out;
  std::string dataset;
  std::string checkpoint;
  std::string config_file;
  std::string csv;

  auto* generate = app.add_subcommand("generate", "Simulate a graph sequence and write it to a file");
  add_generator_flags(generate, gen);
  generate->add_option("--steps", steps, "Sequence length")->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--seed", seed, "Seed for the process and the simulation")->capture_default_str();
  generate->add_option("--out", out, "Dataset path (JSON lines)")->required();
  generate->add_option("--csv", csv, "Also export a flat CSV");

  auto* train = app.add_subcommand("train", "Train NGAR on a dataset's training segment");
  train->add_option("--dataset", dataset, "Dataset written by generate")->required()->check(CLI::ExistingFile);
  train->add_option("--k", k, "Window length")->check(CLI::PositiveNumber)->capture_default_str();
  train->add_option("--test-fraction", eval.test_fraction, "Final share of the sequence held out")
      ->capture_default_str();
  train->add_option("--seed", seed, "Initialisation and shuffling seed")->capture_default_str();
  train->add_option("--out", out, "Checkpoint path")->required();
  add_train_flags(train, tr);

  auto* evaluate = app.add_subcommand("evaluate", "Score methods on a dataset's test segment");
  evaluate->add_option("--dataset", dataset, "Dataset written by generate")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--checkpoint", checkpoint, "Trained NGAR checkpoint (trains if absent)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--k", k, "Window length")->check(CLI::PositiveNumber)->capture_default_str();
  evaluate->add_option("--seed", seed, "NGAR seed when training")->capture_default_str();
  evaluate->add_option("--out", out, "Report directory");
  add_eval_flags(evaluate, eval);
  add_train_flags(evaluate, tr);

  auto* run = app.add_subcommand("run", "Generate, fit and evaluate in one go");
  add_generator_flags(run, gen);
  run->add_option("--steps", steps, "Sequence length")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--k", k, "Window length")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--seed", seed, "Seed")->capture_default_str();
  run->add_option("--out", out, "Report directory");
  add_eval_flags(run, eval);
  add_train_flags(run, tr);

  std::vector<int> ps;
  std::vector<int> cs;
  std::vector<std::uint64_t> seeds;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a list of experiments and tabulate them");
  sweep_cmd->add_option("--config", config_file, "Experiment configs, one JSON object per line")
      ->check(CLI::ExistingFile);
  add_generator_flags(sweep_cmd, gen, false);
  sweep_cmd->add_option("--p", ps, "Rotational orders to sweep")->delimiter(',');
  sweep_cmd->add_option("--c", cs, "PMLDS latent dimensions to sweep")->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds, "Seeds to sweep")->delimiter(',');
  sweep_cmd->add_option("--steps", steps, "Sequence length")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--k", k, "Window length")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--out", out, "Output directory")->required();
  add_eval_flags(sweep_cmd, eval);
  add_train_flags(sweep_cmd, tr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const Logger log = stderr_logger(quiet);
  try {
    if (*generate) {
      const GgpConfig config = gen.make(seed);
      const GraphSequence seq = generate_sequence(config, steps);
      save_sequence(seq, out, config);
      if (!csv.empty()) export_csv(seq, csv);
      if (log) log("wrote " + std::to_string(seq.size()) + " graphs to " + out);
    } else if (*train) {
      const GraphSequence seq = load_sequence(dataset);
      ExperimentConfig ec;
      ec.window = k;
      ec.test_fraction = eval.test_fraction;
      ec.total_steps = static_cast<long>(seq.size());
      const GraphSequence segment = seq.slice(0, ec.train_size());
      auto model = nn::init_model<float>(ngar_config(tr, k, seed), segment.front().order(),
                                         segment.front().feature_dim());
      auto result = nn::train(std::move(model), segment, [&](const nn::EpochRecord& r) {
        if (log)
          log("epoch " + std::to_string(r.epoch) + " train " + std::to_string(r.train_loss) +
              " val " + std::to_string(r.validation_loss) + " (" + std::to_string(r.seconds) + " s)");
      });
      nn::save_checkpoint(result.model, out);
      if (log)
        log("best epoch " + std::to_string(result.history.best_epoch) + ", validation loss " +
            std::to_string(result.history.best_validation_loss));
    } else if (*evaluate) {
      const GraphSequence seq = load_sequence(dataset);
      ExperimentConfig ec = experiment_config(eval, k, seed);
      ec.ngar = ngar_config(tr, k, seed);
      RunOptions options;
      options.log = log;
      if (!checkpoint.empty()) options.pretrained = nn::load_checkpoint<float>(checkpoint);
      const auto report = run_experiment(ec, seq, options);
      print_summary(report);
      if (!out.empty()) emit_report(report, out);
    } else if (*run) {
      ExperimentConfig ec = experiment_config(eval, k, seed);
      ec.generator = gen.make(seed);
      ec.total_steps = steps;
      ec.ngar = ngar_config(tr, k, seed);
      RunOptions options;
      options.log = log;
      const auto report = run_experiment(ec, options);
      print_summary(report);
      if (!out.empty()) emit_report(report, out);
    } else if (*sweep_cmd) {
      std::vector<ExperimentConfig> configs;
      if (!config_file.empty()) {
        configs = load_experiment_configs(config_file);
      } else {
        if (seeds.empty()) seeds.push_back(0);
        std::vector<int> levels = gen.generator == "rotational" ? ps : cs;
        if (levels.empty()) levels.push_back(gen.generator == "rotational" ? gen.p : gen.c);
        for (int level : levels) {
          for (std::uint64_t s : seeds) {
            GeneratorFlags g = gen;
            (gen.generator == "rotational" ? g.p : g.c) = level;
            ExperimentConfig ec = experiment_config(eval, k, s);
            ec.generator = g.make(s);
            ec.total_steps = steps;
            ec.ngar = ngar_config(tr, k, s);
            configs.push_back(std::move(ec));
          }
        }
      }
      for (std::size_t i = 0; i < configs.size(); ++i)
        if (configs[i].output_dir.empty())
          configs[i].output_dir = std::filesystem::path(out) / ("run" + std::to_string(i));
        else if (configs[i].output_dir.is_relative())
          configs[i].output_dir = std::filesystem::path(out) / configs[i].output_dir;
      const auto entries = sweep(configs, out, log);
      int failures = 0;
      for (const auto& e : entries) failures += e.report ? 0 : 1;
      std::cout << (std::filesystem::path(out) / "summary.csv").string() << '\n';
      if (failures > 0) {
        std::cerr << failures << " of " << entries.size() << " runs failed\n";
        return 2;
      }
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
