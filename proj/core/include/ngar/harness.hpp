#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ngar/distance.hpp"
#include "ngar/ggp.hpp"
#include "ngar/neural/model.hpp"
#include "ngar/neural/train.hpp"

namespace ngar {

enum class Method { mean, mart, move, var, ngar };

const char* method_name(Method method);
Method parse_method(std::string_view name);
// Comma-separated list, e.g. "mean,mart,ngar".
std::vector<Method> parse_methods(std::string_view list);
std::vector<Method> all_methods();

struct ExperimentConfig {
  GgpConfig generator = RotationalConfig{};
  long total_steps = 20000;
  double test_fraction = 0.1;
  int window = 20;
  std::vector<Method> methods = all_methods();
  DistanceParams distance;
  NgarConfig ngar;  // ngar.window is overridden by `window`
  double var_ridge = 1e-6;
  std::filesystem::path output_dir;  // empty: nothing written by sweep()
  std::uint64_t seed = 0;            // simulation stream

  void validate() const;
  // Index of the first test graph: the final test_fraction of the sequence.
  std::size_t train_size() const;
};

struct ResidualSummary {
  std::size_t count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

// Linear-interpolation quantiles of the sample.
ResidualSummary summarize(std::vector<double> values);

struct MethodResult {
  Method method = Method::mean;
  std::vector<double> residuals;  // ged(g_{t+1}, prediction) per test target, in time order
  ResidualSummary summary;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t sequence_length = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t train_hash = 0;  // FNV-1a of the training segment
  std::vector<MethodResult> methods;
  std::optional<nn::NgarMetrics> ngar_metrics;
  std::optional<nn::TrainingHistory> ngar_history;
  double generate_seconds = 0.0;

  const MethodResult* find(Method method) const;
};

using Logger = std::function<void(const std::string&)>;

struct RunOptions {
  Logger log;
  // Skips training when set; must match the data dimensions and window.
  std::optional<nn::NgarModel<float>> pretrained;
  // Receives the trained model.
  std::function<void(const nn::NgarModel<float>&)> on_trained;
};

// FNV-1a over the features and adjacency of every graph.
std::uint64_t hash_sequence(const GraphSequence& sequence);

// Fits every method on the first train_size() graphs and records the residual
// GED for each later graph, predicted from the k graphs preceding it.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});
ExperimentReport run_experiment(const ExperimentConfig& config, const GraphSequence& sequence,
                                const RunOptions& options = {});

struct SweepEntry {
  ExperimentConfig config;
  std::optional<ExperimentReport> report;
  std::string error;  // non-empty if this configuration failed
};

// Runs each configuration independently; failures are recorded per entry.
// Each report is emitted to its config.output_dir when that is set, and the
// combined summary table to `summary_dir` when that is non-empty.
std::vector<SweepEntry> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::filesystem::path& summary_dir = {},
                              const Logger& log = {});

// --- report emission ---------------------------------------------------------

enum class ReportFormat { json, csv };

// json: report.json with config echo, summaries, raw residuals, NGAR metrics
// and training curve. csv: residuals.csv (one summary row per method, then one
// row per residual) and metrics.csv. Wall-clock times go to timings.json so
// the other files are reproducible byte for byte.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats = {ReportFormat::json,
                                                            ReportFormat::csv});

std::string report_to_json(const ExperimentReport& report);
std::string residuals_csv(const ExperimentReport& report);
std::string metrics_csv(const ExperimentReport& report);

// Combined table over a sweep keyed by generator and its complexity (p or c).
std::string sweep_summary_csv(const std::vector<SweepEntry>& entries);

std::string experiment_config_to_json(const ExperimentConfig& config);
// Keys as written by experiment_config_to_json; missing keys keep defaults.
ExperimentConfig experiment_config_from_json(std::string_view text);
// One JSON object per non-empty line.
std::vector<ExperimentConfig> load_experiment_configs(const std::filesystem::path& path);

}  // namespace ngar
