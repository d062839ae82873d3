#include "ngar/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "ngar/baselines.hpp"
#include "ngar/errors.hpp"

namespace ngar {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

std::string context(Method method, const std::string& what) {
  return std::string(method_name(method)) + ": " + what;
}

}  // namespace

const char* method_name(Method method) {
  switch (method) {
    case Method::mean: return "mean";
    case Method::mart: return "mart";
    case Method::move: return "move";
    case Method::var: return "var";
    case Method::ngar: return "ngar";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods())
    if (name == method_name(m)) return m;
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto end = std::min(list.find(',', start), list.size());
    const auto token = list.substr(start, end - start);
    if (!token.empty()) {
      const Method m = parse_method(token);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = end + 1;
  }
  return out;
}

std::vector<Method> all_methods() {
  return {Method::mean, Method::mart, Method::move, Method::var, Method::ngar};
}

void ExperimentConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidInput("test_fraction must lie in (0, 1)");
  if (window < 1) throw InvalidInput("window must be >= 1");
  if (total_steps <= 10L * window)
    throw InvalidInput("total_steps must exceed 10 * k = " + std::to_string(10L * window));
  if (distance.edge_weight < 0.0) throw InvalidInput("edge_weight must be nonnegative");
  std::visit([](const auto& c) { c.validate(); }, generator);
}

std::size_t ExperimentConfig::train_size() const {
  const auto test = static_cast<long>(std::llround(test_fraction * static_cast<double>(total_steps)));
  return static_cast<std::size_t>(total_steps - std::max(1L, test));
}

ResidualSummary summarize(std::vector<double> values) {
  ResidualSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

const MethodResult* ExperimentReport::find(Method method) const {
  for (const auto& m : methods)
    if (m.method == method) return &m;
  return nullptr;
}

std::uint64_t hash_sequence(const GraphSequence& sequence) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& g : sequence) {
    fnv1a(h, g.features().data(), static_cast<std::size_t>(g.features().size()) * sizeof(double));
    fnv1a(h, g.adjacency().data(), static_cast<std::size_t>(g.adjacency().size()));
  }
  return h;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = Clock::now();
  if (options.log) options.log("generating " + std::to_string(config.total_steps) + " graphs");
  Rng rng = simulation_rng(config.seed);
  const GraphSequence sequence = generate_sequence(config.generator, config.total_steps, rng);
  ExperimentReport report = run_experiment(config, sequence, options);
  report.generate_seconds = seconds_since(start) -
                            std::accumulate(report.methods.begin(), report.methods.end(), 0.0,
                                            [](double acc, const MethodResult& m) {
                                              return acc + m.fit_seconds + m.predict_seconds;
                                            });
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const GraphSequence& sequence,
                                const RunOptions& options) {
  if (config.test_fraction <= 0.0 || config.test_fraction >= 1.0)
    throw InvalidInput("test_fraction must lie in (0, 1)");
  if (sequence.size() <= static_cast<std::size_t>(10L * config.window))
    throw InvalidInput("sequence too short for window k = " + std::to_string(config.window));

  ExperimentConfig echo = config;
  echo.total_steps = static_cast<long>(sequence.size());
  echo.ngar.window = config.window;

  ExperimentReport report;
  report.config = echo;
  report.sequence_length = sequence.size();
  report.train_size = echo.train_size();
  report.test_size = sequence.size() - report.train_size;

  const std::size_t k = static_cast<std::size_t>(config.window);
  const GraphSequence train = sequence.slice(0, report.train_size);
  report.train_hash = hash_sequence(train);

  std::vector<long> targets(report.test_size);
  std::iota(targets.begin(), targets.end(), static_cast<long>(report.train_size));
  auto window_for = [&](long t) { return sequence.slice(static_cast<std::size_t>(t) - k, k); };

  for (Method method : config.methods) {
    MethodResult result;
    result.method = method;
    result.residuals.reserve(targets.size());
    if (options.log) options.log(context(method, "fitting"));
    try {
      auto fit_start = Clock::now();
      std::vector<AttributedGraph> predictions;
      predictions.reserve(targets.size());
      switch (method) {
        case Method::mean: {
          const AttributedGraph mean = predict_mean(train, config.distance);
          result.fit_seconds = seconds_since(fit_start);
          fit_start = Clock::now();
          predictions.assign(targets.size(), mean);
          break;
        }
        case Method::mart:
          for (long t : targets) predictions.push_back(predict_mart(window_for(t)));
          break;
        case Method::move:
          for (long t : targets)
            predictions.push_back(predict_move(window_for(t), config.window, config.distance));
          break;
        case Method::var: {
          const VarModel model = var_fit(train, config.window, config.var_ridge);
          result.fit_seconds = seconds_since(fit_start);
          fit_start = Clock::now();
          for (long t : targets) predictions.push_back(var_predict(model, window_for(t)));
          break;
        }
        case Method::ngar: {
          nn::NgarModel<float> model;
          if (options.pretrained) {
            model = *options.pretrained;
            if (model.config.window != config.window)
              throw InvalidInput("pretrained model window differs from the experiment window");
          } else {
            NgarConfig ngar_config = config.ngar;
            ngar_config.window = config.window;
            auto trained = nn::train(
                nn::init_model<float>(ngar_config, train.front().order(),
                                      train.front().feature_dim()),
                train, [&](const nn::EpochRecord& r) {
                  if (options.log)
                    options.log(context(method, "epoch " + std::to_string(r.epoch) + " train " +
                                                    std::to_string(r.train_loss) + " val " +
                                                    std::to_string(r.validation_loss) + " (" +
                                                    std::to_string(r.seconds) + " s)"));
                });
            model = std::move(trained.model);
            report.ngar_history = std::move(trained.history);
          }
          if (options.on_trained) options.on_trained(model);
          result.fit_seconds = seconds_since(fit_start);
          fit_start = Clock::now();
          const auto data = nn::prepare_sequence<float>(sequence);
          predictions = nn::predict_batch(model, data, targets);
          report.ngar_metrics = nn::evaluate_model(model, data, targets);
          break;
        }
      }
      for (std::size_t i = 0; i < targets.size(); ++i)
        result.residuals.push_back(
            ged(sequence[static_cast<std::size_t>(targets[i])], predictions[i], config.distance));
      result.predict_seconds = seconds_since(fit_start);
    } catch (const Error& e) {
      throw std::runtime_error(context(method, e.what()));
    }
    result.summary = summarize(result.residuals);
    if (options.log)
      options.log(context(method, "median residual " + std::to_string(result.summary.median)));
    report.methods.push_back(std::move(result));
  }
  return report;
}

std::vector<SweepEntry> sweep(const std::vector<ExperimentConfig>& configs,
                              const std::filesystem::path& summary_dir, const Logger& log) {
  if (configs.empty()) throw InvalidInput("sweep needs at least one configuration");
  std::vector<SweepEntry> entries;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    SweepEntry entry;
    entry.config = configs[i];
    try {
      RunOptions options;
      if (log)
        options.log = [&, i](const std::string& msg) {
          log("[" + std::to_string(i) + "] " + msg);
        };
      entry.report = run_experiment(configs[i], options);
      if (!configs[i].output_dir.empty()) emit_report(*entry.report, configs[i].output_dir);
    } catch (const std::exception& e) {
      entry.error = e.what();
      if (log) log("[" + std::to_string(i) + "] failed: " + entry.error);
    }
    entries.push_back(std::move(entry));
  }
  if (!summary_dir.empty()) {
    std::filesystem::create_directories(summary_dir);
    const auto path = summary_dir / "summary.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << sweep_summary_csv(entries);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }
  return entries;
}

}  // namespace ngar
