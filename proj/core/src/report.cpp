#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json_io.hpp"
#include "ngar/errors.hpp"
#include "ngar/harness.hpp"

namespace ngar {
namespace {

using detail::Json;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

Json summary_json(const ResidualSummary& s) {
  return {{"count", s.count}, {"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"mean", s.mean}};
}

Json history_json(const nn::TrainingHistory& h) {
  Json curve = Json::array();
  for (const auto& e : h.epochs)
    curve.push_back({{"epoch", e.epoch},
                     {"train_loss", e.train_loss},
                     {"validation_loss", e.validation_loss}});
  return {{"epochs", curve},
          {"best_epoch", h.best_epoch},
          {"best_validation_loss", h.best_validation_loss},
          {"train_pairs", h.train_pairs},
          {"validation_pairs", h.validation_pairs},
          {"early_stopped", h.early_stopped}};
}

Json metrics_json(const nn::NgarMetrics& m) {
  return {{"loss", m.loss},
          {"feature_mse", m.feature_mse},
          {"adjacency_logloss", m.adjacency_logloss},
          {"adjacency_accuracy", m.adjacency_accuracy},
          {"samples", m.samples}};
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

Json config_json(const ExperimentConfig& c) {
  Json methods = Json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  return {{"generator", detail::ggp_config_to_json(c.generator)},
          {"total_steps", c.total_steps},
          {"test_fraction", c.test_fraction},
          {"window", c.window},
          {"methods", methods},
          {"edge_weight", c.distance.edge_weight},
          {"correspondence", c.distance.correspondence == Correspondence::identity
                                 ? "identity"
                                 : "optimal_permutation"},
          {"ngar", detail::ngar_config_to_json(c.ngar)},
          {"var_ridge", c.var_ridge},
          {"output_dir", c.output_dir.string()},
          {"seed", c.seed}};
}

ExperimentConfig config_from(const Json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw InvalidInput("experiment config must be a JSON object");
  if (j.contains("generator")) c.generator = detail::ggp_config_from_json(j.at("generator"));
  c.total_steps = j.value("total_steps", c.total_steps);
  c.test_fraction = j.value("test_fraction", c.test_fraction);
  c.window = j.value("window", c.window);
  if (j.contains("methods")) {
    c.methods.clear();
    const auto& m = j.at("methods");
    if (m.is_string()) {
      c.methods = parse_methods(m.get<std::string>());
    } else {
      for (const auto& name : m) c.methods.push_back(parse_method(name.get<std::string>()));
    }
  }
  c.distance.edge_weight = j.value("edge_weight", c.distance.edge_weight);
  const std::string corr = j.value("correspondence", std::string("identity"));
  if (corr == "identity")
    c.distance.correspondence = Correspondence::identity;
  else if (corr == "optimal_permutation")
    c.distance.correspondence = Correspondence::optimal_permutation;
  else
    throw InvalidInput("unknown correspondence '" + corr + "'");
  if (j.contains("ngar")) c.ngar = detail::ngar_config_from_json(j.at("ngar"));
  c.ngar.window = c.window;
  c.var_ridge = j.value("var_ridge", c.var_ridge);
  c.output_dir = j.value("output_dir", std::string());
  c.seed = j.value("seed", c.seed);
  return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string generator_name(const GgpConfig& g) {
  return std::holds_alternative<RotationalConfig>(g) ? "rotational" : "pmlds";
}

int complexity(const GgpConfig& g) {
  if (const auto* r = std::get_if<RotationalConfig>(&g)) return r->order;
  return std::get<PmldsConfig>(g).complexity;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  Json methods = Json::array();
  for (const auto& m : report.methods)
    methods.push_back({{"method", method_name(m.method)},
                       {"summary", summary_json(m.summary)},
                       {"residuals", m.residuals}});
  Json j = {{"config", config_json(report.config)},
            {"sequence_length", report.sequence_length},
            {"train_size", report.train_size},
            {"test_size", report.test_size},
            {"train_hash", hex(report.train_hash)},
            {"methods", methods}};
  if (report.ngar_metrics) j["ngar_metrics"] = metrics_json(*report.ngar_metrics);
  if (report.ngar_history) j["ngar_training"] = history_json(*report.ngar_history);
  return j.dump(2) + "\n";
}

std::string residuals_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "record,method,index,residual,median,q1,q3,mean\n";
  for (const auto& m : report.methods) {
    const auto& s = m.summary;
    os << "summary," << method_name(m.method) << ",," << "," << fmt(s.median) << ','
       << fmt(s.q1) << ',' << fmt(s.q3) << ',' << fmt(s.mean) << '\n';
  }
  for (const auto& m : report.methods)
    for (std::size_t i = 0; i < m.residuals.size(); ++i)
      os << "residual," << method_name(m.method) << ',' << i << ',' << fmt(m.residuals[i])
         << ",,,,\n";
  return os.str();
}

std::string metrics_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "metric,value\n";
  if (report.ngar_metrics) {
    const auto& m = *report.ngar_metrics;
    os << "loss," << fmt(m.loss) << '\n'
       << "feature_mse," << fmt(m.feature_mse) << '\n'
       << "adjacency_logloss," << fmt(m.adjacency_logloss) << '\n'
       << "adjacency_accuracy," << fmt(m.adjacency_accuracy) << '\n'
       << "samples," << m.samples << '\n';
  }
  if (report.ngar_history) {
    const auto& h = *report.ngar_history;
    os << "best_epoch," << h.best_epoch << '\n'
       << "best_validation_loss," << fmt(h.best_validation_loss) << '\n'
       << "epochs_run," << h.epochs.size() << '\n';
  }
  return os.str();
}

std::string sweep_summary_csv(const std::vector<SweepEntry>& entries) {
  std::ostringstream os;
  os << "generator,complexity,seed,method,median,q1,q3,mean,count,error\n";
  for (const auto& e : entries) {
    const std::string prefix = generator_name(e.config.generator) + ',' +
                               std::to_string(complexity(e.config.generator)) + ',' +
                               std::to_string(e.config.seed) + ',';
    if (!e.report) {
      std::string err = e.error;
      for (char& ch : err)
        if (ch == ',' || ch == '\n') ch = ' ';
      os << prefix << ",,,,,," << err << '\n';
      continue;
    }
    for (const auto& m : e.report->methods) {
      const auto& s = m.summary;
      os << prefix << method_name(m.method) << ',' << fmt(s.median) << ',' << fmt(s.q1) << ','
         << fmt(s.q3) << ',' << fmt(s.mean) << ',' << s.count << ",\n";
    }
  }
  return os.str();
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  for (ReportFormat f : formats) {
    if (f == ReportFormat::json) {
      write_file(dir / "report.json", report_to_json(report));
    } else {
      write_file(dir / "residuals.csv", residuals_csv(report));
      write_file(dir / "metrics.csv", metrics_csv(report));
    }
  }
  Json timings = {{"generate_seconds", report.generate_seconds}};
  for (const auto& m : report.methods)
    timings[method_name(m.method)] = {{"fit_seconds", m.fit_seconds},
                                      {"predict_seconds", m.predict_seconds}};
  if (report.ngar_history) {
    Json epochs = Json::array();
    for (const auto& e : report.ngar_history->epochs) epochs.push_back(e.seconds);
    timings["ngar_epoch_seconds"] = epochs;
  }
  write_file(dir / "timings.json", timings.dump(2) + "\n");
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump();
}

ExperimentConfig experiment_config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ParseError(1, e.what());
  }
  try {
    return config_from(j);
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("experiment config: ") + e.what());
  }
}

std::vector<ExperimentConfig> load_experiment_configs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<ExperimentConfig> configs;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(number, e.what());
    }
    try {
      configs.push_back(config_from(j));
    } catch (const Json::exception& e) {
      throw ParseError(number, e.what());
    }
  }
  return configs;
}

}  // namespace ngar
