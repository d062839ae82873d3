#include "ngar/dataset_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

#include "json_io.hpp"
#include "ngar/errors.hpp"

namespace ngar {
namespace detail {

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows * cols))
    throw InvalidInput("expected a flat list of " + std::to_string(rows * cols) + " numbers");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j.at(i * cols + c).get<double>();
  return m;
}

Json ggp_config_to_json(const GgpConfig& config) {
  return std::visit(
      [](const auto& c) -> Json {
        using C = std::decay_t<decltype(c)>;
        Json j;
        if constexpr (std::is_same_v<C, RotationalConfig>) {
          j["type"] = "rotational";
          j["n_nodes"] = c.n_nodes;
          j["feature_dim"] = c.feature_dim;
          j["order"] = c.order;
          j["phase_offsets"] = c.phase_offsets;
          j["amplitude"] = c.amplitude;
        } else {
          j["type"] = "pmlds";
          j["n_nodes"] = c.n_nodes;
          j["feature_dim"] = c.feature_dim;
          j["complexity"] = c.complexity;
          j["dynamics_matrix"] = matrix_to_json(c.dynamics_matrix);
        }
        j["noise_std"] = c.noise_std;
        j["seed"] = c.seed;
        return j;
      },
      config);
}

GgpConfig ggp_config_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  const auto seed = j.value("seed", std::uint64_t{0});
  if (type == "rotational") {
    RotationalConfig c = make_rotational_config(j.value("n_nodes", 5), j.value("order", 1), seed,
                                                j.value("noise_std", 0.001),
                                                j.value("amplitude", 0.01));
    c.feature_dim = j.value("feature_dim", 2);
    if (j.contains("phase_offsets")) c.phase_offsets = j.at("phase_offsets").get<std::vector<double>>();
    c.validate();
    return c;
  }
  if (type == "pmlds") {
    const int n = j.value("n_nodes", 5);
    const int f = j.value("feature_dim", 2);
    const int complexity = j.value("complexity", 11);
    PmldsConfig c;
    if (j.contains("dynamics_matrix")) {
      c.n_nodes = n;
      c.feature_dim = f;
      c.complexity = complexity;
      c.seed = seed;
      c.noise_std = j.value("noise_std", 0.001);
      c.dynamics_matrix = matrix_from_json(j.at("dynamics_matrix"), complexity, complexity);
    } else {
      c = make_pmlds_config(n, f, complexity, seed, j.value("noise_std", 0.001));
    }
    c.validate();
    return c;
  }
  throw InvalidInput("unknown generator type '" + type + "'");
}

Json graph_to_json(const AttributedGraph& g, long t) {
  Json j;
  j["t"] = t;
  j["N"] = g.order();
  j["F"] = g.feature_dim();
  j["X"] = matrix_to_json(g.features());
  Json a = Json::array();
  for (int r = 0; r < g.order(); ++r)
    for (int c = 0; c < g.order(); ++c) a.push_back(static_cast<int>(g.adjacency()(r, c)));
  j["A"] = std::move(a);
  if (g.directed()) j["directed"] = true;
  if (g.edge_attributes()) {
    j["S"] = g.edge_attributes()->dim;
    j["E"] = g.edge_attributes()->values;
  }
  return j;
}

AttributedGraph graph_from_json(const Json& j) {
  const int n = j.at("N").get<int>();
  const int f = j.at("F").get<int>();
  if (n < 1 || f < 0) throw InvalidInput("invalid graph dimensions");
  Matrix x = matrix_from_json(j.at("X"), n, f);
  const Json& a_json = j.at("A");
  if (!a_json.is_array() || a_json.size() != static_cast<std::size_t>(n * n))
    throw InvalidInput("A must be a flat list of N*N entries");
  Adjacency a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int v = a_json.at(r * n + c).get<int>();
      if (v != 0 && v != 1) throw InvalidInput("adjacency entries must be 0 or 1");
      a(r, c) = static_cast<std::uint8_t>(v);
    }
  std::optional<EdgeAttributes> e;
  if (j.contains("E")) e = EdgeAttributes{j.at("S").get<int>(), j.at("E").get<std::vector<double>>()};
  return AttributedGraph(std::move(x), std::move(a), j.value("directed", false), std::move(e));
}

}  // namespace detail

void save_sequence(const GraphSequence& sequence, const std::filesystem::path& path,
                   const std::optional<GgpConfig>& origin) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  detail::Json header;
  header["format"] = "ngar-sequence";
  header["version"] = 1;
  header["length"] = sequence.size();
  header["generator"] = origin ? detail::ggp_config_to_json(*origin) : detail::Json(nullptr);
  out << header.dump() << '\n';
  for (std::size_t t = 0; t < sequence.size(); ++t)
    out << detail::graph_to_json(sequence[t], static_cast<long>(t)).dump() << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = detail::Json::parse(line);
      if (!have_header) {
        if (j.value("format", std::string{}) != "ngar-sequence")
          throw InvalidInput("missing ngar-sequence header");
        expected = j.at("length").get<std::size_t>();
        if (!j.at("generator").is_null())
          dataset.origin = detail::ggp_config_from_json(j.at("generator"));
        have_header = true;
        continue;
      }
      if (j.at("t").get<std::size_t>() != dataset.sequence.size())
        throw InvalidInput("records out of order");
      dataset.sequence.push_back(detail::graph_from_json(j));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(line_no + 1, "empty file, expected header record");
  if (dataset.sequence.size() != expected)
    throw ParseError(line_no + 1, "truncated file: expected " + std::to_string(expected) +
                                      " graph records, found " +
                                      std::to_string(dataset.sequence.size()));
  return dataset;
}

GraphSequence load_sequence(const std::filesystem::path& path) {
  return load_dataset(path).sequence;
}

void export_csv(const GraphSequence& sequence, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "t";
  if (!sequence.empty()) {
    const int n = sequence.front().order();
    const int f = sequence.front().feature_dim();
    for (int i = 0; i < n * f; ++i) out << ",x_" << i;
    for (int i = 0; i < n * n; ++i) out << ",a_" << i;
  }
  out << '\n';
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const auto& g = sequence[t];
    out << t;
    for (int i = 0; i < g.order(); ++i)
      for (int c = 0; c < g.feature_dim(); ++c) out << ',' << g.features()(i, c);
    for (int i = 0; i < g.order(); ++i)
      for (int c = 0; c < g.order(); ++c) out << ',' << static_cast<int>(g.adjacency()(i, c));
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string ggp_config_to_json(const GgpConfig& config) {
  return detail::ggp_config_to_json(config).dump();
}

GgpConfig ggp_config_from_json(std::string_view text) {
  try {
    return detail::ggp_config_from_json(detail::Json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(1, e.what());
  }
}

}  // namespace ngar
