#include "ngar/neural/checkpoint.hpp"

#include <fstream>

#include "../json_io.hpp"
#include "ngar/errors.hpp"

namespace ngar {
namespace detail {

Json ngar_config_to_json(const NgarConfig& c) {
  Json j;
  j["window"] = c.window;
  j["conv_channels"] = c.conv_channels;
  j["pool_channels"] = c.pool_channels;
  j["rnn_units"] = c.rnn_units;
  j["dense_units"] = c.dense_units;
  j["l2_weight"] = c.l2_weight;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["patience"] = c.patience;
  j["max_epochs"] = c.max_epochs;
  j["adjacency_threshold"] = c.adjacency_threshold;
  j["validation_fraction"] = c.validation_fraction;
  j["seed"] = c.seed;
  return j;
}

NgarConfig ngar_config_from_json(const Json& j) {
  NgarConfig c;
  c.window = j.value("window", c.window);
  c.conv_channels = j.value("conv_channels", c.conv_channels);
  c.pool_channels = j.value("pool_channels", c.pool_channels);
  c.rnn_units = j.value("rnn_units", c.rnn_units);
  c.dense_units = j.value("dense_units", c.dense_units);
  c.l2_weight = j.value("l2_weight", c.l2_weight);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.adjacency_threshold = j.value("adjacency_threshold", c.adjacency_threshold);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

}  // namespace detail

namespace nn {
namespace {

constexpr char kMagic[] = "NGARCKPT";

template <class T>
const char* scalar_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

template <class T>
Tensor<T> to_tensor(const ParameterView<const T>& v) {
  Tensor<T> t;
  t.shape = {v.rows, v.cols};
  t.data.assign(v.data, v.data + v.size());
  return t;
}

template <class T>
void from_tensor(const Tensor<T>& t, const ParameterView<T>& v) {
  if (t.shape.size() != 2 || t.shape[0] != v.rows || t.shape[1] != v.cols)
    throw InvalidInput("tensor '" + v.name + "' has the wrong shape");
  std::copy(t.data.begin(), t.data.end(), v.data);
}

template <class T>
NgarModel<T> read_checkpoint(std::istream& in, const detail::Json& header,
                             const std::filesystem::path& path) {
  NgarModel<T> model = init_model<T>(detail::ngar_config_from_json(header.at("config")),
                                     header.at("n_nodes").get<int>(),
                                     header.at("feature_dim").get<int>());
  model.step = header.at("step").get<std::int64_t>();
  NamedTensors<T> tensors;
  for (const auto& entry : header.at("arrays")) {
    Tensor<T> t;
    t.shape = entry.at("shape").get<std::vector<Eigen::Index>>();
    Eigen::Index count = 1;
    for (auto d : t.shape) count *= d;
    t.data.resize(static_cast<std::size_t>(count));
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(T)));
    if (!in) throw ParseError(3, "truncated checkpoint '" + path.string() + "'");
    tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  import_tensors(model, tensors);
  return model;
}

}  // namespace

template <class T>
NamedTensors<T> export_tensors(const NgarModel<T>& model) {
  NamedTensors<T> out;
  const std::pair<const char*, const NgarParameters<T>*> groups[] = {
      {"", &model.params}, {"adam.m/", &model.adam_m}, {"adam.v/", &model.adam_v}};
  for (const auto& [prefix, params] : groups)
    for (const auto& v : parameter_views(*params))
      out.emplace_back(prefix + v.name, to_tensor(v));
  return out;
}

template <class T>
void import_tensors(NgarModel<T>& model, const NamedTensors<T>& tensors) {
  std::vector<ParameterView<T>> views;
  for (auto* params : {&model.params, &model.adam_m, &model.adam_v}) {
    auto v = parameter_views(*params);
    views.insert(views.end(), v.begin(), v.end());
  }
  const std::string prefixes[] = {"", "adam.m/", "adam.v/"};
  const std::size_t per_group = views.size() / 3;
  if (tensors.size() != views.size()) throw InvalidInput("tensor count does not match the model");
  for (std::size_t i = 0; i < views.size(); ++i) {
    const std::string expected = prefixes[i / per_group] + views[i].name;
    if (tensors[i].first != expected)
      throw InvalidInput("expected tensor '" + expected + "', found '" + tensors[i].first + "'");
    from_tensor(tensors[i].second, views[i]);
  }
}

template <class T>
void save_checkpoint(const NgarModel<T>& model, const std::filesystem::path& path) {
  const NamedTensors<T> tensors = export_tensors(model);
  detail::Json header;
  header["version"] = 1;
  header["scalar"] = scalar_name<T>();
  header["n_nodes"] = model.n_nodes;
  header["feature_dim"] = model.feature_dim;
  header["step"] = model.step;
  header["config"] = detail::ngar_config_to_json(model.config);
  detail::Json arrays = detail::Json::array();
  for (const auto& [name, t] : tensors) arrays.push_back({{"name", name}, {"shape", t.shape}});
  header["arrays"] = std::move(arrays);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kMagic << '\n' << header.dump() << '\n';
  for (const auto& entry : tensors)
    out.write(reinterpret_cast<const char*>(entry.second.data.data()),
              static_cast<std::streamsize>(entry.second.data.size() * sizeof(T)));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

template <class T>
NgarModel<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ParseError(1, "'" + path.string() + "' is not an NGAR checkpoint");
  if (!std::getline(in, line)) throw ParseError(2, "missing checkpoint header");
  detail::Json header;
  try {
    header = detail::Json::parse(line);
  } catch (const std::exception& e) {
    throw ParseError(2, e.what());
  }
  const std::string scalar = header.value("scalar", std::string{});
  if (scalar == scalar_name<T>()) return read_checkpoint<T>(in, header, path);
  if (scalar == "f32") return cast_model<T>(read_checkpoint<float>(in, header, path));
  if (scalar == "f64") return cast_model<T>(read_checkpoint<double>(in, header, path));
  throw ParseError(2, "unknown scalar type '" + scalar + "'");
}

std::string ngar_config_to_json(const NgarConfig& config) {
  return detail::ngar_config_to_json(config).dump();
}

NgarConfig ngar_config_from_json(std::string_view text) {
  try {
    return detail::ngar_config_from_json(detail::Json::parse(text));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(1, e.what());
  }
}

template NamedTensors<float> export_tensors<float>(const NgarModel<float>&);
template NamedTensors<double> export_tensors<double>(const NgarModel<double>&);
template void import_tensors<float>(NgarModel<float>&, const NamedTensors<float>&);
template void import_tensors<double>(NgarModel<double>&, const NamedTensors<double>&);
template void save_checkpoint<float>(const NgarModel<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(const NgarModel<double>&, const std::filesystem::path&);
template NgarModel<float> load_checkpoint<float>(const std::filesystem::path&);
template NgarModel<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace nn
}  // namespace ngar
