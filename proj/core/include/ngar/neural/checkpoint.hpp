#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ngar/neural/model.hpp"

namespace ngar::nn {

// Dense row-major array.
template <class T>
struct Tensor {
  std::vector<Eigen::Index> shape;
  std::vector<T> data;

  bool operator==(const Tensor&) const = default;
};

template <class T>
using NamedTensors = std::vector<std::pair<std::string, Tensor<T>>>;

// Parameters followed by Adam moments ("adam.m/<name>", "adam.v/<name>").
template <class T>
NamedTensors<T> export_tensors(const NgarModel<T>& model);

// Overwrites the arrays of `model` (whose shapes must already match).
template <class T>
void import_tensors(NgarModel<T>& model, const NamedTensors<T>& tensors);

// Binary container: a magic line, one JSON header line (config, dimensions,
// step counter, scalar type, array names and shapes), then the raw array data
// in header order. Round-trips bit-exactly.
template <class T>
void save_checkpoint(const NgarModel<T>& model, const std::filesystem::path& path);

// Arrays stored in the other precision are converted.
template <class T>
NgarModel<T> load_checkpoint(const std::filesystem::path& path);

std::string ngar_config_to_json(const NgarConfig& config);
NgarConfig ngar_config_from_json(std::string_view text);

}  // namespace ngar::nn
