#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

namespace ngar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Optional per-edge attribute tensor of shape N x N x S, stored row-major as
// values[(i * N + j) * S + s]. Entries are zero wherever the edge is absent.
struct EdgeAttributes {
  int dim = 0;
  std::vector<double> values;

  bool operator==(const EdgeAttributes&) const = default;
};

// Fixed-order graph with real node features X (N x F) and binary adjacency A.
// Immutable once constructed; the constructor enforces every invariant.
class AttributedGraph {
 public:
  AttributedGraph(Matrix node_features, Adjacency adjacency, bool directed = false,
                  std::optional<EdgeAttributes> edge_attributes = std::nullopt);

  // Edgeless graph with the given features.
  static AttributedGraph edgeless(Matrix node_features, bool directed = false);

  int order() const noexcept { return static_cast<int>(features_.rows()); }
  int feature_dim() const noexcept { return static_cast<int>(features_.cols()); }
  bool directed() const noexcept { return directed_; }

  const Matrix& features() const noexcept { return features_; }
  const Adjacency& adjacency() const noexcept { return adjacency_; }
  const std::optional<EdgeAttributes>& edge_attributes() const noexcept { return edge_attributes_; }
  int edge_attribute_dim() const noexcept { return edge_attributes_ ? edge_attributes_->dim : 0; }

  bool has_edge(int i, int j) const { return adjacency_(i, j) != 0; }
  // Number of edges; unordered pairs for undirected graphs.
  int edge_count() const;

  bool operator==(const AttributedGraph& other) const;

 private:
  Matrix features_;
  Adjacency adjacency_;
  bool directed_;
  std::optional<EdgeAttributes> edge_attributes_;
};

// True if both graphs have the same order, feature dimension, directedness
// and edge attribute dimension.
bool same_shape(const AttributedGraph& a, const AttributedGraph& b);

// Time-ordered list of graphs sharing N, F and directedness. The most recent
// graph is last.
class GraphSequence {
 public:
  GraphSequence() = default;
  explicit GraphSequence(std::vector<AttributedGraph> graphs);

  void push_back(AttributedGraph graph);

  std::size_t size() const noexcept { return graphs_.size(); }
  bool empty() const noexcept { return graphs_.empty(); }
  const AttributedGraph& operator[](std::size_t t) const { return graphs_[t]; }
  const AttributedGraph& front() const { return graphs_.front(); }
  const AttributedGraph& back() const { return graphs_.back(); }
  auto begin() const noexcept { return graphs_.begin(); }
  auto end() const noexcept { return graphs_.end(); }
  const std::vector<AttributedGraph>& graphs() const noexcept { return graphs_; }

  // Graphs [first, first + count).
  GraphSequence slice(std::size_t first, std::size_t count) const;

  bool operator==(const GraphSequence&) const = default;

 private:
  std::vector<AttributedGraph> graphs_;
};

}  // namespace ngar
