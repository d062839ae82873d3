#include "ngar/graph.hpp"

#include <string>

#include "ngar/errors.hpp"

namespace ngar {

AttributedGraph::AttributedGraph(Matrix node_features, Adjacency adjacency, bool directed,
                                 std::optional<EdgeAttributes> edge_attributes)
    : features_(std::move(node_features)),
      adjacency_(std::move(adjacency)),
      directed_(directed),
      edge_attributes_(std::move(edge_attributes)) {
  const auto n = features_.rows();
  if (n < 1) throw InvalidInput("graph must have at least one node");
  if (adjacency_.rows() != n || adjacency_.cols() != n)
    throw InvalidInput("adjacency must be " + std::to_string(n) + "x" + std::to_string(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0) throw InvalidInput("adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency_(i, j) > 1) throw InvalidInput("adjacency entries must be 0 or 1");
      if (!directed_ && adjacency_(i, j) != adjacency_(j, i))
        throw InvalidInput("undirected graph requires a symmetric adjacency");
    }
  }
  if (edge_attributes_) {
    const auto& e = *edge_attributes_;
    if (e.dim < 1) throw InvalidInput("edge attribute dimension must be positive");
    if (e.values.size() != static_cast<std::size_t>(n * n * e.dim))
      throw InvalidInput("edge attribute tensor must have N*N*S entries");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double* row = e.values.data() + (i * n + j) * e.dim;
        for (int s = 0; s < e.dim; ++s) {
          if (adjacency_(i, j) == 0 && row[s] != 0.0)
            throw InvalidInput("edge attributes must be zero where there is no edge");
          if (!directed_ && row[s] != e.values[(j * n + i) * e.dim + s])
            throw InvalidInput("undirected graph requires symmetric edge attributes");
        }
      }
  }
}

AttributedGraph AttributedGraph::edgeless(Matrix node_features, bool directed) {
  const auto n = node_features.rows();
  return AttributedGraph(std::move(node_features), Adjacency::Zero(n, n), directed);
}

int AttributedGraph::edge_count() const {
  int total = 0;
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i)
    for (Eigen::Index j = 0; j < adjacency_.cols(); ++j) total += adjacency_(i, j);
  return directed_ ? total : total / 2;
}

bool AttributedGraph::operator==(const AttributedGraph& other) const {
  return directed_ == other.directed_ && features_.rows() == other.features_.rows() &&
         features_.cols() == other.features_.cols() && features_ == other.features_ &&
         adjacency_ == other.adjacency_ && edge_attributes_ == other.edge_attributes_;
}

bool same_shape(const AttributedGraph& a, const AttributedGraph& b) {
  return a.order() == b.order() && a.feature_dim() == b.feature_dim() &&
         a.directed() == b.directed() && a.edge_attribute_dim() == b.edge_attribute_dim();
}

GraphSequence::GraphSequence(std::vector<AttributedGraph> graphs) {
  graphs_.reserve(graphs.size());
  for (auto& g : graphs) push_back(std::move(g));
}

void GraphSequence::push_back(AttributedGraph graph) {
  if (!graphs_.empty() && !same_shape(graphs_.front(), graph))
    throw InvalidInput("all graphs in a sequence must share N, F and directedness");
  graphs_.push_back(std::move(graph));
}

GraphSequence GraphSequence::slice(std::size_t first, std::size_t count) const {
  if (first + count > graphs_.size()) throw InvalidInput("sequence slice out of range");
  GraphSequence out;
  out.graphs_.assign(graphs_.begin() + static_cast<std::ptrdiff_t>(first),
                     graphs_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

}  // namespace ngar
