#include "ngar/distance.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ngar/errors.hpp"

namespace ngar {
namespace {

void check_comparable(const AttributedGraph& g, const AttributedGraph& h) {
  if (!same_shape(g, h))
    throw InvalidInput("graph distance requires equal order, feature dimension, "
                       "directedness and edge attribute dimension");
}

// Cost of the (i, j) slot of g against the (pi, pj) slot of h.
double edge_slot_cost(const AttributedGraph& g, int i, int j, const AttributedGraph& h, int pi,
                      int pj) {
  const bool in_g = g.has_edge(i, j);
  const bool in_h = h.has_edge(pi, pj);
  if (!in_g && !in_h) return 0.0;
  const int s_dim = g.edge_attribute_dim();
  if (s_dim == 0) return in_g == in_h ? 0.0 : 1.0;

  const int n = g.order();
  const double* eg = g.edge_attributes()->values.data() + (i * n + j) * s_dim;
  const double* eh = h.edge_attributes()->values.data() + (pi * n + pj) * s_dim;
  double cost = 0.0;
  if (in_g && in_h) {
    for (int s = 0; s < s_dim; ++s) cost += (eg[s] - eh[s]) * (eg[s] - eh[s]);
    return cost;
  }
  const double* e = in_g ? eg : eh;
  cost = 1.0;
  for (int s = 0; s < s_dim; ++s) cost += e[s] * e[s];
  return cost;
}

double node_cost(const AttributedGraph& g, int i, const AttributedGraph& h, int pi) {
  return (g.features().row(i) - h.features().row(pi)).squaredNorm();
}

// Edge cost contributed when node `i` is matched and all of nodes [0, i) already are.
double incremental_edge_cost(const AttributedGraph& g, const AttributedGraph& h,
                             const std::vector<int>& perm, int i) {
  double cost = 0.0;
  for (int j = 0; j < i; ++j) {
    cost += edge_slot_cost(g, j, i, h, perm[j], perm[i]);
    if (g.directed()) cost += edge_slot_cost(g, i, j, h, perm[i], perm[j]);
  }
  return cost;
}

class PermutationSearch {
 public:
  PermutationSearch(const AttributedGraph& g, const AttributedGraph& h, double edge_weight)
      : g_(g), h_(h), edge_weight_(edge_weight), n_(g.order()), perm_(n_), used_(n_, false) {}

  Alignment run() {
    best_.permutation.resize(n_);
    std::iota(best_.permutation.begin(), best_.permutation.end(), 0);
    best_.squared_distance = squared_distance(g_, h_, best_.permutation, edge_weight_);
    descend(0, 0.0);
    return best_;
  }

 private:
  void descend(int i, double partial) {
    if (i == n_) {
      // Leaves are re-scored in the canonical summation order so that the
      // result is bit-identical to squared_distance() on the returned permutation.
      const double total = squared_distance(g_, h_, perm_, edge_weight_);
      if (total < best_.squared_distance) {
        best_.squared_distance = total;
        best_.permutation = perm_;
      }
      return;
    }
    for (int candidate = 0; candidate < n_; ++candidate) {
      if (used_[candidate]) continue;
      perm_[i] = candidate;
      const double cost = partial + node_cost(g_, i, h_, candidate) +
                          edge_weight_ * incremental_edge_cost(g_, h_, perm_, i);
      // rounding slack
      if (cost > best_.squared_distance + 1e-12 * (1.0 + best_.squared_distance)) continue;
      used_[candidate] = true;
      descend(i + 1, cost);
      used_[candidate] = false;
    }
  }

  const AttributedGraph& g_;
  const AttributedGraph& h_;
  double edge_weight_;
  int n_;
  std::vector<int> perm_;
  std::vector<bool> used_;
  Alignment best_;
};

}  // namespace

double squared_distance(const AttributedGraph& g, const AttributedGraph& h,
                        const std::vector<int>& permutation, double edge_weight) {
  check_comparable(g, h);
  const int n = g.order();
  if (static_cast<int>(permutation.size()) != n)
    throw InvalidInput("permutation length must equal graph order");
  double nodes = 0.0;
  double edges = 0.0;
  for (int i = 0; i < n; ++i) {
    nodes += node_cost(g, i, h, permutation[i]);
    for (int j = i + 1; j < n; ++j) {
      edges += edge_slot_cost(g, i, j, h, permutation[i], permutation[j]);
      if (g.directed()) edges += edge_slot_cost(g, j, i, h, permutation[j], permutation[i]);
    }
  }
  return nodes + edge_weight * edges;
}

Alignment optimal_alignment(const AttributedGraph& g, const AttributedGraph& h,
                            const DistanceParams& params) {
  check_comparable(g, h);
  if (params.edge_weight < 0.0) throw InvalidInput("edge_weight must be nonnegative");
  if (g.order() > params.permutation_cap)
    throw CapabilityError("optimal-permutation distance supports at most " +
                          std::to_string(params.permutation_cap) + " nodes, got " +
                          std::to_string(g.order()));
  return PermutationSearch(g, h, params.edge_weight).run();
}

double ged_squared(const AttributedGraph& g, const AttributedGraph& h,
                   const DistanceParams& params) {
  if (params.edge_weight < 0.0) throw InvalidInput("edge_weight must be nonnegative");
  if (params.correspondence == Correspondence::optimal_permutation)
    return optimal_alignment(g, h, params).squared_distance;
  std::vector<int> identity(static_cast<std::size_t>(g.order()));
  std::iota(identity.begin(), identity.end(), 0);
  return squared_distance(g, h, identity, params.edge_weight);
}

double ged(const AttributedGraph& g, const AttributedGraph& h, const DistanceParams& params) {
  return std::sqrt(ged_squared(g, h, params));
}

}  // namespace ngar
