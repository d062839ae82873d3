#pragma once

#include <vector>

#include "ngar/graph.hpp"

namespace ngar {

enum class Correspondence { identity, optimal_permutation };

// Configuration of the graph edit distance
//
//   d(g, g')^2 = sum_i |x_i - x'_pi(i)|^2 + edge_weight * sum_{i<j} (a_ij - a'_pi(i)pi(j))^2
//
// where pi is the identity or the cost-minimising node permutation. Directed
// graphs sum the edge term over all ordered pairs i != j. With edge attributes,
// an edge present in both graphs costs edge_weight * |e - e'|^2 and an edge
// present in only one costs edge_weight * (1 + |e|^2).
struct DistanceParams {
  double edge_weight = 1.0;
  Correspondence correspondence = Correspondence::identity;
  // Largest order for which the exhaustive permutation search is attempted.
  int permutation_cap = 8;
};

struct Alignment {
  double squared_distance = 0.0;
  // permutation[i] is the node of the second graph matched to node i of the first.
  std::vector<int> permutation;
};

// Squared distance under an explicit node correspondence.
double squared_distance(const AttributedGraph& g, const AttributedGraph& h,
                        const std::vector<int>& permutation, double edge_weight);

// Exact minimum over all node permutations (branch and bound).
Alignment optimal_alignment(const AttributedGraph& g, const AttributedGraph& h,
                            const DistanceParams& params);

double ged_squared(const AttributedGraph& g, const AttributedGraph& h,
                   const DistanceParams& params = {});

double ged(const AttributedGraph& g, const AttributedGraph& h, const DistanceParams& params = {});

}  // namespace ngar
