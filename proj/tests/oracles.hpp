#pragma once

// Independent reference implementations used by the tests. None of these call
// into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "ngar/graph.hpp"

namespace oracle {

using ngar::Adjacency;
using ngar::AttributedGraph;
using ngar::Matrix;

inline AttributedGraph random_graph(std::mt19937_64& rng, int n, int f, double edge_prob = 0.5,
                                    bool directed = false) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution edge(edge_prob);
  Matrix x(n, f);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < f; ++c) x(i, c) = normal(rng);
  Adjacency a = Adjacency::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j) continue;
      const bool e = edge(rng);
      a(i, j) = e;
      if (!directed) a(j, i) = e;
    }
  return AttributedGraph(x, a, directed);
}

// Squared distance with node i of g matched to node perm[i] of h, written as
// plain loops over the formula: sum_i |x_i - x'_pi(i)|^2 + alpha * sum (a - a')^2.
inline double cost(const AttributedGraph& g, const AttributedGraph& h, const std::vector<int>& perm,
                   double alpha) {
  const int n = g.order();
  double nodes = 0.0;
  for (int i = 0; i < n; ++i) {
    double sq = 0.0;
    for (int c = 0; c < g.feature_dim(); ++c) {
      const double d = g.features()(i, c) - h.features()(perm[i], c);
      sq += d * d;
    }
    nodes += sq;
  }
  double edges = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || (!g.directed() && j < i)) continue;
      const int d = int(g.adjacency()(i, j)) - int(h.adjacency()(perm[i], perm[j]));
      edges += d * d;
    }
  return nodes + alpha * edges;
}

inline double min_over_permutations(const AttributedGraph& g, const AttributedGraph& h,
                                    double alpha) {
  std::vector<int> perm(g.order());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do best = std::min(best, cost(g, h, perm, alpha));
  while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Delaunay edges from explicit circumcentres: (i, j) is an edge iff some
// non-collinear triple containing both has no other point strictly inside its
// circumcircle.
inline Adjacency delaunay(const Matrix& p) {
  const int n = static_cast<int>(p.rows());
  Adjacency a = Adjacency::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double ax = p(i, 0), ay = p(i, 1), bx = p(j, 0), by = p(j, 1), cx = p(k, 0),
                     cy = p(k, 1);
        const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        if (d == 0.0) continue;
        const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        const double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        const double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        const double r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
        bool empty = true;
        for (int m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          const double dx = p(m, 0) - ux, dy = p(m, 1) - uy;
          if (dx * dx + dy * dy < r2) empty = false;
        }
        if (!empty) continue;
        a(i, j) = a(j, i) = 1;
        a(i, k) = a(k, i) = 1;
        a(j, k) = a(k, j) = 1;
      }
  return a;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Relative error used by the gradient checks.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace oracle
