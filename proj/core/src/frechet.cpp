#include "ngar/frechet.hpp"

#include "ngar/errors.hpp"

namespace ngar {
namespace {

void check_sample(std::span<const AttributedGraph> sample) {
  if (sample.empty()) throw InvalidInput("Frechet statistics need a nonempty sample");
  for (const auto& g : sample)
    if (!same_shape(g, sample.front()))
      throw InvalidInput("all sample graphs must share N, F and directedness");
}

}  // namespace

double frechet_cost(const AttributedGraph& candidate, std::span<const AttributedGraph> sample,
                    const DistanceParams& params) {
  double total = 0.0;
  for (const auto& g : sample) total += ged_squared(candidate, g, params);
  return total;
}

AttributedGraph frechet_mean_closed_form(std::span<const AttributedGraph> sample,
                                         const DistanceParams& params) {
  check_sample(sample);
  if (params.correspondence != Correspondence::identity)
    throw CapabilityError("closed-form Frechet mean requires identity correspondence");
  if (params.edge_weight < 0.0) throw InvalidInput("edge_weight must be nonnegative");

  const auto& first = sample.front();
  const int n = first.order();
  const int s_dim = first.edge_attribute_dim();
  const double count = static_cast<double>(sample.size());

  // running mean, exact when every sample agrees
  Matrix features = first.features();
  for (std::size_t s = 1; s < sample.size(); ++s)
    features += (sample[s].features() - features) / static_cast<double>(s + 1);

  Adjacency adjacency = Adjacency::Zero(n, n);
  std::optional<EdgeAttributes> edge_attrs;
  if (s_dim > 0) edge_attrs = EdgeAttributes{s_dim, std::vector<double>(n * n * s_dim, 0.0)};

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || (!first.directed() && j < i)) continue;
      std::size_t present = 0;
      for (const auto& g : sample) present += g.has_edge(i, j);

      bool keep = false;
      if (s_dim == 0) {
        keep = 2 * present > sample.size();
      } else {
        // With the slot set to "edge", the optimal attribute is sum(e_present) / n
        // (absent graphs pull toward zero). Compare against leaving the slot empty.
        Vector sum = Vector::Zero(s_dim);
        double empty_cost = 0.0;
        double sum_sq = 0.0;
        for (const auto& g : sample) {
          if (!g.has_edge(i, j)) continue;
          Eigen::Map<const Vector> e(g.edge_attributes()->values.data() + (i * n + j) * s_dim,
                                     s_dim);
          sum += e;
          sum_sq += e.squaredNorm();
          empty_cost += 1.0 + e.squaredNorm();
        }
        const Vector mean_attr = sum / count;
        // sum over present |m - e|^2 + sum over absent (1 + |m|^2)
        const double absent = count - static_cast<double>(present);
        const double edge_cost = sum_sq - 2.0 * mean_attr.dot(sum) +
                                 static_cast<double>(present) * mean_attr.squaredNorm() +
                                 absent * (1.0 + mean_attr.squaredNorm());
        keep = edge_cost < empty_cost;
        if (keep) {
          for (int s = 0; s < s_dim; ++s) {
            edge_attrs->values[(i * n + j) * s_dim + s] = mean_attr[s];
            if (!first.directed()) edge_attrs->values[(j * n + i) * s_dim + s] = mean_attr[s];
          }
        }
      }
      if (keep) {
        adjacency(i, j) = 1;
        if (!first.directed()) adjacency(j, i) = 1;
      }
    }
  }
  return AttributedGraph(std::move(features), std::move(adjacency), first.directed(),
                         std::move(edge_attrs));
}

AttributedGraph frechet_mean_bruteforce(std::span<const AttributedGraph> sample,
                                        std::span<const AttributedGraph> candidates,
                                        const DistanceParams& params) {
  check_sample(sample);
  if (candidates.empty()) throw InvalidInput("candidate list must be nonempty");
  std::size_t best = 0;
  double best_cost = frechet_cost(candidates[0], sample, params);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double cost = frechet_cost(candidates[c], sample, params);
    if (cost < best_cost) {
      best_cost = cost;
      best = c;
    }
  }
  return candidates[best];
}

double frechet_variation(std::span<const AttributedGraph> sample, const DistanceParams& params) {
  const AttributedGraph mean = frechet_mean_closed_form(sample, params);
  return frechet_cost(mean, sample, params) / static_cast<double>(sample.size());
}

}  // namespace ngar
