#include "ngar/baselines.hpp"

#include "ngar/errors.hpp"
#include "ngar/frechet.hpp"

namespace ngar {

AttributedGraph predict_mean(const GraphSequence& train, const DistanceParams& params) {
  if (train.empty()) throw InvalidInput("Mean baseline needs a nonempty training sequence");
  return frechet_mean_closed_form(train.graphs(), params);
}

AttributedGraph predict_mart(const GraphSequence& window) {
  if (window.empty()) throw InvalidInput("Mart baseline needs a nonempty window");
  return window.back();
}

AttributedGraph predict_move(const GraphSequence& window, int k, const DistanceParams& params) {
  if (k < 1) throw InvalidInput("Move baseline needs k >= 1");
  if (window.size() < static_cast<std::size_t>(k))
    throw InvalidInput("Move baseline window holds " + std::to_string(window.size()) +
                       " graphs, needs k = " + std::to_string(k));
  const auto& graphs = window.graphs();
  return frechet_mean_closed_form(
      std::span<const AttributedGraph>(graphs).last(static_cast<std::size_t>(k)), params);
}

Adjacency binarize_symmetric(const Matrix& scores, double threshold) {
  const auto n = scores.rows();
  if (scores.cols() != n) throw InvalidInput("edge scores must be square");
  Adjacency a = Adjacency::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (0.5 * (scores(i, j) + scores(j, i)) > threshold) a(i, j) = a(j, i) = 1;
  return a;
}

}  // namespace ngar
