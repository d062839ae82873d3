#pragma once

#include <span>
#include <vector>

#include "ngar/distance.hpp"
#include "ngar/graph.hpp"

namespace ngar {

inline constexpr int kDefaultWindow = 20;

// Stationary i.i.d. assumption: the Frechet mean of all training graphs.
AttributedGraph predict_mean(const GraphSequence& train, const DistanceParams& params = {});

// Martingale assumption: the last graph of the window.
AttributedGraph predict_mart(const GraphSequence& window);

// Frechet mean of the last k graphs of the window.
AttributedGraph predict_move(const GraphSequence& window, int k = kDefaultWindow,
                             const DistanceParams& params = {});

// Vector autoregression on u_t = [vec(X_t); vec(A_t)], both row-major:
//   u_{t+1} = B_0 + sum_{i=1..k} B_i u_{t-i+1}.
struct VarModel {
  int n_nodes = 0;
  int feature_dim = 0;
  int order = 0;
  double ridge = 0.0;
  Vector intercept;                   // B_0, length D
  std::vector<Matrix> coefficients;   // B_1 .. B_k, each D x D

  int dim() const noexcept { return n_nodes * feature_dim + n_nodes * n_nodes; }
};

inline constexpr double kDefaultRidge = 1e-6;

// u_t for one graph.
Vector vectorize(const AttributedGraph& g);

// Ridge-regularised least squares over every t with a full lag window. The
// penalty covers all parameters, intercept included. Regressor columns that
// are identically zero over the training data (e.g. adjacency diagonals) are
// left out of the solve and get zero coefficients.
VarModel var_fit(const GraphSequence& train, int k = kDefaultWindow, double ridge = kDefaultRidge);

// Raw prediction u_{t+1} for a chronological window of exactly `order` graphs.
Vector var_predict_vector(const VarModel& model, const GraphSequence& window);

// Re-assembles u_{t+1}: first N*F entries row-major into X, next N^2 entries as
// adjacency scores binarised by pair mean > 0.5 with a zero diagonal.
AttributedGraph var_predict(const VarModel& model, const GraphSequence& window);

// Binarises edge scores: a_ij = a_ji = 1 iff (p_ij + p_ji) / 2 > threshold.
Adjacency binarize_symmetric(const Matrix& scores, double threshold = 0.5);

// Flat-list JSON form {n_nodes, feature_dim, order, ridge, intercept, coefficients}.
std::string var_model_to_json(const VarModel& model);
VarModel var_model_from_json(std::string_view text);

}  // namespace ngar
