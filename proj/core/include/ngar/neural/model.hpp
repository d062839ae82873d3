#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ngar/graph.hpp"
#include "ngar/neural/config.hpp"
#include "ngar/neural/layers.hpp"

namespace ngar::nn {

// Learnable parameters: graph convolutions and gated pooling (conv block),
// stacked LSTM (rnn block), hidden dense layers and the two output heads.
template <class T>
struct NgarParameters {
  std::vector<Dense<T>> conv;
  Dense<T> gate;
  Dense<T> projection;
  std::vector<LstmLayer<T>> lstm;
  std::vector<Dense<T>> dense;
  Dense<T> adjacency_head;
  Dense<T> feature_head;
};

// Flat, named view of one parameter array (row-major storage).
template <class T>
struct ParameterView {
  std::string name;
  T* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool regularized;  // weights of conv and hidden dense layers

  Eigen::Index size() const { return rows * cols; }
};

// Deterministic order; identical for any two parameter sets of the same shape.
template <class T>
std::vector<ParameterView<T>> parameter_views(NgarParameters<T>& params);
template <class T>
std::vector<ParameterView<const T>> parameter_views(const NgarParameters<T>& params);

template <class T>
NgarParameters<T> zeros_like(const NgarParameters<T>& params);

template <class T>
std::size_t parameter_count(const NgarParameters<T>& params);

// Full model: parameters plus Adam state.
template <class T>
struct NgarModel {
  NgarConfig config;
  int n_nodes = 0;
  int feature_dim = 0;
  NgarParameters<T> params;
  NgarParameters<T> adam_m;
  NgarParameters<T> adam_v;
  std::int64_t step = 0;
};

// Glorot-uniform kernels, orthogonal recurrent kernels, zero biases with unit
// LSTM forget bias. The draws depend only on config.seed, not on T.
template <class T>
NgarModel<T> init_model(const NgarConfig& config, int n_nodes, int feature_dim);

template <class S, class T>
NgarModel<S> cast_model(const NgarModel<T>& model);

// A graph sequence in network-ready form. Graph t occupies rows [t*N, (t+1)*N)
// of each stacked matrix.
template <class T>
struct PreparedSequence {
  int n_nodes = 0;
  int feature_dim = 0;
  Mat<T> features;    // T*N x F
  Mat<T> adj_norm;    // T*N x N
  Mat<T> adjacency;   // T*N x N, 0/1

  std::size_t size() const {
    return n_nodes == 0 ? 0 : static_cast<std::size_t>(features.rows() / n_nodes);
  }
};

template <class T>
PreparedSequence<T> prepare_sequence(const GraphSequence& sequence);

// Network outputs for a batch, one row per sample.
template <class T>
struct BatchOutput {
  Mat<T> adjacency_logits;  // B x N^2 (row-major N x N)
  Mat<T> adjacency_prob;    // B x N^2
  Mat<T> features;          // B x N*F (row-major N x F)
};

struct LossBreakdown {
  double total = 0.0;        // data terms + L2 penalty
  double feature_mse = 0.0;
  double adjacency_logloss = 0.0;
  double l2_penalty = 0.0;
};

inline constexpr double kProbabilityClip = 1e-7;

// Sum of squared regularised weights.
template <class T>
double l2_norm_squared(const NgarParameters<T>& params);

// Forward pass over the windows ending just before each entry of `targets`
// (window for target t is graphs t-k .. t-1 of `data`).
template <class T>
BatchOutput<T> forward_batch(const NgarModel<T>& model, const PreparedSequence<T>& data,
                             std::span<const long> targets);

// Mean loss over the batch; if `grads` is non-null it receives the exact
// gradient of that loss.
template <class T>
LossBreakdown loss_and_gradient(const NgarModel<T>& model, const PreparedSequence<T>& data,
                                std::span<const long> targets, NgarParameters<T>* grads);

// --- single-window API -----------------------------------------------------

struct NgarOutput {
  Matrix adjacency_prob;  // N x N
  Matrix features;        // N x F
};

// `window` holds exactly k graphs, oldest first.
template <class T>
NgarOutput ngar_forward(const NgarModel<T>& model, const GraphSequence& window);

// Pooled embedding of a single graph (conv block only).
template <class T>
Eigen::RowVectorXd embed_graph(const NgarModel<T>& model, const AttributedGraph& graph);

// Per-sample loss of a prediction against a target, including the L2 penalty.
LossBreakdown ngar_loss(const Matrix& adjacency_prob, const Matrix& features,
                        const AttributedGraph& target, double l2_weight, double l2_norm_sq);

template <class T>
LossBreakdown ngar_loss(const NgarModel<T>& model, const GraphSequence& window,
                        const AttributedGraph& target);

template <class T>
NgarParameters<T> ngar_backward(const NgarModel<T>& model, const GraphSequence& window,
                                const AttributedGraph& target);

// One Adam update with bias correction; increments model.step.
template <class T>
void adam_step(NgarModel<T>& model, const NgarParameters<T>& grads, double learning_rate,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Thresholded, symmetrised prediction with zero diagonal.
template <class T>
AttributedGraph ngar_predict(const NgarModel<T>& model, const GraphSequence& window);

AttributedGraph assemble_prediction(const Matrix& adjacency_prob, const Matrix& features,
                                    double threshold);

// Test-set metrics over every target in `targets`.
struct NgarMetrics {
  double loss = 0.0;  // mean data loss + L2 penalty
  double feature_mse = 0.0;
  double adjacency_logloss = 0.0;
  double adjacency_accuracy = 0.0;  // over all N^2 entries, after binarisation
  std::size_t samples = 0;
};

template <class T>
NgarMetrics evaluate_model(const NgarModel<T>& model, const PreparedSequence<T>& data,
                           std::span<const long> targets);

// Predicted graphs for each target, in order.
template <class T>
std::vector<AttributedGraph> predict_batch(const NgarModel<T>& model,
                                           const PreparedSequence<T>& data,
                                           std::span<const long> targets);

}  // namespace ngar::nn
