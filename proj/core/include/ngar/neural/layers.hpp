#pragma once

// Dense-matrix building blocks of the NGAR network, with hand-written
// reverse-mode gradients. Every kernel works on a batch: node-level tensors
// stack the N rows of each graph one graph after another, so graph g occupies
// rows [g*N, (g+1)*N). Sequence tensors are time-major: step s of sample b is
// row s*B + b.

#include <Eigen/Core>
#include <utility>

#include "ngar/graph.hpp"

namespace ngar::nn {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

// Affine map x W + b.
template <class T>
struct Dense {
  Mat<T> weight;
  RowVec<T> bias;
};

// Gate blocks are laid out [input | forget | candidate | output], H columns each.
template <class T>
struct LstmLayer {
  Mat<T> input_weight;      // I x 4H
  Mat<T> recurrent_weight;  // H x 4H
  RowVec<T> bias;           // 4H
};

enum class Activation { identity, relu };

// D~^{-1/2} (A + I) D~^{-1/2}.
Matrix normalize_adjacency(const Adjacency& adjacency);

// --- graph convolution: ReLU(A_norm X W + b) per graph ---------------------

template <class T>
void conv_forward(const Mat<T>& input, const Mat<T>& adj_norm, int n_nodes, const Dense<T>& layer,
                  Mat<T>& pre_activation, Mat<T>& output);

// d_input may be null (first layer).
template <class T>
void conv_backward(const Mat<T>& input, const Mat<T>& adj_norm, int n_nodes,
                   const Dense<T>& layer, const Mat<T>& pre_activation, const Mat<T>& d_output,
                   Dense<T>& grad, Mat<T>* d_input);

// --- gated global pooling: sum_v sigmoid(h_v Wg + bg) * (h_v Wp + bp) -------

template <class T>
struct PoolCache {
  Mat<T> gate;        // sigmoid activations, rows = nodes
  Mat<T> projection;  // h Wp + bp
};

template <class T>
Mat<T> pool_forward(const Mat<T>& nodes, int n_nodes, const Dense<T>& gate, const Dense<T>& proj,
                    PoolCache<T>& cache);

template <class T>
void pool_backward(const Mat<T>& nodes, int n_nodes, const Dense<T>& gate, const Dense<T>& proj,
                   const PoolCache<T>& cache, const Mat<T>& d_output, Dense<T>& d_gate,
                   Dense<T>& d_proj, Mat<T>& d_nodes);

// --- LSTM layer over a time-major sequence ---------------------------------

template <class T>
struct LstmCache {
  Mat<T> gates;      // activated gates, steps*B x 4H
  Mat<T> cell;       // steps*B x H
  Mat<T> cell_tanh;  // steps*B x H
  Mat<T> hidden;     // steps*B x H
};

// Zero initial state. The hidden sequence is left in cache.hidden.
template <class T>
void lstm_forward_layer(const Mat<T>& input, int batch, int steps, const LstmLayer<T>& layer,
                        LstmCache<T>& cache);

// d_hidden: gradient w.r.t. every hidden state (steps*B x H). d_input may be null.
template <class T>
void lstm_backward_layer(const Mat<T>& input, int batch, int steps, const LstmLayer<T>& layer,
                         const LstmCache<T>& cache, const Mat<T>& d_hidden, LstmLayer<T>& grad,
                         Mat<T>* d_input);

// --- fully connected --------------------------------------------------------

template <class T>
void dense_forward(const Mat<T>& input, const Dense<T>& layer, Activation act,
                   Mat<T>& output);

// `output` is the forward result (used for the ReLU mask). d_input may be null.
template <class T>
void dense_backward(const Mat<T>& input, const Dense<T>& layer, Activation act,
                    const Mat<T>& output, const Mat<T>& d_output, Dense<T>& grad,
                    Mat<T>* d_input);

// --- single-sample conveniences (double precision) -------------------------

Matrix gcn_forward(const Matrix& features, const Matrix& adj_norm, const Matrix& weight,
                   const Eigen::RowVectorXd& bias);

Eigen::RowVectorXd gated_pool_forward(const Matrix& nodes, const Dense<double>& gate,
                                      const Dense<double>& proj);

// Runs the stacked layers over `sequence` (k x I, oldest row first) and returns
// the final hidden state of the last layer.
Eigen::RowVectorXd lstm_forward(const Matrix& sequence, const std::vector<LstmLayer<double>>& layers);

struct DecodedGraph {
  Matrix adjacency_prob;  // N x N, sigmoid outputs
  Matrix features;        // N x F
};

// ReLU hidden layers followed by a sigmoid adjacency head and a linear feature head.
DecodedGraph decode_heads(const Eigen::RowVectorXd& hidden,
                          const std::vector<Dense<double>>& hidden_layers,
                          const Dense<double>& adjacency_head, const Dense<double>& feature_head,
                          int n_nodes, int feature_dim);

}  // namespace ngar::nn
