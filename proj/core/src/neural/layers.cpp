#include "ngar/neural/layers.hpp"

#include <cmath>

#include "ngar/errors.hpp"

namespace ngar::nn {
namespace {

template <class T>
auto sigmoid(const Eigen::ArrayBase<T>& x) {
  using S = typename T::Scalar;
  return (S(1) + (-x).exp()).inverse();
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

Matrix normalize_adjacency(const Adjacency& adjacency) {
  const auto n = adjacency.rows();
  Matrix a = adjacency.cast<double>() + Matrix::Identity(n, n);
  const Vector inv_sqrt_degree = a.rowwise().sum().array().rsqrt();
  return inv_sqrt_degree.asDiagonal() * a * inv_sqrt_degree.asDiagonal();
}

template <class T>
void conv_forward(const Mat<T>& input, const Mat<T>& adj_norm, int n_nodes, const Dense<T>& layer,
                  Mat<T>& pre_activation, Mat<T>& output) {
  require(input.cols() == layer.weight.rows(), "graph convolution: input width != weight rows");
  require(layer.bias.size() == layer.weight.cols(), "graph convolution: bias size mismatch");
  require(adj_norm.rows() == input.rows() && adj_norm.cols() == n_nodes &&
              input.rows() % n_nodes == 0,
          "graph convolution: adjacency does not match node rows");
  const Mat<T> projected = input * layer.weight;
  pre_activation.resize(projected.rows(), projected.cols());
  const Eigen::Index graphs = input.rows() / n_nodes;
  for (Eigen::Index g = 0; g < graphs; ++g) {
    const Eigen::Index base = g * n_nodes;
    for (Eigen::Index i = base; i < base + n_nodes; ++i) {
      auto row = pre_activation.row(i);
      row = layer.bias;
      for (Eigen::Index j = 0; j < n_nodes; ++j)
        if (const T a = adj_norm(i, j); a != T(0)) row.noalias() += a * projected.row(base + j);
    }
  }
  output = pre_activation.cwiseMax(T(0));
}

template <class T>
void conv_backward(const Mat<T>& input, const Mat<T>& adj_norm, int n_nodes,
                   const Dense<T>& layer, const Mat<T>& pre_activation, const Mat<T>& d_output,
                   Dense<T>& grad, Mat<T>* d_input) {
  const Mat<T> d_pre = (pre_activation.array() > T(0)).select(d_output, T(0));
  grad.bias = d_pre.colwise().sum();
  Mat<T> d_projected = Mat<T>::Zero(d_pre.rows(), d_pre.cols());
  const Eigen::Index graphs = input.rows() / n_nodes;
  for (Eigen::Index g = 0; g < graphs; ++g) {
    const Eigen::Index base = g * n_nodes;
    for (Eigen::Index i = base; i < base + n_nodes; ++i)
      for (Eigen::Index j = 0; j < n_nodes; ++j)
        if (const T a = adj_norm(i, j); a != T(0))
          d_projected.row(base + j).noalias() += a * d_pre.row(i);
  }
  grad.weight.noalias() = input.transpose() * d_projected;
  if (d_input) d_input->noalias() = d_projected * layer.weight.transpose();
}

template <class T>
Mat<T> pool_forward(const Mat<T>& nodes, int n_nodes, const Dense<T>& gate, const Dense<T>& proj,
                    PoolCache<T>& cache) {
  require(nodes.cols() == gate.weight.rows() && nodes.cols() == proj.weight.rows(),
          "gated pooling: input width mismatch");
  require(gate.weight.cols() == proj.weight.cols(), "gated pooling: gate/projection mismatch");
  require(nodes.rows() % n_nodes == 0, "gated pooling: rows are not a multiple of N");
  Mat<T> gate_pre = nodes * gate.weight;
  gate_pre.rowwise() += gate.bias;
  cache.gate = sigmoid(gate_pre.array()).matrix();
  cache.projection.noalias() = nodes * proj.weight;
  cache.projection.rowwise() += proj.bias;

  const Eigen::Index graphs = nodes.rows() / n_nodes;
  Mat<T> out(graphs, gate.weight.cols());
  out.setZero();
  for (Eigen::Index g = 0; g < graphs; ++g)
    for (Eigen::Index r = g * n_nodes; r < (g + 1) * n_nodes; ++r)
      out.row(g).noalias() += cache.gate.row(r).cwiseProduct(cache.projection.row(r));
  return out;
}

template <class T>
void pool_backward(const Mat<T>& nodes, int n_nodes, const Dense<T>& gate, const Dense<T>& proj,
                   const PoolCache<T>& cache, const Mat<T>& d_output, Dense<T>& d_gate,
                   Dense<T>& d_proj, Mat<T>& d_nodes) {
  const Eigen::Index rows = nodes.rows();
  const Eigen::Index channels = gate.weight.cols();
  Mat<T> d_gate_pre(rows, channels);
  Mat<T> d_proj_pre(rows, channels);
  const Eigen::Index graphs = rows / n_nodes;
  for (Eigen::Index g = 0; g < graphs; ++g) {
    const auto d_row = d_output.row(g);
    for (Eigen::Index r = g * n_nodes; r < (g + 1) * n_nodes; ++r) {
      d_proj_pre.row(r) = cache.gate.row(r).cwiseProduct(d_row);
      d_gate_pre.row(r) = cache.projection.row(r).cwiseProduct(d_row);
    }
  }
  d_gate_pre.array() *= cache.gate.array() * (T(1) - cache.gate.array());
  d_gate.weight.noalias() = nodes.transpose() * d_gate_pre;
  d_gate.bias = d_gate_pre.colwise().sum();
  d_proj.weight.noalias() = nodes.transpose() * d_proj_pre;
  d_proj.bias = d_proj_pre.colwise().sum();
  d_nodes.noalias() = d_gate_pre * gate.weight.transpose();
  d_nodes.noalias() += d_proj_pre * proj.weight.transpose();
}

template <class T>
void lstm_forward_layer(const Mat<T>& input, int batch, int steps, const LstmLayer<T>& layer,
                        LstmCache<T>& cache) {
  const Eigen::Index h = layer.recurrent_weight.rows();
  require(layer.recurrent_weight.cols() == 4 * h && layer.input_weight.cols() == 4 * h &&
              layer.bias.size() == 4 * h,
          "LSTM: weight shapes must have 4H columns");
  require(input.cols() == layer.input_weight.rows(), "LSTM: input width mismatch");
  require(steps >= 1 && input.rows() == static_cast<Eigen::Index>(batch) * steps,
          "LSTM: input must have steps*batch rows");

  cache.gates.noalias() = input * layer.input_weight;
  cache.gates.rowwise() += layer.bias;
  cache.cell.resize(input.rows(), h);
  cache.cell_tanh.resize(input.rows(), h);
  cache.hidden.resize(input.rows(), h);

  for (int s = 0; s < steps; ++s) {
    auto gates = cache.gates.middleRows(static_cast<Eigen::Index>(s) * batch, batch);
    if (s > 0)
      gates.noalias() +=
          cache.hidden.middleRows(static_cast<Eigen::Index>(s - 1) * batch, batch) *
          layer.recurrent_weight;
    gates.leftCols(2 * h) = sigmoid(gates.leftCols(2 * h).array()).matrix();
    gates.middleCols(2 * h, h) = gates.middleCols(2 * h, h).array().tanh().matrix();
    gates.rightCols(h) = sigmoid(gates.rightCols(h).array()).matrix();

    auto cell = cache.cell.middleRows(static_cast<Eigen::Index>(s) * batch, batch);
    cell = gates.leftCols(h).cwiseProduct(gates.middleCols(2 * h, h));
    if (s > 0)
      cell += gates.middleCols(h, h).cwiseProduct(
          cache.cell.middleRows(static_cast<Eigen::Index>(s - 1) * batch, batch));
    auto cell_tanh = cache.cell_tanh.middleRows(static_cast<Eigen::Index>(s) * batch, batch);
    cell_tanh = cell.array().tanh().matrix();
    cache.hidden.middleRows(static_cast<Eigen::Index>(s) * batch, batch) =
        gates.rightCols(h).cwiseProduct(cell_tanh);
  }
}

template <class T>
void lstm_backward_layer(const Mat<T>& input, int batch, int steps, const LstmLayer<T>& layer,
                         const LstmCache<T>& cache, const Mat<T>& d_hidden, LstmLayer<T>& grad,
                         Mat<T>* d_input) {
  const Eigen::Index h = layer.recurrent_weight.rows();
  Mat<T> d_pre(input.rows(), 4 * h);
  Mat<T> dh_next = Mat<T>::Zero(batch, h);
  Mat<T> dc_next = Mat<T>::Zero(batch, h);

  for (int s = steps - 1; s >= 0; --s) {
    const Eigen::Index row = static_cast<Eigen::Index>(s) * batch;
    const auto gates = cache.gates.middleRows(row, batch).array();
    const auto in_gate = gates.leftCols(h);
    const auto forget = gates.middleCols(h, h);
    const auto candidate = gates.middleCols(2 * h, h);
    const auto out_gate = gates.rightCols(h);
    const auto cell_tanh = cache.cell_tanh.middleRows(row, batch).array();

    const Mat<T> dh = d_hidden.middleRows(row, batch) + dh_next;
    const auto dh_a = dh.array();
    const Mat<T> dc = (dh_a * out_gate * (T(1) - cell_tanh.square()) + dc_next.array()).matrix();
    const auto dc_a = dc.array();

    auto d = d_pre.middleRows(row, batch);
    d.leftCols(h) = (dc_a * candidate * in_gate * (T(1) - in_gate)).matrix();
    if (s > 0) {
      const auto prev_cell = cache.cell.middleRows(row - batch, batch).array();
      d.middleCols(h, h) = (dc_a * prev_cell * forget * (T(1) - forget)).matrix();
    } else {
      d.middleCols(h, h).setZero();
    }
    d.middleCols(2 * h, h) = (dc_a * in_gate * (T(1) - candidate.square())).matrix();
    d.rightCols(h) = (dh_a * cell_tanh * out_gate * (T(1) - out_gate)).matrix();

    dc_next = (dc_a * forget).matrix();
    if (s > 0) dh_next.noalias() = d * layer.recurrent_weight.transpose();
  }

  grad.input_weight.noalias() = input.transpose() * d_pre;
  grad.bias = d_pre.colwise().sum();
  if (steps > 1) {
    const Eigen::Index span = static_cast<Eigen::Index>(steps - 1) * batch;
    grad.recurrent_weight.noalias() = cache.hidden.topRows(span).transpose() * d_pre.bottomRows(span);
  } else {
    grad.recurrent_weight.setZero(h, 4 * h);
  }
  if (d_input) d_input->noalias() = d_pre * layer.input_weight.transpose();
}

template <class T>
void dense_forward(const Mat<T>& input, const Dense<T>& layer, Activation act, Mat<T>& output) {
  require(input.cols() == layer.weight.rows(), "dense layer: input width mismatch");
  require(layer.bias.size() == layer.weight.cols(), "dense layer: bias size mismatch");
  output.noalias() = input * layer.weight;
  output.rowwise() += layer.bias;
  if (act == Activation::relu) output = output.cwiseMax(T(0));
}

template <class T>
void dense_backward(const Mat<T>& input, const Dense<T>& layer, Activation act,
                    const Mat<T>& output, const Mat<T>& d_output, Dense<T>& grad,
                    Mat<T>* d_input) {
  Mat<T> d_pre;
  if (act == Activation::relu)
    d_pre = (output.array() > T(0)).select(d_output, T(0));
  else
    d_pre = d_output;
  grad.weight.noalias() = input.transpose() * d_pre;
  grad.bias = d_pre.colwise().sum();
  if (d_input) d_input->noalias() = d_pre * layer.weight.transpose();
}

#define NGAR_INSTANTIATE_LAYERS(T)                                                              \
  template void conv_forward<T>(const Mat<T>&, const Mat<T>&, int, const Dense<T>&, Mat<T>&,    \
                                Mat<T>&);                                                       \
  template void conv_backward<T>(const Mat<T>&, const Mat<T>&, int, const Dense<T>&,            \
                                 const Mat<T>&, const Mat<T>&, Dense<T>&, Mat<T>*);             \
  template Mat<T> pool_forward<T>(const Mat<T>&, int, const Dense<T>&, const Dense<T>&,         \
                                  PoolCache<T>&);                                               \
  template void pool_backward<T>(const Mat<T>&, int, const Dense<T>&, const Dense<T>&,          \
                                 const PoolCache<T>&, const Mat<T>&, Dense<T>&, Dense<T>&,      \
                                 Mat<T>&);                                                      \
  template void lstm_forward_layer<T>(const Mat<T>&, int, int, const LstmLayer<T>&,             \
                                      LstmCache<T>&);                                           \
  template void lstm_backward_layer<T>(const Mat<T>&, int, int, const LstmLayer<T>&,            \
                                       const LstmCache<T>&, const Mat<T>&, LstmLayer<T>&,       \
                                       Mat<T>*);                                                \
  template void dense_forward<T>(const Mat<T>&, const Dense<T>&, Activation, Mat<T>&);          \
  template void dense_backward<T>(const Mat<T>&, const Dense<T>&, Activation, const Mat<T>&,    \
                                  const Mat<T>&, Dense<T>&, Mat<T>*);

NGAR_INSTANTIATE_LAYERS(float)
NGAR_INSTANTIATE_LAYERS(double)
#undef NGAR_INSTANTIATE_LAYERS

Matrix gcn_forward(const Matrix& features, const Matrix& adj_norm, const Matrix& weight,
                   const Eigen::RowVectorXd& bias) {
  require(adj_norm.rows() == features.rows() && adj_norm.cols() == features.rows(),
          "gcn_forward: adjacency must be N x N");
  Mat<double> pre, out;
  conv_forward<double>(features, adj_norm, static_cast<int>(features.rows()), {weight, bias}, pre,
                       out);
  return out;
}

Eigen::RowVectorXd gated_pool_forward(const Matrix& nodes, const Dense<double>& gate,
                                      const Dense<double>& proj) {
  PoolCache<double> cache;
  return pool_forward<double>(nodes, static_cast<int>(nodes.rows()), gate, proj, cache).row(0);
}

Eigen::RowVectorXd lstm_forward(const Matrix& sequence,
                                const std::vector<LstmLayer<double>>& layers) {
  require(!layers.empty(), "lstm_forward: need at least one layer");
  const int steps = static_cast<int>(sequence.rows());
  require(steps >= 1, "lstm_forward: sequence must be nonempty");
  Matrix input = sequence;
  LstmCache<double> cache;
  for (const auto& layer : layers) {
    lstm_forward_layer<double>(input, 1, steps, layer, cache);
    input = cache.hidden;
  }
  return input.row(steps - 1);
}

DecodedGraph decode_heads(const Eigen::RowVectorXd& hidden,
                          const std::vector<Dense<double>>& hidden_layers,
                          const Dense<double>& adjacency_head, const Dense<double>& feature_head,
                          int n_nodes, int feature_dim) {
  require(adjacency_head.weight.cols() == n_nodes * n_nodes, "decode_heads: adjacency head must have N*N units");
  require(feature_head.weight.cols() == n_nodes * feature_dim, "decode_heads: feature head must have N*F units");
  Mat<double> z = hidden;
  Mat<double> next;
  for (const auto& layer : hidden_layers) {
    dense_forward<double>(z, layer, Activation::relu, next);
    z = next;
  }
  Mat<double> logits, feats;
  dense_forward<double>(z, adjacency_head, Activation::identity, logits);
  dense_forward<double>(z, feature_head, Activation::identity, feats);
  DecodedGraph out;
  out.adjacency_prob.resize(n_nodes, n_nodes);
  out.features.resize(n_nodes, feature_dim);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j)
      out.adjacency_prob(i, j) = 1.0 / (1.0 + std::exp(-logits(0, i * n_nodes + j)));
    for (int f = 0; f < feature_dim; ++f) out.features(i, f) = feats(0, i * feature_dim + f);
  }
  return out;
}

}  // namespace ngar::nn
