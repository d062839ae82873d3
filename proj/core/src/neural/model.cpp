#include "ngar/neural/model.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

#include "ngar/baselines.hpp"
#include "ngar/errors.hpp"

namespace ngar {

void NgarConfig::validate() const {
  auto positive = [](const std::vector<int>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](int x) { return x > 0; });
  };
  if (window < 1) throw InvalidInput("NGAR window must be >= 1");
  if (!positive(conv_channels)) throw InvalidInput("conv_channels must be nonempty and positive");
  if (pool_channels < 1) throw InvalidInput("pool_channels must be positive");
  if (!positive(rnn_units)) throw InvalidInput("rnn_units must be nonempty and positive");
  if (!positive(dense_units)) throw InvalidInput("dense_units must be nonempty and positive");
  if (l2_weight < 0.0) throw InvalidInput("l2_weight must be nonnegative");
  if (learning_rate <= 0.0) throw InvalidInput("learning_rate must be positive");
  if (batch_size < 1 || patience < 1 || max_epochs < 1)
    throw InvalidInput("batch_size, patience and max_epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw InvalidInput("validation_fraction must lie in (0, 1)");
}

namespace nn {
namespace {

// Flush-to-zero and denormals-are-zero for the enclosing scope.
class DenormalGuard {
 public:
#if defined(__SSE__)
  DenormalGuard() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~DenormalGuard() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

template <class T>
void check_finite(const Mat<T>& m, const char* where) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite values in ") + where);
}

template <class T>
void add_view(std::vector<ParameterView<T>>& out, const std::string& name, Mat<T>& m, bool reg) {
  out.push_back({name, m.data(), m.rows(), m.cols(), reg});
}

template <class T>
void add_view(std::vector<ParameterView<T>>& out, const std::string& name, RowVec<T>& v) {
  out.push_back({name, v.data(), 1, v.cols(), false});
}

Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> uniform(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(rng);
  return m;
}

// rows x cols with orthonormal rows (rows <= cols) or columns.
Matrix orthogonal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const Eigen::Index big = std::max(rows, cols);
  const Eigen::Index small = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    for (Eigen::Index i = 0; i < big; ++i) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
  if (rows < cols) return q.transpose();
  return q;
}

template <class T>
Dense<T> make_dense(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng) {
  return {glorot(in, out, rng).cast<T>(), RowVec<T>::Zero(out)};
}

template <class S, class T>
Dense<S> cast_dense(const Dense<T>& d) {
  return {d.weight.template cast<S>(), d.bias.template cast<S>()};
}

template <class S, class T>
NgarParameters<S> cast_params(const NgarParameters<T>& p) {
  NgarParameters<S> out;
  for (const auto& c : p.conv) out.conv.push_back(cast_dense<S>(c));
  out.gate = cast_dense<S>(p.gate);
  out.projection = cast_dense<S>(p.projection);
  for (const auto& l : p.lstm)
    out.lstm.push_back({l.input_weight.template cast<S>(), l.recurrent_weight.template cast<S>(),
                        l.bias.template cast<S>()});
  for (const auto& d : p.dense) out.dense.push_back(cast_dense<S>(d));
  out.adjacency_head = cast_dense<S>(p.adjacency_head);
  out.feature_head = cast_dense<S>(p.feature_head);
  return out;
}

template <class T>
struct ForwardCache {
  int batch = 0;
  int steps = 0;
  Mat<T> nodes_in;
  Mat<T> adj;
  std::vector<Mat<T>> conv_pre;
  std::vector<Mat<T>> conv_out;
  PoolCache<T> pool;
  Mat<T> sequence;  // time-major embeddings
  std::vector<LstmCache<T>> lstm;
  Mat<T> last_hidden;
  std::vector<Mat<T>> dense_out;
  BatchOutput<T> out;
};

// Conv block over the graphs already gathered in cache.nodes_in / cache.adj.
template <class T>
Mat<T> conv_block_forward(const NgarParameters<T>& p, int n, ForwardCache<T>& cache) {
  const std::size_t layers = p.conv.size();
  cache.conv_pre.resize(layers);
  cache.conv_out.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const Mat<T>& input = l == 0 ? cache.nodes_in : cache.conv_out[l - 1];
    conv_forward<T>(input, cache.adj, n, p.conv[l], cache.conv_pre[l], cache.conv_out[l]);
    check_finite(cache.conv_out[l], "graph convolution");
  }
  Mat<T> pooled = pool_forward<T>(cache.conv_out.back(), n, p.gate, p.projection, cache.pool);
  check_finite(pooled, "gated pooling");
  return pooled;
}

template <class T>
void validate_targets(const NgarModel<T>& model, const PreparedSequence<T>& data,
                      std::span<const long> targets, bool need_target) {
  if (data.n_nodes != model.n_nodes || data.feature_dim != model.feature_dim)
    throw InvalidInput("data dimensions do not match the model");
  const long k = model.config.window;
  const long size = static_cast<long>(data.size());
  for (long t : targets) {
    if (t < k || t > size || (need_target && t == size))
      throw InvalidInput("window for target " + std::to_string(t) + " is out of range (k = " +
                         std::to_string(k) + ", sequence length " + std::to_string(size) + ")");
  }
}

template <class T>
void run_forward(const NgarModel<T>& model, const PreparedSequence<T>& data,
                 std::span<const long> targets, ForwardCache<T>& cache) {
  const auto& p = model.params;
  const int n = model.n_nodes;
  const int k = model.config.window;
  const int batch = static_cast<int>(targets.size());
  cache.batch = batch;
  cache.steps = k;

  const Eigen::Index graphs = static_cast<Eigen::Index>(batch) * k;
  cache.nodes_in.resize(graphs * n, data.feature_dim);
  cache.adj.resize(graphs * n, n);
  for (int b = 0; b < batch; ++b)
    for (int s = 0; s < k; ++s) {
      const Eigen::Index src = (targets[b] - k + s) * n;
      const Eigen::Index dst = (static_cast<Eigen::Index>(b) * k + s) * n;
      cache.nodes_in.middleRows(dst, n) = data.features.middleRows(src, n);
      cache.adj.middleRows(dst, n) = data.adj_norm.middleRows(src, n);
    }

  const Mat<T> embeddings = conv_block_forward(p, n, cache);
  cache.sequence.resize(graphs, embeddings.cols());
  for (int b = 0; b < batch; ++b)
    for (int s = 0; s < k; ++s)
      cache.sequence.row(static_cast<Eigen::Index>(s) * batch + b) =
          embeddings.row(static_cast<Eigen::Index>(b) * k + s);

  cache.lstm.resize(p.lstm.size());
  for (std::size_t l = 0; l < p.lstm.size(); ++l) {
    const Mat<T>& input = l == 0 ? cache.sequence : cache.lstm[l - 1].hidden;
    lstm_forward_layer<T>(input, batch, k, p.lstm[l], cache.lstm[l]);
    check_finite(cache.lstm[l].hidden, "LSTM");
  }
  cache.last_hidden = cache.lstm.back().hidden.bottomRows(batch);

  cache.dense_out.resize(p.dense.size());
  for (std::size_t l = 0; l < p.dense.size(); ++l) {
    const Mat<T>& input = l == 0 ? cache.last_hidden : cache.dense_out[l - 1];
    dense_forward<T>(input, p.dense[l], Activation::relu, cache.dense_out[l]);
    check_finite(cache.dense_out[l], "dense layer");
  }
  const Mat<T>& top = cache.dense_out.back();
  dense_forward<T>(top, p.adjacency_head, Activation::identity, cache.out.adjacency_logits);
  dense_forward<T>(top, p.feature_head, Activation::identity, cache.out.features);
  check_finite(cache.out.adjacency_logits, "adjacency head");
  check_finite(cache.out.features, "feature head");
  cache.out.adjacency_prob =
      (T(1) + (-cache.out.adjacency_logits.array()).exp()).inverse().matrix();
}

template <class T>
void run_backward(const NgarModel<T>& model, ForwardCache<T>& cache, const Mat<T>& d_logits,
                  const Mat<T>& d_features, NgarParameters<T>& g) {
  const auto& p = model.params;
  const int n = model.n_nodes;
  const int batch = cache.batch;
  const int k = cache.steps;

  const Mat<T>& top = cache.dense_out.back();
  Mat<T> d_top, d_tmp;
  dense_backward<T>(top, p.adjacency_head, Activation::identity, cache.out.adjacency_logits,
                    d_logits, g.adjacency_head, &d_top);
  dense_backward<T>(top, p.feature_head, Activation::identity, cache.out.features, d_features,
                    g.feature_head, &d_tmp);
  d_top += d_tmp;
  check_finite(d_top, "output heads (backward)");

  for (std::size_t l = p.dense.size(); l-- > 0;) {
    const Mat<T>& input = l == 0 ? cache.last_hidden : cache.dense_out[l - 1];
    dense_backward<T>(input, p.dense[l], Activation::relu, cache.dense_out[l], d_top, g.dense[l],
                      &d_tmp);
    d_top.swap(d_tmp);
    check_finite(d_top, "dense layer (backward)");
  }

  Mat<T> d_hidden = Mat<T>::Zero(static_cast<Eigen::Index>(batch) * k, d_top.cols());
  d_hidden.bottomRows(batch) = d_top;
  for (std::size_t l = p.lstm.size(); l-- > 0;) {
    const Mat<T>& input = l == 0 ? cache.sequence : cache.lstm[l - 1].hidden;
    lstm_backward_layer<T>(input, batch, k, p.lstm[l], cache.lstm[l], d_hidden, g.lstm[l],
                           &d_tmp);
    d_hidden.swap(d_tmp);
    check_finite(d_hidden, "LSTM (backward)");
  }

  Mat<T> d_embed(d_hidden.rows(), d_hidden.cols());
  for (int b = 0; b < batch; ++b)
    for (int s = 0; s < k; ++s)
      d_embed.row(static_cast<Eigen::Index>(b) * k + s) =
          d_hidden.row(static_cast<Eigen::Index>(s) * batch + b);

  Mat<T> d_nodes;
  pool_backward<T>(cache.conv_out.back(), n, p.gate, p.projection, cache.pool, d_embed, g.gate,
                   g.projection, d_nodes);
  check_finite(d_nodes, "gated pooling (backward)");
  for (std::size_t l = p.conv.size(); l-- > 0;) {
    const Mat<T>& input = l == 0 ? cache.nodes_in : cache.conv_out[l - 1];
    conv_backward<T>(input, cache.adj, n, p.conv[l], cache.conv_pre[l], d_nodes, g.conv[l],
                     l == 0 ? nullptr : &d_tmp);
    if (l > 0) {
      d_nodes.swap(d_tmp);
      check_finite(d_nodes, "graph convolution (backward)");
    }
  }
}

// Row-major flattening of graph t's target blocks.
template <class T>
void gather_targets(const PreparedSequence<T>& data, std::span<const long> targets,
                    Mat<T>& target_features, Mat<T>& target_adjacency) {
  const int n = data.n_nodes;
  const int f = data.feature_dim;
  const auto batch = static_cast<Eigen::Index>(targets.size());
  target_features.resize(batch, n * f);
  target_adjacency.resize(batch, n * n);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const Eigen::Index row = targets[b] * n;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < f; ++c) target_features(b, i * f + c) = data.features(row + i, c);
      for (int j = 0; j < n; ++j) target_adjacency(b, i * n + j) = data.adjacency(row + i, j);
    }
  }
}

// Batch-mean feature MSE and clipped adjacency log-loss (no penalty).
template <class T>
LossBreakdown data_loss(const BatchOutput<T>& out, const Mat<T>& target_x, const Mat<T>& target_a) {
  const auto batch = static_cast<double>(out.features.rows());
  LossBreakdown loss;
  loss.feature_mse = (out.features - target_x).template cast<double>().squaredNorm() /
                     (static_cast<double>(target_x.cols()) * batch);
  const T lo = static_cast<T>(kProbabilityClip);
  const T hi = static_cast<T>(1.0 - kProbabilityClip);
  double logloss = 0.0;
  for (Eigen::Index j = 0; j < out.adjacency_prob.cols(); ++j)
    for (Eigen::Index b = 0; b < out.adjacency_prob.rows(); ++b) {
      const double pc = static_cast<double>(std::clamp(out.adjacency_prob(b, j), lo, hi));
      const double a = static_cast<double>(target_a(b, j));
      logloss -= a * std::log(pc) + (1.0 - a) * std::log(1.0 - pc);
    }
  loss.adjacency_logloss = logloss / (static_cast<double>(target_a.cols()) * batch);
  return loss;
}

template <class T>
PreparedSequence<T> prepare_graphs(const std::vector<const AttributedGraph*>& graphs) {
  PreparedSequence<T> out;
  if (graphs.empty()) return out;
  const int n = graphs.front()->order();
  const int f = graphs.front()->feature_dim();
  out.n_nodes = n;
  out.feature_dim = f;
  const auto rows = static_cast<Eigen::Index>(graphs.size()) * n;
  out.features.resize(rows, f);
  out.adj_norm.resize(rows, n);
  out.adjacency.resize(rows, n);
  for (std::size_t t = 0; t < graphs.size(); ++t) {
    const auto& g = *graphs[t];
    if (g.order() != n || g.feature_dim() != f) throw InvalidInput("graphs must share N and F");
    const auto row = static_cast<Eigen::Index>(t) * n;
    out.features.middleRows(row, n) = g.features().cast<T>();
    out.adj_norm.middleRows(row, n) = normalize_adjacency(g.adjacency()).cast<T>();
    out.adjacency.middleRows(row, n) = g.adjacency().cast<T>();
  }
  return out;
}

template <class T>
PreparedSequence<T> prepare_window(const NgarModel<T>& model, const GraphSequence& window,
                                   const AttributedGraph* target) {
  if (window.size() != static_cast<std::size_t>(model.config.window))
    throw InvalidInput("NGAR window must hold exactly k = " +
                       std::to_string(model.config.window) + " graphs, got " +
                       std::to_string(window.size()));
  std::vector<const AttributedGraph*> graphs;
  for (const auto& g : window) graphs.push_back(&g);
  if (target) graphs.push_back(target);
  return prepare_graphs<T>(graphs);
}

}  // namespace

template <class T>
std::vector<ParameterView<T>> parameter_views(NgarParameters<T>& p) {
  std::vector<ParameterView<T>> out;
  for (std::size_t l = 0; l < p.conv.size(); ++l) {
    add_view(out, "conv" + std::to_string(l) + ".weight", p.conv[l].weight, true);
    add_view(out, "conv" + std::to_string(l) + ".bias", p.conv[l].bias);
  }
  add_view(out, "pool.gate.weight", p.gate.weight, false);
  add_view(out, "pool.gate.bias", p.gate.bias);
  add_view(out, "pool.projection.weight", p.projection.weight, false);
  add_view(out, "pool.projection.bias", p.projection.bias);
  for (std::size_t l = 0; l < p.lstm.size(); ++l) {
    const std::string prefix = "lstm" + std::to_string(l);
    add_view(out, prefix + ".input_weight", p.lstm[l].input_weight, false);
    add_view(out, prefix + ".recurrent_weight", p.lstm[l].recurrent_weight, false);
    add_view(out, prefix + ".bias", p.lstm[l].bias);
  }
  for (std::size_t l = 0; l < p.dense.size(); ++l) {
    add_view(out, "dense" + std::to_string(l) + ".weight", p.dense[l].weight, true);
    add_view(out, "dense" + std::to_string(l) + ".bias", p.dense[l].bias);
  }
  add_view(out, "head.adjacency.weight", p.adjacency_head.weight, false);
  add_view(out, "head.adjacency.bias", p.adjacency_head.bias);
  add_view(out, "head.features.weight", p.feature_head.weight, false);
  add_view(out, "head.features.bias", p.feature_head.bias);
  return out;
}

template <class T>
NgarParameters<T> zeros_like(const NgarParameters<T>& params) {
  NgarParameters<T> out = params;
  for (auto& v : parameter_views(out)) std::fill(v.data, v.data + v.size(), T(0));
  return out;
}

template <class T>
std::vector<ParameterView<const T>> parameter_views(const NgarParameters<T>& params) {
  std::vector<ParameterView<const T>> out;
  for (const auto& v : parameter_views(const_cast<NgarParameters<T>&>(params)))
    out.push_back({v.name, v.data, v.rows, v.cols, v.regularized});
  return out;
}

template <class T>
std::size_t parameter_count(const NgarParameters<T>& params) {
  std::size_t total = 0;
  for (const auto& v : parameter_views(params)) total += static_cast<std::size_t>(v.size());
  return total;
}

template <class T>
NgarModel<T> init_model(const NgarConfig& config, int n_nodes, int feature_dim) {
  config.validate();
  if (n_nodes < 1 || feature_dim < 1) throw InvalidInput("NGAR needs N >= 1 and F >= 1");
  std::mt19937_64 rng(config.seed);
  NgarModel<T> model;
  model.config = config;
  model.n_nodes = n_nodes;
  model.feature_dim = feature_dim;
  auto& p = model.params;

  Eigen::Index width = feature_dim;
  for (int channels : config.conv_channels) {
    p.conv.push_back(make_dense<T>(width, channels, rng));
    width = channels;
  }
  p.gate = make_dense<T>(width, config.pool_channels, rng);
  p.projection = make_dense<T>(width, config.pool_channels, rng);
  width = config.pool_channels;
  for (int units : config.rnn_units) {
    LstmLayer<T> layer;
    layer.input_weight = glorot(width, 4 * units, rng).cast<T>();
    layer.recurrent_weight = orthogonal(units, 4 * units, rng).cast<T>();
    layer.bias = RowVec<T>::Zero(4 * units);
    layer.bias.segment(units, units).setOnes();
    p.lstm.push_back(std::move(layer));
    width = units;
  }
  for (int units : config.dense_units) {
    p.dense.push_back(make_dense<T>(width, units, rng));
    width = units;
  }
  p.adjacency_head = make_dense<T>(width, n_nodes * n_nodes, rng);
  p.feature_head = make_dense<T>(width, n_nodes * feature_dim, rng);

  model.adam_m = zeros_like(p);
  model.adam_v = zeros_like(p);
  return model;
}

template <class S, class T>
NgarModel<S> cast_model(const NgarModel<T>& model) {
  NgarModel<S> out;
  out.config = model.config;
  out.n_nodes = model.n_nodes;
  out.feature_dim = model.feature_dim;
  out.params = cast_params<S>(model.params);
  out.adam_m = cast_params<S>(model.adam_m);
  out.adam_v = cast_params<S>(model.adam_v);
  out.step = model.step;
  return out;
}

template <class T>
PreparedSequence<T> prepare_sequence(const GraphSequence& sequence) {
  std::vector<const AttributedGraph*> graphs;
  graphs.reserve(sequence.size());
  for (const auto& g : sequence) graphs.push_back(&g);
  return prepare_graphs<T>(graphs);
}

template <class T>
double l2_norm_squared(const NgarParameters<T>& params) {
  double total = 0.0;
  for (const auto& c : params.conv) total += c.weight.template cast<double>().squaredNorm();
  for (const auto& d : params.dense) total += d.weight.template cast<double>().squaredNorm();
  return total;
}

template <class T>
BatchOutput<T> forward_batch(const NgarModel<T>& model, const PreparedSequence<T>& data,
                             std::span<const long> targets) {
  const DenormalGuard guard;
  validate_targets(model, data, targets, false);
  ForwardCache<T> cache;
  run_forward(model, data, targets, cache);
  return std::move(cache.out);
}

template <class T>
LossBreakdown loss_and_gradient(const NgarModel<T>& model, const PreparedSequence<T>& data,
                                std::span<const long> targets, NgarParameters<T>* grads) {
  const DenormalGuard guard;
  if (targets.empty()) throw InvalidInput("empty batch");
  validate_targets(model, data, targets, true);
  ForwardCache<T> cache;
  run_forward(model, data, targets, cache);

  Mat<T> target_x, target_a;
  gather_targets(data, targets, target_x, target_a);
  LossBreakdown loss = data_loss(cache.out, target_x, target_a);
  loss.l2_penalty = model.config.l2_weight * l2_norm_squared(model.params);
  loss.total = loss.feature_mse + loss.adjacency_logloss + loss.l2_penalty;

  const auto batch = static_cast<double>(targets.size());
  const auto nf = static_cast<double>(target_x.cols());
  const auto nn = static_cast<double>(target_a.cols());
  const Mat<T>& prob = cache.out.adjacency_prob;
  const T lo = static_cast<T>(kProbabilityClip);
  const T hi = static_cast<T>(1.0 - kProbabilityClip);

  if (grads) {
    *grads = zeros_like(model.params);
    const Mat<T> d_features = (cache.out.features - target_x) * static_cast<T>(2.0 / (nf * batch));
    Mat<T> d_logits = (prob - target_a) * static_cast<T>(1.0 / (nn * batch));
    // Clipped probabilities are constant in the logits.
    d_logits = (prob.array() < lo || prob.array() > hi).select(T(0), d_logits);
    run_backward(model, cache, d_logits, d_features, *grads);
    const T two_l2 = static_cast<T>(2.0 * model.config.l2_weight);
    for (std::size_t l = 0; l < grads->conv.size(); ++l)
      grads->conv[l].weight += two_l2 * model.params.conv[l].weight;
    for (std::size_t l = 0; l < grads->dense.size(); ++l)
      grads->dense[l].weight += two_l2 * model.params.dense[l].weight;
  }
  return loss;
}

template <class T>
NgarOutput ngar_forward(const NgarModel<T>& model, const GraphSequence& window) {
  const PreparedSequence<T> data = prepare_window(model, window, nullptr);
  const long target = model.config.window;
  const BatchOutput<T> out = forward_batch(model, data, std::span<const long>(&target, 1));
  const int n = model.n_nodes;
  const int f = model.feature_dim;
  NgarOutput result;
  result.adjacency_prob.resize(n, n);
  result.features.resize(n, f);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      result.adjacency_prob(i, j) = static_cast<double>(out.adjacency_prob(0, i * n + j));
    for (int c = 0; c < f; ++c)
      result.features(i, c) = static_cast<double>(out.features(0, i * f + c));
  }
  return result;
}

template <class T>
Eigen::RowVectorXd embed_graph(const NgarModel<T>& model, const AttributedGraph& graph) {
  const auto data = prepare_graphs<T>({&graph});
  if (data.n_nodes != model.n_nodes || data.feature_dim != model.feature_dim)
    throw InvalidInput("graph dimensions do not match the model");
  ForwardCache<T> cache;
  cache.nodes_in = data.features;
  cache.adj = data.adj_norm;
  return conv_block_forward(model.params, model.n_nodes, cache).row(0).template cast<double>();
}

LossBreakdown ngar_loss(const Matrix& adjacency_prob, const Matrix& features,
                        const AttributedGraph& target, double l2_weight, double l2_norm_sq) {
  const int n = target.order();
  if (adjacency_prob.rows() != n || adjacency_prob.cols() != n ||
      features.rows() != n || features.cols() != target.feature_dim())
    throw InvalidInput("prediction shape does not match the target graph");
  LossBreakdown loss;
  loss.feature_mse = (features - target.features()).squaredNorm() /
                     static_cast<double>(features.size());
  double logloss = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p = std::clamp(adjacency_prob(i, j), kProbabilityClip, 1.0 - kProbabilityClip);
      const double a = target.adjacency()(i, j);
      logloss -= a * std::log(p) + (1.0 - a) * std::log(1.0 - p);
    }
  loss.adjacency_logloss = logloss / static_cast<double>(n * n);
  loss.l2_penalty = l2_weight * l2_norm_sq;
  loss.total = loss.feature_mse + loss.adjacency_logloss + loss.l2_penalty;
  return loss;
}

template <class T>
LossBreakdown ngar_loss(const NgarModel<T>& model, const GraphSequence& window,
                        const AttributedGraph& target) {
  const PreparedSequence<T> data = prepare_window(model, window, &target);
  const long t = model.config.window;
  return loss_and_gradient<T>(model, data, std::span<const long>(&t, 1), nullptr);
}

template <class T>
NgarParameters<T> ngar_backward(const NgarModel<T>& model, const GraphSequence& window,
                                const AttributedGraph& target) {
  const PreparedSequence<T> data = prepare_window(model, window, &target);
  const long t = model.config.window;
  NgarParameters<T> grads;
  loss_and_gradient<T>(model, data, std::span<const long>(&t, 1), &grads);
  return grads;
}

template <class T>
void adam_step(NgarModel<T>& model, const NgarParameters<T>& grads, double learning_rate,
               double beta1, double beta2, double eps) {
  const DenormalGuard guard;
  auto params = parameter_views(model.params);
  const auto g = parameter_views(grads);
  auto m = parameter_views(model.adam_m);
  auto v = parameter_views(model.adam_v);
  if (g.size() != params.size()) throw InvalidInput("gradient set does not match the model");
  model.step += 1;
  const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(model.step));
  const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(model.step));
  const T b1 = static_cast<T>(beta1), b2 = static_cast<T>(beta2);
  const T c1 = static_cast<T>(1.0 / correction1), c2 = static_cast<T>(1.0 / correction2);
  const T lr = static_cast<T>(learning_rate), epsilon = static_cast<T>(eps);
  for (std::size_t a = 0; a < params.size(); ++a) {
    if (g[a].size() != params[a].size()) throw InvalidInput("gradient shape mismatch");
    using Arr = Eigen::Array<T, Eigen::Dynamic, 1>;
    Eigen::Map<Arr> w(params[a].data, params[a].size());
    Eigen::Map<const Arr> grad(g[a].data, g[a].size());
    Eigen::Map<Arr> mm(m[a].data, m[a].size());
    Eigen::Map<Arr> vv(v[a].data, v[a].size());
    mm = b1 * mm + (T(1) - b1) * grad;
    vv = b2 * vv + (T(1) - b2) * grad.square();
    w -= lr * (mm * c1) / ((vv * c2).sqrt() + epsilon);
  }
}

AttributedGraph assemble_prediction(const Matrix& adjacency_prob, const Matrix& features,
                                    double threshold) {
  return AttributedGraph(features, binarize_symmetric(adjacency_prob, threshold));
}

template <class T>
AttributedGraph ngar_predict(const NgarModel<T>& model, const GraphSequence& window) {
  const NgarOutput out = ngar_forward(model, window);
  return assemble_prediction(out.adjacency_prob, out.features, model.config.adjacency_threshold);
}

template <class T>
std::vector<AttributedGraph> predict_batch(const NgarModel<T>& model,
                                           const PreparedSequence<T>& data,
                                           std::span<const long> targets) {
  std::vector<AttributedGraph> out;
  out.reserve(targets.size());
  const int n = model.n_nodes;
  const int f = model.feature_dim;
  const auto chunk = static_cast<std::size_t>(model.config.batch_size);
  for (std::size_t first = 0; first < targets.size(); first += chunk) {
    const auto batch = targets.subspan(first, std::min(chunk, targets.size() - first));
    const BatchOutput<T> o = forward_batch(model, data, batch);
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(batch.size()); ++b) {
      Matrix prob(n, n), feats(n, f);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) prob(i, j) = static_cast<double>(o.adjacency_prob(b, i * n + j));
        for (int c = 0; c < f; ++c) feats(i, c) = static_cast<double>(o.features(b, i * f + c));
      }
      out.push_back(assemble_prediction(prob, feats, model.config.adjacency_threshold));
    }
  }
  return out;
}

template <class T>
NgarMetrics evaluate_model(const NgarModel<T>& model, const PreparedSequence<T>& data,
                           std::span<const long> targets) {
  const DenormalGuard guard;
  validate_targets(model, data, targets, true);
  NgarMetrics metrics;
  metrics.samples = targets.size();
  if (targets.empty()) return metrics;
  const int n = model.n_nodes;
  const auto chunk = static_cast<std::size_t>(model.config.batch_size);
  double mse = 0.0, logloss = 0.0, correct = 0.0;
  for (std::size_t first = 0; first < targets.size(); first += chunk) {
    const auto batch = targets.subspan(first, std::min(chunk, targets.size() - first));
    const BatchOutput<T> out = forward_batch(model, data, batch);
    Mat<T> target_x, target_a;
    gather_targets(data, batch, target_x, target_a);
    const LossBreakdown part = data_loss(out, target_x, target_a);
    const auto weight = static_cast<double>(batch.size());
    mse += part.feature_mse * weight;
    logloss += part.adjacency_logloss * weight;
    for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(batch.size()); ++b) {
      Matrix prob(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) prob(i, j) = static_cast<double>(out.adjacency_prob(b, i * n + j));
      const Adjacency predicted = binarize_symmetric(prob, model.config.adjacency_threshold);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          correct += static_cast<double>(predicted(i, j)) == static_cast<double>(target_a(b, i * n + j));
    }
  }
  const auto count = static_cast<double>(targets.size());
  metrics.feature_mse = mse / count;
  metrics.adjacency_logloss = logloss / count;
  metrics.adjacency_accuracy = correct / (count * n * n);
  metrics.loss = metrics.feature_mse + metrics.adjacency_logloss +
                 model.config.l2_weight * l2_norm_squared(model.params);
  return metrics;
}

#define NGAR_INSTANTIATE_MODEL(T)                                                              \
  template std::vector<ParameterView<T>> parameter_views<T>(NgarParameters<T>&);               \
  template std::vector<ParameterView<const T>> parameter_views<T>(const NgarParameters<T>&);   \
  template NgarParameters<T> zeros_like<T>(const NgarParameters<T>&);                          \
  template std::size_t parameter_count<T>(const NgarParameters<T>&);                           \
  template NgarModel<T> init_model<T>(const NgarConfig&, int, int);                            \
  template PreparedSequence<T> prepare_sequence<T>(const GraphSequence&);                      \
  template double l2_norm_squared<T>(const NgarParameters<T>&);                                \
  template BatchOutput<T> forward_batch<T>(const NgarModel<T>&, const PreparedSequence<T>&,    \
                                           std::span<const long>);                             \
  template LossBreakdown loss_and_gradient<T>(const NgarModel<T>&, const PreparedSequence<T>&, \
                                              std::span<const long>, NgarParameters<T>*);      \
  template NgarOutput ngar_forward<T>(const NgarModel<T>&, const GraphSequence&);              \
  template Eigen::RowVectorXd embed_graph<T>(const NgarModel<T>&, const AttributedGraph&);     \
  template LossBreakdown ngar_loss<T>(const NgarModel<T>&, const GraphSequence&,               \
                                      const AttributedGraph&);                                 \
  template NgarParameters<T> ngar_backward<T>(const NgarModel<T>&, const GraphSequence&,       \
                                              const AttributedGraph&);                         \
  template void adam_step<T>(NgarModel<T>&, const NgarParameters<T>&, double, double, double,  \
                             double);                                                          \
  template AttributedGraph ngar_predict<T>(const NgarModel<T>&, const GraphSequence&);         \
  template std::vector<AttributedGraph> predict_batch<T>(                                      \
      const NgarModel<T>&, const PreparedSequence<T>&, std::span<const long>);                 \
  template NgarMetrics evaluate_model<T>(const NgarModel<T>&, const PreparedSequence<T>&,      \
                                         std::span<const long>);

NGAR_INSTANTIATE_MODEL(float)
NGAR_INSTANTIATE_MODEL(double)
#undef NGAR_INSTANTIATE_MODEL

template NgarModel<float> cast_model<float, double>(const NgarModel<double>&);
template NgarModel<double> cast_model<double, float>(const NgarModel<float>&);
template NgarModel<float> cast_model<float, float>(const NgarModel<float>&);
template NgarModel<double> cast_model<double, double>(const NgarModel<double>&);

}  // namespace nn
}  // namespace ngar
