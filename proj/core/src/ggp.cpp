#include "ngar/ggp.hpp"

#include <Eigen/QR>
#include <cmath>
#include <string>

#include "ngar/delaunay.hpp"
#include "ngar/errors.hpp"

namespace ngar {
namespace {

Vector standard_normal(int size, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (int i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

void add_noise(Vector& x, double std, Rng& rng) {
  if (std == 0.0) return;
  std::normal_distribution<double> normal(0.0, std);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += normal(rng);
}

}  // namespace

void RotationalConfig::validate() const {
  if (n_nodes < 1) throw InvalidInput("rotational model needs at least one node");
  if (feature_dim != 2) throw InvalidInput("rotational model requires feature_dim == 2");
  if (order < 1) throw InvalidInput("rotational model order must be >= 1");
  if (static_cast<int>(phase_offsets.size()) != n_nodes)
    throw InvalidInput("rotational model needs one phase offset per node");
  for (double c : phase_offsets)
    if (!(c > -1.0 && c <= 1.0)) throw InvalidInput("phase offsets must lie in (-1, 1]");
  if (amplitude < 0.0) throw InvalidInput("amplitude must be nonnegative");
  if (noise_std < 0.0) throw InvalidInput("noise_std must be nonnegative");
}

void PmldsConfig::validate() const {
  if (n_nodes < 1 || feature_dim < 1) throw InvalidInput("PMLDS needs N >= 1 and F >= 1");
  if (complexity <= n_nodes * feature_dim)
    throw InvalidInput("PMLDS complexity must exceed N*F = " +
                       std::to_string(n_nodes * feature_dim));
  if (dynamics_matrix.rows() != complexity || dynamics_matrix.cols() != complexity)
    throw InvalidInput("PMLDS dynamics matrix must be c x c");
  const Matrix gram = dynamics_matrix.transpose() * dynamics_matrix;
  if ((gram - Matrix::Identity(complexity, complexity)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput("PMLDS dynamics matrix must be orthogonal");
  if (noise_std < 0.0) throw InvalidInput("noise_std must be nonnegative");
}

RotationalConfig make_rotational_config(int n_nodes, int order, std::uint64_t seed,
                                        double noise_std, double amplitude) {
  RotationalConfig config;
  config.n_nodes = n_nodes;
  config.order = order;
  config.amplitude = amplitude;
  config.noise_std = noise_std;
  config.seed = seed;
  Rng rng(seed);
  // -U[-1, 1) is uniform on (-1, 1].
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  config.phase_offsets.resize(static_cast<std::size_t>(std::max(n_nodes, 0)));
  for (auto& c : config.phase_offsets) c = -uniform(rng);
  config.validate();
  return config;
}

PmldsConfig make_pmlds_config(int n_nodes, int feature_dim, int complexity, std::uint64_t seed,
                              double noise_std) {
  PmldsConfig config;
  config.n_nodes = n_nodes;
  config.feature_dim = feature_dim;
  config.complexity = complexity;
  config.noise_std = noise_std;
  config.seed = seed;
  if (complexity <= n_nodes * feature_dim)
    throw InvalidInput("PMLDS complexity must exceed N*F");
  Rng rng(seed);
  config.dynamics_matrix = random_orthogonal(complexity, rng);
  config.validate();
  return config;
}

Matrix random_orthogonal(int size, Rng& rng) {
  if (size <= 0) throw InvalidInput("orthogonal matrix size must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(size, size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(size, size);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < size; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

double rotation_omega(std::span<const Vector> history, int node, const RotationalConfig& config) {
  if (static_cast<int>(history.size()) != config.order)
    throw InvalidInput("rotation history must hold exactly p = " + std::to_string(config.order) +
                       " vectors");
  if (node < 1 || node > config.n_nodes) throw InvalidInput("node index out of range");
  double sum = 0.0;
  for (const auto& x : history) {
    if (x.size() != config.n_nodes * 2) throw InvalidInput("history vectors must have length 2N");
    sum += x[2 * (node - 1)] + x[2 * (node - 1) + 1];
  }
  return config.phase_offsets[node - 1] + config.amplitude * std::cos(sum);
}

Vector rotational_step(std::span<const Vector> history, const RotationalConfig& config,
                       Rng& rng) {
  if (static_cast<int>(history.size()) != config.order)
    throw InvalidInput("rotation history must hold exactly p vectors");
  const Vector& x = history.front();
  Vector next(x.size());
  for (int n = 1; n <= config.n_nodes; ++n) {
    const double omega = rotation_omega(history, n, config);
    const double c = std::cos(omega);
    const double s = std::sin(omega);
    const double a = x[2 * (n - 1)];
    const double b = x[2 * (n - 1) + 1];
    next[2 * (n - 1)] = c * a + s * b;
    next[2 * (n - 1) + 1] = -s * a + c * b;
  }
  add_noise(next, config.noise_std, rng);
  return next;
}

Vector pmlds_step(const Vector& x, const PmldsConfig& config, Rng& rng) {
  if (x.size() != config.complexity || config.dynamics_matrix.rows() != config.complexity ||
      config.dynamics_matrix.cols() != config.complexity)
    throw InvalidInput("PMLDS state must have length c");
  Vector next = config.dynamics_matrix * x;
  add_noise(next, config.noise_std, rng);
  return next;
}

RotationalProcess::RotationalProcess(RotationalConfig config, Rng& rng)
    : config_(std::move(config)) {
  config_.validate();
  history_.reserve(static_cast<std::size_t>(config_.order));
  for (int i = 0; i < config_.order; ++i) history_.push_back(standard_normal(2 * config_.n_nodes, rng));
}

void RotationalProcess::step(Rng& rng) {
  Vector next = rotational_step(history_, config_, rng);
  history_.pop_back();
  history_.insert(history_.begin(), std::move(next));
}

PmldsProcess::PmldsProcess(PmldsConfig config, Rng& rng) : config_(std::move(config)) {
  config_.validate();
  state_ = standard_normal(config_.complexity, rng);
}

void PmldsProcess::step(Rng& rng) { state_ = pmlds_step(state_, config_, rng); }

Vector PmldsProcess::observed() const {
  return state_.head(config_.n_nodes * config_.feature_dim);
}

AttributedGraph graph_from_observation(const Vector& observed, int n_nodes, int feature_dim) {
  if (observed.size() != n_nodes * feature_dim)
    throw InvalidInput("observed vector must have N*F components");
  Matrix x(n_nodes, feature_dim);
  for (int i = 0; i < n_nodes; ++i)
    for (int f = 0; f < feature_dim; ++f) x(i, f) = observed[i * feature_dim + f];
  Adjacency a = delaunay_adjacency(x);
  return AttributedGraph(std::move(x), std::move(a));
}

namespace {

template <class Process>
GraphSequence run_process(Process process, int n_nodes, int feature_dim, long length, Rng& rng) {
  for (int i = 0; i < kBurnIn; ++i) process.step(rng);
  std::vector<AttributedGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(length));
  for (long t = 0; t < length; ++t) {
    process.step(rng);
    graphs.push_back(graph_from_observation(process.observed(), n_nodes, feature_dim));
  }
  return GraphSequence(std::move(graphs));
}

}  // namespace

GraphSequence generate_sequence(const GgpConfig& config, long length, Rng& rng) {
  if (length < 0) throw InvalidInput("sequence length must be nonnegative");
  return std::visit(
      [&](const auto& c) -> GraphSequence {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, RotationalConfig>) {
          return run_process(RotationalProcess(c, rng), c.n_nodes, c.feature_dim, length, rng);
        } else {
          if (c.feature_dim != 2)
            throw InvalidInput("graph sequences need feature_dim == 2 for Delaunay topology");
          return run_process(PmldsProcess(c, rng), c.n_nodes, c.feature_dim, length, rng);
        }
      },
      config);
}

Rng simulation_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x5eedu};
  return Rng(seq);
}

GraphSequence generate_sequence(const GgpConfig& config, long length) {
  Rng rng = simulation_rng(seed_of(config));
  return generate_sequence(config, length, rng);
}

int n_nodes_of(const GgpConfig& config) {
  return std::visit([](const auto& c) { return c.n_nodes; }, config);
}

int feature_dim_of(const GgpConfig& config) {
  return std::visit([](const auto& c) { return c.feature_dim; }, config);
}

std::uint64_t seed_of(const GgpConfig& config) {
  return std::visit([](const auto& c) { return c.seed; }, config);
}

}  // namespace ngar
