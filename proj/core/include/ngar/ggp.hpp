#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "ngar/graph.hpp"

namespace ngar {

using Rng = std::mt19937_64;

// Steps discarded before the first graph is emitted.
inline constexpr int kBurnIn = 100;

// Rotational process: each node's 2-d feature is rotated by an angle that
// depends on the last `order` latent vectors.
struct RotationalConfig {
  int n_nodes = 5;
  int feature_dim = 2;
  int order = 1;
  // c_n in (-1, 1], one per node.
  std::vector<double> phase_offsets;
  double amplitude = 0.01;
  double noise_std = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

// Partially masked linear dynamical system of latent dimension `complexity`:
// x_{t+1} = R x_t + eps, of which the first N*F components are observed.
struct PmldsConfig {
  int n_nodes = 5;
  int feature_dim = 2;
  int complexity = 11;
  Matrix dynamics_matrix;
  double noise_std = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

using GgpConfig = std::variant<RotationalConfig, PmldsConfig>;

struct NoiseSpec {
  double std = 0.001;
  enum class Mode { process } mode = Mode::process;
};

// Phase offsets drawn uniformly from (-1, 1] using `seed`.
RotationalConfig make_rotational_config(int n_nodes, int order, std::uint64_t seed,
                                        double noise_std = 0.001, double amplitude = 0.01);
// Dynamics matrix drawn Haar-uniformly from the orthogonal group using `seed`.
PmldsConfig make_pmlds_config(int n_nodes, int feature_dim, int complexity, std::uint64_t seed,
                              double noise_std = 0.001);

// Haar-distributed orthogonal matrix: QR of a standard normal matrix with the
// signs of R's diagonal folded into Q.
Matrix random_orthogonal(int size, Rng& rng);

// Rotation angle for node `node` (1-based), given history [x_t, ..., x_{t-p+1}].
double rotation_omega(std::span<const Vector> history, int node, const RotationalConfig& config);

// x_{t+1} = R(history) x_t + eps; history is [x_t, ..., x_{t-p+1}].
Vector rotational_step(std::span<const Vector> history, const RotationalConfig& config, Rng& rng);

// R x + eps.
Vector pmlds_step(const Vector& x, const PmldsConfig& config, Rng& rng);

class RotationalProcess {
 public:
  // Initial history: `order` vectors of independent standard normal entries.
  RotationalProcess(RotationalConfig config, Rng& rng);

  void step(Rng& rng);
  const Vector& state() const { return history_.front(); }
  Vector observed() const { return history_.front(); }
  const RotationalConfig& config() const { return config_; }

 private:
  RotationalConfig config_;
  std::vector<Vector> history_;  // most recent first
};

class PmldsProcess {
 public:
  // x_0 standard normal.
  PmldsProcess(PmldsConfig config, Rng& rng);

  void step(Rng& rng);
  const Vector& state() const { return state_; }
  // First N*F latent components.
  Vector observed() const;
  const PmldsConfig& config() const { return config_; }

 private:
  PmldsConfig config_;
  Vector state_;
};

// Observed vector reshaped row-major to N x F, with Delaunay adjacency.
AttributedGraph graph_from_observation(const Vector& observed, int n_nodes, int feature_dim);

// Runs the configured process for kBurnIn discarded steps and then emits
// `length` graphs.
GraphSequence generate_sequence(const GgpConfig& config, long length, Rng& rng);
// Same, with the simulation stream derived from the config seed.
GraphSequence generate_sequence(const GgpConfig& config, long length);

// Simulation stream used by the single-argument overload of generate_sequence.
Rng simulation_rng(std::uint64_t seed);

int n_nodes_of(const GgpConfig& config);
int feature_dim_of(const GgpConfig& config);
std::uint64_t seed_of(const GgpConfig& config);

}  // namespace ngar
