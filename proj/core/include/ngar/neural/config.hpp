#pragma once

#include <cstdint>
#include <vector>

namespace ngar {

// Architecture and training hyperparameters of the neural graph
// autoregressive model. Defaults reproduce the reference configuration.
struct NgarConfig {
  int window = 20;                          // k
  std::vector<int> conv_channels{128, 128};
  int pool_channels = 128;                  // embedding size l
  std::vector<int> rnn_units{256, 256};
  std::vector<int> dense_units{256, 512};
  double l2_weight = 0.0005;
  double learning_rate = 0.001;
  int batch_size = 256;
  int patience = 20;
  int max_epochs = 200;
  double adjacency_threshold = 0.5;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace ngar
