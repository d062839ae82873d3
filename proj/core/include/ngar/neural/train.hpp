#pragma once

#include <functional>
#include <vector>

#include "ngar/graph.hpp"
#include "ngar/neural/model.hpp"

namespace ngar::nn {

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;       // mean minibatch loss over the epoch
  double validation_loss = 0.0;  // full loss on the held-out pairs after the epoch
  double seconds = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double best_validation_loss = 0.0;
  std::size_t train_pairs = 0;
  std::size_t validation_pairs = 0;
  bool early_stopped = false;
};

template <class T>
struct TrainResult {
  NgarModel<T> model;  // snapshot with the best validation loss
  TrainingHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Window/target pairs are every t in [k, T); the last validation_fraction of
// them (chronologically) is held out. Training pairs are reshuffled every
// epoch from a stream seeded by config.seed; minibatch Adam runs until the
// validation loss has not improved for `patience` epochs or max_epochs.
template <class T>
TrainResult<T> train(NgarModel<T> model, const GraphSequence& sequence,
                     const EpochCallback& on_epoch = {});

template <class T>
TrainResult<T> train(NgarModel<T> model, const PreparedSequence<T>& data,
                     const EpochCallback& on_epoch = {});

}  // namespace ngar::nn
