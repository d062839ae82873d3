#include "ngar/neural/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "ngar/errors.hpp"

namespace ngar::nn {
namespace {

template <class T>
double mean_loss(const NgarModel<T>& model, const PreparedSequence<T>& data,
                 std::span<const long> targets) {
  const auto chunk = static_cast<std::size_t>(model.config.batch_size);
  double data_terms = 0.0;
  for (std::size_t first = 0; first < targets.size(); first += chunk) {
    const auto batch = targets.subspan(first, std::min(chunk, targets.size() - first));
    const LossBreakdown part = loss_and_gradient<T>(model, data, batch, nullptr);
    data_terms += (part.feature_mse + part.adjacency_logloss) * static_cast<double>(batch.size());
  }
  return data_terms / static_cast<double>(targets.size()) +
         model.config.l2_weight * l2_norm_squared(model.params);
}

// Batch temporaries are tens of MB; keep them on the heap instead of
// mmap/munmap round trips.
void keep_large_allocations() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
    return true;
  }();
  (void)once;
#endif
}

}  // namespace

template <class T>
TrainResult<T> train(NgarModel<T> model, const PreparedSequence<T>& data,
                     const EpochCallback& on_epoch) {
  const auto& config = model.config;
  config.validate();
  keep_large_allocations();
  const long k = config.window;
  const long length = static_cast<long>(data.size());
  if (length <= k + 10)
    throw InvalidInput("training needs more than k + 10 = " + std::to_string(k + 10) +
                       " graphs, got " + std::to_string(length));

  std::vector<long> pairs(static_cast<std::size_t>(length - k));
  std::iota(pairs.begin(), pairs.end(), k);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.validation_fraction *
                                               static_cast<double>(pairs.size()))));
  std::vector<long> validation(pairs.end() - static_cast<std::ptrdiff_t>(n_val), pairs.end());
  std::vector<long> training(pairs.begin(), pairs.end() - static_cast<std::ptrdiff_t>(n_val));

  TrainResult<T> result{model, {}};
  result.history.train_pairs = training.size();
  result.history.validation_pairs = validation.size();

  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  NgarParameters<T> grads;
  int since_best = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(training.begin(), training.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t first = 0; first < training.size(); first += batch_size) {
      const std::span<const long> batch(training.data() + first,
                                        std::min(batch_size, training.size() - first));
      const LossBreakdown loss = loss_and_gradient<T>(model, data, batch, &grads);
      adam_step(model, grads, config.learning_rate);
      epoch_loss += loss.total * static_cast<double>(batch.size());
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(training.size());
    record.validation_loss = mean_loss(model, data, validation);
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (result.history.best_epoch < 0 ||
        record.validation_loss < result.history.best_validation_loss) {
      result.history.best_epoch = epoch;
      result.history.best_validation_loss = record.validation_loss;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.history.early_stopped = true;
      break;
    }
  }
  return result;
}

template <class T>
TrainResult<T> train(NgarModel<T> model, const GraphSequence& sequence,
                     const EpochCallback& on_epoch) {
  return train(std::move(model), prepare_sequence<T>(sequence), on_epoch);
}

template TrainResult<float> train<float>(NgarModel<float>, const PreparedSequence<float>&,
                                         const EpochCallback&);
template TrainResult<double> train<double>(NgarModel<double>, const PreparedSequence<double>&,
                                           const EpochCallback&);
template TrainResult<float> train<float>(NgarModel<float>, const GraphSequence&,
                                         const EpochCallback&);
template TrainResult<double> train<double>(NgarModel<double>, const GraphSequence&,
                                           const EpochCallback&);

}  // namespace ngar::nn
