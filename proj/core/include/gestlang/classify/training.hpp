#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gestlang/classify/dataset.hpp"

namespace gestlang::classify {

struct TrainConfig {
  double learning_rate = 0.05;
  int batch_size = 128;
  int epochs = 50;
  std::uint64_t seed = 0;
};

// Throws Error(kInvalidArgument) unless batch_size and epochs are positive and
// learning_rate is finite and non-negative.
void validate_train_config(const TrainConfig& cfg);

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;      // mean over the epoch's minibatches, pre-update
  double train_accuracy = 0.0;  // same samples, pre-update
  std::optional<double> validation_accuracy;
};

struct TrainResult {
  CnnModel model;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Plain minibatch gradient descent, shuffled per epoch from cfg.seed.
// Throws Error(kTrainingDiverged) naming the epoch if the loss goes
// non-finite.
TrainResult train(CnnModel model, const LabeledDataset& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

struct Evaluation {
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::size_t total = 0;
};

// From parallel label/prediction lists. Throws Error(kInvalidArgument) on an
// empty list, a length mismatch or an id outside [0, classes).
Evaluation evaluate_predictions(std::span<const int> labels, std::span<const int> predicted, int classes);

Evaluation evaluate(const CnnModel& model, std::span<const LabeledPatch> split);

}  // namespace gestlang::classify
