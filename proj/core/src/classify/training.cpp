#include "gestlang/classify/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gestlang/errors.hpp"

namespace gestlang::classify {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.batch_size <= 0) throw Error(ErrorKind::kInvalidArgument, "batch_size must be positive");
  if (cfg.epochs <= 0) throw Error(ErrorKind::kInvalidArgument, "epochs must be positive");
  if (!std::isfinite(cfg.learning_rate) || cfg.learning_rate < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "learning_rate must be finite and non-negative");
  }
}

TrainResult train(CnnModel model, const LabeledDataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate_train_config(cfg);
  validate_dataset(data, model.spec().classes);
  if (data.train.empty()) throw Error(ErrorKind::kInvalidArgument, "training split is empty");

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Sample<float>> batch;
  batch.reserve(cfg.batch_size);
  const float lr = static_cast<float>(cfg.learning_rate);

  TrainResult result{std::move(model), {}};
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t i = start; i < end; ++i) {
        const auto& lp = data.train[order[i]];
        batch.push_back({lp.patch.values, lp.label});
      }
      auto lg = loss_and_gradients<float>(result.model, std::span<const Sample<float>>(batch));
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorKind::kTrainingDiverged, "loss became non-finite in epoch " + std::to_string(epoch));
      }
      loss_sum += lg.loss * static_cast<double>(batch.size());
      correct += lg.correct;
      auto& params = result.model.parameters();
      for (std::size_t t = 0; t < params.size(); ++t) {
        auto& w = params[t].data;
        const auto& g = lg.gradients[t].data;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!data.validation.empty()) stats.validation_accuracy = evaluate(result.model, data.validation).accuracy;
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return result;
}

Evaluation evaluate_predictions(std::span<const int> labels, std::span<const int> predicted, int classes) {
  if (labels.empty()) throw Error(ErrorKind::kInvalidArgument, "nothing to evaluate");
  if (labels.size() != predicted.size()) throw Error(ErrorKind::kInvalidArgument, "label/prediction count mismatch");
  Evaluation ev;
  ev.confusion.assign(classes, std::vector<int>(classes, 0));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw Error(ErrorKind::kInvalidArgument, "class id out of range");
    }
    ++ev.confusion[labels[i]][predicted[i]];
    if (labels[i] == predicted[i]) ++hits;
  }
  ev.total = labels.size();
  ev.accuracy = static_cast<double>(hits) / static_cast<double>(ev.total);
  return ev;
}

Evaluation evaluate(const CnnModel& model, std::span<const LabeledPatch> split) {
  std::vector<int> labels, predicted;
  labels.reserve(split.size());
  predicted.reserve(split.size());
  for (const auto& lp : split) {
    labels.push_back(lp.label);
    predicted.push_back(predict(model, lp.patch));
  }
  return evaluate_predictions(labels, predicted, model.spec().classes);
}

}  // namespace gestlang::classify
