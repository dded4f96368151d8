// Split, minibatch RMSProp training and evaluation.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emocnn/corpus.hpp"
#include "emocnn/encode.hpp"
#include "emocnn/metrics.hpp"
#include "emocnn/model.hpp"
#include "emocnn/random.hpp"
#include "emocnn/rmsprop.hpp"

namespace emocnn {

/// An encoded, padded, labelled input.
struct Example {
  PaddedSequence ids;
  Emotion label = Emotion::sad;
};

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  double split_ratio = 0.75;
  std::uint64_t seed = 0;
  RmsPropConfig optimizer;
  InputMode mode = InputMode::emoticon_text;

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
      throw std::invalid_argument("split_ratio must lie strictly between 0 and 1");
    }
    optimizer.validate();
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double train_accuracy = 0;
  double test_accuracy = 0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

using History = std::vector<EpochRecord>;

/// `epoch,train_loss,train_acc,test_acc` with shortest round-trip numbers.
std::string format_history_csv(const History& history);

/// Raised when the loss or a gradient stops being finite. Carries the epochs
/// completed before the failure.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, History history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const History& history() const { return history_; }

 private:
  History history_;
};

/// Seeded shuffle, then the first floor(ratio * n) records train.
template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(std::vector<T> data, double ratio,
                                                        std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("split_dataset: empty data");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split_dataset: ratio must be in (0, 1)");
  Rng rng(seed);
  rng.shuffle(std::span(data));
  const auto cut = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(data.size())));
  std::vector<T> test(std::make_move_iterator(data.begin() + static_cast<std::ptrdiff_t>(cut)),
                      std::make_move_iterator(data.end()));
  data.resize(cut);
  return {std::move(data), std::move(test)};
}

/// Index of the largest value; ties resolve to the lowest index.
template <typename Scalar>
Index argmax(const Tensor<Scalar>& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

struct Prediction {
  Emotion category = Emotion::sad;
  std::array<double, kNumEmotions> probabilities{};
};

template <typename Scalar>
Prediction predict(const Model<Scalar>& model, std::span<const int> ids) {
  const auto fc = forward(model, ids);
  Prediction p;
  p.category = emotion_from_index(static_cast<int>(argmax(fc.probs)));
  for (std::size_t i = 0; i < p.probabilities.size(); ++i) {
    p.probabilities[i] = static_cast<double>(fc.probs(static_cast<Index>(i)));
  }
  return p;
}

struct Evaluation {
  double accuracy = 0;
  ConfusionMatrix confusion;
};

template <typename Scalar>
Evaluation evaluate(const Model<Scalar>& model, const std::vector<Example>& examples) {
  if (examples.empty()) throw std::invalid_argument("evaluate: empty test set");
  Evaluation e;
  for (const auto& ex : examples) e.confusion.add(ex.label, predict(model, ex.ids).category);
  e.accuracy = e.confusion.accuracy();
  return e;
}

namespace detail {

template <typename Scalar>
void check_examples(const Model<Scalar>& model, const std::vector<Example>& examples, const char* which) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ids = examples[i].ids;
    if (static_cast<Index>(ids.size()) != model.config.seq_len) {
      throw std::invalid_argument(std::string("shape mismatch: ") + which + " example " + std::to_string(i) +
                                  " has length " + std::to_string(ids.size()) + ", model expects " +
                                  std::to_string(model.config.seq_len));
    }
    for (int id : ids) {
      if (id < 0 || id >= model.config.vocab_size) {
        throw std::invalid_argument(std::string("shape mismatch: ") + which + " example " +
                                    std::to_string(i) + " has id " + std::to_string(id) +
                                    " outside vocabulary of " + std::to_string(model.config.vocab_size));
      }
    }
  }
}

}  // namespace detail

using EpochObserver = std::function<void(const EpochRecord&)>;

/// Minibatch training. Each epoch reshuffles the training set with seed ^ epoch,
/// averages per-example gradients over each batch (the last partial batch
/// included) and applies one RMSProp step per batch. Train loss and accuracy
/// are running values over the epoch; test accuracy uses the end-of-epoch model.
template <typename Scalar>
History train_model(Model<Scalar>& model, const std::vector<Example>& train,
                    const std::vector<Example>& test, const TrainConfig& config,
                    const EpochObserver& observer = {}) {
  config.validate();
  if (train.empty()) throw std::invalid_argument("train_model: empty training set");
  if (test.empty()) throw std::invalid_argument("train_model: empty test set");
  detail::check_examples(model, train, "train");
  detail::check_examples(model, test, "test");

  auto state = RmsPropState<Scalar>::for_model(model.config, config.optimizer);
  auto grads = ParamSet<Scalar>::zeros(model.config);
  std::vector<std::size_t> order(train.size());
  History history;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(config.seed ^ static_cast<std::uint64_t>(epoch));
    rng.shuffle(std::span(order));

    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      grads.set_zero();
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = train[order[k]];
        const auto fc = forward(model, ex.ids);
        const Index label = class_index(ex.label);
        const double l = static_cast<double>(loss(fc, label));
        if (!std::isfinite(l) || !fc.probs.all_finite()) {
          throw TrainingDiverged("non-finite loss in epoch " + std::to_string(epoch), history);
        }
        loss_sum += l;
        if (argmax(fc.probs) == label) ++correct;
        accumulate_gradients(model, fc, label, grads);
      }
      grads.scale(Scalar(1) / static_cast<Scalar>(stop - start));
      try {
        rmsprop_step(model, grads, state);
      } catch (const NonFiniteGradient& e) {
        throw TrainingDiverged(std::string(e.what()) + " in epoch " + std::to_string(epoch), history);
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    record.test_accuracy = evaluate(model, test).accuracy;
    history.push_back(record);
    if (observer) observer(record);
  }
  return history;
}

}  // namespace emocnn
