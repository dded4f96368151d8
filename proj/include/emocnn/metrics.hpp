// Confusion matrices over the four emotion categories.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emocnn/corpus.hpp"

namespace emocnn {

/// counts[actual][predicted], both indexed by category code - 1.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, kNumEmotions>, kNumEmotions> counts{};

  void add(Emotion actual, Emotion predicted) {
    ++counts[static_cast<std::size_t>(class_index(actual))][static_cast<std::size_t>(class_index(predicted))];
  }
  std::int64_t total() const;
  std::int64_t trace() const;
  /// Row sum: number of samples whose actual category is `e`.
  std::int64_t support(Emotion e) const;
  /// trace / total; throws on an empty matrix.
  double accuracy() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws std::invalid_argument on length mismatch or codes outside 1..4.
ConfusionMatrix confusion_matrix(const std::vector<int>& predicted_codes,
                                 const std::vector<int>& actual_codes);
ConfusionMatrix confusion_matrix(const std::vector<Emotion>& predicted,
                                 const std::vector<Emotion>& actual);

/// `actual,Sad,Happy,Love,Angry,total` header plus one row per category.
std::string format_confusion_csv(const ConfusionMatrix& m);
/// Fixed-width table for terminal output.
std::string format_confusion_table(const ConfusionMatrix& m);

}  // namespace emocnn
