#include "emocnn/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace emocnn {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

std::int64_t ConfusionMatrix::support(Emotion e) const {
  std::int64_t n = 0;
  for (auto c : counts[static_cast<std::size_t>(class_index(e))]) n += c;
  return n;
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  if (n == 0) throw std::invalid_argument("accuracy of an empty confusion matrix");
  return static_cast<double>(trace()) / static_cast<double>(n);
}

ConfusionMatrix confusion_matrix(const std::vector<int>& predicted_codes,
                                 const std::vector<int>& actual_codes) {
  if (predicted_codes.size() != actual_codes.size()) {
    throw std::invalid_argument("confusion_matrix: " + std::to_string(predicted_codes.size()) +
                                " predictions for " + std::to_string(actual_codes.size()) + " labels");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted_codes.size(); ++i) {
    m.add(emotion_from_code(actual_codes[i]), emotion_from_code(predicted_codes[i]));
  }
  return m;
}

ConfusionMatrix confusion_matrix(const std::vector<Emotion>& predicted,
                                 const std::vector<Emotion>& actual) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("confusion_matrix: length mismatch");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) m.add(actual[i], predicted[i]);
  return m;
}

std::string format_confusion_csv(const ConfusionMatrix& m) {
  std::string out = "actual";
  for (int code = 1; code <= kNumEmotions; ++code) {
    out += ',';
    out += emotion_name(emotion_from_code(code));
  }
  out += ",total\n";
  for (int a = 1; a <= kNumEmotions; ++a) {
    const Emotion actual = emotion_from_code(a);
    out += emotion_name(actual);
    for (auto c : m.counts[static_cast<std::size_t>(a - 1)]) out += "," + std::to_string(c);
    out += "," + std::to_string(m.support(actual)) + "\n";
  }
  return out;
}

std::string format_confusion_table(const ConfusionMatrix& m) {
  char buf[128];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-8s %7s %7s %7s %7s %7s\n", "actual", "Sad", "Happy", "Love", "Angry",
                "total");
  out += buf;
  for (int a = 1; a <= kNumEmotions; ++a) {
    const auto& row = m.counts[static_cast<std::size_t>(a - 1)];
    const Emotion actual = emotion_from_code(a);
    std::snprintf(buf, sizeof buf, "%-8s %7lld %7lld %7lld %7lld %7lld\n",
                  std::string(emotion_name(actual)).c_str(), static_cast<long long>(row[0]),
                  static_cast<long long>(row[1]), static_cast<long long>(row[2]),
                  static_cast<long long>(row[3]), static_cast<long long>(m.support(actual)));
    out += buf;
  }
  return out;
}

}  // namespace emocnn
