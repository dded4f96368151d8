#include "emocnn/pipeline.hpp"

#include <stdexcept>

namespace emocnn {

std::string_view precision_name(Precision p) { return p == Precision::f64 ? "f64" : "f32"; }

Precision parse_precision(std::string_view name) {
  if (name == "f64" || name == "float64" || name == "double") return Precision::f64;
  if (name == "f32" || name == "float32" || name == "float") return Precision::f32;
  throw std::invalid_argument("unknown precision: " + std::string(name));
}

void PipelineOptions::validate() const {
  train.validate();
  if (max_len < static_cast<std::size_t>(kMinSequenceLength)) {
    throw std::invalid_argument("max_len must be at least " + std::to_string(kMinSequenceLength));
  }
  if (vocab_cap && *vocab_cap < 2) throw std::invalid_argument("vocab_cap must be at least 2");
}

std::size_t choose_padded_length(const std::vector<TokenSequence>& sequences, std::size_t max_len,
                                 const ModelConfig& architecture) {
  const std::size_t base =
      choose_sequence_length(sequences, max_len, static_cast<std::size_t>(kMinSequenceLength));
  auto covers = [&](std::size_t length) {
    ModelConfig c = architecture;
    c.seq_len = static_cast<Index>(length);
    return c.covers_all_positions();
  };
  for (std::size_t length = base; length <= max_len; ++length) {
    if (covers(length)) return length;
  }
  for (std::size_t length = base; length >= static_cast<std::size_t>(kMinSequenceLength); --length) {
    if (covers(length)) return length;
  }
  return base;
}

std::vector<std::string> normalize_all(const std::vector<Tweet>& tweets, const EmoticonLexicon& lexicon,
                                       InputMode mode) {
  std::vector<std::string> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(normalize(t.text, lexicon, mode));
  return out;
}

std::vector<Example> make_examples(const std::vector<Tweet>& tweets, const EmoticonLexicon& lexicon,
                                   InputMode mode, const Vocabulary& vocab, std::size_t length) {
  std::vector<Example> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) {
    out.push_back(Example{pad(encode(normalize(t.text, lexicon, mode), vocab), length), t.label});
  }
  return out;
}

}  // namespace emocnn
