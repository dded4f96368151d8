// Integer encoding and fixed-length padding of normalized text.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emocnn {

inline constexpr int kPaddingId = 0;
inline constexpr int kOovId = 1;
inline constexpr int kFirstWordId = 2;

using TokenSequence = std::vector<int>;
using PaddedSequence = std::vector<int>;

/// Frequency-ranked word index. Id 0 is padding, id 1 is out-of-vocabulary,
/// words occupy 2..words().size()+1.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Rebuilds from a word list in id order (id 2 first).
  explicit Vocabulary(std::vector<std::string> words);

  /// Returns kOovId for unknown words.
  int id(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }
  /// Number of embedding rows needed: words plus the two reserved ids.
  std::size_t size() const { return words_.size() + 2; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// Splits on spaces; counts frequencies; ties keep first-seen order. With a
/// cap, only the top (cap - 2) words are kept.
Vocabulary fit_vocabulary(const std::vector<std::string>& corpus,
                          std::optional<std::size_t> size_cap = std::nullopt);

std::vector<std::string_view> split_words(std::string_view text);

TokenSequence encode(std::string_view text, const Vocabulary& vocab);

/// Left-pads with zeros to `length`, or keeps the last `length` ids.
PaddedSequence pad(const TokenSequence& seq, std::size_t length);

/// Sequence length for a training corpus: the longest sequence clamped to
/// [min_length, max_length].
std::size_t choose_sequence_length(const std::vector<TokenSequence>& sequences,
                                   std::size_t max_length, std::size_t min_length);

}  // namespace emocnn
