#include "emocnn/encode.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace emocnn {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw std::invalid_argument("vocabulary contains an empty word");
    if (!index_.emplace(words_[i], static_cast<int>(i) + kFirstWordId).second) {
      throw std::invalid_argument("duplicate vocabulary word: " + words_[i]);
    }
  }
}

int Vocabulary::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kOovId : it->second;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

Vocabulary fit_vocabulary(const std::vector<std::string>& corpus, std::optional<std::size_t> size_cap) {
  if (corpus.empty()) throw std::invalid_argument("fit_vocabulary: empty corpus");
  if (size_cap && *size_cap < 2) throw std::invalid_argument("fit_vocabulary: size cap below 2");

  std::vector<std::string> seen;
  std::vector<std::size_t> counts;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& text : corpus) {
    for (auto word : split_words(text)) {
      auto [it, inserted] = slot.try_emplace(std::string(word), seen.size());
      if (inserted) {
        seen.emplace_back(word);
        counts.push_back(0);
      }
      ++counts[it->second];
    }
  }

  std::vector<std::size_t> order(seen.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  if (size_cap) order.resize(std::min(order.size(), *size_cap - 2));

  std::vector<std::string> words;
  words.reserve(order.size());
  for (auto i : order) words.push_back(std::move(seen[i]));
  return Vocabulary(std::move(words));
}

TokenSequence encode(std::string_view text, const Vocabulary& vocab) {
  TokenSequence ids;
  for (auto word : split_words(text)) ids.push_back(vocab.id(word));
  return ids;
}

PaddedSequence pad(const TokenSequence& seq, std::size_t length) {
  if (length < 1) throw std::invalid_argument("pad: length must be at least 1");
  PaddedSequence out(length, kPaddingId);
  const std::size_t keep = std::min(seq.size(), length);
  std::copy(seq.end() - static_cast<std::ptrdiff_t>(keep), seq.end(),
            out.end() - static_cast<std::ptrdiff_t>(keep));
  return out;
}

std::size_t choose_sequence_length(const std::vector<TokenSequence>& sequences,
                                   std::size_t max_length, std::size_t min_length) {
  if (max_length < min_length) throw std::invalid_argument("max sequence length below minimum");
  std::size_t longest = 0;
  for (const auto& s : sequences) longest = std::max(longest, s.size());
  return std::clamp(longest, min_length, max_length);
}

}  // namespace emocnn
