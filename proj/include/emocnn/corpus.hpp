// Microblog ingestion, cleaning and emoticon normalization.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace emocnn {

/// Emotion category with the canonical numeric codes used in dataset files.
enum class Emotion : int { sad = 1, happy = 2, love = 3, angry = 4 };

inline constexpr int kNumEmotions = 4;

/// Throws std::invalid_argument for codes outside 1..4.
Emotion emotion_from_code(int code);
inline int code_of(Emotion e) { return static_cast<int>(e); }
/// Zero-based class index used by the network output layer.
inline int class_index(Emotion e) { return static_cast<int>(e) - 1; }
inline Emotion emotion_from_index(int index) { return emotion_from_code(index + 1); }
std::string_view emotion_name(Emotion e);

struct Tweet {
  std::string text;
  Emotion label = Emotion::sad;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a `text,label` CSV. Row numbers in errors count the header as row 1.
std::vector<Tweet> load_dataset(const std::filesystem::path& path);
std::vector<Tweet> parse_dataset(std::string_view csv);
void save_dataset(const std::filesystem::path& path, const std::vector<Tweet>& tweets);
std::string format_dataset(const std::vector<Tweet>& tweets);

/// Ordered emoji -> phrase table. Keys are single grapheme clusters; phrases
/// are stored normalized (lowercase ASCII words joined by single spaces).
class EmoticonLexicon {
 public:
  EmoticonLexicon() = default;

  /// The sixteen-entry built-in table.
  static EmoticonLexicon default_lexicon();
  /// `<emoji>\t<phrase>` per line; blank lines skipped.
  static EmoticonLexicon parse(std::string_view tsv);
  static EmoticonLexicon load(const std::filesystem::path& path);
  /// Returns the default lexicon when `path` is empty.
  static EmoticonLexicon load_or_default(const std::optional<std::filesystem::path>& path);

  /// Adds an entry; returns false (and keeps the old phrase) if the key exists.
  bool add(std::string_view emoji, std::string_view phrase);

  /// Longest-prefix lookup of one grapheme cluster. Variation selectors are
  /// ignored on both sides.
  std::optional<std::string_view> match(std::string_view cluster) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Lowercase words joined by single spaces; hyphens and other punctuation
/// become word breaks.
std::string normalize_phrase(std::string_view phrase);

std::string clean(std::string_view raw);
std::string replace_emoticons(std::string_view text, const EmoticonLexicon& lexicon);
std::string strip_emoticons(std::string_view text, const EmoticonLexicon& lexicon);

enum class InputMode { emoticon_text, text_only };

std::string_view mode_name(InputMode mode);
/// Accepts "emoticon" / "emoticon_text" and "text-only" / "text_only".
InputMode parse_mode(std::string_view name);

/// clean() followed by replacement or stripping according to `mode`.
std::string normalize(std::string_view raw, const EmoticonLexicon& lexicon, InputMode mode);

/// The lexicon entries whose phrases signal each category, in code order.
std::vector<std::string> emoticon_family(Emotion e);

/// Deterministic labelled corpus standing in for private tweet collections.
/// Categories are exactly balanced up to n mod 4.
std::vector<Tweet> generate_synthetic(std::size_t n, std::uint64_t seed, bool emoticon_informative);

}  // namespace emocnn
