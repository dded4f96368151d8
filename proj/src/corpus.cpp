#include "emocnn/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "emocnn/random.hpp"
#include "graphemes.hpp"

namespace emocnn {

Emotion emotion_from_code(int code) {
  if (code < 1 || code > kNumEmotions) {
    throw std::invalid_argument("emotion code out of range: " + std::to_string(code));
  }
  return static_cast<Emotion>(code);
}

std::string_view emotion_name(Emotion e) {
  switch (e) {
    case Emotion::sad: return "Sad";
    case Emotion::happy: return "Happy";
    case Emotion::love: return "Love";
    case Emotion::angry: return "Angry";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> parse_csv_records(std::string_view csv) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool after_quote = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    after_quote = false;
  };
  auto end_record = [&] {
    end_field();
    // A bare newline produces a record with one empty field; skip it.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < csv.size() && csv[i + 1] == '\n') ++i;
      end_record();
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else {
      if (after_quote) {
        throw DatasetError("malformed row " + std::to_string(records.size() + 1) +
                           ": text after closing quote");
      }
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    throw DatasetError("malformed row " + std::to_string(records.size() + 1) +
                       ": unterminated quoted field");
  }
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string quote_csv(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DatasetError("read failure on " + path.string());
  return std::move(ss).str();
}

}  // namespace

std::vector<Tweet> parse_dataset(std::string_view csv) {
  if (csv.starts_with("\xEF\xBB\xBF")) csv.remove_prefix(3);
  const auto records = parse_csv_records(csv);
  if (records.empty()) throw DatasetError("missing header row");
  if (records[0] != std::vector<std::string>{"text", "label"}) {
    throw DatasetError("expected header `text,label`");
  }

  std::vector<Tweet> tweets;
  tweets.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string row = std::to_string(r + 1);
    if (rec.size() != 2) {
      throw DatasetError("malformed row " + row + ": expected 2 fields, got " +
                         std::to_string(rec.size()));
    }
    std::string_view label = rec[1];
    while (!label.empty() && label.front() == ' ') label.remove_prefix(1);
    while (!label.empty() && label.back() == ' ') label.remove_suffix(1);
    int code = 0;
    const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), code);
    if (ec != std::errc{} || ptr != label.data() + label.size() || label.empty()) {
      throw DatasetError("malformed row " + row + ": label is not an integer");
    }
    if (code < 1 || code > kNumEmotions) {
      throw DatasetError("label out of range at row " + row);
    }
    tweets.push_back(Tweet{rec[0], static_cast<Emotion>(code)});
  }
  return tweets;
}

std::vector<Tweet> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

std::string format_dataset(const std::vector<Tweet>& tweets) {
  std::string out = "text,label\n";
  for (const auto& t : tweets) {
    out += quote_csv(t.text);
    out += ',';
    out += std::to_string(code_of(t.label));
    out += '\n';
  }
  return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Tweet>& tweets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  out << format_dataset(tweets);
  if (!out) throw DatasetError("write failure on " + path.string());
}

// ---------------------------------------------------------------------------
// Lexicon

namespace {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_variation_selector(char32_t cp) { return cp == 0xFE0E || cp == 0xFE0F; }

std::vector<char32_t> canonical_codepoints(std::string_view cluster) {
  auto cps = detail::decode_utf8(cluster);
  std::erase_if(cps, is_variation_selector);
  return cps;
}

std::string encode_codepoints(std::span<const char32_t> cps) {
  std::string out;
  for (char32_t cp : cps) detail::append_utf8(out, cp);
  return out;
}

// Table 2 rows, left column then right column. The first row prints 😊 for
// "Grinning face"; it is stored as U+1F600, the code point with that name,
// so that 😊 keeps its second listing "Smiling face".
constexpr std::array<std::pair<std::string_view, std::string_view>, 16> kDefaultEntries{{
    {"\U0001F600", "Grinning face"},
    {"\U0001F604", "Grinning face with smiling eyes"},
    {"\U0001F601", "Beaming face with smiling eyes"},
    {"\U0001F60A", "Smiling face"},
    {"\U0001F62D", "Loudly crying face"},
    {"\U0001F61E", "Crying face"},
    {"\U0001F613", "Pleading face"},
    {"\U0001F620", "Frowning face"},
    {"\U0001F621", "Angry face"},
    {"\U0001F62C", "Pouting face"},
    {"\U0001F60F", "Face with steam from nose"},
    {"\U0001F5E8\uFE0F", "Face with symbols on the mouth"},
    {"\U0001F60D", "Smiling face with heart-eyes"},
    {"\U0001F618", "Smiling face with hearts"},
    {"\U0001F617", "Face blowing a kiss"},
    {"\U0001F61A", "Kissing face with closed eyes"},
}};

}  // namespace

std::string normalize_phrase(std::string_view phrase) {
  std::string lowered = detail::to_lower_utf8(phrase);
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < lowered.size(); ++i) {
    const char c = lowered[i];
    const bool keep = is_ascii_alnum(c) ||
                      (c == '\'' && i > 0 && i + 1 < lowered.size() &&
                       is_ascii_alnum(lowered[i - 1]) && is_ascii_alnum(lowered[i + 1]));
    if (keep) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    } else {
      pending_space = true;
    }
  }
  return out;
}

bool EmoticonLexicon::add(std::string_view emoji, std::string_view phrase) {
  const auto clusters = detail::grapheme_clusters(emoji);
  if (clusters.size() != 1) {
    throw std::invalid_argument("lexicon key must be exactly one grapheme cluster: \"" +
                                std::string(emoji) + "\"");
  }
  std::string key = encode_codepoints(canonical_codepoints(emoji));
  if (index_.contains(key)) return false;
  index_.emplace(std::move(key), entries_.size());
  entries_.emplace_back(std::string(emoji), normalize_phrase(phrase));
  return true;
}

std::optional<std::string_view> EmoticonLexicon::match(std::string_view cluster) const {
  if (index_.empty()) return std::nullopt;
  const auto cps = canonical_codepoints(cluster);
  for (std::size_t len = cps.size(); len > 0; --len) {
    const auto it = index_.find(encode_codepoints(std::span(cps).first(len)));
    if (it != index_.end()) return std::string_view(entries_[it->second].second);
  }
  return std::nullopt;
}

EmoticonLexicon EmoticonLexicon::default_lexicon() {
  EmoticonLexicon lex;
  for (const auto& [emoji, phrase] : kDefaultEntries) lex.add(emoji, phrase);
  return lex;
}

EmoticonLexicon EmoticonLexicon::parse(std::string_view tsv) {
  EmoticonLexicon lex;
  std::size_t line_no = 0;
  while (!tsv.empty()) {
    ++line_no;
    const auto nl = tsv.find('\n');
    std::string_view line = tsv.substr(0, nl);
    tsv.remove_prefix(nl == std::string_view::npos ? tsv.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) +
                                  ": expected <emoji><TAB><phrase>");
    }
    const std::string_view phrase = line.substr(tab + 1);
    if (normalize_phrase(phrase).empty()) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": empty phrase");
    }
    lex.add(line.substr(0, tab), phrase);
  }
  return lex;
}

EmoticonLexicon EmoticonLexicon::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

EmoticonLexicon EmoticonLexicon::load_or_default(const std::optional<std::filesystem::path>& path) {
  if (!path || path->empty()) return default_lexicon();
  return load(*path);
}

// ---------------------------------------------------------------------------
// Cleaning and emoticon handling

namespace {

bool is_ascii_break(unsigned char c) { return c <= 0x20 || c == 0x7F; }

void collapse_into(std::string& out, std::string_view token) {
  if (token.empty()) return;
  if (!out.empty()) out.push_back(' ');
  out.append(token);
}

std::string scrub_token(std::string_view token) {
  std::string out;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    if (c >= 0x80 || is_ascii_alnum(static_cast<char>(c))) {
      out.push_back(static_cast<char>(c));
    } else if (c == '\'' && i > 0 && i + 1 < token.size() && is_ascii_alnum(token[i - 1]) &&
               is_ascii_alnum(token[i + 1])) {
      out.push_back('\'');
    } else {
      out.push_back(' ');
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    collapse_into(out, text.substr(start, i - start));
  }
  return out;
}

std::string rewrite_emoticons(std::string_view text, const EmoticonLexicon* lexicon) {
  std::string out;
  out.reserve(text.size());
  for (std::string_view cluster : detail::grapheme_clusters(text)) {
    const bool ascii = std::all_of(cluster.begin(), cluster.end(),
                                   [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii) {
      for (char c : cluster) out.push_back(is_ascii_break(static_cast<unsigned char>(c)) ? ' ' : c);
      continue;
    }
    out.push_back(' ');
    if (lexicon != nullptr) {
      if (auto phrase = lexicon->match(cluster)) {
        out.append(*phrase);
        out.push_back(' ');
      }
    }
  }
  return collapse_whitespace(out);
}

}  // namespace

std::string clean(std::string_view raw) {
  std::string lowered = detail::to_lower_utf8(raw);
  // Typographic apostrophes behave like ASCII ones inside contractions.
  for (std::string_view curly : {"’", "‘"}) {
    for (auto pos = lowered.find(curly); pos != std::string::npos; pos = lowered.find(curly, pos)) {
      lowered.replace(pos, curly.size(), "'");
    }
  }

  std::string out;
  std::size_t i = 0;
  const std::string_view s = lowered;
  while (i < s.size()) {
    while (i < s.size() && is_ascii_break(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_ascii_break(static_cast<unsigned char>(s[i]))) ++i;
    const std::string_view token = s.substr(start, i - start);
    if (token.empty() || token.front() == '@') continue;
    if (token.starts_with("http://") || token.starts_with("https://")) continue;
    collapse_into(out, scrub_token(token));
  }
  return collapse_whitespace(out);
}

std::string replace_emoticons(std::string_view text, const EmoticonLexicon& lexicon) {
  return rewrite_emoticons(text, &lexicon);
}

std::string strip_emoticons(std::string_view text, const EmoticonLexicon& /*lexicon*/) {
  // Lexicon entries and unknown emoji are both removed.
  return rewrite_emoticons(text, nullptr);
}

std::string_view mode_name(InputMode mode) {
  return mode == InputMode::emoticon_text ? "emoticon" : "text-only";
}

InputMode parse_mode(std::string_view name) {
  if (name == "emoticon" || name == "emoticon_text") return InputMode::emoticon_text;
  if (name == "text-only" || name == "text_only") return InputMode::text_only;
  throw std::invalid_argument("unknown mode: " + std::string(name));
}

std::string normalize(std::string_view raw, const EmoticonLexicon& lexicon, InputMode mode) {
  const std::string cleaned = clean(raw);
  return mode == InputMode::emoticon_text ? replace_emoticons(cleaned, lexicon)
                                          : strip_emoticons(cleaned, lexicon);
}

// ---------------------------------------------------------------------------
// Synthetic data

std::vector<std::string> emoticon_family(Emotion e) {
  const std::size_t first = [e]() -> std::size_t {
    switch (e) {
      case Emotion::happy: return 0;
      case Emotion::sad: return 4;
      case Emotion::angry: return 8;
      case Emotion::love: return 12;
    }
    return 0;
  }();
  std::vector<std::string> family;
  for (std::size_t i = first; i < first + 4; ++i) family.emplace_back(kDefaultEntries[i].first);
  return family;
}

namespace {

constexpr std::array<std::string_view, 10> kSubjects{
    "I", "We", "My brother", "The team", "My neighbor", "Our class", "My friend", "Everyone",
    "Mom", "The new guy"};
constexpr std::array<std::string_view, 16> kActivities{
    "went to the store",   "watched the game",     "finished the report", "took the bus",
    "cooked dinner",       "walked the dog",       "read the news",       "fixed the bike",
    "called the office",   "moved the desk",       "painted the fence",   "checked the mail",
    "drove across town",   "opened the window",    "cleaned the garage",  "waited in line"};
constexpr std::array<std::string_view, 8> kTimes{
    "today", "this morning", "last night", "after work", "on Monday", "at noon", "again", ""};
constexpr std::array<std::string_view, 6> kMentions{"@alex", "@sam_k", "@newsdesk", "@jo", "@team", "@maria"};
constexpr std::array<std::string_view, 6> kHashtags{"#daily", "#life", "#monday", "#update", "#now", "#weekend"};

// Keyword phrases for the text-signal variant, indexed by class.
constexpr std::array<std::array<std::string_view, 6>, kNumEmotions> kKeywords{{
    {"feeling so sad", "i miss them so much", "such a lonely night", "tears all day",
     "heartbroken and tired", "nothing feels right"},
    {"so happy right now", "what a great day", "awesome news", "feeling fantastic",
     "best day ever", "really glad"},
    {"love you all", "my sweetheart", "adore this family", "so in love",
     "you mean the world to me", "hugs and kisses"},
    {"so angry", "absolutely furious", "i hate this", "sick of this nonsense",
     "this makes me mad", "totally outraged"},
}};

template <typename Container>
std::string_view pick(Rng& rng, const Container& pool) {
  return pool[rng.index(pool.size())];
}

}  // namespace

std::vector<Tweet> generate_synthetic(std::size_t n, std::uint64_t seed, bool emoticon_informative) {
  if (n < 4) throw std::invalid_argument("generate_synthetic requires n >= 4");
  Rng rng(seed);

  std::vector<Emotion> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(emotion_from_index(static_cast<int>(i % 4)));
  rng.shuffle(std::span(labels));

  std::vector<Tweet> tweets;
  tweets.reserve(n);
  for (Emotion label : labels) {
    std::string text;
    if (rng.uniform01() < 0.2) {
      text += pick(rng, kMentions);
      text += ' ';
    }
    text += pick(rng, kSubjects);
    text += ' ';
    text += pick(rng, kActivities);
    if (auto when = pick(rng, kTimes); !when.empty()) {
      text += ' ';
      text += when;
    }
    if (!emoticon_informative) {
      text += ", ";
      text += pick(rng, kKeywords[static_cast<std::size_t>(class_index(label))]);
    }
    if (rng.uniform01() < 0.3) text += rng.uniform01() < 0.5 ? "!" : ".";
    if (rng.uniform01() < 0.2) {
      text += ' ';
      text += pick(rng, kHashtags);
    }
    if (emoticon_informative) {
      const auto family = emoticon_family(label);
      const int count = rng.uniform01() < 0.25 ? 2 : 1;
      for (int k = 0; k < count; ++k) {
        text += ' ';
        text += family[rng.index(family.size())];
      }
    }
    tweets.push_back(Tweet{std::move(text), label});
  }
  return tweets;
}

}  // namespace emocnn
