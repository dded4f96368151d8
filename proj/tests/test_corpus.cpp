#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <set>

#include "emocnn/corpus.hpp"
#include "oracles.hpp"

using namespace emocnn;

namespace {

// Table 2 as printed, except the first row which is stored under U+1F600.
const std::vector<std::pair<std::string, std::string>> kTable2{
    {"\U0001F600", "grinning face"},
    {"\U0001F604", "grinning face with smiling eyes"},
    {"\U0001F601", "beaming face with smiling eyes"},
    {"\U0001F60A", "smiling face"},
    {"\U0001F62D", "loudly crying face"},
    {"\U0001F61E", "crying face"},
    {"\U0001F613", "pleading face"},
    {"\U0001F620", "frowning face"},
    {"\U0001F621", "angry face"},
    {"\U0001F62C", "pouting face"},
    {"\U0001F60F", "face with steam from nose"},
    {"\U0001F5E8\uFE0F", "face with symbols on the mouth"},
    {"\U0001F60D", "smiling face with heart eyes"},
    {"\U0001F618", "smiling face with hearts"},
    {"\U0001F617", "face blowing a kiss"},
    {"\U0001F61A", "kissing face with closed eyes"},
};

const std::vector<std::string> kPieces{
    "Hello", "WORLD", "can't", "@user", "#tag", "http://x.co/a?b=1", "https://t.co/Z", "!!", ",", ".",
    "\"q\"", "'", "’", "123", "a-b", "\U0001F60A", "\U0001F62D", "\U0001F5E8\uFE0F", "\U0001F5E8",
    "\U0001F44D\U0001F3FD", "\U0001F468\u200D\U0001F469\u200D\U0001F467", "été", "ß",
    "İ", "  ", "\t", "\n", "x@y", "(@bob)", "it's", "é", "\U0001F621\U0001F621", " ", ";-)"};

std::string random_text(std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> pick(0, kPieces.size() - 1), count(0, 10), sep(0, 2);
  std::string s;
  const std::size_t n = count(gen);
  for (std::size_t i = 0; i < n; ++i) {
    s += kPieces[pick(gen)];
    if (sep(gen) == 0) s += ' ';
  }
  return s;
}

bool in_clean_alphabet(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ' || c == '\'';
  });
}

}  // namespace

TEST(Emotion, CanonicalCodes) {
  EXPECT_EQ(emotion_from_code(1), Emotion::sad);
  EXPECT_EQ(emotion_from_code(2), Emotion::happy);
  EXPECT_EQ(emotion_from_code(3), Emotion::love);
  EXPECT_EQ(emotion_from_code(4), Emotion::angry);
  EXPECT_THROW(emotion_from_code(0), std::invalid_argument);
  EXPECT_THROW(emotion_from_code(5), std::invalid_argument);
  EXPECT_EQ(class_index(Emotion::angry), 3);
  EXPECT_EQ(emotion_name(Emotion::love), "Love");
}

TEST(Dataset, ParsesQuotedEmojiRow) {
  const auto rows = parse_dataset("text,label\n\"Good morning \U0001F60A\",2\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (Tweet{"Good morning \U0001F60A", Emotion::happy}));
}

TEST(Dataset, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_dataset("text,label\n").empty());
  EXPECT_TRUE(parse_dataset("text,label").empty());
}

TEST(Dataset, LabelOutOfRangeReportsRow) {
  try {
    parse_dataset("text,label\nhello,7\n");
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("label out of range at row 2"), std::string::npos) << e.what();
  }
}

TEST(Dataset, MalformedRowReportsRow) {
  try {
    parse_dataset("text,label\nok,1\na,b,c\n");
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("malformed row 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_dataset("text,label\nhello,two\n"), DatasetError);
  EXPECT_THROW(parse_dataset("words,label\nhello,1\n"), DatasetError);
}

TEST(Dataset, QuotingAndLineEndings) {
  const auto rows = parse_dataset("text,label\r\n\"a, \"\"b\"\"\nc\",4\r\nplain,1\r\n\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].text, "a, \"b\"\nc");
  EXPECT_EQ(rows[0].label, Emotion::angry);
  EXPECT_EQ(rows[1].text, "plain");
}

TEST(Dataset, MissingFileIsAnError) {
  EXPECT_THROW(load_dataset("/nonexistent/emocnn/data.csv"), std::exception);
}

TEST(Dataset, SaveLoadRoundTrips) {
  oracle::TempDir dir("corpus");
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> label(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tweet> tweets;
    for (int i = 0; i < 20; ++i) tweets.push_back(Tweet{random_text(gen), emotion_from_code(label(gen))});
    save_dataset(dir / "d.csv", tweets);
    EXPECT_EQ(load_dataset(dir / "d.csv"), tweets);
  }
}

TEST(Clean, Examples) {
  EXPECT_EQ(clean("@Bob Check #this!! \U0001F60A"), "check this \U0001F60A");
  EXPECT_EQ(clean(""), "");
  EXPECT_EQ(clean("HELLO"), "hello");
  EXPECT_EQ(clean("  I can't   handle\tthis "), "i can't handle this");
  EXPECT_EQ(clean("see https://t.co/x now"), "see now");
  EXPECT_EQ(clean("'quoted' it’s"), "quoted it's");
}

TEST(Clean, Idempotent) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto raw = random_text(gen);
    const auto once = clean(raw);
    EXPECT_EQ(clean(once), once) << raw;
  }
}

TEST(Replace, Examples) {
  const auto lex = EmoticonLexicon::default_lexicon();
  EXPECT_EQ(replace_emoticons("good morning \U0001F60A", lex), "good morning smiling face");
  EXPECT_EQ(replace_emoticons("i can't handle this \U0001F62D", lex), "i can't handle this loudly crying face");
  EXPECT_EQ(replace_emoticons("plain words", lex), "plain words");
  EXPECT_EQ(replace_emoticons("\U0001F62D\U0001F62D", lex), "loudly crying face loudly crying face");
  EXPECT_EQ(replace_emoticons("bye \U0001F92A", lex), "bye");
}

TEST(Replace, EveryTableEntryMapsToItsPhrase) {
  const auto lex = EmoticonLexicon::default_lexicon();
  ASSERT_EQ(lex.size(), kTable2.size());
  for (const auto& [emoji, phrase] : kTable2) EXPECT_EQ(replace_emoticons(emoji, lex), phrase) << phrase;
}

TEST(Replace, VariationSelectorsAndModifiers) {
  const auto lex = EmoticonLexicon::default_lexicon();
  EXPECT_EQ(replace_emoticons("\U0001F5E8", lex), "face with symbols on the mouth");
  EXPECT_EQ(replace_emoticons("\U0001F60A\uFE0F", lex), "smiling face");
  EXPECT_EQ(replace_emoticons("\U0001F44D\U0001F3FD ok", lex), "ok");
}

TEST(Replace, OutputStaysInCleanAlphabet) {
  const auto lex = EmoticonLexicon::default_lexicon();
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto text = clean(random_text(gen));
    const auto out = replace_emoticons(text, lex);
    EXPECT_TRUE(in_clean_alphabet(out)) << out;
    EXPECT_EQ(out.find("  "), std::string::npos);
    if (!out.empty()) {
      EXPECT_NE(out.front(), ' ');
      EXPECT_NE(out.back(), ' ');
    }
  }
}

TEST(Strip, Examples) {
  const auto lex = EmoticonLexicon::default_lexicon();
  EXPECT_EQ(strip_emoticons("good morning \U0001F60A", lex), "good morning");
  EXPECT_EQ(strip_emoticons("\U0001F62D sad day \U0001F62D", lex), "sad day");
  EXPECT_EQ(strip_emoticons("no emoji here", lex), "no emoji here");
}

TEST(Strip, EqualsReplaceWithEmptyLexicon) {
  const auto lex = EmoticonLexicon::default_lexicon();
  const EmoticonLexicon empty;
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto text = clean(random_text(gen));
    EXPECT_EQ(strip_emoticons(text, lex), replace_emoticons(text, empty)) << text;
  }
}

TEST(Normalize, Modes) {
  const auto lex = EmoticonLexicon::default_lexicon();
  EXPECT_EQ(normalize("Good morning \U0001F60A!", lex, InputMode::emoticon_text), "good morning smiling face");
  EXPECT_EQ(normalize("Good morning \U0001F60A!", lex, InputMode::text_only), "good morning");
  EXPECT_EQ(parse_mode("emoticon"), InputMode::emoticon_text);
  EXPECT_EQ(parse_mode("text-only"), InputMode::text_only);
  EXPECT_EQ(parse_mode("text_only"), InputMode::text_only);
  EXPECT_THROW(parse_mode("both"), std::invalid_argument);
}

TEST(Lexicon, ParsesTabSeparatedEntries) {
  const auto lex = EmoticonLexicon::parse("\U0001F600\tBig Grin\n\n\U0001F622\tcrying\n\U0001F600\tignored\n");
  ASSERT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.entries()[0].second, "big grin");
  EXPECT_EQ(replace_emoticons("\U0001F600", lex), "big grin");
}

TEST(Lexicon, RejectsBadLines) {
  EXPECT_THROW(EmoticonLexicon::parse("\U0001F600 no tab\n"), std::exception);
  EXPECT_THROW(EmoticonLexicon::parse("\U0001F600\U0001F600\ttwo clusters\n"), std::exception);
}

TEST(Lexicon, FirstOccurrenceWins) {
  EmoticonLexicon lex;
  EXPECT_TRUE(lex.add("\U0001F600", "first"));
  EXPECT_FALSE(lex.add("\U0001F600", "second"));
  EXPECT_EQ(lex.match("\U0001F600"), std::optional<std::string_view>("first"));
}

TEST(Lexicon, DefaultFamiliesCoverAllSixteen) {
  std::set<std::string> all;
  for (int c = 1; c <= 4; ++c) {
    const auto family = emoticon_family(emotion_from_code(c));
    EXPECT_EQ(family.size(), 4u);
    all.insert(family.begin(), family.end());
  }
  EXPECT_EQ(all.size(), 16u);
}

TEST(Synthetic, FourTweetsOnePerCategory) {
  const auto tweets = generate_synthetic(4, 0, true);
  ASSERT_EQ(tweets.size(), 4u);
  std::set<Emotion> labels;
  for (const auto& t : tweets) {
    labels.insert(t.label);
    const auto family = emoticon_family(t.label);
    EXPECT_TRUE(std::any_of(family.begin(), family.end(), [&](const std::string& e) {
      return t.text.size() >= e.size() && t.text.compare(t.text.size() - e.size(), e.size(), e) == 0;
    })) << t.text;
  }
  EXPECT_EQ(labels.size(), 4u);
}

TEST(Synthetic, Deterministic) {
  EXPECT_EQ(generate_synthetic(100, 7, true), generate_synthetic(100, 7, true));
  EXPECT_NE(generate_synthetic(100, 7, true), generate_synthetic(100, 8, true));
}

TEST(Synthetic, RejectsFewerThanFour) { EXPECT_THROW(generate_synthetic(3, 0, true), std::invalid_argument); }

TEST(Synthetic, BalancedCategories) {
  std::array<int, 4> counts{};
  for (const auto& t : generate_synthetic(2001, 3, true)) ++counts[static_cast<std::size_t>(class_index(t.label))];
  EXPECT_EQ(counts, (std::array<int, 4>{501, 500, 500, 500}));
}

TEST(Synthetic, LabelRecoverableOnlyFromEmoticon) {
  const auto lex = EmoticonLexicon::default_lexicon();
  for (const auto& t : generate_synthetic(400, 5, true)) {
    const auto stripped = normalize(t.text, lex, InputMode::text_only);
    const auto full = normalize(t.text, lex, InputMode::emoticon_text);
    EXPECT_NE(stripped, full);
    EXPECT_EQ(full.substr(0, stripped.size()), stripped);
  }
}

TEST(Synthetic, TextSignalVariantHasNoEmoticons) {
  const auto lex = EmoticonLexicon::default_lexicon();
  for (const auto& t : generate_synthetic(200, 5, false)) {
    EXPECT_EQ(normalize(t.text, lex, InputMode::text_only), normalize(t.text, lex, InputMode::emoticon_text));
  }
}
