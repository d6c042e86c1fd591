#include "secord/lexicon.hpp"

#include <sstream>

#include <gtest/gtest.h>

namespace secord {
namespace {

SubstitutionLexicon parse(const std::string& tsv) {
  std::istringstream in(tsv);
  return load_lexicon(in);
}

TEST(LexiconTest, LoadsRelations) {
  auto lex = parse("good\tsyn\tgoodness\ngood\tant\tbad\n");
  EXPECT_EQ(lex.synonyms("good"), std::vector<std::string>{"goodness"});
  EXPECT_EQ(lex.antonyms("good"), std::vector<std::string>{"bad"});
}

TEST(LexiconTest, DropsSelfMapsAndDuplicates) {
  auto lex = parse("good\tsyn\tgood\ngood\tsyn\tGood\ngood\tsyn\tfine\ngood\tsyn\tfine\n");
  EXPECT_EQ(lex.synonyms("good"), std::vector<std::string>{"fine"});
}

TEST(LexiconTest, CaseFoldedLookup) {
  auto lex = parse("Good\tsyn\tGreat\n");
  EXPECT_EQ(lex.synonyms("GOOD"), lex.synonyms("good"));
  EXPECT_EQ(lex.synonyms("good"), std::vector<std::string>{"great"});
  EXPECT_TRUE(lex.antonyms("zxqv").empty());
}

TEST(LexiconTest, SortedValues) {
  auto lex = parse("big\tsyn\tlarge\nbig\tsyn\tgreat\nbig\tsyn\tbulky\n");
  EXPECT_EQ(lex.synonyms("big"), (std::vector<std::string>{"bulky", "great", "large"}));
}

TEST(LexiconTest, FixtureCounts) {
  // 5 lines; one self-map and one duplicate are filtered, leaving 3.
  auto lex = parse("good\tsyn\tfine\ngood\tsyn\tgood\ngood\tant\tbad\nhot\tant\tcold\ngood\tsyn\tfine\n");
  EXPECT_EQ(lex.pair_count(), 3u);
  EXPECT_EQ(lex.synonym_keys(), 1u);
  EXPECT_EQ(lex.antonym_keys(), 2u);
}

TEST(LexiconTest, MalformedLinesReportLineNumber) {
  try {
    parse("good\tsyn\tfine\nbroken line\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("good\thyp\tfine\n"), ParseError);
  EXPECT_THROW(parse("good\tsyn\tfine\textra\n"), ParseError);
  EXPECT_THROW(parse("good\tsyn\tvery fine\n"), ParseError);
  EXPECT_THROW(parse("good\tsyn\t\n"), ParseError);
}

TEST(LexiconTest, BlankLinesSkipped) {
  auto lex = parse("\ngood\tsyn\tfine\r\n\n");
  EXPECT_EQ(lex.pair_count(), 1u);
}

TEST(LexiconTest, DeterministicLoad) {
  const std::string tsv = "b\tsyn\tz\na\tsyn\ty\nb\tsyn\tx\na\tant\tq\n";
  EXPECT_EQ(parse(tsv), parse(tsv));
}

TEST(LexiconTest, ShippedLexiconHasNoSelfMaps) {
  auto lex = load_lexicon(std::string(SECORD_TEST_DATA) + "/lexicon.tsv");
  for (const char* w : {"good", "awake", "happy", "big"}) {
    for (const auto& s : lex.synonyms(w)) EXPECT_NE(s, w);
    for (const auto& a : lex.antonyms(w)) EXPECT_NE(a, w);
  }
}

TEST(StopwordsTest, LoadWithComments) {
  std::istringstream in("# list\nthe\nA # article\n\nof\n");
  auto s = load_stopwords(in);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.contains("a"));
  EXPECT_TRUE(s.contains("The"));
  EXPECT_FALSE(s.contains("movie"));
}

TEST(StopwordsTest, EmptyListRejected) {
  std::istringstream in("# nothing\n\n");
  EXPECT_THROW(load_stopwords(in), ParseError);
}

TEST(StopwordsTest, DefaultListMatchesShippedFile) {
  const auto& def = default_stopwords();
  EXPECT_EQ(def.size(), 179u);
  auto shipped = load_stopwords(std::string(SECORD_TEST_DATA) + "/../../data/stopwords.txt");
  EXPECT_EQ(shipped.size(), def.size());
  EXPECT_TRUE(def.contains("the"));
  EXPECT_TRUE(shipped.contains("wouldn't"));
}

}  // namespace
}  // namespace secord
