#include "secord/datagen.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "secord/io.hpp"

namespace secord {
namespace {

std::size_t differing_words(const std::string& a, const std::string& b) {
  auto wa = split_words(a), wb = split_words(b);
  EXPECT_EQ(wa.size(), wb.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(wa.size(), wb.size()); ++i) n += wa[i] != wb[i];
  return n;
}

SubstitutionLexicon test_lexicon() { return load_lexicon(SECORD_TEST_DATA "/lexicon.tsv"); }

TEST(DatagenTest, SubstitutionTarget) {
  EXPECT_EQ(substitution_target(0.2, 10), 2u);
  EXPECT_EQ(substitution_target(0.1, 3), 1u);
  EXPECT_EQ(substitution_target(0.5, 5), 3u);
  EXPECT_EQ(substitution_target(0.25, 2), 1u);
  EXPECT_EQ(substitution_target(0.1, 1), 1u);
  EXPECT_EQ(substitution_target(0.5, 12), 6u);
}

TEST(DatagenTest, PairsPerHypothesisAndLabels) {
  auto lex = test_lexicon();
  std::vector<std::string> hyps{"The man is awake and happy.", "A big dog runs fast."};
  auto out = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, default_fractions(), 3);
  EXPECT_TRUE(out.skips.empty());
  ASSERT_EQ(out.pairs.size(), 2 * 5 * hyps.size());
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    const auto& p = out.pairs[i];
    EXPECT_EQ(p.label, p.relation == Relation::kSynonym ? 1 : 0);
    EXPECT_EQ(p.original, hyps[i / 10]);
    EXPECT_EQ(differing_words(p.original, p.perturbed), p.substitutions);
    EXPECT_GE(p.substitutions, 1u);
    EXPECT_LE(p.substitutions, p.target);
  }
  // fraction-major, syn before ant
  EXPECT_EQ(out.pairs[0].fraction, 0.1);
  EXPECT_EQ(out.pairs[0].relation, Relation::kSynonym);
  EXPECT_EQ(out.pairs[1].relation, Relation::kAntonym);
  EXPECT_EQ(out.pairs[2].fraction, 0.2);
}

TEST(DatagenTest, ShortfallSubstitutesEverythingAvailable) {
  auto lex = test_lexicon();
  // Six counted words; synonyms exist only for "man" and "happy".
  std::vector<std::string> hyps{"The man is awake and happy."};
  std::vector<double> half{0.5};
  auto out = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, half, 1);
  ASSERT_EQ(out.pairs.size(), 2u);
  EXPECT_EQ(out.pairs[0].target, 3u);
  EXPECT_EQ(out.pairs[0].substitutions, 2u);
  EXPECT_EQ(out.pairs[0].perturbed, "The male is awake and glad.");
  EXPECT_EQ(out.pairs[1].substitutions, 3u);
  EXPECT_EQ(out.pairs[1].perturbed, "The woman is asleep and sad.");
}

TEST(DatagenTest, KeepsCapitalization) {
  auto lex = test_lexicon();
  std::vector<std::string> hyps{"Happy dog."};
  std::vector<double> all{1.0};
  auto out = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, all, 1);
  ASSERT_EQ(out.pairs.size(), 2u);
  EXPECT_EQ(out.pairs[0].perturbed, "Glad hound.");
  EXPECT_EQ(out.pairs[1].perturbed, "Sad dog.");
}

TEST(DatagenTest, SkipLog) {
  auto lex = test_lexicon();
  std::vector<std::string> hyps{"It is what it is.", "A dog sleeps.", ""};
  auto out = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, default_fractions(), 1);
  // hypothesis 0: nothing substitutable; 1: "dog" syn, "sleeps" syn/ant; 2: empty
  EXPECT_EQ(out.pairs.size() + out.skips.size(), 2 * 5 * hyps.size());
  EXPECT_EQ(out.pairs.size(), 10u);
  for (const auto& s : out.skips) EXPECT_NE(s.hypothesis_index, 1u);
  EXPECT_EQ(out.skips.front().reason, "no substitutable words");
  EXPECT_EQ(out.skips.back().reason, "empty hypothesis");
}

TEST(DatagenTest, SeededAndIndependentOfOtherHypotheses) {
  auto lex = test_lexicon();
  std::vector<std::string> hyps{"A big dog runs fast.", "The man is awake and happy.",
                                "The big man runs slow."};
  auto a = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, default_fractions(), 8);
  auto b = generate_adversarial_paraphrases(lex, default_stopwords(), hyps, default_fractions(), 8);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) EXPECT_EQ(a.pairs[i].perturbed, b.pairs[i].perturbed);

  auto d = generate_adversarial_paraphrases(lex, default_stopwords(), std::span(hyps).first(1),
                                            default_fractions(), 8);
  for (std::size_t i = 0; i < d.pairs.size(); ++i) EXPECT_EQ(a.pairs[i].perturbed, d.pairs[i].perturbed);
}

TEST(DatagenTest, RejectsBadArguments) {
  auto lex = test_lexicon();
  std::vector<std::string> none;
  std::vector<std::string> one{"good movie"};
  std::vector<double> bad{0.0};
  std::vector<double> over{1.5};
  EXPECT_THROW(generate_adversarial_paraphrases(lex, default_stopwords(), none, default_fractions(), 1),
               InvalidInput);
  EXPECT_THROW(generate_adversarial_paraphrases(lex, default_stopwords(), one, bad, 1), InvalidInput);
  EXPECT_THROW(generate_adversarial_paraphrases(lex, default_stopwords(), one, over, 1), InvalidInput);
}

TEST(DatagenTest, RecordFormat) {
  ParaphrasePair p{"good movie", "great movie", 1, 0.3, Relation::kSynonym, 1, 1};
  EXPECT_EQ(pair_record(p).dump(),
            R"({"original":"good movie","perturbed":"great movie","label":1,"fraction":0.3,"relation":"syn"})");
}

TEST(DatagenTest, ReadsHypothesesFromEntailmentRows) {
  std::ifstream in(SECORD_TEST_DATA "/snli.jsonl");
  auto hyps = load_hypotheses(in);
  ASSERT_EQ(hyps.size(), 3u);
  EXPECT_EQ(hyps[0], "The man is awake and happy.");
  std::istringstream missing(R"({"premise": "x"})");
  EXPECT_THROW(load_hypotheses(missing), ParseError);
}

}  // namespace
}  // namespace secord
