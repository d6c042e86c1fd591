#include "secord/text.hpp"

#include <random>

#include <gtest/gtest.h>

namespace secord {
namespace {

using Words = std::vector<std::string>;

TEST(TokenizeTest, SplitsOnWhitespace) {
  auto t = tokenize("good movie");
  EXPECT_EQ(t.current_words(), (Words{"good", "movie"}));
  EXPECT_EQ(t.protected_prefix(), 0u);
  EXPECT_TRUE(t.modified_indices().empty());
}

TEST(TokenizeTest, ProtectedPrefix) {
  auto t = tokenize("A man sleeps . He is awake .", 4);
  EXPECT_EQ(t.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(t.is_protected(i), i < 4) << i;
}

TEST(TokenizeTest, SplitsTrailingPunctuationOnly) {
  EXPECT_EQ(tokenize("Don't stop!").current_words(), (Words{"Don't", "stop", "!"}));
  EXPECT_EQ(tokenize("wait...").current_words(), (Words{"wait", ".", ".", "."}));
  EXPECT_EQ(tokenize("(aside) ok").current_words(), (Words{"(aside", ")", "ok"}));
}

TEST(TokenizeTest, RejectsBlankText) {
  EXPECT_THROW(tokenize(""), InvalidInput);
  EXPECT_THROW(tokenize(" \t\n "), InvalidInput);
}

TEST(TokenizeTest, PairProtectsPremise) {
  auto t = tokenize_pair("A man sleeps.", "He is awake.");
  EXPECT_EQ(t.protected_prefix(), 4u);
  EXPECT_EQ(t.scoring_text(), "He is awake.");
  EXPECT_EQ(t.victim_text(), "A man sleeps. [SEP] He is awake.");
}

TEST(DetokenizeTest, AttachesPunctuation) {
  EXPECT_EQ(tokenize("A man sleeps . He is awake .").text(), "A man sleeps. He is awake.");
  EXPECT_EQ(tokenize("Don't stop!").text(), "Don't stop!");
}

TEST(SubstitutionTest, AppliesAndTracksModification) {
  auto t = tokenize("good movie");
  auto u = apply_substitution(t, 0, "great");
  EXPECT_EQ(u.current_words(), (Words{"great", "movie"}));
  EXPECT_EQ(u.modified_indices(), std::vector<std::size_t>{0});
  // Input value unchanged.
  EXPECT_EQ(t.current_words(), (Words{"good", "movie"}));
}

TEST(SubstitutionTest, RestorationClearsModification) {
  auto u = apply_substitution(tokenize("good movie"), 0, "great");
  auto r = apply_substitution(u, 0, "good");
  EXPECT_TRUE(r.modified_indices().empty());
  EXPECT_EQ(word_diff_count(r), 0u);
  EXPECT_EQ(r.history(), std::set<std::size_t>{0});
}

TEST(SubstitutionTest, Errors) {
  auto pair = tokenize_pair("A man sleeps.", "He is awake.");
  EXPECT_THROW(apply_substitution(pair, 1, "woman"), ProtectedIndex);
  EXPECT_THROW(apply_substitution(pair, 99, "x"), IndexOutOfRange);
}

TEST(WordDiffTest, Counts) {
  auto t = tokenize("a man is awake and happy");
  EXPECT_EQ(word_diff_count(t), 0u);
  // Two antonym swaps.
  auto two = apply_substitution(apply_substitution(t, 3, "asleep"), 5, "sad");
  EXPECT_EQ(word_diff_count(two), 2u);
  // Three distinct substitutions, then one restored.
  auto three = apply_substitution(two, 1, "woman");
  EXPECT_EQ(word_diff_count(three), 3u);
  EXPECT_EQ(word_diff_count(apply_substitution(three, 3, "awake")), 2u);
}

TEST(WordDiffTest, CaseSensitive) {
  auto t = apply_substitution(tokenize("Good movie"), 0, "good");
  EXPECT_EQ(word_diff_count(t), 1u);
}

// Random substitution walks keep the invariants.
TEST(AttackedTextProperty, InvariantsUnderRandomSubstitution) {
  std::mt19937 rng(7);
  const Words vocab{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t prefix = rng() % n;
    Words words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);
    AttackedText t(words, prefix);
    for (int step = 0; step < 10; ++step) {
      const std::size_t i = prefix + rng() % (n - prefix);
      const std::string w = vocab[rng() % vocab.size()];
      auto before = t;
      t = apply_substitution(t, i, w);
      ASSERT_EQ(t.original_words().size(), t.current_words().size());
      for (std::size_t m : t.modified_indices()) {
        ASSERT_NE(t.original_words()[m], t.current_words()[m]);
        ASSERT_FALSE(t.is_protected(m));
      }
      ASSERT_EQ(word_diff_count(t), t.modified_indices().size());
      ASSERT_EQ(word_diff_count(t) == 0, t.current_words() == t.original_words());
      // Restoring position i leaves the diff count of the other positions.
      auto restored = apply_substitution(t, i, t.original_words()[i]);
      std::size_t others = 0;
      for (std::size_t m : before.modified_indices()) others += (m != i);
      ASSERT_EQ(word_diff_count(restored), others);
    }
  }
}

TEST(AttackedTextProperty, DetokenizeRoundTripsWords) {
  const std::vector<std::string> texts{"Hello, world!", "A man sleeps. He is awake.",
                                       "  spaced   out  ", "Don't stop -- ever?!", "(x) y."};
  for (const auto& s : texts) {
    auto t = tokenize(s);
    EXPECT_EQ(tokenize(t.text()).current_words(), t.current_words()) << s;
  }
}

}  // namespace
}  // namespace secord
