#include "secord/scoring.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace secord {
namespace {

using testing::make_table;

std::vector<double> sim(const SimilarityScorer& s, const std::string& a,
                        std::vector<std::string> cands) {
  return s.similarity(a, cands);
}

TEST(AvgEmbeddingCosineTest, SelfSimilarityIsMax) {
  testing::SentimentToy toy;
  for (const char* t : {"good movie", "the film is great", "awful"})
    EXPECT_EQ(sim(*toy.scorer, t, {t}), std::vector<double>{1.0}) << t;
}

TEST(AvgEmbeddingCosineTest, Orthogonal) {
  AvgEmbeddingCosine s(make_table({{"a", {1, 0}}, {"b", {0, 1}}}));
  EXPECT_EQ(sim(s, "a", {"b"}), std::vector<double>{0.0});
}

TEST(AvgEmbeddingCosineTest, HandComputedMeans) {
  const double r = 1 / std::sqrt(2.0);
  AvgEmbeddingCosine s(make_table({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {r, r}}}));
  // Means (0.5, 0.5) and ((1 + r) / 2, r / 2): cos 22.5 degrees.
  EXPECT_NEAR(sim(s, "a b", {"a c"})[0], 0.9238795325112866, 1e-12);
}

TEST(AvgEmbeddingCosineTest, OovHandling) {
  AvgEmbeddingCosine s(make_table({{"a", {1, 0}}, {"b", {0, 1}}}));
  // OOV words leave the mean alone.
  EXPECT_DOUBLE_EQ(sim(s, "a", {"a zzz qqq"})[0], 1.0);
  // No in-vocabulary candidate word: sentinel 0.
  EXPECT_EQ(sim(s, "a", {"zzz"})[0], 0.0);
  EXPECT_THROW(sim(s, "zzz", {"a"}), InvalidInput);
}

TEST(AvgEmbeddingCosineTest, BatchIsLengthPreserving) {
  testing::SentimentToy toy;
  auto out = sim(*toy.scorer, "good movie", {"good film", "bad movie", "great movie"});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[1], sim(*toy.scorer, "good movie", {"bad movie"})[0]);
}

TEST(GreedyMatchF1Test, HandComputedMatrix) {
  GreedyMatchF1 s(make_table({{"w", {1, 0, 0}}, {"x", {0.8, 0.6, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}}}));
  // Candidate maxima: x->w 0.8, y->y 1 => P 0.9. Reference maxima: w 0.8,
  // y 1, z 0 => R 0.6. F1 = 2 * 0.54 / 1.5.
  EXPECT_NEAR(sim(s, "w y z", {"x y"})[0], 0.72, 1e-12);
}

TEST(GreedyMatchF1Test, IdenticalAndOrthogonal) {
  GreedyMatchF1 s(make_table({{"a", {1, 0}}, {"b", {0, 1}}}));
  EXPECT_EQ(sim(s, "a b b", {"b a b"})[0], 1.0);
  EXPECT_EQ(sim(s, "a a", {"b"})[0], 0.0);
  EXPECT_EQ(sim(s, "qq a", {"qq a"})[0], 1.0);  // OOV matches itself
}

// Symmetry, self-similarity and determinism on random texts.
TEST(SimilarityProperty, SymmetricDeterministicMaxOnSelf) {
  std::mt19937 rng(11);
  std::normal_distribution<double> normal;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  for (int w = 0; w < 12; ++w) rows.push_back({"w" + std::to_string(w), {normal(rng), normal(rng), normal(rng)}});
  auto table = make_table(rows);
  AvgEmbeddingCosine avg(table);
  GreedyMatchF1 f1(table);
  auto random_text = [&] {
    std::string t;
    for (std::size_t n = 1 + rng() % 5; n > 0; --n) t += "w" + std::to_string(rng() % 12) + " ";
    return t;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const std::string a = random_text(), b = random_text();
    for (const SimilarityScorer* s : {static_cast<const SimilarityScorer*>(&avg),
                                      static_cast<const SimilarityScorer*>(&f1)}) {
      const double ab = sim(*s, a, {b})[0];
      EXPECT_NEAR(ab, sim(*s, b, {a})[0], 1e-9);
      EXPECT_EQ(ab, sim(*s, a, {b})[0]);
      EXPECT_EQ(sim(*s, a, {a})[0], s->range().max);
      EXPECT_GE(ab, s->range().min);
      EXPECT_LE(ab, s->range().max);
    }
  }
}

TEST(EmbeddingTableTest, LoadsAndValidates) {
  std::istringstream good("a 1 0\nb 0 1\n");
  auto t = load_embeddings(good);
  EXPECT_EQ(t.dim(), 2u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_NE(t.find("A"), nullptr);
  std::istringstream ragged("a 1 0\nb 0 1 2\n");
  EXPECT_THROW(load_embeddings(ragged), ParseError);
  std::istringstream nan("a 1 nan\n");
  EXPECT_THROW(load_embeddings(nan), ParseError);
  std::istringstream junk("a 1 x\n");
  EXPECT_THROW(load_embeddings(junk), ParseError);
}

// Fixture corpus "a b . a b . a c": c(a) = 3, c(a, b) = 2, |V| = 5.
NgramModel fixture_model() {
  std::vector<std::vector<std::string>> corpus{{"a", "b", ".", "a", "b", ".", "a", "c"}};
  return NgramModel(corpus, 2, 1.0);
}

double logprob(const NgramModel& m, const std::vector<std::string>& words, std::size_t i) {
  const LogProbQuery q{words, i};
  return m.word_logprob(std::span(&q, 1))[0];
}

TEST(NgramModelTest, HandCounts) {
  auto m = fixture_model();
  EXPECT_EQ(m.vocabulary_size(), 5u);
  EXPECT_NEAR(logprob(m, {"a", "b"}, 1), std::log(0.375), 1e-12);
  EXPECT_NEAR(logprob(m, {"a", "a"}, 1), std::log(0.125), 1e-12);
}

TEST(NgramModelTest, UnseenContextIsUniform) {
  auto m = fixture_model();
  EXPECT_NEAR(logprob(m, {"c", "a"}, 1), std::log(1.0 / 5), 1e-12);
  EXPECT_NEAR(logprob(m, {"zebra", "b"}, 1), std::log(1.0 / 5), 1e-12);
}

TEST(NgramModelTest, CaseInsensitiveAndUnknownWords) {
  auto m = fixture_model();
  EXPECT_EQ(logprob(m, {"A", "B"}, 1), logprob(m, {"a", "b"}, 1));
  EXPECT_EQ(logprob(m, {"a", "zebra"}, 1), logprob(m, {"a", "<unk>"}, 1));
  EXPECT_THROW(logprob(m, {"a"}, 3), IndexOutOfRange);
}

TEST(NgramModelTest, NormalizedOverVocabulary) {
  std::vector<std::vector<std::string>> corpus{{"the", "cat", "sat", "on", "the", "mat"},
                                               {"a", "cat", "sat"}};
  for (std::size_t order : {1u, 2u, 3u}) {
    NgramModel m(corpus, order, 0.5);
    const auto vocab = m.vocabulary();
    std::vector<std::vector<std::string>> contexts{{}, {"the"}, {"cat"}, {"the", "cat"}, {"x", "y"}};
    for (const auto& ctx : contexts) {
      double total = 0;
      for (const auto& v : vocab) total += m.probability(ctx, v);
      EXPECT_NEAR(total, 1.0, 1e-9) << "order " << order;
    }
  }
}

TEST(NgramModelTest, RejectsBadParameters) {
  std::vector<std::vector<std::string>> corpus{{"a"}};
  EXPECT_THROW(NgramModel(corpus, 0, 1.0), InvalidInput);
  EXPECT_THROW(NgramModel(corpus, 2, 0.0), InvalidInput);
}

std::vector<Classification> classify(const VictimClassifier& v, std::vector<std::string> texts) {
  return v.classify(texts);
}

TEST(LexiconClassifierTest, SignRule) {
  LexiconClassifier v({{"good", 1.0}});
  EXPECT_EQ(classify(v, {"good"})[0].label, 1);
}

TEST(LexiconClassifierTest, TieGoesToLowestIndex) {
  LexiconClassifier v({{"good", 1.0}});
  auto c = classify(v, {"nothing known here"})[0];
  EXPECT_EQ(c.probs, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c.label, 0);
}

TEST(LexiconClassifierTest, HandSum) {
  LexiconClassifier v({{"good", 1.0}, {"bad", -2.0}});
  auto c = classify(v, {"good bad movie"})[0];
  EXPECT_EQ(c.label, 0);
  EXPECT_NEAR(c.probs[1], 1 / (1 + std::exp(1.0)), 1e-15);
}

TEST(LexiconClassifierTest, ProbabilitiesAreDistributions) {
  LexiconClassifier v({{"a", 3.7}, {"b", -1.2}, {"c", 0.01}});
  for (const auto& c : classify(v, {"a", "b b b", "a b c", "c", "", "a a a a a a a a a a"})) {
    EXPECT_NEAR(c.probs[0] + c.probs[1], 1.0, 1e-6);
    EXPECT_GE(c.probs[0], 0);
    EXPECT_EQ(c.label, argmax_label(c.probs));
  }
}

TEST(LexiconClassifierTest, LoadWeights) {
  std::istringstream in("# w\ngood 2\nBad -1.5 # neg\n");
  auto w = load_weights(in);
  EXPECT_EQ(w.at("bad"), -1.5);
  std::istringstream bad("good\n");
  EXPECT_THROW(load_weights(bad), ParseError);
}

TEST(CountingWrappersTest, CountItems) {
  testing::SentimentToy toy;
  CountingSimilarity s(toy.scorer);
  sim(s, "good movie", {"a", "b", "c"});
  sim(s, "good movie", {"a"});
  EXPECT_EQ(s.count(), 4u);
  CountingClassifier c(toy.victim);
  classify(c, {"x", "y"});
  EXPECT_EQ(c.count(), 2u);
}

}  // namespace
}  // namespace secord
