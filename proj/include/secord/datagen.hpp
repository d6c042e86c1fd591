#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "secord/error.hpp"
#include "secord/lexicon.hpp"
#include "secord/rng.hpp"
#include "secord/text.hpp"
#include "secord/transform.hpp"

namespace secord {

inline const std::vector<double>& default_fractions() {
  static const std::vector<double> f{0.1, 0.2, 0.3, 0.4, 0.5};
  return f;
}

struct ParaphrasePair {
  std::string original;
  std::string perturbed;
  int label;  // 1 for synonym perturbations, 0 for antonym
  double fraction;
  Relation relation;
  std::size_t substitutions;  // achieved, may fall short of the target
  std::size_t target;
};

struct DatagenSkip {
  std::size_t hypothesis_index;
  double fraction;
  Relation relation;
  std::string reason;
};

struct DatagenOutput {
  std::vector<ParaphrasePair> pairs;
  std::vector<DatagenSkip> skips;
};

// max(1, round(fraction * words)), rounding halves away from zero.
inline std::size_t substitution_target(double fraction, std::size_t words) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(words))));
}

// For each hypothesis, fraction and relation (syn then ant), substitutes a
// seeded random choice of min(target, available) non-stopword,
// lexicon-covered words. Hypothesis h draws from RNG stream h, so output does
// not depend on how work is split.
inline DatagenOutput generate_adversarial_paraphrases(const SubstitutionLexicon& lex,
                                                      const StopwordList& stopwords,
                                                      std::span<const std::string> hypotheses,
                                                      std::span<const double> fractions,
                                                      std::uint64_t seed) {
  if (hypotheses.empty()) throw InvalidInput("no hypotheses given");
  if (fractions.empty()) throw InvalidInput("no substitution fractions given");
  for (double f : fractions)
    if (!(f > 0 && f <= 1)) throw InvalidInput("fractions must lie in (0, 1]");

  DatagenOutput out;
  for (std::size_t h = 0; h < hypotheses.size(); ++h) {
    Rng rng = make_rng(seed, h);
    const auto words = split_words(hypotheses[h]);
    const std::size_t word_count = static_cast<std::size_t>(std::count_if(
        words.begin(), words.end(), [](const auto& w) { return !is_punctuation_token(w); }));
    for (double f : fractions) {
      for (Relation rel : {Relation::kSynonym, Relation::kAntonym}) {
        if (word_count == 0) {
          out.skips.push_back({h, f, rel, "empty hypothesis"});
          continue;
        }
        std::vector<std::size_t> available;
        for (std::size_t i = 0; i < words.size(); ++i)
          if (!is_punctuation_token(words[i]) && !stopwords.contains(words[i]) &&
              !lex.entries(rel, words[i]).empty())
            available.push_back(i);
        if (available.empty()) {
          out.skips.push_back({h, f, rel, "no substitutable words"});
          continue;
        }
        const std::size_t target = substitution_target(f, word_count);
        auto picks = sample_without_replacement(rng, available.size(), target);
        std::sort(picks.begin(), picks.end());
        std::vector<std::string> perturbed = words;
        for (std::size_t p : picks) {
          const std::size_t i = available[p];
          const auto& entries = lex.entries(rel, words[i]);
          perturbed[i] = transfer_case(words[i], entries[uniform_index(rng, entries.size())]);
        }
        out.pairs.push_back({detokenize(words), detokenize(perturbed),
                             rel == Relation::kSynonym ? 1 : 0, f, rel, picks.size(), target});
      }
    }
  }
  return out;
}

}  // namespace secord
