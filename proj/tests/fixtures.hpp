#pragma once

// Small in-memory models shared by the unit and acceptance tests.

#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "secord/secord.hpp"

namespace secord::testing {

inline std::shared_ptr<EmbeddingTable> make_table(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  auto t = std::make_shared<EmbeddingTable>(rows.at(0).second.size());
  for (const auto& [w, v] : rows) t->add(w, v);
  return t;
}

inline SubstitutionLexicon lexicon_from(const std::string& tsv) {
  std::istringstream in(tsv);
  return load_lexicon(in);
}

inline std::shared_ptr<const StopwordList> stopwords_of(std::initializer_list<const char*> words) {
  std::set<std::string> s;
  for (const char* w : words) s.insert(w);
  return std::make_shared<StopwordList>(std::move(s));
}

// The sentiment toy: "good"/"great"/"fine" positive, "bad"/"awful" negative.
struct SentimentToy {
  std::shared_ptr<const EmbeddingTable> table = make_table({
      {"good", {1.0, 0.1, 0.0}},
      {"great", {0.95, 0.2, 0.05}},
      {"fine", {0.8, 0.3, 0.1}},
      {"bad", {0.7, -0.4, 0.2}},
      {"awful", {0.5, -0.6, 0.3}},
      {"movie", {0.0, 0.2, 1.0}},
      {"film", {0.05, 0.25, 0.95}},
      {"the", {0.1, 0.1, 0.1}},
  });
  SubstitutionLexicon lexicon = lexicon_from(
      "good\tsyn\tgreat\ngood\tsyn\tfine\ngood\tant\tbad\n"
      "great\tsyn\tgood\ngreat\tant\tawful\n"
      "movie\tsyn\tfilm\nfilm\tsyn\tmovie\n"
      "bad\tant\tgood\nbad\tsyn\tawful\n");
  std::shared_ptr<const VictimClassifier> victim = std::make_shared<LexiconClassifier>(
      std::map<std::string, double>{{"good", 2.0}, {"great", 1.5}, {"fine", -0.5},
                                    {"bad", -2.0}, {"awful", -3.0}});
  std::shared_ptr<const SimilarityScorer> scorer = std::make_shared<AvgEmbeddingCosine>(table);
};

}  // namespace secord::testing
