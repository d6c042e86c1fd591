#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "secord/error.hpp"
#include "secord/scoring.hpp"

namespace secord {

// Scored items per scorer; a batch of n counts n.
struct QueryCounts {
  std::size_t similarity = 0;
  std::size_t logprob = 0;
  std::size_t victim = 0;

  std::size_t total() const { return similarity + logprob + victim; }
  friend bool operator==(const QueryCounts&, const QueryCounts&) = default;
};

class BudgetExhausted : public Error {
 public:
  BudgetExhausted() : Error("query budget exhausted") {}
};

// Routes every scorer call of one attack, counting items and refusing any
// batch that would overrun the limit. Not thread-safe; one per attack.
class QueryBudget {
 public:
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

  explicit QueryBudget(std::size_t limit = kUnlimited) : limit_(limit) {}

  std::vector<double> similarity(const SimilarityScorer& s, const std::string& original,
                                 std::span<const std::string> candidates) {
    if (candidates.empty()) return {};
    reserve(candidates.size());
    counts_.similarity += candidates.size();
    return s.similarity(original, candidates);
  }

  std::vector<double> word_logprob(const WordLogProbScorer& lm,
                                   std::span<const LogProbQuery> queries) {
    if (queries.empty()) return {};
    reserve(queries.size());
    counts_.logprob += queries.size();
    return lm.word_logprob(queries);
  }

  std::vector<Classification> classify(const VictimClassifier& v,
                                       std::span<const std::string> texts) {
    if (texts.empty()) return {};
    reserve(texts.size());
    counts_.victim += texts.size();
    return v.classify(texts);
  }

  const QueryCounts& counts() const { return counts_; }
  std::size_t limit() const { return limit_; }
  std::size_t remaining() const { return limit_ - counts_.total(); }

 private:
  void reserve(std::size_t n) const {
    if (n > remaining()) throw BudgetExhausted();
  }

  std::size_t limit_;
  QueryCounts counts_;
};

}  // namespace secord
