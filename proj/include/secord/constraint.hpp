#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secord/error.hpp"
#include "secord/lexicon.hpp"
#include "secord/query.hpp"
#include "secord/scoring.hpp"
#include "secord/text.hpp"
#include "secord/transform.hpp"

namespace secord {

// Listed in evaluation order, cheapest first.
enum class ConstraintKind { kProtected, kStopword, kRepeat, kLanguageModel, kSimilarity };

inline std::string_view constraint_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::kProtected: return "protected";
    case ConstraintKind::kStopword: return "stopword";
    case ConstraintKind::kRepeat: return "repeat_modification";
    case ConstraintKind::kLanguageModel: return "lm_delta";
    case ConstraintKind::kSimilarity: return "similarity";
  }
  return "unknown";
}

struct ConstraintVerdict {
  bool passed = true;
  std::optional<ConstraintKind> failing_constraint;
  std::optional<double> similarity;

  static ConstraintVerdict pass(std::optional<double> sim = std::nullopt) {
    return {true, std::nullopt, sim};
  }
  static ConstraintVerdict fail(ConstraintKind k, std::optional<double> sim = std::nullopt) {
    return {false, k, sim};
  }
};

// Validity predicates applied to every candidate perturbation:
// S(x, x_adv) >= epsilon plus the auxiliary word-level constraints.
struct ConstraintStack {
  std::shared_ptr<const SimilarityScorer> similarity;
  double epsilon = 0.0;
  std::shared_ptr<const WordLogProbScorer> lm;  // optional
  double lm_max_logprob_drop = 2.0;             // natural-log units; +inf disables
  bool forbid_repeat_modification = true;
  std::shared_ptr<const StopwordList> stopwords;  // optional
  bool enforce_protected = true;

  // epsilon may exceed the scorer maximum; that stack admits nothing.
  void validate() const {
    if (!similarity) throw ConfigError("constraint stack has no similarity scorer");
    if (!std::isfinite(epsilon)) throw ConfigError("epsilon must be finite");
    if (std::isnan(lm_max_logprob_drop) || lm_max_logprob_drop < 0)
      throw ConfigError("LM max log-prob drop must be >= 0");
  }

  ConstraintStack with_epsilon(double eps) const {
    ConstraintStack out = *this;
    out.epsilon = eps;
    return out;
  }

  bool lm_enabled() const { return lm && std::isfinite(lm_max_logprob_drop); }
};

inline ConstraintVerdict check_protected(const ConstraintStack& stack, const AttackedText& text,
                                         std::size_t index) {
  if (stack.enforce_protected && text.is_protected(index))
    return ConstraintVerdict::fail(ConstraintKind::kProtected);
  return ConstraintVerdict::pass();
}

inline ConstraintVerdict check_stopword(const ConstraintStack& stack,
                                        std::string_view original_word) {
  if (stack.stopwords && stack.stopwords->contains(original_word))
    return ConstraintVerdict::fail(ConstraintKind::kStopword);
  return ConstraintVerdict::pass();
}

// `history` is every index substituted before this swap, restored or not.
inline ConstraintVerdict check_repeat_modification(const ConstraintStack& stack,
                                                   const std::set<std::size_t>& history,
                                                   std::size_t index) {
  if (stack.forbid_repeat_modification && history.count(index))
    return ConstraintVerdict::fail(ConstraintKind::kRepeat);
  return ConstraintVerdict::pass();
}

// Compares the replacement in the perturbed context against the original
// word in the original context.
inline ConstraintVerdict check_lm_delta(const ConstraintStack& stack, const AttackedText& original,
                                        const AttackedText& candidate, std::size_t index,
                                        QueryBudget& budget) {
  if (!stack.lm_enabled()) return ConstraintVerdict::pass();
  const LogProbQuery queries[] = {{original.current_words(), index},
                                  {candidate.current_words(), index}};
  const auto lp = budget.word_logprob(*stack.lm, queries);
  if (lp[1] >= lp[0] - stack.lm_max_logprob_drop) return ConstraintVerdict::pass();
  return ConstraintVerdict::fail(ConstraintKind::kLanguageModel);
}

inline ConstraintVerdict check_lm_delta(const ConstraintStack& stack, const AttackedText& original,
                                        const AttackedText& candidate, std::size_t index) {
  QueryBudget unlimited;
  return check_lm_delta(stack, original, candidate, index, unlimited);
}

inline ConstraintVerdict check_similarity(const ConstraintStack& stack,
                                          const AttackedText& original,
                                          const AttackedText& candidate, QueryBudget& budget) {
  const std::string text = candidate.scoring_text();
  const double s =
      budget.similarity(*stack.similarity, original.scoring_text(), std::span(&text, 1))[0];
  return s >= stack.epsilon ? ConstraintVerdict::pass(s)
                            : ConstraintVerdict::fail(ConstraintKind::kSimilarity, s);
}

inline ConstraintVerdict check_similarity(const ConstraintStack& stack,
                                          const AttackedText& original,
                                          const AttackedText& candidate) {
  QueryBudget unlimited;
  return check_similarity(stack, original, candidate, unlimited);
}

namespace detail {

inline ConstraintVerdict cheap_checks(const ConstraintStack& stack, const AttackedText& original,
                                      const AttackedText& candidate, std::size_t index,
                                      const std::set<std::size_t>& history) {
  if (auto v = check_protected(stack, candidate, index); !v.passed) return v;
  if (auto v = check_stopword(stack, original.original_words().at(index)); !v.passed) return v;
  return check_repeat_modification(stack, history, index);
}

}  // namespace detail

// Full stack for one swap, short-circuiting on the first failure in the
// order protected, stopword, repeat, LM, similarity.
inline ConstraintVerdict evaluate_stack(const ConstraintStack& stack, const AttackedText& original,
                                        const AttackedText& candidate, std::size_t swapped_index,
                                        const std::set<std::size_t>& history,
                                        QueryBudget& budget) {
  if (auto v = detail::cheap_checks(stack, original, candidate, swapped_index, history); !v.passed)
    return v;
  if (auto v = check_lm_delta(stack, original, candidate, swapped_index, budget); !v.passed)
    return v;
  return check_similarity(stack, original, candidate, budget);
}

inline ConstraintVerdict evaluate_stack(const ConstraintStack& stack, const AttackedText& original,
                                        const AttackedText& candidate, std::size_t swapped_index,
                                        const std::set<std::size_t>& history) {
  QueryBudget unlimited;
  return evaluate_stack(stack, original, candidate, swapped_index, history, unlimited);
}

// Same verdicts as evaluate_stack on each candidate, but with one LM call and
// one similarity call for the whole batch. All candidates are children of
// `parent`.
inline std::vector<ConstraintVerdict> evaluate_batch(const ConstraintStack& stack,
                                                     const AttackedText& original,
                                                     const AttackedText& parent,
                                                     std::span<const SubstitutionCandidate> cands,
                                                     QueryBudget& budget) {
  std::vector<ConstraintVerdict> out(cands.size());
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    out[i] = detail::cheap_checks(stack, original, cands[i].text, cands[i].swapped_index,
                                  parent.history());
    if (out[i].passed) alive.push_back(i);
  }

  if (stack.lm_enabled() && !alive.empty()) {
    std::map<std::size_t, std::size_t> original_slot;
    std::vector<LogProbQuery> queries;
    for (std::size_t i : alive) {
      auto [it, inserted] = original_slot.emplace(cands[i].swapped_index, queries.size());
      if (inserted) queries.push_back({original.current_words(), cands[i].swapped_index});
    }
    const std::size_t first_candidate = queries.size();
    for (std::size_t i : alive) queries.push_back({cands[i].text.current_words(), cands[i].swapped_index});
    const auto lp = budget.word_logprob(*stack.lm, queries);
    std::vector<std::size_t> still;
    for (std::size_t n = 0; n < alive.size(); ++n) {
      const std::size_t i = alive[n];
      const double before = lp[original_slot[cands[i].swapped_index]];
      if (lp[first_candidate + n] >= before - stack.lm_max_logprob_drop) {
        still.push_back(i);
      } else {
        out[i] = ConstraintVerdict::fail(ConstraintKind::kLanguageModel);
      }
    }
    alive = std::move(still);
  }

  if (!alive.empty()) {
    std::vector<std::string> texts;
    texts.reserve(alive.size());
    for (std::size_t i : alive) texts.push_back(cands[i].text.scoring_text());
    const auto sims = budget.similarity(*stack.similarity, original.scoring_text(), texts);
    for (std::size_t n = 0; n < alive.size(); ++n) {
      const double s = sims[n];
      out[alive[n]] = s >= stack.epsilon ? ConstraintVerdict::pass(s)
                                         : ConstraintVerdict::fail(ConstraintKind::kSimilarity, s);
    }
  }
  return out;
}

}  // namespace secord
