#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "secord/constraint.hpp"
#include "secord/error.hpp"
#include "secord/lexicon.hpp"
#include "secord/query.hpp"
#include "secord/rng.hpp"
#include "secord/scoring.hpp"
#include "secord/text.hpp"
#include "secord/transform.hpp"

namespace secord {

inline constexpr std::string_view kMaskToken = "[UNK]";
inline constexpr std::size_t kDefaultQueryBudget = std::size_t{1} << 15;
inline constexpr std::size_t kDefaultBeamWidth = 8;
inline constexpr std::size_t kDefaultGamma = 3;

enum class GoalKind { kFirstOrder, kSecondOrder };

inline std::string_view goal_name(GoalKind k) {
  return k == GoalKind::kFirstOrder ? "first_order" : "second_order";
}

// First order: fool the victim while the stack holds. Second order: change at
// least `gamma` words while the stack (and so S >= epsilon) still holds.
struct GoalFunction {
  GoalKind kind = GoalKind::kFirstOrder;
  std::shared_ptr<const VictimClassifier> victim;  // first order only
  int ground_truth_label = 0;                      // first order only
  std::size_t gamma = kDefaultGamma;               // second order only

  void validate() const {
    if (kind == GoalKind::kFirstOrder) {
      if (!victim) throw ConfigError("first-order goal needs a victim classifier");
      if (ground_truth_label < 0) throw InvalidInput("first-order goal needs a ground-truth label");
    } else if (gamma < 1) {
      throw ConfigError("gamma must be >= 1");
    }
  }
};

inline bool goal_first_order(const GoalFunction& g, int adversarial_label,
                             const ConstraintVerdict& verdict) {
  return adversarial_label != g.ground_truth_label && verdict.passed;
}

inline bool goal_first_order(const GoalFunction& g, const AttackedText& /*x*/,
                             const AttackedText& x_adv, const ConstraintVerdict& verdict) {
  const std::string text = x_adv.victim_text();
  return goal_first_order(g, g.victim->classify(std::span(&text, 1))[0].label, verdict);
}

inline bool goal_second_order(const GoalFunction& g, const AttackedText& /*x*/,
                              const AttackedText& x_adv, const ConstraintVerdict& verdict) {
  return verdict.passed && word_diff_count(x_adv) >= g.gamma;
}

enum class AttackStatus { kSuccess, kFailed, kSkipped };

inline std::string_view status_name(AttackStatus s) {
  switch (s) {
    case AttackStatus::kSuccess: return "success";
    case AttackStatus::kFailed: return "failed";
    case AttackStatus::kSkipped: return "skipped";
  }
  return "unknown";
}

struct SwapStep {
  std::size_t index;
  std::string replacement;
};

struct AttackResult {
  explicit AttackResult(const AttackedText& input) : original(input), final_text(input) {}

  AttackStatus status = AttackStatus::kFailed;
  AttackedText original;
  AttackedText final_text;
  std::optional<double> similarity;
  QueryCounts queries;
  double epsilon = 0;
  GoalKind goal = GoalKind::kFirstOrder;
  std::optional<std::size_t> gamma;
  std::optional<int> victim_label_before;
  std::optional<int> victim_label_after;
  std::vector<SwapStep> trace;  // committed swaps, in order
  bool budget_exhausted = false;
};

namespace detail {

// Search guidance. Higher is better, compared lexicographically.
struct Progress {
  bool satisfied = false;
  double primary = 0;
  double secondary = 0;
  std::optional<int> label;

  auto key() const { return std::tuple(satisfied, primary, secondary); }
};

inline double class_probability(const Classification& c, int label) {
  return static_cast<std::size_t>(label) < c.probs.size() ? c.probs[label] : 0.0;
}

// Progress of each constraint-passing candidate. First order: drop in the
// ground-truth probability. Second order: changed-word count, then
// similarity.
inline std::vector<Progress> score_candidates(const GoalFunction& g,
                                              std::span<const AttackedText* const> texts,
                                              std::span<const ConstraintVerdict* const> verdicts,
                                              QueryBudget& budget) {
  std::vector<Progress> out(texts.size());
  if (g.kind == GoalKind::kFirstOrder) {
    std::vector<std::string> inputs;
    inputs.reserve(texts.size());
    for (const auto* t : texts) inputs.push_back(t->victim_text());
    const auto cls = budget.classify(*g.victim, inputs);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      out[i].label = cls[i].label;
      out[i].satisfied = goal_first_order(g, cls[i].label, *verdicts[i]);
      out[i].primary = -class_probability(cls[i], g.ground_truth_label);
    }
  } else {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      out[i].satisfied = goal_second_order(g, *texts[i], *texts[i], *verdicts[i]);
      out[i].primary = static_cast<double>(word_diff_count(*texts[i]));
      out[i].secondary = verdicts[i]->similarity.value_or(0.0);
    }
  }
  return out;
}

inline bool substitutable(const ConstraintStack& stack, const AttackedText& x, std::size_t i) {
  if (x.is_protected(i) || is_punctuation_token(x.original_words()[i])) return false;
  return !(stack.stopwords && stack.stopwords->contains(x.original_words()[i]));
}

// Victim check on the clean input. Returns false (and fills `result`) when
// the attack should be skipped.
inline bool check_clean_input(const GoalFunction& g, const AttackedText& x, QueryBudget& budget,
                              AttackResult& result, Classification& clean) {
  if (g.kind != GoalKind::kFirstOrder) return true;
  const std::string text = x.victim_text();
  clean = budget.classify(*g.victim, std::span(&text, 1))[0];
  result.victim_label_before = clean.label;
  if (clean.label != g.ground_truth_label) {
    result.status = AttackStatus::kSkipped;
    return false;
  }
  return true;
}

inline AttackResult make_result(const GoalFunction& g, const ConstraintStack& stack,
                                const AttackedText& x) {
  AttackResult r(x);
  r.epsilon = stack.epsilon;
  r.goal = g.kind;
  if (g.kind == GoalKind::kSecondOrder) r.gamma = g.gamma;
  return r;
}

}  // namespace detail

// Positions ordered by how much masking them with "[UNK]" lowers the victim's
// ground-truth probability; ties go to the lower index. Protected, stopword
// and punctuation positions are left out.
inline std::vector<std::size_t> word_importance_ranking(const GoalFunction& g,
                                                        const ConstraintStack& stack,
                                                        const AttackedText& x,
                                                        QueryBudget& budget) {
  if (!g.victim) throw ConfigError("word importance ranking needs a victim classifier");
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (detail::substitutable(stack, x, i)) positions.push_back(i);
  if (positions.empty()) return positions;

  std::vector<std::string> texts{x.victim_text()};
  for (std::size_t i : positions)
    texts.push_back(apply_substitution(x, i, std::string(kMaskToken)).victim_text());
  const auto cls = budget.classify(*g.victim, texts);
  const double base = detail::class_probability(cls[0], g.ground_truth_label);

  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t n = 0; n < positions.size(); ++n)
    scored.emplace_back(base - detail::class_probability(cls[n + 1], g.ground_truth_label),
                        positions[n]);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (const auto& [_, i] : scored) out.push_back(i);
  return out;
}

inline std::vector<std::size_t> word_importance_ranking(const GoalFunction& g,
                                                        const ConstraintStack& stack,
                                                        const AttackedText& x) {
  QueryBudget unlimited;
  return word_importance_ranking(g, stack, x, unlimited);
}

// Greedy search over positions in word-importance order (index order for
// second-order goals). At each position the best constraint-passing
// substitution is committed if it improves progress.
inline AttackResult greedy_wir_search(const GoalFunction& g, const ConstraintStack& stack,
                                      const SubstitutionLexicon& lex, const AttackedText& x,
                                      std::size_t query_budget = kDefaultQueryBudget,
                                      Relation relation = Relation::kSynonym) {
  g.validate();
  stack.validate();
  QueryBudget budget(query_budget);
  AttackResult result = detail::make_result(g, stack, x);
  try {
    Classification clean;
    if (!detail::check_clean_input(g, x, budget, result, clean)) {
      result.queries = budget.counts();
      return result;
    }

    std::vector<std::size_t> order;
    detail::Progress current;
    if (g.kind == GoalKind::kFirstOrder) {
      order = word_importance_ranking(g, stack, x, budget);
      current.primary = -detail::class_probability(clean, g.ground_truth_label);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i)
        if (detail::substitutable(stack, x, i)) order.push_back(i);
    }

    AttackedText cur = x;
    for (std::size_t index : order) {
      auto cands = substitution_candidates(lex, relation, cur, index);
      if (cands.empty()) continue;
      const auto verdicts = evaluate_batch(stack, x, cur, cands, budget);
      std::vector<const AttackedText*> texts;
      std::vector<const ConstraintVerdict*> passing;
      std::vector<std::size_t> which;
      for (std::size_t i = 0; i < cands.size(); ++i) {
        if (!verdicts[i].passed) continue;
        texts.push_back(&cands[i].text);
        passing.push_back(&verdicts[i]);
        which.push_back(i);
      }
      if (texts.empty()) continue;
      const auto progress = detail::score_candidates(g, texts, passing, budget);
      // Candidates arrive in lexicographic order; the first maximum wins.
      std::size_t best = 0;
      for (std::size_t i = 1; i < progress.size(); ++i)
        if (progress[i].key() > progress[best].key()) best = i;

      const auto& chosen = cands[which[best]];
      if (progress[best].satisfied || progress[best].key() > current.key()) {
        cur = chosen.text;
        current = progress[best];
        result.trace.push_back({chosen.swapped_index, chosen.replacement});
        result.similarity = passing[best]->similarity;
        if (progress[best].label) result.victim_label_after = progress[best].label;
      }
      if (progress[best].satisfied) {
        result.status = AttackStatus::kSuccess;
        break;
      }
    }
    result.final_text = cur;
  } catch (const BudgetExhausted&) {
    result.budget_exhausted = true;
    result.status = AttackStatus::kFailed;
  }
  if (result.status != AttackStatus::kSuccess && !result.trace.empty()) {
    // Report the last committed state even on failure.
    AttackedText t = x;
    for (const auto& s : result.trace) t = apply_substitution(t, s.index, s.replacement);
    result.final_text = t;
  }
  result.queries = budget.counts();
  return result;
}

// Beam search over sets of substitutions. Every state in a layer differs from
// the input in one more word than the previous layer; states are ranked by
// goal progress and the best `beam_width` survive.
inline AttackResult beam_search(const GoalFunction& g, const ConstraintStack& stack,
                                const SubstitutionLexicon& lex, const AttackedText& x,
                                std::size_t beam_width = kDefaultBeamWidth,
                                std::size_t query_budget = kDefaultQueryBudget,
                                Relation relation = Relation::kAntonym) {
  g.validate();
  stack.validate();
  if (beam_width == 0) throw ConfigError("beam width must be >= 1");
  QueryBudget budget(query_budget);
  AttackResult result = detail::make_result(g, stack, x);

  struct State {
    AttackedText text;
    std::vector<SwapStep> trace;
    detail::Progress progress;
    std::optional<double> similarity;
  };
  auto better = [](const State& a, const State& b) {
    if (a.progress.key() != b.progress.key()) return a.progress.key() > b.progress.key();
    return a.text.current_words() < b.text.current_words();
  };

  try {
    Classification clean;
    if (!detail::check_clean_input(g, x, budget, result, clean)) {
      result.queries = budget.counts();
      return result;
    }

    std::vector<State> beam{State{x, {}, {}, std::nullopt}};
    std::set<std::vector<std::string>> seen{x.current_words()};
    for (std::size_t depth = 0; depth < x.size(); ++depth) {
      std::vector<State> next;
      for (const State& s : beam) {
        std::vector<SubstitutionCandidate> cands;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (s.text.is_protected(i) || s.text.is_modified(i)) continue;
          auto c = substitution_candidates(lex, relation, s.text, i);
          cands.insert(cands.end(), std::make_move_iterator(c.begin()),
                       std::make_move_iterator(c.end()));
        }
        // Drop states already reached by another swap order before scoring.
        std::erase_if(cands, [&](const SubstitutionCandidate& c) {
          return seen.count(c.text.current_words()) > 0;
        });
        for (const auto& c : cands) seen.insert(c.text.current_words());
        if (cands.empty()) continue;

        const auto verdicts = evaluate_batch(stack, x, s.text, cands, budget);
        std::vector<const AttackedText*> texts;
        std::vector<const ConstraintVerdict*> passing;
        std::vector<std::size_t> which;
        for (std::size_t i = 0; i < cands.size(); ++i) {
          if (!verdicts[i].passed) continue;
          texts.push_back(&cands[i].text);
          passing.push_back(&verdicts[i]);
          which.push_back(i);
        }
        if (texts.empty()) continue;
        const auto progress = detail::score_candidates(g, texts, passing, budget);
        for (std::size_t n = 0; n < texts.size(); ++n) {
          auto& c = cands[which[n]];
          State child{std::move(c.text), s.trace, progress[n], passing[n]->similarity};
          child.trace.push_back({c.swapped_index, c.replacement});
          next.push_back(std::move(child));
        }
      }
      if (next.empty()) break;
      std::sort(next.begin(), next.end(), better);
      if (next.front().progress.satisfied) {
        const State& win = next.front();
        result.status = AttackStatus::kSuccess;
        result.final_text = win.text;
        result.trace = win.trace;
        result.similarity = win.similarity;
        result.victim_label_after = win.progress.label;
        break;
      }
      if (next.size() > beam_width) next.erase(next.begin() + beam_width, next.end());
      beam = std::move(next);
      result.final_text = beam.front().text;
      result.trace = beam.front().trace;
      result.similarity = beam.front().similarity;
      result.victim_label_after = beam.front().progress.label;
    }
  } catch (const BudgetExhausted&) {
    result.budget_exhausted = true;
    result.status = AttackStatus::kFailed;
  }
  result.queries = budget.counts();
  return result;
}

// ---------------------------------------------------------------------------
// Attack runner

enum class SearchMethod { kGreedyWir, kBeam };

inline std::string_view search_name(SearchMethod m) {
  return m == SearchMethod::kGreedyWir ? "greedy_wir" : "beam";
}

struct AttackConfig {
  GoalKind goal = GoalKind::kFirstOrder;
  std::shared_ptr<const VictimClassifier> victim;
  std::size_t gamma = kDefaultGamma;
  ConstraintStack stack;
  std::shared_ptr<const SubstitutionLexicon> lexicon;
  std::optional<Relation> relation;      // default: syn (first), ant (second)
  std::optional<SearchMethod> search;    // default: greedy (first), beam (second)
  std::size_t beam_width = kDefaultBeamWidth;
  std::size_t query_budget = kDefaultQueryBudget;

  Relation effective_relation() const {
    return relation.value_or(goal == GoalKind::kFirstOrder ? Relation::kSynonym
                                                           : Relation::kAntonym);
  }
  SearchMethod effective_search() const {
    return search.value_or(goal == GoalKind::kFirstOrder ? SearchMethod::kGreedyWir
                                                         : SearchMethod::kBeam);
  }

  void validate() const {
    stack.validate();
    if (!lexicon) throw ConfigError("attack has no substitution lexicon");
    if (goal == GoalKind::kFirstOrder && !victim)
      throw ConfigError("first-order attack needs a victim classifier");
    if (goal == GoalKind::kSecondOrder && gamma < 1) throw ConfigError("gamma must be >= 1");
    if (beam_width == 0) throw ConfigError("beam width must be >= 1");
  }

  AttackConfig with_epsilon(double eps) const {
    AttackConfig out = *this;
    out.stack = stack.with_epsilon(eps);
    return out;
  }
};

struct Example {
  AttackedText text;
  int label = -1;  // -1 when the dataset carries none
};

inline AttackResult run_attack(const AttackConfig& cfg, const AttackedText& x, int label) {
  GoalFunction g{cfg.goal, cfg.victim, label, cfg.gamma};
  const Relation rel = cfg.effective_relation();
  if (cfg.effective_search() == SearchMethod::kGreedyWir)
    return greedy_wir_search(g, cfg.stack, *cfg.lexicon, x, cfg.query_budget, rel);
  return beam_search(g, cfg.stack, *cfg.lexicon, x, cfg.beam_width, cfg.query_budget, rel);
}

struct AttackSetResult {
  double success_rate = 0;
  std::vector<std::size_t> sample;  // dataset indices, ascending
  std::vector<AttackResult> results;
  std::vector<std::string> warnings;

  std::size_t successes() const {
    return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) {
      return r.status == AttackStatus::kSuccess;
    }));
  }
};

// Seeded sample of `sample_size` dataset indices, ascending. Takes the whole
// dataset when it is not larger than the sample.
inline std::vector<std::size_t> sample_indices(std::size_t dataset_size, std::size_t sample_size,
                                               std::uint64_t seed) {
  std::vector<std::size_t> idx;
  if (sample_size >= dataset_size) {
    for (std::size_t i = 0; i < dataset_size; ++i) idx.push_back(i);
    return idx;
  }
  Rng rng = make_rng(seed);
  idx = sample_without_replacement(rng, dataset_size, sample_size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
// worker exception.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < std::min(jobs, n); ++w) {
      workers.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

inline std::size_t default_jobs() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Success rate over a seeded sample; skipped examples count as failures.
inline AttackSetResult run_attack_set(const AttackConfig& cfg, std::span<const Example> dataset,
                                      std::size_t sample_size, std::uint64_t seed,
                                      std::size_t jobs = 1) {
  cfg.validate();
  if (dataset.empty()) throw InvalidInput("dataset is empty");
  if (sample_size == 0) throw InvalidInput("sample size must be >= 1");
  AttackSetResult out;
  if (sample_size > dataset.size())
    out.warnings.push_back("sample size " + std::to_string(sample_size) +
                           " exceeds dataset size " + std::to_string(dataset.size()) +
                           "; using the full dataset");
  out.sample = sample_indices(dataset.size(), sample_size, seed);
  out.results.resize(out.sample.size(), AttackResult(dataset[0].text));
  parallel_for(out.sample.size(), jobs, [&](std::size_t n) {
    const Example& ex = dataset[out.sample[n]];
    out.results[n] = run_attack(cfg, ex.text, ex.label);
  });
  out.success_rate =
      static_cast<double>(out.successes()) / static_cast<double>(out.sample.size());
  return out;
}

}  // namespace secord
