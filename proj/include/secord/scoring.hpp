#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "secord/error.hpp"
#include "secord/text.hpp"

namespace secord {

struct ScoreRange {
  double min;
  double max;
};

// Semantic similarity model S. Scores are deterministic and
// similarity(x, {x}) == range().max.
class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual std::vector<double> similarity(const std::string& original,
                                         std::span<const std::string> candidates) const = 0;
  virtual ScoreRange range() const = 0;
  virtual std::string id() const = 0;
};

struct LogProbQuery {
  std::span<const std::string> words;
  std::size_t index;
};

// Natural-log probability of words[index] given its context.
class WordLogProbScorer {
 public:
  virtual ~WordLogProbScorer() = default;
  virtual std::vector<double> word_logprob(std::span<const LogProbQuery> queries) const = 0;
  virtual std::string id() const = 0;
};

struct Classification {
  int label = 0;
  std::vector<double> probs;
};

// The victim model F.
class VictimClassifier {
 public:
  virtual ~VictimClassifier() = default;
  virtual std::vector<Classification> classify(std::span<const std::string> texts) const = 0;
  virtual std::string id() const = 0;
};

// Lowest index wins ties.
inline int argmax_label(std::span<const double> probs) {
  if (probs.empty()) throw InvalidInput("empty probability vector");
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

// ---------------------------------------------------------------------------
// Embedding table

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidInput("embedding dimension must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  void add(std::string_view word, std::vector<double> v) {
    if (v.size() != dim_)
      throw InvalidInput("vector for '" + std::string(word) + "' has dimension " +
                         std::to_string(v.size()) + ", expected " + std::to_string(dim_));
    for (double x : v)
      if (!std::isfinite(x)) throw InvalidInput("non-finite entry for '" + std::string(word) + "'");
    vectors_[to_lower(word)] = std::move(v);
  }

  // nullptr when out of vocabulary.
  const std::vector<double>* find(std::string_view word) const {
    auto it = vectors_.find(to_lower(word));
    return it == vectors_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// `word v1 ... vd` per line; d is fixed by the first line.
inline EmbeddingTable load_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      char* end = nullptr;
      double x = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size()) throw ParseError("bad number '" + tok + "'", line_no);
      v.push_back(x);
    }
    if (!table) {
      if (v.empty()) throw ParseError("word without vector", line_no);
      table.emplace(v.size());
    }
    try {
      table->add(word, std::move(v));
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!table) throw ParseError("embedding file is empty");
  return std::move(*table);
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open embedding file: " + path);
  return load_embeddings(in);
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  // sqrt(aa * bb) == aa exactly when a == b, so identical vectors give 1.0.
  const double denom = std::sqrt(aa * bb);
  if (denom == 0) return 0.0;
  return std::clamp(dot / denom, -1.0, 1.0);
}

// USE-like scorer: cosine between mean word vectors. OOV words are left out
// of the mean.
class AvgEmbeddingCosine final : public SimilarityScorer {
 public:
  explicit AvgEmbeddingCosine(std::shared_ptr<const EmbeddingTable> table)
      : table_(std::move(table)) {}

  std::vector<double> similarity(const std::string& original,
                                 std::span<const std::string> candidates) const override {
    std::vector<double> ref;
    if (!mean_vector(original, ref))
      throw InvalidInput("original text has no in-vocabulary words: '" + original + "'");
    std::vector<double> out;
    out.reserve(candidates.size());
    std::vector<double> cand;
    for (const auto& c : candidates) out.push_back(mean_vector(c, cand) ? cosine(ref, cand) : 0.0);
    return out;
  }

  ScoreRange range() const override { return {-1.0, 1.0}; }
  std::string id() const override { return "embedding-cosine"; }

 private:
  bool mean_vector(const std::string& text, std::vector<double>& out) const {
    out.assign(table_->dim(), 0.0);
    std::size_t n = 0;
    for (const auto& w : split_words(text)) {
      if (const auto* v = table_->find(w)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*v)[i];
        ++n;
      }
    }
    if (n == 0) return false;
    for (double& x : out) x /= static_cast<double>(n);
    return true;
  }

  std::shared_ptr<const EmbeddingTable> table_;
};

// BERTScore-like scorer: F1 of greedy token matching under word-vector
// cosine. Identical token strings match with 1 even when OOV; per-token best
// matches are floored at 0, so the range is [0, 1].
class GreedyMatchF1 final : public SimilarityScorer {
 public:
  explicit GreedyMatchF1(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}

  std::vector<double> similarity(const std::string& original,
                                 std::span<const std::string> candidates) const override {
    const auto ref = split_words(original);
    if (ref.empty()) throw InvalidInput("original text is empty");
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(f1(ref, split_words(c)));
    return out;
  }

  ScoreRange range() const override { return {0.0, 1.0}; }
  std::string id() const override { return "greedy-f1"; }

  double token_similarity(const std::string& a, const std::string& b) const {
    if (to_lower(a) == to_lower(b)) return 1.0;
    const auto* va = table_->find(a);
    const auto* vb = table_->find(b);
    if (va == nullptr || vb == nullptr) return 0.0;
    return cosine(*va, *vb);
  }

 private:
  double f1(const std::vector<std::string>& ref, const std::vector<std::string>& cand) const {
    if (cand.empty()) return 0.0;
    std::vector<double> best_for_ref(ref.size(), 0.0);
    double precision = 0;
    for (const auto& c : cand) {
      double best = 0.0;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        const double s = token_similarity(c, ref[j]);
        best = std::max(best, s);
        best_for_ref[j] = std::max(best_for_ref[j], s);
      }
      precision += best;
    }
    precision /= static_cast<double>(cand.size());
    double recall = 0;
    for (double s : best_for_ref) recall += s;
    recall /= static_cast<double>(ref.size());
    if (precision + recall == 0) return 0.0;
    return 2 * precision * recall / (precision + recall);
  }

  std::shared_ptr<const EmbeddingTable> table_;
};

// ---------------------------------------------------------------------------
// N-gram language model

// Order-n count model with add-k smoothing over lowercased tokens:
//   P(w | ctx) = (c(ctx, w) + k) / (c(ctx) + k |V|)
// where |V| counts the training vocabulary plus one unknown-word symbol and
// ctx is the previous min(n - 1, index) words.
class NgramModel final : public WordLogProbScorer {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  NgramModel(std::span<const std::vector<std::string>> sentences, std::size_t order = 2,
             double k = 1.0)
      : order_(order), k_(k) {
    if (order == 0) throw InvalidInput("n-gram order must be >= 1");
    if (!(k > 0)) throw InvalidInput("add-k smoothing constant must be positive");
    for (const auto& s : sentences)
      for (const auto& w : s) vocab_.insert(to_lower(w));
    vocab_.erase(std::string(kUnk));
    for (const auto& s : sentences) {
      std::vector<std::string> toks;
      toks.reserve(s.size());
      for (const auto& w : s) toks.push_back(to_lower(w));
      for (std::size_t p = 0; p < toks.size(); ++p) {
        for (std::size_t j = 0; j <= std::min(order_ - 1, p); ++j) {
          auto& c = counts_[context_key(toks, p - j, p)];
          ++c.total;
          ++c.next[toks[p]];
        }
      }
    }
  }

  std::size_t order() const { return order_; }
  double k() const { return k_; }
  std::size_t vocabulary_size() const { return vocab_.size() + 1; }

  std::vector<std::string> vocabulary() const {
    std::vector<std::string> v(vocab_.begin(), vocab_.end());
    std::sort(v.begin(), v.end());
    v.emplace_back(kUnk);
    return v;
  }

  // P(word | context) for an already-lowercased context.
  double probability(std::span<const std::string> context, const std::string& word) const {
    std::vector<std::string> ctx;
    const std::size_t take = std::min(order_ - 1, context.size());
    for (std::size_t i = context.size() - take; i < context.size(); ++i)
      ctx.push_back(normalize(context[i]));
    const std::string w = normalize(word);
    double c_ctx = 0, c_w = 0;
    if (auto it = counts_.find(context_key(ctx, 0, ctx.size())); it != counts_.end()) {
      c_ctx = static_cast<double>(it->second.total);
      if (auto jt = it->second.next.find(w); jt != it->second.next.end())
        c_w = static_cast<double>(jt->second);
    }
    return (c_w + k_) / (c_ctx + k_ * static_cast<double>(vocabulary_size()));
  }

  std::vector<double> word_logprob(std::span<const LogProbQuery> queries) const override {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
      if (q.index >= q.words.size()) throw IndexOutOfRange("word index past end of text");
      out.push_back(std::log(probability(q.words.first(q.index), q.words[q.index])));
    }
    return out;
  }

  std::string id() const override {
    return "ngram(order=" + std::to_string(order_) + ")";
  }

 private:
  struct ContextCounts {
    std::size_t total = 0;
    std::unordered_map<std::string, std::size_t> next;
  };

  std::string normalize(const std::string& w) const {
    std::string l = to_lower(w);
    return vocab_.count(l) ? l : std::string(kUnk);
  }

  static std::string context_key(const std::vector<std::string>& toks, std::size_t b,
                                 std::size_t e) {
    std::string key;
    for (std::size_t i = b; i < e; ++i) {
      key += toks[i];
      key += '\x1f';
    }
    return key;
  }

  std::size_t order_;
  double k_;
  std::unordered_set<std::string> vocab_;
  std::unordered_map<std::string, ContextCounts> counts_;
};

// One sentence per non-empty line.
inline std::vector<std::vector<std::string>> read_corpus(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto words = split_words(line);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

inline std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open corpus file: " + path);
  return read_corpus(in);
}

// ---------------------------------------------------------------------------
// Lexicon-weight victim

// Binary classifier: s = sum of per-word weights, probs = (sigmoid(-s),
// sigmoid(s)).
class LexiconClassifier final : public VictimClassifier {
 public:
  explicit LexiconClassifier(std::map<std::string, double> weights) {
    for (auto& [w, v] : weights) weights_[to_lower(w)] = v;
  }

  double score(const std::string& text) const {
    double s = 0;
    for (const auto& w : split_words(text))
      if (auto it = weights_.find(to_lower(w)); it != weights_.end()) s += it->second;
    return s;
  }

  std::vector<Classification> classify(std::span<const std::string> texts) const override {
    std::vector<Classification> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      const double s = score(t);
      Classification c;
      c.probs = {1.0 / (1.0 + std::exp(s)), 1.0 / (1.0 + std::exp(-s))};
      c.label = argmax_label(c.probs);
      out.push_back(std::move(c));
    }
    return out;
  }

  std::string id() const override { return "lexicon-victim"; }

 private:
  std::map<std::string, double> weights_;
};

// `word weight` per line; '#' starts a comment.
inline std::map<std::string, double> load_weights(std::istream& in) {
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    double w;
    if (!(fields >> w)) throw ParseError("missing weight for '" + word + "'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("trailing field '" + extra + "'", line_no);
    out[to_lower(word)] = w;
  }
  return out;
}

inline std::map<std::string, double> load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open weights file: " + path);
  return load_weights(in);
}

// ---------------------------------------------------------------------------
// Counting wrappers: tally scored items (a batch of n counts n).

class CountingSimilarity final : public SimilarityScorer {
 public:
  explicit CountingSimilarity(std::shared_ptr<const SimilarityScorer> inner)
      : inner_(std::move(inner)) {}
  std::vector<double> similarity(const std::string& original,
                                 std::span<const std::string> candidates) const override {
    count_ += candidates.size();
    return inner_->similarity(original, candidates);
  }
  ScoreRange range() const override { return inner_->range(); }
  std::string id() const override { return inner_->id(); }
  std::size_t count() const { return count_; }

 private:
  std::shared_ptr<const SimilarityScorer> inner_;
  mutable std::atomic<std::size_t> count_{0};
};

class CountingLogProb final : public WordLogProbScorer {
 public:
  explicit CountingLogProb(std::shared_ptr<const WordLogProbScorer> inner)
      : inner_(std::move(inner)) {}
  std::vector<double> word_logprob(std::span<const LogProbQuery> queries) const override {
    count_ += queries.size();
    return inner_->word_logprob(queries);
  }
  std::string id() const override { return inner_->id(); }
  std::size_t count() const { return count_; }

 private:
  std::shared_ptr<const WordLogProbScorer> inner_;
  mutable std::atomic<std::size_t> count_{0};
};

class CountingClassifier final : public VictimClassifier {
 public:
  explicit CountingClassifier(std::shared_ptr<const VictimClassifier> inner)
      : inner_(std::move(inner)) {}
  std::vector<Classification> classify(std::span<const std::string> texts) const override {
    count_ += texts.size();
    return inner_->classify(texts);
  }
  std::string id() const override { return inner_->id(); }
  std::size_t count() const { return count_; }

 private:
  std::shared_ptr<const VictimClassifier> inner_;
  mutable std::atomic<std::size_t> count_{0};
};

}  // namespace secord
