#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "secord/error.hpp"

namespace secord {

inline bool is_punctuation_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
           return std::ispunct(static_cast<unsigned char>(c)) != 0;
         });
}

// Joins words with single spaces; punctuation tokens attach to the preceding
// word.
inline std::string detokenize(const std::vector<std::string>& words, std::size_t begin = 0,
                              std::size_t end = std::string::npos) {
  end = std::min(end, words.size());
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin && !is_punctuation_token(words[i])) out += ' ';
    out += words[i];
  }
  return out;
}

// Whitespace-delimited runs with trailing ASCII punctuation split off, one
// token per punctuation character.
inline std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) break;
    std::string_view run = text.substr(start, i - start);
    std::size_t stem_end = run.size();
    while (stem_end > 0 && std::ispunct(static_cast<unsigned char>(run[stem_end - 1]))) --stem_end;
    if (stem_end > 0) words.emplace_back(run.substr(0, stem_end));
    for (std::size_t p = stem_end; p < run.size(); ++p) words.emplace_back(1, run[p]);
  }
  return words;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Word-level text under attack. Substitution-only: the word count never
// changes. The first `protected_prefix` positions (e.g. an entailment premise)
// cannot be substituted. Values are immutable; substitution returns a copy.
class AttackedText {
 public:
  AttackedText(std::vector<std::string> words, std::size_t protected_prefix)
      : original_(std::make_shared<const std::vector<std::string>>(words)),
        current_(std::move(words)),
        protected_prefix_(protected_prefix) {
    if (protected_prefix_ > current_.size())
      throw InvalidInput("protected prefix longer than the text");
  }

  const std::vector<std::string>& original_words() const { return *original_; }
  const std::vector<std::string>& current_words() const { return current_; }
  const std::string& word(std::size_t i) const { return current_.at(i); }
  std::size_t size() const { return current_.size(); }

  std::size_t protected_prefix() const { return protected_prefix_; }
  bool is_protected(std::size_t i) const { return i < protected_prefix_; }

  bool is_modified(std::size_t i) const { return current_[i] != (*original_)[i]; }

  std::vector<std::size_t> modified_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < current_.size(); ++i)
      if (is_modified(i)) out.push_back(i);
    return out;
  }

  // Every position substituted at any point, including ones later restored.
  const std::set<std::size_t>& history() const { return history_; }

  std::string text() const { return detokenize(current_); }
  std::string original_text() const { return detokenize(*original_); }

  // The unprotected suffix; this is what similarity scorers see.
  std::string scoring_text() const { return detokenize(current_, protected_prefix_); }
  std::string original_scoring_text() const {
    return detokenize(*original_, protected_prefix_);
  }

  // Classifier input: for pairs, "<premise> [SEP] <hypothesis>".
  std::string victim_text() const {
    if (protected_prefix_ == 0) return text();
    return detokenize(current_, 0, protected_prefix_) + " [SEP] " + scoring_text();
  }

  // Identity of the perturbation, ignoring history.
  friend bool operator==(const AttackedText& a, const AttackedText& b) {
    return a.current_ == b.current_ && *a.original_ == *b.original_;
  }

  friend AttackedText apply_substitution(const AttackedText& t, std::size_t index,
                                         std::string replacement);

 private:
  std::shared_ptr<const std::vector<std::string>> original_;
  std::vector<std::string> current_;
  std::size_t protected_prefix_;
  std::set<std::size_t> history_;
};

inline AttackedText tokenize(std::string_view text, std::size_t protected_prefix_length = 0) {
  auto words = split_words(text);
  if (words.empty()) throw InvalidInput("text is empty");
  return AttackedText(std::move(words), protected_prefix_length);
}

// Tokenizes an entailment pair; the premise words become the protected prefix.
inline AttackedText tokenize_pair(std::string_view premise, std::string_view hypothesis) {
  auto words = split_words(premise);
  const std::size_t prefix = words.size();
  auto tail = split_words(hypothesis);
  if (tail.empty()) throw InvalidInput("hypothesis is empty");
  words.insert(words.end(), std::make_move_iterator(tail.begin()),
               std::make_move_iterator(tail.end()));
  return AttackedText(std::move(words), prefix);
}

inline AttackedText apply_substitution(const AttackedText& t, std::size_t index,
                                       std::string replacement) {
  if (index >= t.size())
    throw IndexOutOfRange("index " + std::to_string(index) + " out of range for " +
                          std::to_string(t.size()) + " words");
  if (t.is_protected(index))
    throw ProtectedIndex("index " + std::to_string(index) + " is protected");
  AttackedText out = t;
  out.current_[index] = std::move(replacement);
  out.history_.insert(index);
  return out;
}

inline std::size_t word_diff_count(const AttackedText& t) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.is_modified(i)) ++n;
  return n;
}

}  // namespace secord
