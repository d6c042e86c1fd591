#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "secord/lexicon.hpp"
#include "secord/text.hpp"

namespace secord {

struct SubstitutionCandidate {
  AttackedText text;
  std::size_t swapped_index;
  std::string replacement;
};

// Uppercase first letter followed by no uppercase letters.
inline bool is_title_case(std::string_view w) {
  if (w.empty() || !std::isupper(static_cast<unsigned char>(w[0]))) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (std::isupper(static_cast<unsigned char>(w[i]))) return false;
  return true;
}

// Gives `replacement` the title case of `source` when `source` has it.
inline std::string transfer_case(std::string_view source, std::string replacement) {
  if (is_title_case(source) && !replacement.empty())
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  return replacement;
}

// One candidate per lexicon entry of the word at `index`, in lexicon order.
// Punctuation positions yield nothing.
inline std::vector<SubstitutionCandidate> substitution_candidates(const SubstitutionLexicon& lex,
                                                                  Relation relation,
                                                                  const AttackedText& t,
                                                                  std::size_t index) {
  std::vector<SubstitutionCandidate> out;
  const std::string& word = t.word(index);
  if (is_punctuation_token(word)) return out;
  const auto& entries = lex.entries(relation, word);
  out.reserve(entries.size());
  for (const auto& e : entries) {
    std::string replacement = transfer_case(word, e);
    out.push_back({apply_substitution(t, index, replacement), index, replacement});
  }
  return out;
}

inline std::vector<SubstitutionCandidate> synonym_candidates(const SubstitutionLexicon& lex,
                                                             const AttackedText& t,
                                                             std::size_t index) {
  return substitution_candidates(lex, Relation::kSynonym, t, index);
}

inline std::vector<SubstitutionCandidate> antonym_candidates(const SubstitutionLexicon& lex,
                                                             const AttackedText& t,
                                                             std::size_t index) {
  return substitution_candidates(lex, Relation::kAntonym, t, index);
}

}  // namespace secord
