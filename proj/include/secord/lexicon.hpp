#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "secord/error.hpp"
#include "secord/text.hpp"

namespace secord {

enum class Relation { kSynonym, kAntonym };

inline std::string_view relation_name(Relation r) {
  return r == Relation::kSynonym ? "syn" : "ant";
}

// Word -> sorted replacement lists, keyed by lowercase word. No entry maps a
// word to itself.
class SubstitutionLexicon {
 public:
  using Entries = std::vector<std::string>;

  const Entries& synonyms(std::string_view word) const { return lookup(synonyms_, word); }
  const Entries& antonyms(std::string_view word) const { return lookup(antonyms_, word); }
  const Entries& entries(Relation r, std::string_view word) const {
    return r == Relation::kSynonym ? synonyms(word) : antonyms(word);
  }

  std::size_t synonym_keys() const { return synonyms_.size(); }
  std::size_t antonym_keys() const { return antonyms_.size(); }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& [_, v] : synonyms_) n += v.size();
    for (const auto& [_, v] : antonyms_) n += v.size();
    return n;
  }

  // Adds one relation. Returns false when dropped (self-map or duplicate).
  bool add(Relation r, std::string_view word, std::string_view replacement) {
    std::string key = to_lower(word);
    std::string value = to_lower(replacement);
    if (key == value) return false;
    auto& list = (r == Relation::kSynonym ? synonyms_ : antonyms_)[key];
    auto it = std::lower_bound(list.begin(), list.end(), value);
    if (it != list.end() && *it == value) return false;
    list.insert(it, std::move(value));
    return true;
  }

  friend bool operator==(const SubstitutionLexicon&, const SubstitutionLexicon&) = default;

 private:
  static const Entries& lookup(const std::map<std::string, Entries>& m, std::string_view word) {
    static const Entries kEmpty;
    auto it = m.find(to_lower(word));
    return it == m.end() ? kEmpty : it->second;
  }

  std::map<std::string, Entries> synonyms_;
  std::map<std::string, Entries> antonyms_;
};

// Reads `word<TAB>relation<TAB>replacement` lines; relation is syn or ant.
// Blank lines are skipped.
inline SubstitutionLexicon load_lexicon(std::istream& in) {
  SubstitutionLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) throw ParseError("expected 3 tab-separated fields", line_no);
    for (const auto& f : fields) {
      if (f.empty()) throw ParseError("empty field", line_no);
      if (std::any_of(f.begin(), f.end(),
                      [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
        throw ParseError("field '" + f + "' contains whitespace", line_no);
    }
    Relation rel;
    if (fields[1] == "syn") {
      rel = Relation::kSynonym;
    } else if (fields[1] == "ant") {
      rel = Relation::kAntonym;
    } else {
      throw ParseError("unknown relation '" + fields[1] + "'", line_no);
    }
    lex.add(rel, fields[0], fields[2]);
  }
  return lex;
}

inline SubstitutionLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open lexicon file: " + path);
  return load_lexicon(in);
}

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}

  bool contains(std::string_view word) const { return words_.count(to_lower(word)) > 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

 private:
  std::set<std::string> words_;
};

// One word per line; '#' starts a comment.
inline StopwordList load_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string w;
    while (fields >> w) words.insert(to_lower(w));
  }
  if (words.empty()) throw ParseError("stopword list is empty");
  return StopwordList(std::move(words));
}

inline StopwordList load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open stopword file: " + path);
  return load_stopwords(in);
}

// The NLTK English stopword list (179 words). Also shipped as
// data/stopwords.txt.
inline const StopwordList& default_stopwords() {
  static const StopwordList list = [] {
    static constexpr std::string_view kWords =
        "i me my myself we our ours ourselves you you're you've you'll you'd your yours "
        "yourself yourselves he him his himself she she's her hers herself it it's its "
        "itself they them their theirs themselves what which who whom this that that'll "
        "these those am is are was were be been being have has had having do does did "
        "doing a an the and but if or because as until while of at by for with about "
        "against between into through during before after above below to from up down in "
        "out on off over under again further then once here there when where why how all "
        "any both each few more most other some such no nor not only own same so than too "
        "very s t can will just don don't should should've now d ll m o re ve y ain aren "
        "aren't couldn couldn't didn didn't doesn doesn't hadn hadn't hasn hasn't haven "
        "haven't isn isn't ma mightn mightn't mustn mustn't needn needn't shan shan't "
        "shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't";
    std::istringstream in{std::string(kWords)};
    return load_stopwords(in);
  }();
  return list;
}

}  // namespace secord
