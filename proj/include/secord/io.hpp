#pragma once

// JSONL datasets and per-example report records.

#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "secord/attack.hpp"
#include "secord/datagen.hpp"
#include "secord/error.hpp"
#include "secord/robustness.hpp"
#include "secord/text.hpp"

namespace secord {

// Calls fn(json, line_no) for every non-blank line.
template <typename Fn>
void read_jsonl(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
    fn(j, line_no);
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return in;
}

namespace detail {

inline std::string string_field(const nlohmann::json& j, const char* key, std::size_t line_no) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(std::string("missing string field '") + key + "'", line_no);
  return j[key].get<std::string>();
}

}  // namespace detail

// Classification rows {"text", "label"} or entailment rows {"premise",
// "hypothesis", "label"}. The premise becomes the protected prefix.
inline std::vector<Example> load_dataset(std::istream& in) {
  std::vector<Example> out;
  read_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    int label = -1;
    if (j.contains("label")) {
      if (!j["label"].is_number_integer()) throw ParseError("label must be an integer", line_no);
      label = j["label"].get<int>();
    }
    try {
      if (j.contains("hypothesis")) {
        const std::string premise = j.contains("premise") ? detail::string_field(j, "premise", line_no) : "";
        out.push_back({tokenize_pair(premise, detail::string_field(j, "hypothesis", line_no)), label});
      } else {
        out.push_back({tokenize(detail::string_field(j, "text", line_no)), label});
      }
    } catch (const InvalidInput& e) {
      throw ParseError(e.what(), line_no);
    }
  });
  if (out.empty()) throw InvalidInput("dataset is empty");
  return out;
}

inline std::vector<Example> load_dataset(const std::string& path) {
  auto in = open_input(path);
  return load_dataset(in);
}

// The "hypothesis" field of each row; a premise, if present, is ignored.
inline std::vector<std::string> load_hypotheses(std::istream& in) {
  std::vector<std::string> out;
  read_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    out.push_back(detail::string_field(j, "hypothesis", line_no));
  });
  return out;
}

struct LabeledPair {
  std::string original;
  std::string perturbed;
  bool paraphrase;
};

// Rows {"original", "perturbed", "label"} as written by datagen.
inline std::vector<LabeledPair> load_pairs(std::istream& in) {
  std::vector<LabeledPair> out;
  read_jsonl(in, [&](const nlohmann::json& j, std::size_t line_no) {
    if (!j.contains("label") || !j["label"].is_number_integer())
      throw ParseError("missing integer field 'label'", line_no);
    const int label = j["label"].get<int>();
    if (label != 0 && label != 1) throw ParseError("label must be 0 or 1", line_no);
    out.push_back({detail::string_field(j, "original", line_no),
                   detail::string_field(j, "perturbed", line_no), label == 1});
  });
  return out;
}

inline nlohmann::ordered_json query_counts_json(const QueryCounts& q) {
  return {{"similarity", q.similarity}, {"logprob", q.logprob}, {"victim", q.victim}};
}

// One JSONL result record. For pairs, original/perturbed hold the hypothesis
// and the premise is reported separately.
inline nlohmann::ordered_json result_record(std::size_t index, const AttackResult& r) {
  nlohmann::ordered_json j;
  j["index"] = index;
  j["status"] = status_name(r.status);
  j["epsilon"] = r.epsilon;
  if (r.gamma) j["gamma"] = *r.gamma;
  if (r.original.protected_prefix() > 0)
    j["premise"] = detokenize(r.original.original_words(), 0, r.original.protected_prefix());
  j["original"] = r.original.original_scoring_text();
  j["perturbed"] = r.final_text.scoring_text();
  j["similarity"] = r.similarity ? nlohmann::ordered_json(*r.similarity) : nullptr;
  if (r.victim_label_before) j["victim_label_before"] = *r.victim_label_before;
  if (r.victim_label_after) j["victim_label_after"] = *r.victim_label_after;
  j["num_queries"] = r.queries.total();
  j["queries_by_scorer"] = query_counts_json(r.queries);
  j["words_changed"] = word_diff_count(r.final_text);
  if (r.budget_exhausted) j["budget_exhausted"] = true;
  return j;
}

inline nlohmann::ordered_json pair_record(const ParaphrasePair& p) {
  nlohmann::ordered_json j;
  j["original"] = p.original;
  j["perturbed"] = p.perturbed;
  j["label"] = p.label;
  j["fraction"] = p.fraction;
  j["relation"] = relation_name(p.relation);
  return j;
}

}  // namespace secord
