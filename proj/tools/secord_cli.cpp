// secord: attack runner, robustness sweeps and metrics from the command line.
//
// Exit codes: 0 ok, 1 other error, 2 usage, 3 undefined metric,
// 4 transport failure, 5 remote model/protocol error, 6 bad input file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "secord/secord.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUndefinedMetric = 3,
  kTransport = 4,
  kRemote = 5,
  kBadInput = 6,
};

// Reads a JSON config: top-level scalars are global flags, objects are
// per-command sections. Flags given on the command line win.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void collect(const nlohmann::json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::size_t jobs = secord::default_jobs();
  std::string out = "out";
};

struct ScorerOptions {
  std::string scorer = "embedding-cosine";
  std::string embeddings;
  std::vector<double> scorer_range{-1.0, 1.0};  // remote scorers only
  int retries = 2;
  double timeout_s = 30;
  std::size_t max_batch = 64;
};

struct AttackOptions {
  ScorerOptions scoring;
  std::string dataset;
  std::string lexicon;
  std::string stopwords;
  std::string victim;
  std::string lm = "none";
  std::size_t lm_order = 2;
  double lm_k = 1.0;
  double lm_max_drop = 2.0;
  std::string kind = "first";
  std::string search;
  std::string relation;
  double epsilon = 0.0;
  std::size_t gamma = secord::kDefaultGamma;
  std::size_t beam_width = secord::kDefaultBeamWidth;
  std::size_t budget = secord::kDefaultQueryBudget;
  std::size_t sample_size = 100;
  // sweep only
  std::string grid;
  std::string preset = "default";
  bool svg = false;
};

std::shared_ptr<const secord::RemoteClient> make_client(const std::string& url,
                                                        const ScorerOptions& o) {
  secord::RemoteOptions ro;
  ro.base_url = url;
  ro.max_retries = o.retries;
  ro.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000));
  ro.max_batch = o.max_batch;
  return std::make_shared<secord::RemoteClient>(ro);
}

bool strip_prefix(std::string& s, std::string_view prefix) {
  if (s.rfind(prefix, 0) != 0) return false;
  s.erase(0, prefix.size());
  return true;
}

std::shared_ptr<const secord::SimilarityScorer> make_similarity(const ScorerOptions& o) {
  std::string spec = o.scorer;
  if (strip_prefix(spec, "remote:")) {
    if (o.scorer_range.size() != 2 || !(o.scorer_range[0] < o.scorer_range[1]))
      throw secord::ConfigError("--scorer-range needs MIN MAX with MIN < MAX");
    return std::make_shared<secord::RemoteSimilarity>(
        make_client(spec, o), secord::ScoreRange{o.scorer_range[0], o.scorer_range[1]},
        "remote:" + spec);
  }
  if (o.embeddings.empty())
    throw secord::ConfigError("native scorer '" + o.scorer + "' needs --embeddings");
  auto table = std::make_shared<const secord::EmbeddingTable>(secord::load_embeddings(o.embeddings));
  if (spec == "embedding-cosine") return std::make_shared<secord::AvgEmbeddingCosine>(table);
  if (spec == "greedy-f1") return std::make_shared<secord::GreedyMatchF1>(table);
  throw secord::ConfigError("unknown scorer '" + o.scorer +
                            "' (expected embedding-cosine, greedy-f1 or remote:URL)");
}

std::shared_ptr<const secord::VictimClassifier> make_victim(const AttackOptions& o) {
  std::string spec = o.victim;
  if (spec.empty()) return nullptr;
  if (strip_prefix(spec, "lexicon:"))
    return std::make_shared<secord::LexiconClassifier>(secord::load_weights(spec));
  if (strip_prefix(spec, "remote:"))
    return std::make_shared<secord::RemoteClassifier>(make_client(spec, o.scoring), "remote:" + spec);
  throw secord::ConfigError("unknown victim '" + o.victim + "' (expected lexicon:PATH or remote:URL)");
}

std::shared_ptr<const secord::WordLogProbScorer> make_lm(const AttackOptions& o) {
  std::string spec = o.lm;
  if (spec.empty() || spec == "none") return nullptr;
  if (strip_prefix(spec, "ngram:")) {
    const auto corpus = secord::read_corpus(spec);
    return std::make_shared<secord::NgramModel>(corpus, o.lm_order, o.lm_k);
  }
  if (strip_prefix(spec, "remote:"))
    return std::make_shared<secord::RemoteLogProb>(make_client(spec, o.scoring), "remote:" + spec);
  throw secord::ConfigError("unknown LM '" + o.lm + "' (expected none, ngram:PATH or remote:URL)");
}

std::shared_ptr<const secord::StopwordList> make_stopwords(const std::string& path) {
  if (path.empty()) return std::make_shared<secord::StopwordList>(secord::default_stopwords());
  return std::make_shared<secord::StopwordList>(secord::load_stopwords(path));
}

secord::AttackConfig make_base_config(const AttackOptions& o) {
  secord::AttackConfig cfg;
  cfg.stack.similarity = make_similarity(o.scoring);
  cfg.stack.epsilon = o.epsilon;
  cfg.stack.lm = make_lm(o);
  cfg.stack.lm_max_logprob_drop = o.lm_max_drop;
  cfg.stack.stopwords = make_stopwords(o.stopwords);
  cfg.lexicon = std::make_shared<secord::SubstitutionLexicon>(secord::load_lexicon(o.lexicon));
  cfg.victim = make_victim(o);
  cfg.gamma = o.gamma;
  cfg.beam_width = o.beam_width;
  cfg.query_budget = o.budget;
  if (o.search == "greedy") cfg.search = secord::SearchMethod::kGreedyWir;
  else if (o.search == "beam") cfg.search = secord::SearchMethod::kBeam;
  else if (!o.search.empty()) throw secord::ConfigError("--search must be greedy or beam");
  if (o.relation == "syn") cfg.relation = secord::Relation::kSynonym;
  else if (o.relation == "ant") cfg.relation = secord::Relation::kAntonym;
  else if (!o.relation.empty()) throw secord::ConfigError("--relation must be syn or ant");
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw secord::InvalidInput("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw secord::InvalidInput("cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const ordered_json& j) { open_output(p) << j.dump(2) << '\n'; }

ordered_json scorer_json(const ScorerOptions& o) {
  return {{"scorer", o.scorer},     {"embeddings", o.embeddings}, {"scorer_range", o.scorer_range},
          {"retries", o.retries},   {"timeout", o.timeout_s},     {"max_batch", o.max_batch}};
}

ordered_json attack_json(const AttackOptions& o) {
  ordered_json j = scorer_json(o.scoring);
  j["dataset"] = o.dataset;
  j["lexicon"] = o.lexicon;
  j["stopwords"] = o.stopwords.empty() ? "<built-in>" : o.stopwords;
  j["victim"] = o.victim;
  j["lm"] = o.lm;
  j["lm_order"] = o.lm_order;
  j["lm_k"] = o.lm_k;
  j["lm_max_drop"] = o.lm_max_drop;
  j["gamma"] = o.gamma;
  j["beam_width"] = o.beam_width;
  j["budget"] = o.budget;
  j["sample_size"] = o.sample_size;
  j["search"] = o.search;
  j["relation"] = o.relation;
  return j;
}

ordered_json globals_json(const Globals& g) {
  return {{"seed", g.seed}, {"jobs", g.jobs}, {"out", g.out}};
}

void add_scorer_options(CLI::App* cmd, ScorerOptions& o) {
  cmd->add_option("--scorer", o.scorer, "embedding-cosine | greedy-f1 | remote:URL")
      ->capture_default_str();
  cmd->add_option("--embeddings", o.embeddings, "word vector file for native scorers");
  cmd->add_option("--scorer-range", o.scorer_range, "score range of a remote scorer")
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--retries", o.retries, "retries per remote request")->capture_default_str();
  cmd->add_option("--timeout", o.timeout_s, "remote request timeout (seconds)")->capture_default_str();
  cmd->add_option("--max-batch", o.max_batch, "largest batch per remote request")->capture_default_str();
}

void add_attack_options(CLI::App* cmd, AttackOptions& o) {
  add_scorer_options(cmd, o.scoring);
  cmd->add_option("--dataset", o.dataset, "JSONL dataset")->required();
  cmd->add_option("--lexicon", o.lexicon, "synonym/antonym TSV")->required();
  cmd->add_option("--stopwords", o.stopwords, "stopword file (default: built-in list)");
  cmd->add_option("--victim", o.victim, "lexicon:PATH | remote:URL");
  cmd->add_option("--lm", o.lm, "none | ngram:CORPUS | remote:URL")->capture_default_str();
  cmd->add_option("--lm-order", o.lm_order, "n-gram order")->capture_default_str();
  cmd->add_option("--lm-k", o.lm_k, "add-k smoothing constant")->capture_default_str();
  cmd->add_option("--lm-max-drop", o.lm_max_drop, "largest allowed log-prob drop")
      ->capture_default_str();
  cmd->add_option("--search", o.search, "greedy | beam (default by attack kind)");
  cmd->add_option("--relation", o.relation, "syn | ant (default by attack kind)");
  cmd->add_option("--gamma", o.gamma, "words a second-order attack must change")
      ->capture_default_str();
  cmd->add_option("--beam-width", o.beam_width)->capture_default_str();
  cmd->add_option("--budget", o.budget, "scorer queries per example")->capture_default_str();
  cmd->add_option("--sample-size", o.sample_size)->capture_default_str();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------

int cmd_attack(const Globals& g, const AttackOptions& o) {
  auto cfg = make_base_config(o);
  if (o.kind == "first") cfg.goal = secord::GoalKind::kFirstOrder;
  else if (o.kind == "second") cfg.goal = secord::GoalKind::kSecondOrder;
  else throw secord::ConfigError("--kind must be first or second");
  const auto dataset = secord::load_dataset(o.dataset);
  const auto set = secord::run_attack_set(cfg, dataset, o.sample_size, g.seed, g.jobs);
  print_warnings(set.warnings);

  ensure_dir(g.out);
  {
    auto out = open_output(fs::path(g.out) / "results.jsonl");
    for (std::size_t n = 0; n < set.results.size(); ++n)
      out << secord::result_record(set.sample[n], set.results[n]).dump() << '\n';
  }
  std::size_t queries = 0, skipped = 0;
  for (const auto& r : set.results) {
    queries += r.queries.total();
    if (r.status == secord::AttackStatus::kSkipped) ++skipped;
  }
  ordered_json summary;
  summary["command"] = "attack";
  summary["goal"] = secord::goal_name(cfg.goal);
  summary["search"] = secord::search_name(cfg.effective_search());
  summary["epsilon"] = o.epsilon;
  summary["examples"] = set.results.size();
  summary["successes"] = set.successes();
  summary["skipped"] = skipped;
  summary["success_rate"] = set.success_rate;
  summary["mean_queries"] = static_cast<double>(queries) / static_cast<double>(set.results.size());
  summary["warnings"] = set.warnings;
  write_json(fs::path(g.out) / "summary.json", summary);

  ordered_json config = globals_json(g);
  config["command"] = "attack";
  config["attack"] = attack_json(o);
  config["attack"]["kind"] = o.kind;
  config["attack"]["epsilon"] = o.epsilon;
  write_json(fs::path(g.out) / "config.json", config);

  std::cout << "success_rate " << secord::format_double(set.success_rate) << " ("
            << set.successes() << "/" << set.results.size() << ")\n";
  return kOk;
}

std::vector<double> parse_grid(const AttackOptions& o) {
  if (!o.grid.empty()) {
    std::vector<double> v;
    std::stringstream ss(o.grid);
    std::string part;
    while (std::getline(ss, part, ':')) v.push_back(std::stod(part));
    if (v.size() == 1) return v;
    if (v.size() != 3) throw secord::ConfigError("--grid must be EPS or START:STOP:STEP");
    return secord::make_grid(v[0], v[1], v[2]);
  }
  if (o.preset == "default") return secord::make_grid(0.75, 1.0, 0.01);
  if (o.preset == "sst2") return secord::make_grid(0.5, 1.0, 0.02);
  throw secord::ConfigError("--preset must be default or sst2");
}

int cmd_sweep(const Globals& g, const AttackOptions& o) {
  auto first = make_base_config(o);
  first.goal = secord::GoalKind::kFirstOrder;
  auto second = first;
  second.goal = secord::GoalKind::kSecondOrder;
  if (o.relation.empty()) {
    first.relation.reset();
    second.relation.reset();
  }
  if (o.search.empty()) {
    first.search.reset();
    second.search.reset();
  }
  const auto grid = parse_grid(o);
  const auto dataset = secord::load_dataset(o.dataset);
  if (o.sample_size > dataset.size())
    print_warnings({"sample size exceeds dataset size; using the full dataset"});
  const auto curve = secord::sweep(first, second, grid, dataset, o.sample_size, g.seed, g.jobs);

  ensure_dir(g.out);
  {
    auto out = open_output(fs::path(g.out) / "curve.csv");
    secord::write_curve_csv(out, curve);
  }
  write_json(fs::path(g.out) / "curve_meta.json", secord::curve_metadata(curve));
  if (o.svg) open_output(fs::path(g.out) / "curve.svg") << secord::render_curve_svg(curve);

  ordered_json config = globals_json(g);
  config["command"] = "sweep";
  config["sweep"] = attack_json(o);
  config["sweep"]["grid"] = grid;
  write_json(fs::path(g.out) / "config.json", config);

  if (curve.non_monotone) std::cerr << "warning: measured rates are not monotone in epsilon\n";
  std::cout << "points " << curve.points.size() << '\n';
  try {
    const double value = secord::accs(curve);
    std::cout << "accs " << secord::format_double(value) << '\n';
  } catch (const secord::UndefinedMetric& e) {
    std::cout << "accs undefined: " << e.what() << '\n';
  }
  return kOk;
}

struct AccsOptions {
  std::string curve;
  std::string meta;
};

int cmd_accs(const AccsOptions& o) {
  std::ifstream csv(o.curve);
  if (!csv) throw secord::InvalidInput("cannot open " + o.curve);
  std::ifstream meta_in(o.meta);
  if (!meta_in) throw secord::InvalidInput("cannot open " + o.meta);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::parse_error& e) {
    throw secord::ParseError(std::string("bad metadata JSON: ") + e.what());
  }
  const auto curve = secord::curve_from_files(secord::read_curve_csv(csv), meta);
  std::cout << secord::format_double(secord::accs(curve)) << '\n';
  return kOk;
}

struct RocOptions {
  ScorerOptions scoring;
  std::string pairs;
};

int cmd_roc(const Globals& g, const RocOptions& o) {
  auto in = secord::open_input(o.pairs);
  const auto pairs = secord::load_pairs(in);
  const auto scorer = make_similarity(o.scoring);
  std::vector<secord::ScoredPair> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double s = scorer->similarity(p.original, std::span(&p.perturbed, 1))[0];
    scored.push_back({s, p.paraphrase});
  }
  const double auc = secord::roc_auc(scored);
  ensure_dir(g.out);
  {
    auto out = open_output(fs::path(g.out) / "roc.csv");
    out << "threshold,fpr,tpr\n";
    for (const auto& p : secord::roc_curve(scored))
      out << secord::format_double(p.threshold) << ',' << secord::format_double(p.fpr) << ','
          << secord::format_double(p.tpr) << '\n';
  }
  {
    auto out = open_output(fs::path(g.out) / "scores.jsonl");
    for (std::size_t i = 0; i < pairs.size(); ++i)
      out << ordered_json{{"index", i}, {"score", scored[i].score}, {"label", pairs[i].paraphrase ? 1 : 0}}
                 .dump()
          << '\n';
  }
  write_json(fs::path(g.out) / "roc_summary.json",
             {{"pairs", pairs.size()}, {"scorer", scorer->id()}, {"auc", auc}});
  std::cout << "auc " << secord::format_double(auc) << '\n';
  return kOk;
}

struct DatagenOptions {
  std::string input;
  std::string lexicon;
  std::string stopwords;
  std::vector<double> fractions = secord::default_fractions();
};

int cmd_datagen(const Globals& g, const DatagenOptions& o) {
  auto in = secord::open_input(o.input);
  const auto hyps = secord::load_hypotheses(in);
  const auto lex = secord::load_lexicon(o.lexicon);
  const auto stop = make_stopwords(o.stopwords);
  const auto result = secord::generate_adversarial_paraphrases(lex, *stop, hyps, o.fractions, g.seed);
  ensure_dir(g.out);
  {
    auto out = open_output(fs::path(g.out) / "dataset.jsonl");
    for (const auto& p : result.pairs) out << secord::pair_record(p).dump() << '\n';
  }
  {
    auto out = open_output(fs::path(g.out) / "skips.jsonl");
    for (const auto& s : result.skips)
      out << ordered_json{{"hypothesis_index", s.hypothesis_index},
                          {"fraction", s.fraction},
                          {"relation", secord::relation_name(s.relation)},
                          {"reason", s.reason}}
                 .dump()
          << '\n';
  }
  std::size_t short_pairs = 0;
  for (const auto& p : result.pairs)
    if (p.substitutions < p.target) ++short_pairs;
  if (short_pairs)
    std::cerr << "note: " << short_pairs
              << " pairs substituted fewer words than targeted (not enough substitutable words)\n";
  std::cout << "pairs " << result.pairs.size() << " skipped " << result.skips.size() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-substitution attacks and constraint robustness metrics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (flags override)");

  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "parallel attack workers")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();

  AttackOptions attack_opts;
  auto* attack = app.add_subcommand("attack", "run a first- or second-order attack set");
  add_attack_options(attack, attack_opts);
  attack->add_option("--kind", attack_opts.kind, "first | second")->capture_default_str();
  attack->add_option("--epsilon", attack_opts.epsilon, "similarity threshold")
      ->capture_default_str();

  AttackOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "sweep epsilon and build the robustness curve");
  add_attack_options(sweep, sweep_opts);
  sweep->add_option("--grid", sweep_opts.grid, "EPS or START:STOP:STEP (overrides --preset)");
  sweep->add_option("--preset", sweep_opts.preset, "default (0.75:1:0.01) | sst2 (0.5:1:0.02)")
      ->capture_default_str();
  sweep->add_flag("--svg", sweep_opts.svg, "also render curve.svg");

  AccsOptions accs_opts;
  auto* accs = app.add_subcommand("accs", "ACCS of a saved robustness curve");
  accs->add_option("--curve", accs_opts.curve, "curve CSV")->required();
  accs->add_option("--meta", accs_opts.meta, "curve metadata JSON")->required();

  RocOptions roc_opts;
  auto* roc = app.add_subcommand("roc", "ROC AUC of a similarity scorer on labeled pairs");
  add_scorer_options(roc, roc_opts.scoring);
  roc->add_option("--pairs", roc_opts.pairs, "JSONL pairs {original, perturbed, label}")
      ->required();

  DatagenOptions datagen_opts;
  auto* datagen = app.add_subcommand("datagen", "generate synonym/antonym paraphrase pairs");
  datagen->add_option("--input", datagen_opts.input, "JSONL with a hypothesis field")->required();
  datagen->add_option("--lexicon", datagen_opts.lexicon, "synonym/antonym TSV")->required();
  datagen->add_option("--stopwords", datagen_opts.stopwords, "stopword file");
  datagen->add_option("--fractions", datagen_opts.fractions, "substitution fractions")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (attack->parsed()) return cmd_attack(g, attack_opts);
    if (sweep->parsed()) return cmd_sweep(g, sweep_opts);
    if (accs->parsed()) return cmd_accs(accs_opts);
    if (roc->parsed()) return cmd_roc(g, roc_opts);
    if (datagen->parsed()) return cmd_datagen(g, datagen_opts);
  } catch (const secord::UndefinedMetric& e) {
    std::cerr << "UndefinedMetric: " << e.what() << '\n';
    return kUndefinedMetric;
  } catch (const secord::TransportError& e) {
    std::cerr << "TransportError: " << e.what() << '\n';
    return kTransport;
  } catch (const secord::RemoteModelError& e) {
    std::cerr << "RemoteModelError: " << e.what() << '\n';
    return kRemote;
  } catch (const secord::ProtocolError& e) {
    std::cerr << "ProtocolError: " << e.what() << '\n';
    return kRemote;
  } catch (const secord::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << '\n';
    return kUsage;
  } catch (const secord::ParseError& e) {
    std::cerr << "ParseError: " << e.what() << '\n';
    return kBadInput;
  } catch (const secord::InvalidInput& e) {
    std::cerr << "InvalidInput: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
