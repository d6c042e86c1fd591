#pragma once

// HTTP/JSON client for externally served scorers.
//
//   POST /similarity    {"original": s, "candidates": [s]}        -> {"scores": [f]}
//   POST /word_logprob  {"queries": [{"text": s, "word_index": i}]} -> {"logprobs": [f]}
//   POST /classify      {"texts": [s]}                            -> {"labels": [i], "probs": [[f]]}
//   GET  /meta          -> server metadata (model ids, score ranges)
//
// Errors come back as a non-200 status with {"error": s}. For /word_logprob
// the text is the token sequence joined by single spaces, so splitting on
// whitespace recovers the word positions.

#include <chrono>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "secord/error.hpp"
#include "secord/scoring.hpp"

namespace secord {

struct RemoteOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8765"
  int max_retries = 2;   // extra attempts after the first
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds retry_backoff{50};
  std::size_t max_batch = 64;
};

class RemoteClient {
 public:
  explicit RemoteClient(RemoteOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) throw ConfigError("remote endpoint URL is empty");
    if (options_.max_batch == 0) throw ConfigError("max batch size must be >= 1");
    if (options_.max_retries < 0) throw ConfigError("retry count must be >= 0");
  }

  const RemoteOptions& options() const { return options_; }

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const {
    return request(path, &body);
  }

  nlohmann::json get(const std::string& path) const { return request(path, nullptr); }

 private:
  nlohmann::json request(const std::string& path, const nlohmann::json* body) const {
    const std::string payload = body ? body->dump() : std::string();
    std::string last_transport_error;
    int last_status = 0;
    std::string last_message;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(options_.retry_backoff * attempt);
      auto client = acquire();
      httplib::Result res = body ? client->Post(path, payload, "application/json")
                                 : client->Get(path);
      if (!res) {
        last_transport_error = httplib::to_string(res.error());
        last_status = 0;
        continue;  // connection is dropped, not returned to the pool
      }
      release(std::move(client));
      if (res->status == 200) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
          throw ProtocolError(path + ": malformed JSON response: " + e.what());
        }
      }
      last_status = res->status;
      last_message = error_message(res->body);
      if (res->status < 500) break;
    }
    if (last_status == 0)
      throw TransportError(options_.base_url + path + ": " + last_transport_error);
    throw RemoteModelError(last_status, last_message);
  }

  static std::string error_message(const std::string& body) {
    auto parsed = nlohmann::json::parse(body, nullptr, false);
    if (parsed.is_object() && parsed.contains("error") && parsed["error"].is_string())
      return parsed["error"].get<std::string>();
    return body;
  }

  std::unique_ptr<httplib::Client> acquire() const {
    {
      std::lock_guard lock(mu_);
      if (!idle_.empty()) {
        auto c = std::move(idle_.back());
        idle_.pop_back();
        return c;
      }
    }
    auto c = std::make_unique<httplib::Client>(options_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    c->set_connection_timeout(secs.count(), usecs.count());
    c->set_read_timeout(secs.count(), usecs.count());
    c->set_write_timeout(secs.count(), usecs.count());
    c->set_keep_alive(true);
    c->set_tcp_nodelay(true);
    return c;
  }

  void release(std::unique_ptr<httplib::Client> c) const {
    std::lock_guard lock(mu_);
    idle_.push_back(std::move(c));
  }

  RemoteOptions options_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<httplib::Client>> idle_;
};

namespace detail {

inline const nlohmann::json& require_array(const nlohmann::json& j, const char* key,
                                           std::size_t expected) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_array())
    throw ProtocolError(std::string("response is missing array '") + key + "'");
  if (j[key].size() != expected)
    throw ProtocolError(std::string("'") + key + "' has " + std::to_string(j[key].size()) +
                        " entries, expected " + std::to_string(expected));
  return j[key];
}

inline double require_number(const nlohmann::json& v) {
  if (!v.is_number()) throw ProtocolError("expected a number, got " + v.dump());
  return v.get<double>();
}

template <typename Fn>
void for_each_chunk(std::size_t n, std::size_t chunk, Fn&& fn) {
  for (std::size_t b = 0; b < n; b += chunk) fn(b, std::min(n, b + chunk));
}

}  // namespace detail

class RemoteSimilarity final : public SimilarityScorer {
 public:
  RemoteSimilarity(std::shared_ptr<const RemoteClient> client, ScoreRange range,
                   std::string name = "remote-similarity")
      : client_(std::move(client)), range_(range), name_(std::move(name)) {}

  std::vector<double> similarity(const std::string& original,
                                 std::span<const std::string> candidates) const override {
    std::vector<double> out;
    out.reserve(candidates.size());
    detail::for_each_chunk(candidates.size(), client_->options().max_batch, [&](std::size_t b, std::size_t e) {
      nlohmann::json body = {{"original", original},
                             {"candidates", std::vector<std::string>(candidates.begin() + b,
                                                                     candidates.begin() + e)}};
      auto resp = client_->post("/similarity", body);
      for (const auto& v : detail::require_array(resp, "scores", e - b))
        out.push_back(detail::require_number(v));
    });
    return out;
  }

  ScoreRange range() const override { return range_; }
  std::string id() const override { return name_; }

 private:
  std::shared_ptr<const RemoteClient> client_;
  ScoreRange range_;
  std::string name_;
};

class RemoteLogProb final : public WordLogProbScorer {
 public:
  explicit RemoteLogProb(std::shared_ptr<const RemoteClient> client,
                         std::string name = "remote-logprob")
      : client_(std::move(client)), name_(std::move(name)) {}

  std::vector<double> word_logprob(std::span<const LogProbQuery> queries) const override {
    std::vector<double> out;
    out.reserve(queries.size());
    detail::for_each_chunk(queries.size(), client_->options().max_batch, [&](std::size_t b, std::size_t e) {
      nlohmann::json qs = nlohmann::json::array();
      for (std::size_t i = b; i < e; ++i) {
        std::string text;
        for (const auto& w : queries[i].words) {
          if (!text.empty()) text += ' ';
          text += w;
        }
        qs.push_back({{"text", text}, {"word_index", queries[i].index}});
      }
      auto resp = client_->post("/word_logprob", {{"queries", qs}});
      for (const auto& v : detail::require_array(resp, "logprobs", e - b))
        out.push_back(detail::require_number(v));
    });
    return out;
  }

  std::string id() const override { return name_; }

 private:
  std::shared_ptr<const RemoteClient> client_;
  std::string name_;
};

class RemoteClassifier final : public VictimClassifier {
 public:
  explicit RemoteClassifier(std::shared_ptr<const RemoteClient> client,
                            std::string name = "remote-classifier")
      : client_(std::move(client)), name_(std::move(name)) {}

  std::vector<Classification> classify(std::span<const std::string> texts) const override {
    std::vector<Classification> out;
    out.reserve(texts.size());
    detail::for_each_chunk(texts.size(), client_->options().max_batch, [&](std::size_t b, std::size_t e) {
      nlohmann::json body = {
          {"texts", std::vector<std::string>(texts.begin() + b, texts.begin() + e)}};
      auto resp = client_->post("/classify", body);
      const auto& labels = detail::require_array(resp, "labels", e - b);
      const auto& probs = detail::require_array(resp, "probs", e - b);
      for (std::size_t i = 0; i < e - b; ++i) {
        if (!labels[i].is_number_integer())
          throw ProtocolError("label is not an integer: " + labels[i].dump());
        if (!probs[i].is_array() || probs[i].empty())
          throw ProtocolError("probability entry is not a non-empty array");
        Classification c;
        c.label = labels[i].get<int>();
        for (const auto& p : probs[i]) c.probs.push_back(detail::require_number(p));
        if (c.label < 0 || static_cast<std::size_t>(c.label) >= c.probs.size())
          throw ProtocolError("label " + std::to_string(c.label) + " out of range");
        out.push_back(std::move(c));
      }
    });
    return out;
  }

  std::string id() const override { return name_; }

 private:
  std::shared_ptr<const RemoteClient> client_;
  std::string name_;
};

}  // namespace secord
