#pragma once

// In-process HTTP server speaking the remote scorer protocol, for client
// tests. Handlers can be replaced per test.

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace secord::testing {

class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  StubServer() {
    server_.Post("/similarity", [this](const auto& req, auto& res) { dispatch("/similarity", req, res); });
    server_.Post("/word_logprob", [this](const auto& req, auto& res) { dispatch("/word_logprob", req, res); });
    server_.Post("/classify", [this](const auto& req, auto& res) { dispatch("/classify", req, res); });
    server_.Get("/meta", [this](const auto& req, auto& res) { dispatch("/meta", req, res); });
    server_.set_tcp_nodelay(true);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  void on(const std::string& path, Handler h) {
    std::lock_guard lock(mu_);
    handlers_[path] = std::move(h);
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits(const std::string& path) const {
    std::lock_guard lock(mu_);
    auto it = hits_.find(path);
    return it == hits_.end() ? 0 : it->second;
  }

  static void reply(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

 private:
  void dispatch(const std::string& path, const httplib::Request& req, httplib::Response& res) {
    Handler h;
    {
      std::lock_guard lock(mu_);
      ++hits_[path];
      if (auto it = handlers_.find(path); it != handlers_.end()) h = it->second;
    }
    if (h) {
      h(req, res);
    } else {
      reply(res, {{"error", "no handler for " + path}}, 404);
    }
  }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::map<std::string, Handler> handlers_;
  std::map<std::string, int> hits_;
};

}  // namespace secord::testing
