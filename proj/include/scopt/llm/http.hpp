#pragma once

#include <chrono>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "httplib.h"
#include "scopt/llm/client.hpp"

namespace scopt {

struct HttpProviderConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  std::string model;
  int max_retries = 3;
  double backoff_seconds = 1.0;  // doubled after every retry
  double timeout_seconds = 120.0;
  double min_interval_seconds = 0.0;  // spacing between requests

  static HttpProviderConfig from_env() {
    HttpProviderConfig c;
    auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return std::string(v ? v : "");
    };
    c.endpoint = get("SCOPT_LLM_ENDPOINT");
    c.api_key = get("SCOPT_LLM_API_KEY");
    c.model = get("SCOPT_LLM_MODEL");
    return c;
  }
};

namespace detail {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorKind::InvalidArgument, "endpoint is not a URL: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace detail

/// OpenAI-style chat-completions client. Transport failures, 429 and 5xx
/// replies are retried with exponential backoff; 401/403 are not.
class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {}

  std::string name() const override { return "http"; }

 protected:
  std::string respond(const ChatTranscript& t) override {
    if (cfg_.api_key.empty()) throw Error(ErrorKind::AuthError, "SCOPT_LLM_API_KEY is not set");
    if (cfg_.endpoint.empty()) throw Error(ErrorKind::EnvironmentError, "SCOPT_LLM_ENDPOINT is not set");
    auto url = detail::split_url(cfg_.endpoint);

    json body = {{"model", t.model.empty() ? cfg_.model : t.model}, {"temperature", t.temperature}};
    body["messages"] = json::array();
    for (const auto& m : t.messages) body["messages"].push_back({{"role", m.role}, {"content", m.text}});
    const std::string payload = body.dump();

    httplib::Client cli(url.origin);
    auto secs = static_cast<time_t>(cfg_.timeout_seconds);
    cli.set_connection_timeout(secs, 0);
    cli.set_read_timeout(secs, 0);
    cli.set_write_timeout(secs, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + cfg_.api_key}};

    double backoff = cfg_.backoff_seconds;
    std::string last_failure;
    bool rate_limited = false;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        backoff *= 2;
      }
      pace();
      auto res = cli.Post(url.path, headers, payload, "application/json");
      if (!res) {
        last_failure = "transport error: " + httplib::to_string(res.error());
        rate_limited = false;
        continue;
      }
      if (res->status == 401 || res->status == 403)
        throw Error(ErrorKind::AuthError, "endpoint rejected the credential (HTTP " + std::to_string(res->status) + ")");
      if (res->status == 429 || res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status);
        rate_limited = res->status == 429;
        continue;
      }
      if (res->status != 200)
        throw Error(ErrorKind::EnvironmentError, "HTTP " + std::to_string(res->status) + ": " + res->body);
      try {
        return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw Error(ErrorKind::EnvironmentError, std::string("malformed completion reply: ") + e.what());
      }
    }
    throw Error(rate_limited ? ErrorKind::RateLimited : ErrorKind::Timeout,
                last_failure + " after " + std::to_string(cfg_.max_retries) + " retries");
  }

 private:
  void pace() {
    if (cfg_.min_interval_seconds <= 0) return;
    std::lock_guard lock(mu_);
    auto now = std::chrono::steady_clock::now();
    auto ready = last_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg_.min_interval_seconds));
    if (now < ready) std::this_thread::sleep_until(ready);
    last_ = std::chrono::steady_clock::now();
  }

  HttpProviderConfig cfg_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point last_{};
};

}  // namespace scopt
