#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/util/error.hpp"
#include "scopt/util/process.hpp"
#include "scopt/util/rng.hpp"

namespace scopt {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string text;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatTranscript {
  std::vector<ChatMessage> messages;
  std::string model;
  double temperature = 0.0;

  void user(std::string text) { messages.push_back({"user", std::move(text)}); }
  const ChatMessage* last_user() const {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
      if (it->role == "user") return &*it;
    return nullptr;
  }
};

/// Hash of the request content (roles and texts, in order), printed as 16
/// hex digits. Model and temperature are not part of it so fixtures survive
/// a model rename.
inline std::string request_hash(const ChatTranscript& t) {
  std::uint64_t h = fnv1a64("");
  for (const auto& m : t.messages) {
    h = fnv1a64(m.role, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(m.text, h);
    h = fnv1a64(std::string_view("\x1e", 1), h);
  }
  return hex64(h);
}

class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string name() const = 0;

  /// Sends the transcript, appends the assistant reply to it and returns
  /// the reply text.
  std::string complete(ChatTranscript& t) {
    std::string reply = respond(t);
    t.messages.push_back({"assistant", reply});
    return reply;
  }

 protected:
  virtual std::string respond(const ChatTranscript& t) = 0;
};

/// Content of the first fenced block, without the fence line and its
/// optional language tag.
inline std::string extract_code_block(std::string_view response) {
  auto fence_at = [&](std::size_t from) {
    for (std::size_t pos = from; pos < response.size();) {
      std::size_t line_end = response.find('\n', pos);
      if (line_end == std::string_view::npos) line_end = response.size();
      std::size_t p = pos;
      while (p < line_end && (response[p] == ' ' || response[p] == '\t')) ++p;
      if (response.substr(p, 3) == "```") return std::pair{pos, line_end};
      pos = line_end + 1;
    }
    return std::pair{std::string_view::npos, std::string_view::npos};
  };
  auto [open, open_end] = fence_at(0);
  if (open == std::string_view::npos) throw Error(ErrorKind::NoCodeBlock, "response has no fenced code block");
  std::size_t body = open_end + 1;
  if (body > response.size()) throw Error(ErrorKind::NoCodeBlock, "unterminated code block");
  auto [close, close_end] = fence_at(body);
  (void)close_end;
  if (close == std::string_view::npos) throw Error(ErrorKind::NoCodeBlock, "unterminated code block");
  return std::string(response.substr(body, close - body));
}

/// One recorded exchange: the hash of the request (or "*" to match any
/// request) and the reply.
struct FixtureEntry {
  std::string request_hash;
  std::string response;
};

inline json fixture_to_json(const std::vector<FixtureEntry>& entries) {
  json doc = document("llm-fixture");
  doc["entries"] = json::array();
  for (const auto& e : entries) doc["entries"].push_back({{"request_hash", e.request_hash}, {"response", e.response}});
  return doc;
}

inline std::vector<FixtureEntry> fixture_from_json(const json& doc) {
  std::vector<FixtureEntry> out;
  for (const auto& e : doc.at("entries"))
    out.push_back({e.at("request_hash").get<std::string>(), e.at("response").get<std::string>()});
  return out;
}

/// Replays a fixture. Each entry is consumed once: an exact hash match wins,
/// otherwise the earliest unused wildcard. Nothing left means Timeout, the
/// same outcome as a model that never answers.
class ReplayProvider : public LlmProvider {
 public:
  explicit ReplayProvider(std::vector<FixtureEntry> entries)
      : entries_(std::move(entries)), used_(entries_.size(), false) {}

  static std::unique_ptr<ReplayProvider> from_file(const fs::path& path) {
    return std::make_unique<ReplayProvider>(fixture_from_json(parse_document(read_file(path), "llm-fixture")));
  }

  std::string name() const override { return "replay"; }
  std::size_t remaining() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (bool u : used_) n += !u;
    return n;
  }

 protected:
  std::string respond(const ChatTranscript& t) override {
    const std::string h = request_hash(t);
    std::lock_guard lock(mu_);
    for (int pass = 0; pass < 2; ++pass) {
      const std::string want = pass == 0 ? h : "*";
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (used_[i] || entries_[i].request_hash != want) continue;
        used_[i] = true;
        return entries_[i].response;
      }
    }
    throw Error(ErrorKind::Timeout, "replay fixture has no response for request " + h);
  }

 private:
  std::vector<FixtureEntry> entries_;
  std::vector<bool> used_;
  mutable std::mutex mu_;
};

/// Forwards to another provider and appends every exchange to a JSON-lines
/// audit log, from which fixtures can be cut.
class RecordingProvider : public LlmProvider {
 public:
  RecordingProvider(std::unique_ptr<LlmProvider> inner, fs::path log)
      : inner_(std::move(inner)), log_(std::move(log)) {
    if (log_.has_parent_path()) fs::create_directories(log_.parent_path());
  }

  std::string name() const override { return inner_->name(); }

 protected:
  std::string respond(const ChatTranscript& t) override {
    ChatTranscript copy = t;
    std::string reply;
    std::string failure;
    try {
      reply = inner_->complete(copy);
    } catch (const Error& e) {
      failure = e.what();
      write(t, reply, failure);
      throw;
    }
    write(t, reply, failure);
    return reply;
  }

 private:
  void write(const ChatTranscript& t, const std::string& reply, const std::string& failure) {
    json line = {{"request_hash", request_hash(t)}, {"provider", inner_->name()}, {"model", t.model},
                 {"temperature", t.temperature}};
    line["messages"] = json::array();
    for (const auto& m : t.messages) line["messages"].push_back({{"role", m.role}, {"text", m.text}});
    if (failure.empty())
      line["response"] = reply;
    else
      line["error"] = failure;
    std::lock_guard lock(mu_);
    std::ofstream out(log_, std::ios::app);
    if (!out) throw Error(ErrorKind::IoError, "cannot append to " + log_.string());
    out << line.dump() << "\n";
  }

  std::unique_ptr<LlmProvider> inner_;
  fs::path log_;
  std::mutex mu_;
};

/// Fixture entries from an audit log, in log order; failed exchanges are
/// skipped.
inline std::vector<FixtureEntry> fixture_from_audit_log(const fs::path& log) {
  std::vector<FixtureEntry> out;
  std::ifstream in(log);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + log.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line);
    if (j.contains("response"))
      out.push_back({j.at("request_hash").get<std::string>(), j.at("response").get<std::string>()});
  }
  return out;
}

}  // namespace scopt
