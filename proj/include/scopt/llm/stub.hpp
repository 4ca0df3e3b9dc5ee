#pragma once

#include <string>

#include "scopt/llm/client.hpp"
#include "scopt/optimize/backend.hpp"

namespace scopt {

/// Offline stand-in for a model: takes the last marker-delimited region of
/// the last user message, puts it into the target program and answers with
/// the builtin optimizer's version of it. Regions it cannot analyse come
/// back unchanged.
class StubProvider : public LlmProvider {
 public:
  explicit StubProvider(std::string target_program) : program_(std::move(target_program)) {}

  std::string name() const override { return "stub"; }

 protected:
  std::string respond(const ChatTranscript& t) override {
    const ChatMessage* m = t.last_user();
    if (!m) return "No request.";
    const std::string& text = m->text;
    std::size_t end = text.rfind("#pragma endscop");
    std::size_t begin = end == std::string::npos ? end : text.rfind("#pragma scop", end);
    if (begin == std::string::npos) return "No region to optimize.";
    std::size_t body = text.find('\n', begin);
    std::string region = body == std::string::npos || body > end ? "" : text.substr(body + 1, end - body - 1);
    std::string answer = region;
    try {
      answer = optimize_builtin(replace_scop_region(program_, region)).region;
    } catch (const Error&) {
    }
    return "```c\n#pragma scop\n" + answer + "#pragma endscop\n```\n";
  }

 private:
  std::string program_;
};

}  // namespace scopt
