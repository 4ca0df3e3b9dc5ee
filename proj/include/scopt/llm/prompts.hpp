#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scopt/util/error.hpp"

namespace scopt {

enum class PromptKind { Base, WithDemonstration, CompileFeedback, TestAndRankFeedback };

inline const char* to_string(PromptKind k) {
  switch (k) {
    case PromptKind::Base: return "Base";
    case PromptKind::WithDemonstration: return "WithDemonstration";
    case PromptKind::CompileFeedback: return "CompileFeedback";
    case PromptKind::TestAndRankFeedback: return "TestAndRankFeedback";
  }
  return "?";
}

struct Demonstration {
  std::string original;
  std::string optimized;
};

struct FeedbackExample {
  int id = 0;
  std::string code;
};

/// Slot values. Which ones are required depends on the kind; unused slots
/// are ignored.
struct PromptSlots {
  std::optional<std::string> target_code;
  std::vector<Demonstration> demonstrations;
  std::optional<std::string> last_code;
  std::optional<std::string> error;
  std::vector<FeedbackExample> available;  // in rank order
  std::vector<FeedbackExample> failed;
  std::optional<std::string> rank;  // e.g. "2 > 0 > 1"
};

namespace prompt_text {

inline constexpr const char* kRules =
    "Here are some generation rules:\n"
    "1. Provide one optimized code.\n"
    "2. Do not include the original C program in your response.\n"
    "3. Do not define new function. \n"
    "4. Existed variables do not need to be redefined. If you generate new variable for computing, please use the "
    "double type. \n"
    "5. Put your code in markdown code block.";

inline constexpr const char* kBaseHead =
    "As a compiler, given the C program below, improve its performance using meaning-preserving loop "
    "transformation methods:\n\n";

inline constexpr const char* kDemoLearn =
    "Please analyze what meaning-preserving loop transformation methods are used in above examples, and tell me "
    "what you learn.\n\n"
    "please use appropriate methods you learn from examples to improve its performance:\n\n";

inline constexpr const char* kCompileMiddle =
    "did a wrong transformation from the source code, resulting in a compilation error. \n"
    "This is the compiler error message:\n\n";

inline constexpr const char* kCompileTail = "Please check the optimized code and regenerate it.";

inline constexpr const char* kRankMiddle =
    "The above examples are optimized by LLMs using meaning-preserving loop transformation methods. \n"
    "Available examples pass compilation, execution and equivalence checks; failed examples do not. \n"
    "Here is the original code:\n\n";

inline constexpr const char* kRankTask =
    "Task:\n"
    "Analyze why available examples succeeded and failed examples broke correctness. Improve the performance of "
    "original code using the highest-impact meaning-preserving loop transformation methods learnt from the ranked "
    "examples.";

}  // namespace prompt_text

namespace detail {

inline const std::string& require(const std::optional<std::string>& slot, const char* name) {
  if (!slot) throw Error(ErrorKind::MissingSlot, name);
  return *slot;
}

}  // namespace detail

/// "Failed: 3, 4", or "Failed: none" when nothing failed.
inline std::string failed_list(const std::vector<FeedbackExample>& failed) {
  std::string s;
  for (const auto& f : failed) s += (s.empty() ? "" : ", ") + std::to_string(f.id);
  return "Failed: " + (s.empty() ? std::string("none") : s);
}

/// The kind actually rendered: rank feedback with no passing candidate
/// falls back to the base prompt.
inline PromptKind effective_kind(PromptKind kind, const PromptSlots& slots) {
  if (kind == PromptKind::TestAndRankFeedback && slots.available.empty()) return PromptKind::Base;
  return kind;
}

inline std::string render_prompt(PromptKind kind, const PromptSlots& slots) {
  using namespace prompt_text;
  std::string out;
  switch (effective_kind(kind, slots)) {
    case PromptKind::Base:
      out = kBaseHead + detail::require(slots.target_code, "target_code") + "\n\n";
      break;
    case PromptKind::WithDemonstration: {
      if (slots.demonstrations.empty()) throw Error(ErrorKind::MissingSlot, "ori_code/opt_code");
      const auto& target = detail::require(slots.target_code, "target_code");
      for (const auto& d : slots.demonstrations)
        out += "// original code\n\n" + d.original + "\n\n// optimized code\n\n" + d.optimized + "\n\n";
      out += kDemoLearn + target + "\n\n";
      break;
    }
    case PromptKind::CompileFeedback: {
      const auto& last = detail::require(slots.last_code, "last_code");
      const auto& error = detail::require(slots.error, "error");
      out = "This optimized version:\n\n" + last + "\n\n" + kCompileMiddle + error + "\n\n" + kCompileTail + "\n\n";
      break;
    }
    case PromptKind::TestAndRankFeedback: {
      const auto& target = detail::require(slots.target_code, "target_code");
      const auto& rank = detail::require(slots.rank, "rank");
      for (const auto& a : slots.available)
        out += "Available Example [" + std::to_string(a.id) + "]:\n\n" + a.code + "\n\n";
      for (const auto& f : slots.failed)
        out += "Failed Example [" + std::to_string(f.id) + "]:\n\n" + f.code + "\n\n";
      out += kRankMiddle + target + "\n\n";
      out += "Performance rank result (\">\" means better than):\n\n" + rank + "\n\n";
      out += failed_list(slots.failed) + "\n\n" + kRankTask + "\n\n";
      break;
    }
  }
  return out + kRules;
}

}  // namespace scopt
