#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "scopt/llm/client.hpp"
#include "scopt/llm/http.hpp"
#include "scopt/llm/prompts.hpp"
#include "scopt/llm/stub.hpp"
#include "support/fixtures.hpp"
#include "support/prompt_fixtures.hpp"

using namespace scopt;

namespace {

constexpr PromptKind kAllKinds[] = {PromptKind::Base, PromptKind::WithDemonstration, PromptKind::CompileFeedback,
                                    PromptKind::TestAndRankFeedback};

ChatTranscript one_message(const std::string& text) {
  ChatTranscript t;
  t.user(text);
  return t;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

// Local chat-completions endpoint that answers from a script of statuses.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int n = hits_++;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      int status = n < static_cast<int>(statuses_.size()) ? statuses_[static_cast<std::size_t>(n)] : 200;
      res.status = status;
      if (status == 200)
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"```c\nA[0] = 1;\n```"}}]})",
                        "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  HttpProviderConfig config() const {
    HttpProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.api_key = "test-key";
    c.model = "test-model";
    c.backoff_seconds = 0.01;
    c.timeout_seconds = 5;
    return c;
  }
  int hits() const { return hits_; }
  std::string last_body() const { return last_body_; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::vector<int> statuses_;
  std::atomic<int> hits_{0};
  std::string last_body_, last_auth_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

// ------------------------------------------------------------------- prompts

TEST(Prompts, AllKindsMatchTheGoldens) {
  for (auto kind : kAllKinds) EXPECT_EQ(render_prompt(kind, test::golden_slots(kind)), test::golden_file(kind)) << to_string(kind);
}

TEST(Prompts, RenderingIsPure) {
  for (auto kind : kAllKinds)
    EXPECT_EQ(render_prompt(kind, test::golden_slots(kind)), render_prompt(kind, test::golden_slots(kind)));
}

TEST(Prompts, BaseCarriesTheGenerationRules) {
  PromptSlots s;
  s.target_code = test::kSyrkScop;
  auto text = render_prompt(PromptKind::Base, s);
  EXPECT_NE(text.find("Do not define new function"), std::string::npos);
  EXPECT_NE(text.find(test::kSyrkScop), std::string::npos);
}

TEST(Prompts, EveryKindEndsWithTheFiveRules) {
  for (auto kind : kAllKinds) {
    auto text = render_prompt(kind, test::golden_slots(kind));
    const std::string rules = prompt_text::kRules;
    ASSERT_GE(text.size(), rules.size());
    EXPECT_EQ(text.substr(text.size() - rules.size()), rules) << to_string(kind);
    EXPECT_EQ(count(text, "Here are some generation rules:"), 1u);
  }
}

TEST(Prompts, ThreeDemonstrationsPrecedeTheTarget) {
  auto slots = test::golden_slots(PromptKind::WithDemonstration);
  auto text = render_prompt(PromptKind::WithDemonstration, slots);
  EXPECT_EQ(count(text, "// original code"), 3u);
  EXPECT_EQ(count(text, "// optimized code"), 3u);
  std::size_t target = text.rfind(*slots.target_code);
  std::size_t last_demo = text.rfind("// optimized code");
  EXPECT_LT(last_demo, target);
  for (const auto& d : slots.demonstrations) EXPECT_LT(text.find(d.original), text.find(d.optimized));
}

TEST(Prompts, RankFeedbackWithoutPassingCandidatesFallsBackToBase) {
  auto slots = test::golden_slots(PromptKind::TestAndRankFeedback);
  slots.available.clear();
  EXPECT_EQ(effective_kind(PromptKind::TestAndRankFeedback, slots), PromptKind::Base);
  PromptSlots base;
  base.target_code = slots.target_code;
  EXPECT_EQ(render_prompt(PromptKind::TestAndRankFeedback, slots), render_prompt(PromptKind::Base, base));
}

TEST(Prompts, FailedListFormatting) {
  EXPECT_EQ(failed_list({}), "Failed: none");
  EXPECT_EQ(failed_list({{3, ""}}), "Failed: 3");
  EXPECT_EQ(failed_list({{3, ""}, {5, ""}, {6, ""}}), "Failed: 3, 5, 6");
}

TEST(Prompts, MissingSlotsAreReported) {
  auto expect_missing = [](PromptKind k, const PromptSlots& s) {
    try {
      render_prompt(k, s);
      ADD_FAILURE() << to_string(k) << " rendered without its slots";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::MissingSlot);
    }
  };
  expect_missing(PromptKind::Base, {});
  auto demo = test::golden_slots(PromptKind::WithDemonstration);
  demo.demonstrations.clear();
  expect_missing(PromptKind::WithDemonstration, demo);
  auto ce = test::golden_slots(PromptKind::CompileFeedback);
  ce.error.reset();
  expect_missing(PromptKind::CompileFeedback, ce);
  auto rank = test::golden_slots(PromptKind::TestAndRankFeedback);
  rank.rank.reset();
  expect_missing(PromptKind::TestAndRankFeedback, rank);
}

// ---------------------------------------------------------------- code blocks

TEST(CodeBlock, SingleFencedBlock) {
  EXPECT_EQ(extract_code_block("Here you go:\n```c\nA[i] = 0;\nB[i] = 1;\n```\nDone."), "A[i] = 0;\nB[i] = 1;\n");
}

TEST(CodeBlock, FenceWithoutLanguageTag) { EXPECT_EQ(extract_code_block("```\nx = 1;\n```"), "x = 1;\n"); }

TEST(CodeBlock, ProseOnlyHasNoBlock) {
  try {
    extract_code_block("I would interchange the loops.");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCodeBlock);
  }
}

TEST(CodeBlock, FirstOfTwoBlocksWins) {
  EXPECT_EQ(extract_code_block("```c\nfirst;\n```\ntext\n```c\nsecond;\n```\n"), "first;\n");
}

TEST(CodeBlock, UnterminatedBlockIsRejected) {
  EXPECT_THROW(extract_code_block("```c\nA[i] = 0;\n"), Error);
}

// ------------------------------------------------------------------ providers

TEST(Transcript, DefaultsToTemperatureZero) {
  ChatTranscript t;
  EXPECT_EQ(t.temperature, 0.0);
}

TEST(Transcript, RequestHashCoversRolesAndText) {
  auto a = one_message("x");
  auto b = one_message("y");
  ChatTranscript c;
  c.messages.push_back({"system", "x"});
  EXPECT_NE(request_hash(a), request_hash(b));
  EXPECT_NE(request_hash(a), request_hash(c));
  EXPECT_EQ(request_hash(a), request_hash(one_message("x")));
  EXPECT_EQ(request_hash(a).size(), 16u);
}

TEST(Replay, ReturnsRecordedTextAndAppendsIt) {
  auto t = one_message("optimize this");
  ReplayProvider p({{request_hash(t), "recorded"}});
  EXPECT_EQ(p.complete(t), "recorded");
  ASSERT_EQ(t.messages.size(), 2u);
  EXPECT_EQ(t.messages[1].role, "assistant");
  EXPECT_EQ(t.messages[1].text, "recorded");
}

TEST(Replay, ExactHashBeatsWildcard) {
  auto t = one_message("q");
  ReplayProvider p({{"*", "wild"}, {request_hash(t), "exact"}});
  EXPECT_EQ(p.complete(t), "exact");
  auto u = one_message("other");
  EXPECT_EQ(p.complete(u), "wild");
}

TEST(Replay, ExhaustedFixtureTimesOut) {
  ReplayProvider p(std::vector<FixtureEntry>{{"*", "only"}});
  auto t = one_message("a");
  p.complete(t);
  auto u = one_message("b");
  try {
    p.complete(u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Timeout);
  }
}

TEST(Replay, SameFixtureSameAnswers) {
  std::vector<FixtureEntry> fx{{"*", "one"}, {"*", "two"}};
  for (int rep = 0; rep < 3; ++rep) {
    ReplayProvider p(fx);
    auto a = one_message("a");
    auto b = one_message("b");
    EXPECT_EQ(p.complete(a), "one");
    EXPECT_EQ(p.complete(b), "two");
  }
}

TEST(Replay, FixtureFileRoundTrip) {
  ScratchDir dir;
  std::vector<FixtureEntry> fx{{"0123456789abcdef", "r1"}, {"*", "r2"}};
  write_file(dir.path() / "f.json", dump_document(fixture_to_json(fx)));
  auto p = ReplayProvider::from_file(dir.path() / "f.json");
  EXPECT_EQ(p->remaining(), 2u);
  auto t = one_message("zzz");
  EXPECT_EQ(p->complete(t), "r2");
}

TEST(Recorder, AuditLogReplaysTheSession) {
  ScratchDir dir;
  auto log = dir.path() / "audit.jsonl";
  std::vector<FixtureEntry> fx{{"*", "first"}, {"*", "second"}};
  {
    RecordingProvider rec(std::make_unique<ReplayProvider>(fx), log);
    auto a = one_message("a");
    auto b = one_message("b");
    rec.complete(a);
    rec.complete(b);
    auto c = one_message("c");
    EXPECT_THROW(rec.complete(c), Error);  // logged as a failure
  }
  auto captured = fixture_from_audit_log(log);
  ASSERT_EQ(captured.size(), 2u);
  EXPECT_EQ(captured[0].request_hash, request_hash(one_message("a")));
  ReplayProvider again(captured);
  auto b = one_message("b");
  EXPECT_EQ(again.complete(b), "second");
}

TEST(Stub, OptimizesTheLastRegionOfTheRequest) {
  const std::string program =
      "#define N 64\ndouble A[N][N], B[N][N];\nint main(void) {\n  int i, j;\n#pragma scop\n"
      "  for (i = 0; i < N; i++)\n    for (j = 0; j < N; j++)\n      A[i][j] = B[i][j] * 2;\n#pragma endscop\n"
      "  return 0;\n}\n";
  StubProvider stub(program);
  PromptSlots s;
  s.target_code = extract_scop_region(program).scop;
  s.target_code = "#pragma scop\n" + *s.target_code + "#pragma endscop";
  s.demonstrations = {{"#pragma scop\nx = 1;\n#pragma endscop", "#pragma scop\nx = 1;\n#pragma endscop"}};
  auto t = one_message(render_prompt(PromptKind::WithDemonstration, s));
  auto code = extract_code_block(stub.complete(t));
  EXPECT_NE(code.find("#pragma omp parallel for"), std::string::npos);
  EXPECT_NE(code.find("t1 < (N + 31) / 32"), std::string::npos);
}

TEST(Http, MissingCredentialFailsBeforeAnyRequest) {
  FakeEndpoint ep({});
  auto cfg = ep.config();
  cfg.api_key.clear();
  HttpProvider p(cfg);
  auto t = one_message("x");
  try {
    p.complete(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AuthError);
  }
  EXPECT_EQ(ep.hits(), 0);
}

TEST(Http, SendsAChatCompletionRequest) {
  FakeEndpoint ep({});
  HttpProvider p(ep.config());
  auto t = one_message("hello");
  EXPECT_EQ(p.complete(t), "```c\nA[0] = 1;\n```");
  auto body = json::parse(ep.last_body());
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(ep.last_auth(), "Bearer test-key");
}

TEST(Http, TransientFailuresAreRetried) {
  FakeEndpoint ep({503, 502});
  HttpProvider p(ep.config());
  auto t = one_message("x");
  EXPECT_EQ(p.complete(t), "```c\nA[0] = 1;\n```");
  EXPECT_EQ(ep.hits(), 3);
}

TEST(Http, PersistentRateLimitGivesUp) {
  FakeEndpoint ep({429, 429, 429, 429, 429});
  HttpProvider p(ep.config());
  auto t = one_message("x");
  try {
    p.complete(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RateLimited);
  }
  EXPECT_EQ(ep.hits(), 4);  // one try plus three retries
}

TEST(Http, RejectedCredentialIsNotRetried) {
  FakeEndpoint ep({401});
  HttpProvider p(ep.config());
  auto t = one_message("x");
  try {
    p.complete(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AuthError);
  }
  EXPECT_EQ(ep.hits(), 1);
}

TEST(Http, UnreachableEndpointTimesOut) {
  HttpProviderConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.api_key = "k";
  c.max_retries = 1;
  c.backoff_seconds = 0.01;
  c.timeout_seconds = 2;
  HttpProvider p(c);
  auto t = one_message("x");
  try {
    p.complete(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Timeout);
  }
}
