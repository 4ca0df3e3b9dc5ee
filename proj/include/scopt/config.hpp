#pragma once

#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "scopt/io/document.hpp"
#include "scopt/llm/client.hpp"
#include "scopt/llm/stub.hpp"
#include "scopt/optimize/dataset.hpp"
#include "scopt/pipeline/pipeline.hpp"
#ifdef SCOPT_HAVE_HTTP
#include "scopt/llm/http.hpp"
#endif

namespace scopt {

/// Every tunable of the tool. Layers apply in the order defaults, config
/// file, command-line flags, environment (SCOPT_<KEY>, dots as
/// underscores), each overriding the previous.
struct Config {
  std::string cc = "gcc";
  std::vector<std::string> cflags{"-O3", "-fopenmp"};
  double run_limit = 120;
  double baseline_limit = 600;
  std::string omp_threads;
  std::string gcov = "gcov";
  int coverage_saturation = 50;
  int coverage_max_inputs = 600;

  std::string llm_provider = "http";  // http | replay | stub
  std::string llm_endpoint = "https://api.openai.com/v1/chat/completions";
  std::string llm_api_key;
  std::string llm_model = "gpt-4";
  std::string llm_fixture;
  std::string llm_audit_log;
  double llm_temperature = 0;
  int llm_max_retries = 3;
  double llm_min_interval = 0;

  std::size_t top_n = 10;
  std::size_t demos = 3;
  std::vector<double> wr{1, 1, 1};
  std::vector<double> wp{1, 1, 1};

  int k = 7;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool timing = true;

  std::string backend = "builtin";  // builtin | external
  std::string backend_path = "polycc";

  std::string dataset;
  std::string index;

  /// Recognised keys, in documentation order.
  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "cc",          "cflags",        "run_limit",       "baseline_limit",   "omp_threads",     "gcov",
        "coverage.saturation", "coverage.max_inputs", "llm.provider", "llm.endpoint", "llm.api_key", "llm.model",
        "llm.fixture", "llm.audit_log", "llm.temperature", "llm.max_retries", "llm.min_interval", "retrieval.top_n",
        "retrieval.demos", "retrieval.wr", "retrieval.wp", "k", "seed", "jobs", "timing", "backend",
        "backend_path", "dataset", "index"};
    return k;
  }

  static std::string env_name(const std::string& key) {
    std::string out = "SCOPT_";
    for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  }

  /// Sets one key from text (flags and environment).
  void set(const std::string& key, const std::string& text) {
    auto number = [&] {
      char* end = nullptr;
      double v = std::strtod(text.c_str(), &end);
      if (text.empty() || *end) throw Error(ErrorKind::InvalidArgument, key + ": not a number: " + text);
      return v;
    };
    auto integer = [&] {
      double v = number();
      if (v != static_cast<double>(static_cast<long long>(v)) || v < 0)
        throw Error(ErrorKind::InvalidArgument, key + ": not a nonnegative integer: " + text);
      return static_cast<long long>(v);
    };
    auto list = [&] {
      std::vector<std::string> out;
      std::stringstream ss(text);
      for (std::string w; ss >> w;) out.push_back(w);
      return out;
    };
    auto triple = [&] {
      std::vector<double> out;
      std::string t = text;
      for (char& c : t)
        if (c == ',') c = ' ';
      std::stringstream ss(t);
      for (double v; ss >> v;) out.push_back(v);
      if (out.size() != 3) throw Error(ErrorKind::InvalidArgument, key + ": expected three weights");
      return out;
    };
    auto boolean = [&] {
      if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
      if (text == "0" || text == "false" || text == "off" || text == "no") return false;
      throw Error(ErrorKind::InvalidArgument, key + ": not a boolean: " + text);
    };
    if (key == "cc") cc = text;
    else if (key == "cflags") cflags = list();
    else if (key == "run_limit") run_limit = number();
    else if (key == "baseline_limit") baseline_limit = number();
    else if (key == "omp_threads") omp_threads = text;
    else if (key == "gcov") gcov = text;
    else if (key == "coverage.saturation") coverage_saturation = static_cast<int>(integer());
    else if (key == "coverage.max_inputs") coverage_max_inputs = static_cast<int>(integer());
    else if (key == "llm.provider") llm_provider = text;
    else if (key == "llm.endpoint") llm_endpoint = text;
    else if (key == "llm.api_key") llm_api_key = text;
    else if (key == "llm.model") llm_model = text;
    else if (key == "llm.fixture") llm_fixture = text;
    else if (key == "llm.audit_log") llm_audit_log = text;
    else if (key == "llm.temperature") llm_temperature = number();
    else if (key == "llm.max_retries") llm_max_retries = static_cast<int>(integer());
    else if (key == "llm.min_interval") llm_min_interval = number();
    else if (key == "retrieval.top_n") top_n = static_cast<std::size_t>(integer());
    else if (key == "retrieval.demos") demos = static_cast<std::size_t>(integer());
    else if (key == "retrieval.wr") wr = triple();
    else if (key == "retrieval.wp") wp = triple();
    else if (key == "k") k = static_cast<int>(integer());
    else if (key == "seed") seed = static_cast<std::uint64_t>(integer());
    else if (key == "jobs") jobs = static_cast<int>(integer());
    else if (key == "timing") timing = boolean();
    else if (key == "backend") backend = text;
    else if (key == "backend_path") backend_path = text;
    else if (key == "dataset") dataset = text;
    else if (key == "index") index = text;
    else throw Error(ErrorKind::InvalidArgument, "unknown setting '" + key + "'");
  }

  /// A config file: a JSON object, nested by the dotted key prefixes.
  void apply_file(const std::string& text) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::InvalidArgument, std::string("config file is not JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "config file must hold an object");
    apply_json(doc, "");
  }

  void apply_env() {
    for (const auto& key : keys())
      if (const char* v = std::getenv(env_name(key).c_str())) set(key, v);
  }

  VerifyConfig verify_config() const {
    VerifyConfig v;
    v.compiler.cc = cc;
    v.compiler.cflags = cflags;
    v.run_limit_seconds = run_limit;
    v.baseline_limit_seconds = baseline_limit;
    v.omp_threads = omp_threads;
    v.coverage.gcov = gcov;
    v.coverage.saturation = coverage_saturation;
    v.coverage.max_inputs = coverage_max_inputs;
    v.coverage.seed = seed;
    v.measure_time = timing;
    return v;
  }

  RetrievalConfig retrieval_config() const {
    RetrievalConfig r;
    r.top_n = top_n;
    r.demos = demos;
    for (std::size_t j = 0; j < kFeatureTypes; ++j) {
      r.wr[j] = wr.at(j);
      r.wp[j] = wp.at(j);
    }
    r.validate();
    return r;
  }

  PipelineConfig pipeline_config() const {
    PipelineConfig p;
    p.k = k;
    p.seed = seed;
    p.jobs = jobs;
    p.retrieval = retrieval_config();
    p.verify = verify_config();
    p.model = llm_model;
    p.temperature = llm_temperature;
    return p;
  }

  DatasetConfig dataset_config() const {
    DatasetConfig d;
    if (backend == "external")
      d.backend = BackendKind::External;
    else if (backend != "builtin")
      throw Error(ErrorKind::InvalidArgument, "backend must be builtin or external");
    d.external.path = backend_path;
    d.verify = verify_config();
    d.jobs = jobs;
    return d;
  }

  /// The provider for one target. `fixture` overrides llm.fixture (bench
  /// uses one fixture per target).
  std::unique_ptr<LlmProvider> make_provider(const std::string& target, const std::string& fixture = "") const {
    std::unique_ptr<LlmProvider> p;
    if (llm_provider == "stub") {
      p = std::make_unique<StubProvider>(target);
    } else if (llm_provider == "replay") {
      std::string path = fixture.empty() ? llm_fixture : fixture;
      if (path.empty()) throw Error(ErrorKind::InvalidArgument, "the replay provider needs llm.fixture");
      p = ReplayProvider::from_file(path);
    } else if (llm_provider == "http") {
#ifdef SCOPT_HAVE_HTTP
      HttpProviderConfig h;
      h.endpoint = llm_endpoint;
      h.api_key = llm_api_key;
      h.model = llm_model;
      h.max_retries = llm_max_retries;
      h.min_interval_seconds = llm_min_interval;
      p = std::make_unique<HttpProvider>(h);
#else
      throw Error(ErrorKind::EnvironmentError, "built without the HTTP provider");
#endif
    } else {
      throw Error(ErrorKind::InvalidArgument, "llm.provider must be http, replay or stub");
    }
    if (!llm_audit_log.empty()) p = std::make_unique<RecordingProvider>(std::move(p), llm_audit_log);
    return p;
  }

  json to_json(bool redact = true) const {
    json j;
    j["cc"] = cc;
    j["cflags"] = cflags;
    j["run_limit"] = run_limit;
    j["baseline_limit"] = baseline_limit;
    j["omp_threads"] = omp_threads;
    j["gcov"] = gcov;
    j["coverage"] = {{"saturation", coverage_saturation}, {"max_inputs", coverage_max_inputs}};
    j["llm"] = {{"provider", llm_provider},   {"endpoint", llm_endpoint},
                {"api_key", redact && !llm_api_key.empty() ? "<set>" : llm_api_key},
                {"model", llm_model},         {"fixture", llm_fixture},
                {"audit_log", llm_audit_log}, {"temperature", llm_temperature},
                {"max_retries", llm_max_retries}, {"min_interval", llm_min_interval}};
    j["retrieval"] = {{"top_n", top_n}, {"demos", demos}, {"wr", wr}, {"wp", wp}};
    j["k"] = k;
    j["seed"] = seed;
    j["jobs"] = jobs;
    j["timing"] = timing;
    j["backend"] = backend;
    j["backend_path"] = backend_path;
    j["dataset"] = dataset;
    j["index"] = index;
    return j;
  }

 private:
  void apply_json(const json& obj, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      const json& v = it.value();
      if (v.is_object()) {
        apply_json(v, key);
      } else if (v.is_array()) {
        std::string text;
        for (const auto& e : v) text += (text.empty() ? "" : " ") + (e.is_string() ? e.get<std::string>() : e.dump());
        set(key, text);
      } else if (v.is_string()) {
        set(key, v.get<std::string>());
      } else {
        set(key, v.dump());
      }
    }
  }
};

}  // namespace scopt
