#pragma once

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include "scopt/util/error.hpp"

namespace scopt {

namespace fs = std::filesystem;

struct ProcessResult {
  int exit_code = -1;        // valid when !signaled && !timed_out
  int signal = 0;            // terminating signal, 0 if none
  bool timed_out = false;
  double wall_seconds = 0.0;
  std::string out;
  std::string err;

  bool ok() const { return !timed_out && signal == 0 && exit_code == 0; }
};

struct ProcessOptions {
  fs::path cwd;
  std::map<std::string, std::string> env;  // added on top of the parent env
  std::optional<double> timeout_seconds;
  std::size_t max_capture = 1 << 20;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Resolves a program name against PATH (names containing '/' are checked
/// directly). Returns nullopt when nothing executable is found.
inline std::optional<fs::path> find_executable(const std::string& name) {
  auto executable = [](const fs::path& p) {
    std::error_code ec;
    return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
  };
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (executable(name)) return fs::path(name);
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string paths = path_env ? path_env : "/usr/bin:/bin";
  std::stringstream ss(paths);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    fs::path candidate = fs::path(dir) / name;
    if (executable(candidate)) return candidate;
  }
  return std::nullopt;
}

/// Runs argv[0] with the given arguments. stdout/stderr are captured through
/// temporary files (no pipe back-pressure). On timeout the whole process
/// group is killed.
inline ProcessResult run_process(const std::vector<std::string>& argv,
                                 const ProcessOptions& options = {}) {
  if (argv.empty()) throw Error(ErrorKind::InvalidArgument, "run_process: empty argv");
  char out_tmpl[] = "/tmp/scopt_out_XXXXXX";
  char err_tmpl[] = "/tmp/scopt_err_XXXXXX";
  int out_fd = ::mkstemp(out_tmpl);
  int err_fd = ::mkstemp(err_tmpl);
  if (out_fd < 0 || err_fd < 0) throw Error(ErrorKind::IoError, "mkstemp failed");

  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorKind::EnvironmentError, "fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    if (!options.cwd.empty() && ::chdir(options.cwd.c_str()) != 0) _exit(127);
    for (const auto& [key, value] : options.env) ::setenv(key.c_str(), value.c_str(), 1);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, 0);
    ::dup2(out_fd, 1);
    ::dup2(err_fd, 2);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    _exit(127);
  }
  ::setpgid(pid, pid);

  ProcessResult result;
  int status = 0;
  auto sleep_for = std::chrono::microseconds(200);
  while (true) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options.timeout_seconds && elapsed > *options.timeout_seconds) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(sleep_for);
    if (sleep_for < std::chrono::milliseconds(10)) sleep_for *= 2;
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!result.timed_out) {
    if (WIFEXITED(status)) {
      result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
      result.signal = WTERMSIG(status);
    }
  }
  ::close(out_fd);
  ::close(err_fd);
  auto slurp = [&](const char* path) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const Error&) {
    }
    std::error_code ec;
    fs::remove(path, ec);
    if (text.size() > options.max_capture) text.resize(options.max_capture);
    return text;
  };
  result.out = slurp(out_tmpl);
  result.err = slurp(err_tmpl);
  return result;
}

/// Scratch directory removed on destruction unless keep() was called.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& prefix = "scopt") {
    std::string tmpl = (fs::temp_directory_path() / (prefix + "_XXXXXX")).string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr)
      throw Error(ErrorKind::IoError, "mkdtemp failed for " + tmpl);
    path_ = buf.data();
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    if (!keep_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  const fs::path& path() const { return path_; }
  void keep() { keep_ = true; }

 private:
  fs::path path_;
  bool keep_ = false;
};

}  // namespace scopt
