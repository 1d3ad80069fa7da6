#pragma once
// Out-of-process evaluator: one JSON request line to the child's stdin, one
// JSON response line back from its stdout.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "fenestra/building.hpp"
#include "fenestra/encoding.hpp"
#include "fenestra/error.hpp"
#include "fenestra/thermal.hpp"

namespace fenestra {

inline constexpr int kExternalSchemaVersion = 1;

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::pair<Fd, Fd> make_pipe(int flags = 0) {
  int p[2];
  if (::pipe2(p, flags) != 0) throw SpawnError(std::string("pipe: ") + std::strerror(errno));
  return {Fd(p[0]), Fd(p[1])};
}

inline std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : command) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ' ' && !quoted) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Child process that is killed and reaped if still running on destruction.
class Child {
 public:
  explicit Child(pid_t pid) : pid_(pid) {}
  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;
  ~Child() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int st = 0;
      ::waitpid(pid_, &st, 0);
    }
  }
  int wait() {
    int st = 0;
    while (::waitpid(pid_, &st, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    return st;
  }

 private:
  pid_t pid_;
};

}  // namespace detail

struct ExternalConfig {
  std::string command;
  double timeout_s = 120.0;
};

inline json make_external_request(const CanonicalDesign& design, const BuildingModel& building,
                                  const std::string& weather_path) {
  return json{{"schema_version", kExternalSchemaVersion},
              {"weather_path", weather_path},
              {"building", building_to_json(building)},
              {"design", design_to_json(design, building)}};
}

inline SimulationResult parse_external_response(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("evaluator response is not JSON: ") + e.what());
  }
  SimulationResult r;
  for (auto [name, dst] : {std::pair{"edh", &r.edh}, std::pair{"edc", &r.edc}, std::pair{"nct", &r.nct},
                           std::pair{"q_sol_jul", &r.q_sol_jul}}) {
    if (!j.is_object() || !j.contains(name) || !j[name].is_number())
      throw ProtocolError(std::string("evaluator response lacks numeric '") + name + "'");
    *dst = j[name].get<double>();
    if (!std::isfinite(*dst) || *dst < 0)
      throw ProtocolError(std::string("evaluator response has invalid '") + name + "'");
  }
  return r;
}

/// Runs the command once for this design. SIGPIPE is ignored process-wide so a
/// child that exits early surfaces as a protocol error instead of a signal.
inline SimulationResult external_evaluate(const CanonicalDesign& design, const BuildingModel& building,
                                          const std::string& weather_path, const ExternalConfig& cfg) {
  const auto argv_s = detail::split_command(cfg.command);
  if (argv_s.empty()) throw SpawnError("empty evaluator command");
  std::vector<char*> argv;
  for (const auto& a : argv_s) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  std::signal(SIGPIPE, SIG_IGN);
  auto [in_r, in_w] = detail::make_pipe(O_CLOEXEC);
  auto [out_r, out_w] = detail::make_pipe(O_CLOEXEC);
  auto [err_r, err_w] = detail::make_pipe(O_CLOEXEC);

  const pid_t pid = ::fork();
  if (pid < 0) throw SpawnError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_r.get(), STDIN_FILENO);
    ::dup2(out_w.get(), STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(err_w.get(), &e, sizeof e);
    ::_exit(127);
  }
  detail::Child child(pid);
  in_r.reset();
  out_w.reset();
  err_w.reset();

  int exec_errno = 0;
  if (::read(err_r.get(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
    child.wait();
    throw SpawnError("cannot start '" + argv_s[0] + "': " + std::strerror(exec_errno));
  }

  const std::string request = make_external_request(design, building, weather_path).dump() + "\n";
  std::size_t off = 0;
  while (off < request.size()) {
    const ssize_t n = ::write(in_w.get(), request.data() + off, request.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("writing request failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  in_w.reset();

  std::string buf;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(cfg.timeout_s);
  while (buf.find('\n') == std::string::npos) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("evaluator did not answer within " + std::to_string(cfg.timeout_s) + " s");
    pollfd pfd{out_r.get(), POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (pr < 0 && errno != EINTR) throw ProtocolError(std::string("poll: ") + std::strerror(errno));
    if (pr <= 0) continue;
    char tmp[4096];
    const ssize_t n = ::read(out_r.get(), tmp, sizeof tmp);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("reading response failed: ") + std::strerror(errno));
    }
    if (n == 0) break;
    buf.append(tmp, static_cast<std::size_t>(n));
  }
  const auto nl = buf.find('\n');
  if (nl == std::string::npos && buf.empty()) throw ProtocolError("evaluator closed its output without a response");
  return parse_external_response(buf.substr(0, nl));
}

}  // namespace fenestra
