#pragma once

// Clients for out-of-process oracles: an HTTP server answering POST /score,
// or a subprocess speaking one JSON request / one JSON response per line.

#include <chrono>
#include <csignal>
#include <cstring>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "morpheus/oracle.hpp"

namespace morpheus {

struct RemoteOptions {
  std::size_t max_batch = 64;
  std::chrono::milliseconds timeout{30000};
  int retries = 2;  // extra attempts after a transport failure
};

/// Splits requests into batches of at most max_batch candidates, retries
/// transport failures, and reassembles scores in candidate order.
class RemoteOracle : public Oracle {
 public:
  explicit RemoteOracle(RemoteOptions opts) : opts_(opts) {
    if (opts_.max_batch == 0) throw ConfigError("max_batch must be positive");
  }

  OracleResponse score_batch(const OracleRequest& req) override {
    if (req.candidates.empty()) throw ProtocolError("request has no candidates");
    OracleResponse out;
    bool first = true;
    for (std::size_t lo = 0; lo < req.candidates.size(); lo += opts_.max_batch) {
      const std::size_t hi = std::min(req.candidates.size(), lo + opts_.max_batch);
      OracleRequest part{req.context, {req.candidates.begin() + lo, req.candidates.begin() + hi}};
      const OracleResponse r = with_retries(part);
      if (!first && r.lower_is_worse != out.lower_is_worse) {
        throw ProtocolError("lower_is_worse changed between batches");
      }
      out.lower_is_worse = r.lower_is_worse;
      first = false;
      out.scores.insert(out.scores.end(), r.scores.begin(), r.scores.end());
    }
    return out;
  }

  const RemoteOptions& options() const { return opts_; }

 protected:
  /// Sends one batch; returns the raw response body.
  virtual std::string exchange(const std::string& body) = 0;

 private:
  OracleResponse with_retries(const OracleRequest& part) {
    const std::string body = to_json(part).dump();
    for (int attempt = 0;; ++attempt) {
      try {
        const std::string raw = exchange(body);
        json j;
        try {
          j = json::parse(raw);
        } catch (const json::exception& e) {
          throw ProtocolError(std::string("malformed response: ") + e.what());
        }
        return response_from_json(j, part.candidates.size());
      } catch (const TransportError&) {
        if (attempt >= opts_.retries) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(50 << attempt));
      }
    }
  }

  RemoteOptions opts_;
};

class HttpOracle : public RemoteOracle {
 public:
  explicit HttpOracle(std::string url, RemoteOptions opts = {})
      : RemoteOracle(opts), url_(std::move(url)) {
    const auto scheme = url_.find("://");
    if (scheme == std::string::npos) throw ConfigError("oracle url needs a scheme: " + url_);
    const auto slash = url_.find('/', scheme + 3);
    base_ = url_.substr(0, slash);
    path_ = slash == std::string::npos ? "" : url_.substr(slash);
    if (path_.empty() || path_ == "/") path_ = "/score";
  }

  std::string identity() const override { return "http:" + url_; }
  const std::string& path() const { return path_; }

 protected:
  std::string exchange(const std::string& body) override {
    // one client per call keeps concurrent examples independent
    httplib::Client cli(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options().timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options().timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post(path_, body, "application/json");
    if (!res) throw TransportError("POST " + url_ + ": " + httplib::to_string(res.error()));
    if (res->status >= 500) {
      throw TransportError("POST " + url_ + ": HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
      throw ProtocolError("POST " + url_ + ": HTTP " + std::to_string(res->status) + " " +
                          res->body);
    }
    return res->body;
  }

 private:
  std::string url_;
  std::string base_;
  std::string path_;
};

/// Runs `/bin/sh -c command` once and keeps it alive across requests. A
/// child that dies or times out is restarted on the next call.
class StdioOracle : public RemoteOracle {
 public:
  explicit StdioOracle(std::string command, RemoteOptions opts = {})
      : RemoteOracle(opts), command_(std::move(command)) {}

  ~StdioOracle() override { stop(); }

  StdioOracle(const StdioOracle&) = delete;
  StdioOracle& operator=(const StdioOracle&) = delete;

  std::string identity() const override { return "stdio:" + command_; }

 protected:
  std::string exchange(const std::string& body) override {
    std::lock_guard lock(mu_);
    if (pid_ <= 0) start();
    try {
      write_all(body + "\n");
      return read_line();
    } catch (const TransportError&) {
      stop();
      throw;
    }
  }

 private:
  void start() {
    std::signal(SIGPIPE, SIG_IGN);
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0) throw TransportError("pipe: " + std::string(std::strerror(errno)));
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw TransportError("pipe: " + std::string(std::strerror(errno)));
    }
    const pid_t pid = fork();
    if (pid < 0) {
      for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
      throw TransportError("fork: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
      setpgid(0, 0);  // own group, so a kill reaches the whole pipeline
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
      execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
    fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    buffer_.clear();
  }

  void stop() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
      int status = 0;
      // closing stdin is the polite shutdown; give it a moment, then kill
      for (int i = 0; i < 20; ++i) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) {
          pid_ = -1;
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      kill(-pid_, SIGKILL);
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  void write_all(const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = write(to_child_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError("write to oracle: " + std::string(std::strerror(errno)));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    const auto deadline = std::chrono::steady_clock::now() + options().timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw TransportError("oracle timed out");
      pollfd pfd{from_child_, POLLIN, 0};
      const int rc = poll(&pfd, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw TransportError("poll: " + std::string(std::strerror(errno)));
      }
      if (rc == 0) throw TransportError("oracle timed out");
      char buf[4096];
      const ssize_t n = read(from_child_, buf, sizeof buf);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError("read from oracle: " + std::string(std::strerror(errno)));
      }
      if (n == 0) throw TransportError("oracle closed its output");
      buffer_.append(buf, static_cast<std::size_t>(n));
    }
  }

  std::string command_;
  std::mutex mu_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace morpheus
