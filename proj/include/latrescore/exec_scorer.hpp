// latrescore/exec_scorer.hpp

// Copyright 2026  The latrescore Authors

// See ../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "latrescore/errors.hpp"
#include "latrescore/scorer.hpp"

namespace latrescore {

// Wire format of the external scorer protocol, one JSON object per line:
//
//   scorer -> client, once at startup:  {"ready": true, "vocab_size": N}
//                                        (optional "vocab": [...])
//   client -> scorer:                   {"id": 3, "tokens": ["a", "b"]}
//   scorer -> client:                   {"id": 3, "costs": [c1, c2, c3]}
//
// Costs are nats and include end of sentence.  EOF on the scorer's input
// terminates it.
namespace protocol {

inline std::string EncodeRequest(const ScoreRequest& r) {
  return nlohmann::json{{"id", r.id}, {"tokens", r.tokens}}.dump();
}

inline std::string EncodeResponse(const ScoreResponse& r) {
  return nlohmann::json{{"id", r.id}, {"costs", r.costs}}.dump();
}

inline std::string EncodeHandshake(std::size_t vocab_size) {
  return nlohmann::json{{"ready", true}, {"vocab_size", vocab_size}}.dump();
}

inline ScoreRequest DecodeRequest(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerProtocolError(std::string("malformed request: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer() ||
      !j.contains("tokens") || !j["tokens"].is_array())
    throw ScorerProtocolError("request needs integer 'id' and array 'tokens'");
  ScoreRequest r;
  r.id = j["id"].get<std::int64_t>();
  for (const auto& t : j["tokens"]) {
    if (!t.is_string()) throw ScorerProtocolError("tokens must be strings");
    r.tokens.push_back(t.get<std::string>());
  }
  return r;
}

inline ScoreResponse DecodeResponse(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerProtocolError(std::string("malformed response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer() ||
      !j.contains("costs") || !j["costs"].is_array())
    throw ScorerProtocolError("response needs integer 'id' and array 'costs'");
  ScoreResponse r;
  r.id = j["id"].get<std::int64_t>();
  for (const auto& c : j["costs"]) {
    if (!c.is_number()) throw ScorerProtocolError("costs must be numbers");
    r.costs.push_back(c.get<double>());
  }
  return r;
}

struct Handshake {
  std::size_t vocab_size = 0;
  std::optional<std::unordered_set<std::string>> vocab;
};

inline Handshake DecodeHandshake(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerUnavailableError(std::string("malformed scorer handshake: ") + e.what());
  }
  if (!j.is_object() || j.value("ready", false) != true)
    throw ScorerUnavailableError("scorer did not report ready");
  Handshake h;
  if (j.contains("vocab_size") && j["vocab_size"].is_number_unsigned())
    h.vocab_size = j["vocab_size"].get<std::size_t>();
  if (j.contains("vocab") && j["vocab"].is_array()) {
    h.vocab.emplace();
    for (const auto& w : j["vocab"])
      if (w.is_string()) h.vocab->insert(w.get<std::string>());
  }
  return h;
}

}  // namespace protocol

/** Scorer running as a child process (`/bin/sh -c command`).
 *
 *  A batch is one round trip: all request lines are written (from a helper
 *  thread, so a scorer that answers while still reading cannot dead-lock the
 *  pipes), then one response per request is read.  Batches from concurrent
 *  callers are serialized.
 */
class ExecScorer : public Scorer {
 public:
  explicit ExecScorer(const std::string& command) {
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (::pipe(to_child) != 0) throw ScorerUnavailableError("pipe() failed");
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ScorerUnavailableError("pipe() failed");
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ScorerUnavailableError("fork() failed");
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    ::fcntl(in_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(out_fd_, F_SETFD, FD_CLOEXEC);

    std::string line;
    if (!ReadLine(&line)) {
      Shutdown();
      throw ScorerUnavailableError("scorer '" + command + "' exited before handshake");
    }
    try {
      handshake_ = protocol::DecodeHandshake(line);
    } catch (...) {
      Shutdown();
      throw;
    }
  }

  ExecScorer(const ExecScorer&) = delete;
  ExecScorer& operator=(const ExecScorer&) = delete;

  ~ExecScorer() override { Shutdown(); }

  std::size_t VocabularySize() const { return handshake_.vocab_size; }

  bool InVocabulary(std::string_view word) const override {
    return !handshake_.vocab || handshake_.vocab->count(std::string(word)) > 0;
  }

  bool Serialized() const override { return true; }

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::lock_guard<std::mutex> lock(mutex_);
    if (in_fd_ < 0) throw ScorerUnavailableError("scorer process is gone");
    std::string payload;
    for (const ScoreRequest& r : batch) {
      payload += protocol::EncodeRequest(r);
      payload += '\n';
    }
    bool write_ok = true;
    std::thread writer([&, fd = in_fd_] { write_ok = WriteAll(fd, payload); });
    std::vector<ScoreResponse> out;
    out.reserve(batch.size());
    std::string line;
    std::exception_ptr failure;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!ReadLine(&line)) {
        failure = std::make_exception_ptr(
            ScorerUnavailableError("scorer closed its output mid-batch"));
        break;
      }
      try {
        out.push_back(protocol::DecodeResponse(line));
      } catch (const ScorerProtocolError&) {
        failure = std::current_exception();
        break;
      }
    }
    if (failure) {
      // The writer may be blocked on a full pipe; killing the child unblocks it.
      ::kill(pid_, SIGKILL);
      writer.join();
      Shutdown();
      std::rethrow_exception(failure);
    }
    writer.join();
    if (!write_ok) throw ScorerUnavailableError("failed writing to scorer");
    return out;
  }

 private:
  static bool WriteAll(int fd, const std::string& s) {
    std::size_t done = 0;
    while (done < s.size()) {
      ssize_t n = ::write(fd, s.data() + done, s.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      done += static_cast<std::size_t>(n);
    }
    return true;
  }

  bool ReadLine(std::string* line) {
    line->clear();
    while (true) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        *line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return true;
      }
      char chunk[4096];
      ssize_t n = ::read(out_fd_, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void Shutdown() {
    if (in_fd_ >= 0) {
      ::close(in_fd_);
      in_fd_ = -1;
    }
    if (out_fd_ >= 0) {
      ::close(out_fd_);
      out_fd_ = -1;
    }
    if (pid_ > 0) {
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
  protocol::Handshake handshake_;
  std::mutex mutex_;
};

}  // namespace latrescore
