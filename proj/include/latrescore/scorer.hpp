// latrescore/scorer.hpp

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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"

namespace latrescore {

struct ScoreRequest {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
};

// Per-token costs in nats; one more than the request's tokens, the last one
// being the end-of-sentence cost.
struct ScoreResponse {
  std::int64_t id = 0;
  std::vector<double> costs;
};

/** A language model seen as a batch cost function.
 *
 *  Score() evaluates a whole batch in one call.  Implementations that cannot
 *  take concurrent calls report Serialized() and queue callers internally.
 */
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) = 0;

  // Words outside the vocabulary are mapped to <unk> before scoring.
  virtual bool InVocabulary(std::string_view word) const {
    (void)word;
    return true;
  }

  virtual bool Serialized() const { return false; }
};

// Every token costs ln(vocab_size).
class UniformScorer : public Scorer {
 public:
  explicit UniformScorer(std::size_t vocab_size) : cost_(std::log(double(vocab_size))) {
    if (vocab_size == 0) throw ConfigError("uniform scorer needs a vocabulary");
  }

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResponse> out;
    out.reserve(batch.size());
    for (const ScoreRequest& r : batch)
      out.push_back({r.id, std::vector<double>(r.tokens.size() + 1, cost_)});
    return out;
  }

 private:
  double cost_;
};

/** Add-one smoothed bigram model.
 *
 *  P(w | h) = (c(h, w) + 1) / (c(h) + V), where V counts the training words
 *  plus </s> and <unk>, and c(h) counts every token following h, </s>
 *  included.  Sentences start with the <s> history.
 */
class BigramScorer : public Scorer {
 public:
  static BigramScorer FromText(std::string_view text) {
    BigramScorer lm;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
      std::istringstream ls(line);
      std::vector<std::string> words;
      for (std::string w; ls >> w;) words.push_back(w);
      if (words.empty()) continue;
      std::string prev(kSentenceStart);
      for (const std::string& w : words) {
        lm.vocab_.insert(w);
        lm.Count(prev, w);
        prev = w;
      }
      lm.Count(prev, std::string(kSentenceEnd));
    }
    lm.vocab_.insert(std::string(kSentenceEnd));
    lm.vocab_.insert(std::string(kUnknown));
    return lm;
  }

  static BigramScorer FromFile(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ScorerUnavailableError("cannot open bigram training text " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return FromText(ss.str());
  }

  // Size of the predicted vocabulary (V above).
  std::size_t VocabularySize() const { return vocab_.size(); }

  bool InVocabulary(std::string_view word) const override {
    return vocab_.count(std::string(word)) > 0;
  }

  double Cost(const std::string& prev, const std::string& word) const {
    double ctx = 0.0, pair = 0.0;
    if (auto it = context_.find(prev); it != context_.end()) ctx = double(it->second);
    if (auto it = pairs_.find(prev + '\n' + word); it != pairs_.end())
      pair = double(it->second);
    return -std::log((pair + 1.0) / (ctx + double(vocab_.size())));
  }

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResponse> out;
    out.reserve(batch.size());
    const std::string end(kSentenceEnd);
    for (const ScoreRequest& r : batch) {
      ScoreResponse resp{r.id, {}};
      std::string prev(kSentenceStart);
      for (const std::string& w : r.tokens) {
        resp.costs.push_back(Cost(prev, w));
        prev = w;
      }
      resp.costs.push_back(Cost(prev, end));
      out.push_back(std::move(resp));
    }
    return out;
  }

 private:
  void Count(const std::string& prev, const std::string& w) {
    ++context_[prev];
    ++pairs_[prev + '\n' + w];
  }

  std::unordered_set<std::string> vocab_;
  std::unordered_map<std::string, std::int64_t> context_;
  std::unordered_map<std::string, std::int64_t> pairs_;
};

/** Deterministic pseudo-LM for plumbing tests.
 *
 *  The cost of a token is a 64-bit FNV-1a hash of (history, token) mapped
 *  onto [0.5, 10) nats.  The history is the sentence so far (starting with
 *  <s>), cut to the last `window` tokens when window > 0.
 */
class HashScorer : public Scorer {
 public:
  static constexpr double kMinCost = 0.5;
  static constexpr double kMaxCost = 10.0;

  explicit HashScorer(std::size_t window = 0) : window_(window) {}

  double TokenCost(std::span<const std::string> history, std::string_view token) const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
      h ^= 0x1f;
      h *= 1099511628211ull;
    };
    const std::size_t from =
        window_ > 0 && history.size() > window_ ? history.size() - window_ : 0;
    for (std::size_t i = from; i < history.size(); ++i) mix(history[i]);
    h ^= 0x1e;
    h *= 1099511628211ull;
    mix(token);
    const double u = double(h >> 11) * 0x1.0p-53;
    return kMinCost + (kMaxCost - kMinCost) * u;
  }

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResponse> out;
    out.reserve(batch.size());
    for (const ScoreRequest& r : batch) {
      ScoreResponse resp{r.id, {}};
      std::vector<std::string> history{std::string(kSentenceStart)};
      for (const std::string& w : r.tokens) {
        resp.costs.push_back(TokenCost(history, w));
        history.push_back(w);
      }
      resp.costs.push_back(TokenCost(history, kSentenceEnd));
      out.push_back(std::move(resp));
    }
    return out;
  }

 private:
  std::size_t window_;
};

// Forwards to another scorer and counts batches, hypotheses and tokens.
class CountingScorer : public Scorer {
 public:
  explicit CountingScorer(Scorer& inner) : inner_(inner) {}

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    ++calls_;
    hypotheses_ += batch.size();
    for (const ScoreRequest& r : batch) tokens_ += r.tokens.size() + 1;
    return inner_.Score(batch);
  }

  bool InVocabulary(std::string_view word) const override {
    return inner_.InVocabulary(word);
  }
  bool Serialized() const override { return inner_.Serialized(); }

  std::uint64_t calls() const { return calls_; }
  std::uint64_t hypotheses() const { return hypotheses_; }
  std::uint64_t tokens() const { return tokens_; }

  void Reset() {
    calls_ = 0;
    hypotheses_ = 0;
    tokens_ = 0;
  }

 private:
  Scorer& inner_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> hypotheses_{0};
  std::atomic<std::uint64_t> tokens_{0};
};

// Mock accelerator: each batch costs a fixed latency plus a per-token cost,
// so batching shows up in wall time.
class LatencyScorer : public Scorer {
 public:
  LatencyScorer(Scorer& inner, std::chrono::microseconds per_call,
                std::chrono::microseconds per_token)
      : inner_(inner), per_call_(per_call), per_token_(per_token) {}

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::size_t tokens = 0;
    for (const ScoreRequest& r : batch) tokens += r.tokens.size() + 1;
    std::this_thread::sleep_for(per_call_ + per_token_ * tokens);
    return inner_.Score(batch);
  }

  bool InVocabulary(std::string_view word) const override {
    return inner_.InVocabulary(word);
  }
  bool Serialized() const override { return inner_.Serialized(); }

 private:
  Scorer& inner_;
  std::chrono::microseconds per_call_;
  std::chrono::microseconds per_token_;
};

/** Serves costs computed offline.
 *
 *  Built from a hypothesis file (`PATH <pid> <cost> w1 w2 ...` records under
 *  `UTT <id>` headers) and the matching score file (`<pid> c1 c2 ...` records
 *  under the same headers).  Lookups are by token sequence, so it answers any
 *  batch whose sequences appear in the files.
 */
class FileScorer : public Scorer {
 public:
  FileScorer(std::string_view hypotheses, std::string_view scores) {
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> words;
    ForEachRecord(hypotheses, [&](const std::string& utt, std::vector<std::string> f,
                                  std::size_t line) {
      if (f.size() < 3 || f[0] != "PATH")
        throw ParseError(line, "expected 'PATH <pid> <cost> words...'");
      words[{utt, f[1]}] = std::vector<std::string>(f.begin() + 3, f.end());
    });
    ForEachRecord(scores, [&](const std::string& utt, std::vector<std::string> f,
                              std::size_t line) {
      auto it = words.find({utt, f[0]});
      if (it == words.end())
        throw ParseError(line, "score for unknown hypothesis " + utt + "/" + f[0]);
      std::vector<double> costs;
      for (std::size_t i = 1; i < f.size(); ++i) {
        try {
          costs.push_back(std::stod(f[i]));
        } catch (const std::exception&) {
          throw ParseError(line, "malformed cost '" + f[i] + "'");
        }
      }
      if (costs.size() != it->second.size() + 1)
        throw ParseError(line, "expected one cost per word plus end of sentence");
      table_[Join(it->second)] = std::move(costs);
    });
  }

  std::vector<ScoreResponse> Score(std::span<const ScoreRequest> batch) override {
    std::vector<ScoreResponse> out;
    for (const ScoreRequest& r : batch) {
      auto it = table_.find(Join(r.tokens));
      if (it == table_.end())
        throw ScorerProtocolError("no precomputed score for '" + Join(r.tokens) + "'");
      out.push_back({r.id, it->second});
    }
    return out;
  }

 private:
  static std::string Join(const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) {
      if (!s.empty()) s += ' ';
      s += x;
    }
    return s;
  }

  template <typename F>
  static void ForEachRecord(std::string_view text, F&& f) {
    std::istringstream is{std::string(text)};
    std::string line, utt;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::vector<std::string> fields;
      for (std::string w; ls >> w;) fields.push_back(w);
      if (fields.empty() || fields[0].front() == '#') continue;
      if (fields[0] == "UTT") {
        if (fields.size() != 2) throw ParseError(lineno, "UTT header needs one id");
        utt = fields[1];
        continue;
      }
      f(utt, std::move(fields), lineno);
    }
  }

  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace latrescore
