// latrescore/scorer_spec.hpp

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

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>

#include "latrescore/errors.hpp"
#include "latrescore/exec_scorer.hpp"
#include "latrescore/scorer.hpp"

namespace latrescore {

/** Builds a scorer from a command-line description:
 *
 *    uniform[:N]          every token costs ln N (default N = 10000)
 *    bigram:PATH          Laplace bigram trained on the sentences in PATH
 *    hash[:K]             hash scorer over the last K words (default: all)
 *    exec:CMD             external process speaking the line protocol
 *    file:HYPS,SCORES     precomputed scores for a hypothesis list
 */
inline std::unique_ptr<Scorer> MakeScorer(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string kind(spec.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  auto number = [&](std::size_t dflt) -> std::size_t {
    if (colon == std::string_view::npos) return dflt;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != arg.size())
      throw ConfigError("bad number in scorer '" + std::string(spec) + "'");
    return static_cast<std::size_t>(v);
  };
  auto slurp = [](const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  if (kind == "uniform") return std::make_unique<UniformScorer>(number(10000));
  if (kind == "hash") return std::make_unique<HashScorer>(number(0));
  if (kind == "bigram") {
    if (arg.empty()) throw ConfigError("bigram scorer needs a training file");
    return std::make_unique<BigramScorer>(BigramScorer::FromFile(arg));
  }
  if (kind == "exec") {
    if (arg.empty()) throw ConfigError("exec scorer needs a command");
    return std::make_unique<ExecScorer>(arg);
  }
  if (kind == "file") {
    const std::size_t comma = arg.find(',');
    if (comma == std::string::npos)
      throw ConfigError("file scorer needs HYPS,SCORES");
    return std::make_unique<FileScorer>(slurp(arg.substr(0, comma)),
                                        slurp(arg.substr(comma + 1)));
  }
  throw ConfigError("unknown scorer '" + std::string(spec) + "'");
}

}  // namespace latrescore
