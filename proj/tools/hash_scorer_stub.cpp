// tools/hash_scorer_stub.cpp

// Copyright 2026  The latrescore Authors

// See ../LICENSE for clarification regarding multiple authors
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


// Reference external scorer: answers the line protocol on stdin/stdout with
// the costs of the built-in hash scorer.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latrescore/exec_scorer.hpp"
#include "latrescore/scorer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hash scorer over the line protocol"};
  std::size_t window = 0;
  std::size_t vocab_size = 10000;
  app.add_option("--window", window, "history words hashed (0: all)");
  app.add_option("--vocab-size", vocab_size, "vocabulary size announced at startup");
  CLI11_PARSE(app, argc, argv);

  namespace lr = latrescore;
  lr::HashScorer scorer(window);
  std::ios::sync_with_stdio(false);
  std::cout << lr::protocol::EncodeHandshake(vocab_size) << '\n' << std::flush;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      const std::vector<lr::ScoreRequest> req{lr::protocol::DecodeRequest(line)};
      const std::vector<lr::ScoreResponse> resp = scorer.Score(req);
      std::cout << lr::protocol::EncodeResponse(resp.front()) << '\n' << std::flush;
    } catch (const std::exception& e) {
      std::cerr << "hash-scorer-stub: " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
