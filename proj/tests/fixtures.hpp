// tests/fixtures.hpp

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

#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "latrescore/latrescore.hpp"

namespace fixtures {

namespace lr = latrescore;

inline lr::Lattice Parse(const std::string& text) { return lr::ParseLattice(text); }

inline std::string Cost(double c) { return lr::FormatDouble(c); }

// a -> c and b -> c, path costs 1.0 and 5.0.
inline const char* kDiamond =
    "0 1 a 0.25,0.25\n"
    "0 2 b 1.5,1.5\n"
    "1 3 c 0.2,0.2\n"
    "2 3 c 0.95,0.95\n"
    "3 0.1\n";

// Branch probabilities p and 1 - p, all other costs zero.
inline lr::Lattice ProbDiamond(double p, const char* w1 = "a", const char* w2 = "b",
                               const char* w3 = "c", const char* w4 = "c") {
  std::ostringstream os;
  os << "0 1 " << w1 << ' ' << Cost(-std::log(p)) << ",0\n"
     << "0 2 " << w2 << ' ' << Cost(-std::log(1 - p)) << ",0\n"
     << "1 3 " << w3 << " 0,0\n"
     << "2 3 " << w4 << " 0,0\n"
     << "3 0\n";
  return Parse(os.str());
}

inline const char* kLinear =
    "0 1 a 0.5,1.0\n"
    "1 2 b 0.25,0.75\n"
    "2 3 c 1.0,0.5\n"
    "3 0.0\n";

// Three leaves under a two-level tree.
inline const char* kPrefixTree =
    "0 1 a 1,1\n"
    "0 2 b 2,1\n"
    "1 3 c 1,1\n"
    "1 4 d 1,2\n"
    "2 5 e 1,1\n"
    "3 0\n"
    "4 0\n"
    "5 0\n";

// Start fans out, merges, fans out again into the final state.
inline const char* kDoubleDiamond =
    "0 1 a 1,0\n"
    "0 2 b 2,0\n"
    "1 3 c 1,0\n"
    "2 3 d 1,0\n"
    "3 4 e 1,0\n"
    "3 4 f 3,0\n"
    "4 0\n";

// Binary lattice with 2^depth paths.
inline lr::Lattice Binary(int depth) {
  std::ostringstream os;
  for (int i = 0; i < depth; ++i) {
    os << i << ' ' << i + 1 << " L" << i << " 1,0\n";
    os << i << ' ' << i + 1 << " R" << i << " 1.5,0\n";
  }
  os << depth << " 0\n";
  return Parse(os.str());
}

inline std::string FixturePath(const std::string& name) {
  return std::string(LATRESCORE_FIXTURES) + "/" + name;
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace fixtures
