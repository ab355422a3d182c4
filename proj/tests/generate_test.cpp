// tests/generate_test.cpp

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


#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

namespace lr = latrescore;

namespace {

TEST(Generate, Deterministic) {
  lr::LatticeProfile p;
  EXPECT_EQ(lr::GenerateLattice(7, p), lr::GenerateLattice(7, p));
  EXPECT_NE(lr::GenerateLattice(7, p), lr::GenerateLattice(8, p));
  EXPECT_EQ(lr::ArchiveToString(lr::GenerateArchive(1, 5, p)),
            lr::ArchiveToString(lr::GenerateArchive(1, 5, p)));
  EXPECT_EQ(lr::GenerateCorpus(3, 20, 10), lr::GenerateCorpus(3, 20, 10));
}

TEST(Generate, TwoStatesIsOneArc) {
  lr::LatticeProfile p;
  p.min_states = p.max_states = 2;
  const lr::Lattice lat = lr::GenerateLattice(1, p);
  EXPECT_EQ(lat.NumStates(), 2);
  EXPECT_EQ(lat.NumArcs(), 1u);
  EXPECT_TRUE(lat.IsFinal(1));
}

TEST(Generate, ArchiveIds) {
  lr::LatticeProfile p;
  const lr::Archive a = lr::GenerateArchive(1, 3, p);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].id, "utt00000");
  EXPECT_EQ(a[2].id, "utt00002");
}

TEST(Generate, ProfileChecks) {
  lr::LatticeProfile p;
  p.min_states = 1;
  EXPECT_THROW(lr::GenerateLattice(1, p), lr::ConfigError);
  p = {};
  p.max_branching = 5;
  EXPECT_THROW(lr::GenerateLattice(1, p), lr::ConfigError);
  p = {};
  p.vocab_size = 1;
  EXPECT_THROW(lr::GenerateLattice(1, p), lr::ConfigError);
  EXPECT_THROW(lr::GenerateCorpus(1, 3, 0), lr::ConfigError);
}

TEST(Generate, ValidAndRoundTrips) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    lr::LatticeProfile p;
    p.max_states = 30;
    p.max_branching = 1 + static_cast<int>(seed % 4);
    p.vocab_size = 8;
    p.extra_final_prob = (seed % 3) * 0.1;
    const lr::Lattice lat = lr::GenerateLattice(seed, p);
    ASSERT_GE(lat.NumStates(), p.min_states);
    ASSERT_LE(lat.NumStates(), p.max_states);
    // Already trim and topologically numbered: normalizing is a no-op.
    EXPECT_EQ(lr::Normalize(lat), lat);
    EXPECT_EQ(lr::ParseLattice(lr::LatticeToString(lat)), lat);
    for (lr::StateId s = 0; s < lat.NumStates(); ++s) {
      std::set<std::string> words;
      for (const lr::Arc& a : lat.Arcs(s)) {
        EXPECT_TRUE(words.insert(a.word).second);
        EXPECT_GT(a.next_state, s);
        EXPECT_GE(a.num_frames, 1);
      }
      EXPECT_LE(lat.Arcs(s).size(), static_cast<std::size_t>(p.max_branching));
    }
    EXPECT_GE(lr::CountPaths(lat, 1u << 30), 1u);
  }
}

TEST(Generate, CorpusUsesVocabulary) {
  const std::string text = lr::GenerateCorpus(5, 50, 7);
  lr::BigramScorer lm = lr::BigramScorer::FromText(text);
  EXPECT_LE(lm.VocabularySize(), 7u + 2u);
  EXPECT_FALSE(lm.InVocabulary("w7"));
}

}  // namespace
