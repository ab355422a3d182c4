// tests/expand_test.cpp

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


#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

namespace lr = latrescore;

namespace {

bool IsPrefixTree(const lr::Lattice& lat) {
  const std::vector<int> in = lr::InDegrees(lat);
  for (lr::StateId s = 0; s < lat.NumStates(); ++s)
    if (in[s] != (s == lat.Start() ? 0 : 1)) return false;
  return true;
}

std::size_t MaxPathLength(const lr::Lattice& lat) {
  std::size_t m = 0;
  for (const auto& p : oracle::AllPaths(lat)) m = std::max(m, p.arcs.size());
  return m;
}

lr::ExpansionConfig Eps(double e, lr::Semiring sr = lr::Semiring::kSum) { return {e, sr}; }

TEST(ExpansionConfig, EpsilonRange) {
  EXPECT_THROW(Eps(0.0).Check(), lr::ConfigError);
  EXPECT_THROW(Eps(1.0).Check(), lr::ConfigError);
  EXPECT_THROW(Eps(-0.5).Check(), lr::ConfigError);
  EXPECT_NO_THROW(Eps(0.5).Check());
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);
  EXPECT_THROW(lr::ExpandPosterior(lat, Eps(1.5)), lr::ConfigError);
}

TEST(ExpandPosterior, HighThresholdKeepsStructure) {
  const lr::Lattice lat = fixtures::ProbDiamond(0.9);
  const lr::Lattice out = lr::ExpandPosterior(lat, Eps(0.999));
  EXPECT_EQ(out, lat);
}

TEST(ExpandPosterior, LowThresholdBuildsPrefixTree) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDoubleDiamond);
  const auto post = lr::ArcPosteriors(lat);
  const double min_post = *std::min_element(post.begin(), post.end());
  const lr::Lattice out = lr::ExpandPosterior(lat, Eps(0.5 * min_post));
  EXPECT_TRUE(IsPrefixTree(out));
  EXPECT_EQ(out.NumStates(), 1 + 2 + 2 + 4);
  EXPECT_TRUE(oracle::SameLanguage(lat, out));
}

// Hand trace at epsilon 0.5: the 0.75 branch gets a fresh copy of its
// destination, the 0.25 branch the shared copy; the merge state is reached
// with posterior 0.75 from the fresh copy (fresh again) and 0.25 from the
// shared one (shared).  Five states: 0, 1', 2*, 3', 3*.
TEST(ExpandPosterior, DiamondHandTrace) {
  const lr::Lattice lat = fixtures::ProbDiamond(0.75);
  const lr::ExpandedLattice e = lr::ExpandPosteriorDetailed(lat, Eps(0.5));
  EXPECT_EQ(e.lattice.NumStates(), 5);
  EXPECT_EQ(e.lattice.NumArcs(), 4u);
  EXPECT_EQ(e.input_state, (std::vector<lr::StateId>{0, 1, 2, 3, 3}));
  EXPECT_TRUE(IsPrefixTree(e.lattice));
  EXPECT_TRUE(oracle::SameLanguage(lat, e.lattice));
}

TEST(ExpandPosterior, SharedCopyAccumulatesMass) {
  // Two weak branches into state 3 share one copy; its outgoing arc then has
  // posterior 0.5 > 0.4 and is copied fresh.
  const lr::Lattice lat = lr::ParseLattice(
      "0 1 a " + fixtures::Cost(-std::log(0.5)) + ",0\n"
      "0 2 b " + fixtures::Cost(-std::log(0.25)) + ",0\n"
      "0 3 c " + fixtures::Cost(-std::log(0.25)) + ",0\n"
      "1 4 d 0,0\n2 4 d 0,0\n3 4 d 0,0\n4 5 e 0,0\n5 0\n");
  const lr::ExpandedLattice sum = lr::ExpandPosteriorDetailed(lat, Eps(0.4));
  // 0, 1 (fresh), 2 and 3 shared, 4 fresh from 1 (0.5) and 4 shared (two
  // 0.25 branches), then 5 fresh from both copies of 4 (0.5 each).
  EXPECT_EQ(sum.lattice.NumStates(), 8);
  EXPECT_TRUE(oracle::SameLanguage(lat, sum.lattice));
  // In the max semiring the shared copy of 4 only carries 0.25.
  const lr::ExpandedLattice max =
      lr::ExpandPosteriorDetailed(lat, Eps(0.4, lr::Semiring::kMax));
  EXPECT_TRUE(oracle::SameLanguage(lat, max.lattice));
}

TEST(ExpandPosterior, FullExpansionEpsilon) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 10);
    const double eps = lr::FullExpansionEpsilon(lat);
    EXPECT_GT(eps, 0.0);
    EXPECT_TRUE(IsPrefixTree(lr::ExpandPosterior(lat, Eps(eps))));
    EXPECT_TRUE(IsPrefixTree(lr::ExpandPosterior(lat, Eps(eps, lr::Semiring::kMax))));
  }
}

TEST(ExpandNgram, OrderBelowTwoRejected) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);
  EXPECT_THROW(lr::ExpandNgram(lat, 1), lr::ConfigError);
  EXPECT_THROW(lr::ExpandNgram(lat, 0), lr::ConfigError);
}

TEST(ExpandNgram, UniqueHistoriesKeepStructure) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);  // both branches end in c
  EXPECT_EQ(lr::ExpandNgram(lat, 2), lat);
}

TEST(ExpandNgram, SplitsMergeStateByLastWord) {
  const lr::Lattice lat =
      lr::ParseLattice("0 1 a 1,0\n0 2 b 1,0\n1 3 c 1,0\n2 3 d 1,0\n3 4 e 1,0\n4 0\n");
  const lr::ExpandedLattice e = lr::ExpandNgramDetailed(lat, 2);
  EXPECT_EQ(e.lattice.NumStates(), 6);
  EXPECT_EQ(std::count(e.input_state.begin(), e.input_state.end(), 3), 2);
  EXPECT_EQ(std::count(e.input_state.begin(), e.input_state.end(), 4), 1);
  EXPECT_TRUE(oracle::SameLanguage(lat, e.lattice));
}

TEST(ExpandNgram, LongOrderBuildsPrefixTree) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDoubleDiamond);
  const lr::Lattice out = lr::ExpandNgram(lat, static_cast<int>(MaxPathLength(lat)) + 1);
  EXPECT_TRUE(IsPrefixTree(out));
  EXPECT_TRUE(oracle::SameLanguage(lat, out));
}

TEST(ExpandProperty, LanguagePreserved) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 300; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 12);
    std::string why;
    for (double eps : {0.9, 0.5, 0.1, 0.005}) {
      for (auto sr : {lr::Semiring::kSum, lr::Semiring::kMax}) {
        const lr::Lattice out = lr::ExpandPosterior(lat, Eps(eps, sr));
        ASSERT_NO_THROW(lr::Validate(out));
        ASSERT_TRUE(oracle::SameLanguage(lat, out, 1e-9, &why)) << why;
      }
    }
    for (int n : {2, 3, 4}) {
      const lr::Lattice out = lr::ExpandNgram(lat, n);
      ASSERT_NO_THROW(lr::Validate(out));
      ASSERT_TRUE(oracle::SameLanguage(lat, out, 1e-9, &why)) << why;
    }
  }
}

TEST(ExpandProperty, FreshCopiesHaveOneIncomingArc) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 300; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 12);
    for (double eps : {0.5, 0.1, 0.02}) {
      const lr::Lattice out = lr::ExpandPosterior(lat, Eps(eps));
      // Output paths and costs equal the input's, so posteriors of output
      // arcs are the ones the expansion compared against epsilon.
      const auto post = lr::ArcPosteriors(out);
      const std::vector<int> in = lr::InDegrees(out);
      std::size_t id = 0;
      for (lr::StateId s = 0; s < out.NumStates(); ++s)
        for (const lr::Arc& a : out.Arcs(s)) {
          const double p = post[id++];
          if (p > eps + 1e-9) { EXPECT_EQ(in[a.next_state], 1); }
        }
    }
  }
}

TEST(ExpandProperty, FullExpansionMatchesLongNgram) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 200; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 12);
    const lr::Lattice post = lr::ExpandPosterior(lat, Eps(lr::FullExpansionEpsilon(lat)));
    const lr::Lattice ngram = lr::ExpandNgram(lat, static_cast<int>(MaxPathLength(lat)) + 1);
    ASSERT_TRUE(IsPrefixTree(post));
    ASSERT_TRUE(IsPrefixTree(ngram));
    EXPECT_EQ(post.NumStates(), ngram.NumStates());
    EXPECT_TRUE(oracle::SameLanguage(post, ngram));
  }
}

// Smaller thresholds copy at least as many states, checked over generated
// lattices.
TEST(ExpandProperty, StateCountGrowsAsEpsilonShrinks) {
  std::mt19937_64 rng(59);
  const double eps[] = {0.9, 0.5, 0.2, 0.1, 0.05, 0.01, 0.005, 0.001};
  std::size_t checked = 0;
  for (int t = 0; t < 500; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 12);
    lr::StateId prev = 0;
    for (double e : eps) {
      const lr::StateId n = lr::ExpandPosterior(lat, Eps(e)).NumStates();
      EXPECT_GE(n, prev) << "epsilon " << e << "\n" << lr::LatticeToString(lat);
      prev = n;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

}  // namespace
