// tests/score_test.cpp

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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"

namespace lr = latrescore;

namespace {

using lr::EstimationMethod;

// Returns canned responses; lets tests break the protocol on purpose.
class ScriptedScorer : public lr::Scorer {
 public:
  std::function<std::vector<lr::ScoreResponse>(std::span<const lr::ScoreRequest>)> fn;
  std::vector<lr::ScoreResponse> Score(std::span<const lr::ScoreRequest> b) override { return fn(b); }
  bool InVocabulary(std::string_view w) const override { return w != "oov"; }
};

lr::ScoreCandidate C(double token, double history, double path) {
  return {0, token, history, path};
}

TEST(ScoreHypotheses, UniformCosts) {
  lr::UniformScorer u(20);
  const std::vector<lr::Hypothesis> hyps{{0, {"a", "b", "c"}}};
  const lr::ScoreBatch b = lr::ScoreHypotheses(u, hyps);
  ASSERT_EQ(b.response[0].costs.size(), 4u);
  for (double c : b.response[0].costs) EXPECT_DOUBLE_EQ(c, std::log(20.0));
}

TEST(ScoreHypotheses, BigramHandValues) {
  lr::BigramScorer lm = lr::BigramScorer::FromText("a b\na c\n");
  const std::vector<lr::Hypothesis> hyps{{0, {"a", "b"}}};
  const auto costs = lr::ScoreHypotheses(lm, hyps).response[0].costs;
  EXPECT_NEAR(costs[0], oracle::LaplaceCost(2, 2, 5), 1e-12);
  EXPECT_NEAR(costs[1], oracle::LaplaceCost(1, 2, 5), 1e-12);
  EXPECT_NEAR(costs[2], oracle::LaplaceCost(1, 1, 5), 1e-12);
}

TEST(ScoreHypotheses, OneCallPerBatch) {
  lr::HashScorer h;
  lr::CountingScorer counter(h);
  std::vector<lr::Hypothesis> hyps;
  for (std::size_t i = 0; i < 7; ++i) hyps.push_back({i, {"w" + std::to_string(i)}});
  lr::ScoreHypotheses(counter, hyps);
  EXPECT_EQ(counter.calls(), 1u);
  EXPECT_EQ(counter.hypotheses(), 7u);
}

TEST(ScoreHypotheses, UnknownWordsBecomeUnk) {
  ScriptedScorer s;
  std::vector<std::string> seen;
  s.fn = [&](std::span<const lr::ScoreRequest> b) {
    seen = b[0].tokens;
    return std::vector<lr::ScoreResponse>{{b[0].id, std::vector<double>(b[0].tokens.size() + 1, 1.0)}};
  };
  const std::vector<lr::Hypothesis> hyps{{0, {"a", "oov"}}};
  lr::ScoreHypotheses(s, hyps);
  EXPECT_EQ(seen, (std::vector<std::string>{"a", "<unk>"}));
}

TEST(ScoreHypotheses, ResponsesReordered) {
  ScriptedScorer s;
  s.fn = [](std::span<const lr::ScoreRequest> b) {
    std::vector<lr::ScoreResponse> out;
    for (std::size_t i = b.size(); i-- > 0;)
      out.push_back({b[i].id, std::vector<double>(b[i].tokens.size() + 1, double(b[i].id))});
    return out;
  };
  const std::vector<lr::Hypothesis> hyps{{0, {"a"}}, {1, {"b"}}, {2, {"c"}}};
  const auto b = lr::ScoreHypotheses(s, hyps);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(b.response[i].id, static_cast<std::int64_t>(i));
}

TEST(ScoreHypotheses, ProtocolViolations) {
  const std::vector<lr::Hypothesis> hyps{{0, {"a"}}, {1, {"b"}}};
  ScriptedScorer s;
  auto ok = [](std::int64_t id) { return lr::ScoreResponse{id, {1.0, 1.0}}; };
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0)}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), ok(0)}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), ok(5)}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), {1, {1.0}}}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), {1, {1.0, NAN}}}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), {1, {1.0, -0.5}}}; };
  EXPECT_THROW(lr::ScoreHypotheses(s, hyps), lr::ScorerProtocolError);
  s.fn = [&](auto) { return std::vector<lr::ScoreResponse>{ok(0), {1, {1.0, -1e-12}}}; };
  EXPECT_NO_THROW(lr::ScoreHypotheses(s, hyps));
  EXPECT_THROW(lr::ScoreHypotheses(s, std::vector<lr::Hypothesis>{}), lr::ValidationError);
  EXPECT_THROW(lr::ScoreHypotheses(s, std::vector<lr::Hypothesis>{{0, {"<s>"}}}),
               lr::ValidationError);
}

TEST(Estimate, SingleCandidateAllAgree) {
  const std::vector<lr::ScoreCandidate> c{C(2.5, 1.0, 7.0)};
  for (auto m : {EstimationMethod::kAverage, EstimationMethod::kWeightedAverage,
                 EstimationMethod::kSemiViterbi})
    EXPECT_DOUBLE_EQ(lr::Estimate(c, m), 2.5);
}

TEST(Estimate, AverageAndSemiViterbi) {
  const std::vector<lr::ScoreCandidate> c{C(1.0, 0.0, 5.0), C(3.0, 0.0, 4.0)};
  EXPECT_DOUBLE_EQ(lr::Estimate(c, EstimationMethod::kAverage), 2.0);
  EXPECT_DOUBLE_EQ(lr::Estimate(c, EstimationMethod::kSemiViterbi), 3.0);
}

TEST(Estimate, WeightedEqualHistories) {
  const std::vector<lr::ScoreCandidate> c{C(1.0, std::log(2.0), 0), C(3.0, std::log(2.0), 0)};
  EXPECT_DOUBLE_EQ(lr::Estimate(c, EstimationMethod::kWeightedAverage), 2.0);
}

TEST(Estimate, WeightedFavoursLikelyHistories) {
  // Weights exp(-1) : exp(-2).
  const std::vector<lr::ScoreCandidate> c{C(1.0, 1.0, 0), C(3.0, 2.0, 0)};
  const double w1 = std::exp(-1.0), w2 = std::exp(-2.0);
  EXPECT_NEAR(lr::Estimate(c, EstimationMethod::kWeightedAverage), (w1 * 1 + w2 * 3) / (w1 + w2), 1e-12);
  // Huge history costs do not underflow.
  const std::vector<lr::ScoreCandidate> far{C(1.0, 5000, 0), C(3.0, 5000, 0)};
  EXPECT_DOUBLE_EQ(lr::Estimate(far, EstimationMethod::kWeightedAverage), 2.0);
}

TEST(Estimate, SemiViterbiTiesTakeFirst) {
  const std::vector<lr::ScoreCandidate> c{C(1.0, 0, 4.0), C(3.0, 0, 4.0)};
  EXPECT_DOUBLE_EQ(lr::Estimate(c, EstimationMethod::kSemiViterbi), 1.0);
  EXPECT_THROW(lr::Estimate(std::vector<lr::ScoreCandidate>{}, EstimationMethod::kAverage),
               lr::UncoveredArcError);
}

TEST(EstimationMethod, Parse) {
  EXPECT_EQ(lr::ParseEstimation("average"), EstimationMethod::kAverage);
  EXPECT_EQ(lr::ParseEstimation("weighted"), EstimationMethod::kWeightedAverage);
  EXPECT_EQ(lr::ParseEstimation("semi-viterbi"), EstimationMethod::kSemiViterbi);
  EXPECT_THROW(lr::ParseEstimation("median"), lr::ConfigError);
  EXPECT_EQ(lr::Name(EstimationMethod::kSemiViterbi), "semi-viterbi");
}

TEST(BuildArcScores, DiamondCandidates) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);
  const lr::PathCover cover = lr::ConstrainedPathCover(lat);
  lr::HashScorer h;
  const lr::ScoreBatch batch = lr::ScoreHypotheses(h, lr::CoverToHypotheses(cover));
  const lr::ArcScoreTable t = lr::BuildArcScores(lat, cover, batch, EstimationMethod::kAverage);
  ASSERT_EQ(t.arcs.size(), 4u);
  // Arc 2 (1 -> 3, c after a) is the second token of path 0.
  ASSERT_EQ(t.arcs[2].candidates.size(), 1u);
  EXPECT_EQ(t.arcs[2].estimate, batch.response[0].costs[1]);
  EXPECT_EQ(t.arcs[2].candidates[0].history_cost, batch.response[0].costs[0]);
  EXPECT_EQ(t.finals[3].candidates.size(), 2u);
  EXPECT_DOUBLE_EQ(t.finals[3].estimate,
                   0.5 * (batch.response[0].costs[2] + batch.response[1].costs[2]));
}

TEST(BuildArcScores, MismatchedBatch) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);
  const lr::PathCover cover = lr::ConstrainedPathCover(lat);
  lr::ScoreBatch empty;
  EXPECT_THROW(lr::BuildArcScores(lat, cover, empty, EstimationMethod::kAverage), lr::UncoveredArcError);
}

TEST(MergeScores, Interpolation) {
  const lr::Lattice lat = lr::ParseLattice("0 1 a 1,0.5\n1 2\n");
  lr::ArcScoreTable t;
  t.arcs.resize(1);
  t.arcs[0].candidates = {C(2.0, 0, 0)};
  t.arcs[0].estimate = 2.0;
  t.finals.resize(2);
  t.finals[1].candidates = {C(4.0, 0, 0)};
  t.finals[1].estimate = 4.0;
  const lr::Lattice m = lr::MergeScores(lat, t, {0.8});
  EXPECT_DOUBLE_EQ(m.GetArc(0, 0).graph_cost, 0.8 * 2.0 + 0.2 * 1.0);
  EXPECT_DOUBLE_EQ(m.GetArc(0, 0).acoustic_cost, 0.5);
  EXPECT_DOUBLE_EQ(m.Final(1), 0.8 * 4.0 + 0.2 * 2.0);
  EXPECT_EQ(lr::MergeScores(lat, t, {0.0}), lat);
  EXPECT_DOUBLE_EQ(lr::MergeScores(lat, t, {1.0}).GetArc(0, 0).graph_cost, 2.0);
  EXPECT_THROW(lr::MergeScores(lat, t, {1.5}), lr::ConfigError);
  t.arcs[0].candidates.clear();
  EXPECT_THROW(lr::MergeScores(lat, t, {0.5}), lr::UncoveredArcError);
}

TEST(ReplaceScores, LinearIsExact) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kLinear);
  lr::HashScorer h;
  const lr::Lattice out = lr::ReplaceScores(lat, h, EstimationMethod::kSemiViterbi, {0.8});
  const auto costs = h.Score(std::vector<lr::ScoreRequest>{{0, {"a", "b", "c"}}})[0].costs;
  for (int s = 0; s < 3; ++s)
    EXPECT_DOUBLE_EQ(out.GetArc(s, 0).graph_cost, 0.8 * costs[s] + 0.2 * lat.GetArc(s, 0).graph_cost);
  EXPECT_DOUBLE_EQ(out.Final(3), 0.8 * costs[3] + 0.2 * lat.Final(3));
  EXPECT_EQ(lr::ReplaceScores(lat, h, EstimationMethod::kSemiViterbi, {0.0}), lat);
}

TEST(ReplaceScores, DiamondUniform) {
  const lr::Lattice lat = fixtures::Parse(fixtures::kDiamond);
  lr::UniformScorer u(50);
  const lr::Lattice out = lr::ReplaceScores(lat, u, EstimationMethod::kAverage, {1.0});
  for (lr::StateId s = 0; s < out.NumStates(); ++s)
    for (const lr::Arc& a : out.Arcs(s)) EXPECT_DOUBLE_EQ(a.graph_cost, std::log(50.0));
  EXPECT_DOUBLE_EQ(out.Final(3), std::log(50.0));
}

TEST(ScoreProperty, EstimatesAreBoundedByCandidates) {
  std::mt19937_64 rng(71);
  lr::HashScorer h;
  for (int t = 0; t < 200; ++t) {
    const lr::Lattice lat = oracle::RandomLattice(rng, 12);
    const lr::PathCover cover = lr::ConstrainedPathCover(lat);
    const lr::ScoreBatch batch = lr::ScoreHypotheses(h, lr::CoverToHypotheses(cover));
    for (auto m : {EstimationMethod::kAverage, EstimationMethod::kWeightedAverage,
                   EstimationMethod::kSemiViterbi}) {
      const lr::ArcScoreTable table = lr::BuildArcScores(lat, cover, batch, m);
      for (const auto& e : table.arcs) {
        ASSERT_FALSE(e.candidates.empty());
        double lo = lr::kInfinity, hi = -lr::kInfinity;
        bool member = false;
        for (const auto& c : e.candidates) {
          lo = std::min(lo, c.token_cost);
          hi = std::max(hi, c.token_cost);
          member = member || c.token_cost == e.estimate;
        }
        EXPECT_GE(e.estimate, lo - 1e-12);
        EXPECT_LE(e.estimate, hi + 1e-12);
        if (m == EstimationMethod::kSemiViterbi) { EXPECT_TRUE(member); }
      }
      // Structure is untouched by merging.
      const lr::Lattice merged = lr::MergeScores(lat, table, {0.7});
      ASSERT_EQ(merged.NumStates(), lat.NumStates());
      for (lr::StateId s = 0; s < lat.NumStates(); ++s) {
        ASSERT_EQ(merged.Arcs(s).size(), lat.Arcs(s).size());
        EXPECT_EQ(merged.IsFinal(s), lat.IsFinal(s));
        for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i) {
          EXPECT_EQ(merged.Arcs(s)[i].word, lat.Arcs(s)[i].word);
          EXPECT_EQ(merged.Arcs(s)[i].next_state, lat.Arcs(s)[i].next_state);
          EXPECT_EQ(merged.Arcs(s)[i].acoustic_cost, lat.Arcs(s)[i].acoustic_cost);
          EXPECT_EQ(merged.Arcs(s)[i].num_frames, lat.Arcs(s)[i].num_frames);
        }
      }
    }
  }
}

TEST(ScoreProperty, PrefixTreeIsExact) {
  std::mt19937_64 rng(73);
  lr::HashScorer h;
  for (int t = 0; t < 200; ++t) {
    const lr::Lattice in = oracle::RandomLattice(rng, 10);
    const lr::Lattice lat =
        lr::ExpandPosterior(in, {lr::FullExpansionEpsilon(in), lr::Semiring::kSum});
    const lr::PathCover cover = lr::ConstrainedPathCover(lat);
    const lr::ScoreBatch batch = lr::ScoreHypotheses(h, lr::CoverToHypotheses(cover));
    std::vector<lr::Lattice> merged;
    for (auto m : {EstimationMethod::kAverage, EstimationMethod::kWeightedAverage,
                   EstimationMethod::kSemiViterbi}) {
      const lr::ArcScoreTable table = lr::BuildArcScores(lat, cover, batch, m);
      // Every candidate of an arc sees the same history.
      for (const auto& e : table.arcs)
        for (const auto& c : e.candidates) {
          EXPECT_EQ(c.token_cost, e.candidates[0].token_cost);
          EXPECT_EQ(c.history_cost, e.candidates[0].history_cost);
        }
      merged.push_back(lr::MergeScores(lat, table, {1.0}));
    }
    for (int k = 1; k < 3; ++k)
      for (lr::StateId s = 0; s < lat.NumStates(); ++s) {
        for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i)
          EXPECT_NEAR(merged[k].Arcs(s)[i].graph_cost, merged[0].Arcs(s)[i].graph_cost, 1e-9);
        if (lat.IsFinal(s)) { EXPECT_NEAR(merged[k].Final(s), merged[0].Final(s), 1e-9); }
      }
    for (const auto& p : oracle::AllPaths(merged[0])) {
      const auto costs = h.Score(std::vector<lr::ScoreRequest>{{0, p.words}})[0].costs;
      double exact = 0.0;
      for (double c : costs) exact += c;
      EXPECT_NEAR(p.graph, exact, 1e-9);
    }
  }
}

}  // namespace
