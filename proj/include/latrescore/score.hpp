// latrescore/score.hpp

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

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latrescore/cover.hpp"
#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/scorer.hpp"

namespace latrescore {

struct ScoreBatch {
  std::vector<ScoreRequest> request;
  std::vector<ScoreResponse> response;  // response[i] answers request[i]
};

// Tolerance for slightly negative costs from floating-point scorers.
inline constexpr double kNegativeCostSlack = 1e-9;

// Scores all hypotheses of one lattice with a single scorer call.  Words the
// scorer does not know are replaced by <unk>.  The response is checked and
// put in request order.
inline ScoreBatch ScoreHypotheses(Scorer& scorer, std::span<const Hypothesis> hyps) {
  if (hyps.empty()) throw ValidationError("nothing to score");
  ScoreBatch batch;
  batch.request.reserve(hyps.size());
  for (const Hypothesis& h : hyps) {
    ScoreRequest r{static_cast<std::int64_t>(h.id), {}};
    r.tokens.reserve(h.words.size());
    for (const std::string& w : h.words) {
      if (IsStructuralToken(w))
        throw ValidationError("structural token '" + w + "' in a hypothesis");
      r.tokens.push_back(scorer.InVocabulary(w) ? w : std::string(kUnknown));
    }
    batch.request.push_back(std::move(r));
  }

  std::vector<ScoreResponse> raw = scorer.Score(batch.request);
  if (raw.size() != batch.request.size())
    throw ScorerProtocolError("scorer returned " + std::to_string(raw.size()) +
                              " responses for " + std::to_string(batch.request.size()) +
                              " requests");
  std::map<std::int64_t, std::size_t> position;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!position.emplace(raw[i].id, i).second)
      throw ScorerProtocolError("duplicate response id " + std::to_string(raw[i].id));
  batch.response.reserve(raw.size());
  for (const ScoreRequest& r : batch.request) {
    auto it = position.find(r.id);
    if (it == position.end())
      throw ScorerProtocolError("no response for request id " + std::to_string(r.id));
    ScoreResponse& resp = raw[it->second];
    if (resp.costs.size() != r.tokens.size() + 1)
      throw ScorerProtocolError("response " + std::to_string(r.id) + " has " +
                                std::to_string(resp.costs.size()) + " costs, expected " +
                                std::to_string(r.tokens.size() + 1));
    for (double c : resp.costs)
      if (!std::isfinite(c) || c < -kNegativeCostSlack)
        throw ScorerProtocolError("response " + std::to_string(r.id) +
                                  " has an invalid cost");
    batch.response.push_back(std::move(resp));
  }
  return batch;
}

enum class EstimationMethod { kAverage, kWeightedAverage, kSemiViterbi };

inline EstimationMethod ParseEstimation(std::string_view s) {
  if (s == "average") return EstimationMethod::kAverage;
  if (s == "weighted" || s == "weighted-average") return EstimationMethod::kWeightedAverage;
  if (s == "semi-viterbi") return EstimationMethod::kSemiViterbi;
  throw ConfigError("unknown estimation '" + std::string(s) +
                    "' (average|weighted|semi-viterbi)");
}

inline std::string_view Name(EstimationMethod m) {
  switch (m) {
    case EstimationMethod::kAverage: return "average";
    case EstimationMethod::kWeightedAverage: return "weighted";
    case EstimationMethod::kSemiViterbi: return "semi-viterbi";
  }
  return "?";
}

// One neural score seen for an arc through one cover path.
struct ScoreCandidate {
  std::size_t path = 0;
  double token_cost = 0.0;
  // Sum of the path's token costs before this arc.
  double history_cost = 0.0;
  // First-pass cost of the whole cover path.
  double path_cost = 0.0;
};

struct ArcEstimate {
  std::vector<ScoreCandidate> candidates;  // cover order
  double estimate = 0.0;
};

// Estimates for every arc (ArcIndex order) and for the end of sentence at
// every final state (indexed by state; empty for non-final states).
struct ArcScoreTable {
  std::vector<ArcEstimate> arcs;
  std::vector<ArcEstimate> finals;
};

/** Reduces an arc's candidates to one cost.
 *
 *  average:       mean of the token costs.
 *  weighted:      token costs weighted by the normalized history
 *                 probabilities exp(-h_i) / sum_j exp(-h_j).
 *  semi-viterbi:  token cost of the candidate from the cheapest cover path
 *                 (first in cover order on ties).
 */
inline double Estimate(std::span<const ScoreCandidate> c, EstimationMethod m) {
  if (c.empty()) throw UncoveredArcError("no candidate scores");
  switch (m) {
    case EstimationMethod::kAverage: {
      double sum = 0.0;
      for (const auto& x : c) sum += x.token_cost;
      return sum / double(c.size());
    }
    case EstimationMethod::kWeightedAverage: {
      double best = kInfinity;
      for (const auto& x : c) best = std::min(best, x.history_cost);
      double num = 0.0, den = 0.0;
      for (const auto& x : c) {
        const double w = std::exp(best - x.history_cost);
        num += w * x.token_cost;
        den += w;
      }
      return num / den;
    }
    case EstimationMethod::kSemiViterbi: {
      const ScoreCandidate* pick = &c[0];
      for (const auto& x : c)
        if (x.path_cost < pick->path_cost) pick = &x;
      return pick->token_cost;
    }
  }
  return 0.0;
}

inline ArcScoreTable BuildArcScores(const Lattice& lat, const PathCover& cover,
                                    const ScoreBatch& batch, EstimationMethod method) {
  if (batch.response.size() != cover.paths.size())
    throw UncoveredArcError("score batch does not match the path cover");
  for (std::size_t i = 0; i < cover.paths.size(); ++i)
    if (batch.response[i].costs.size() != cover.paths[i].path.arcs.size() + 1)
      throw ScorerProtocolError("scores of path " + std::to_string(i) +
                                " do not match its length");
  // Running history sums per path.
  std::vector<std::vector<double>> prefix(cover.paths.size());
  for (std::size_t i = 0; i < cover.paths.size(); ++i) {
    const auto& costs = batch.response[i].costs;
    prefix[i].assign(costs.size() + 1, 0.0);
    for (std::size_t k = 0; k < costs.size(); ++k) prefix[i][k + 1] = prefix[i][k] + costs[k];
  }

  const ArcIndex index(lat);
  if (cover.arc_to_paths.size() != index.size())
    throw UncoveredArcError("path cover belongs to a different lattice");
  ArcScoreTable table;
  table.arcs.resize(index.size());
  for (std::size_t a = 0; a < index.size(); ++a) {
    ArcEstimate& est = table.arcs[a];
    for (const PathPosition& pp : cover.arc_to_paths[a])
      est.candidates.push_back({pp.path, batch.response[pp.path].costs[pp.position],
                                prefix[pp.path][pp.position],
                                cover.paths[pp.path].path.cost});
    if (est.candidates.empty())
      throw UncoveredArcError("arc " + std::to_string(a) + " is not on any cover path");
    est.estimate = Estimate(est.candidates, method);
  }
  table.finals.resize(lat.NumStates());
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    if (!lat.IsFinal(s)) continue;
    ArcEstimate& est = table.finals[s];
    for (std::size_t p : cover.final_to_paths[s]) {
      const auto& costs = batch.response[p].costs;
      est.candidates.push_back({p, costs.back(), prefix[p][costs.size() - 1],
                                cover.paths[p].path.cost});
    }
    if (est.candidates.empty())
      throw UncoveredArcError("final state " + std::to_string(s) +
                              " does not end any cover path");
    est.estimate = Estimate(est.candidates, method);
  }
  return table;
}

struct InterpolationConfig {
  // Weight of the new scores; the original graph costs get 1 - lambda.
  double lambda = 0.8;

  void Check() const {
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw ConfigError("interpolation weight must lie in [0, 1]");
  }
};

// Interpolates the estimates into the graph costs and final costs.  Acoustic
// costs and structure are left alone.
inline Lattice MergeScores(const Lattice& lat, const ArcScoreTable& table,
                           const InterpolationConfig& cfg) {
  cfg.Check();
  const ArcIndex index(lat);
  if (table.arcs.size() != index.size() ||
      table.finals.size() != static_cast<std::size_t>(lat.NumStates()))
    throw UncoveredArcError("score table does not match the lattice");
  const double l = cfg.lambda;
  Lattice out = lat;
  for (StateId s = 0; s < out.NumStates(); ++s) {
    auto& arcs = out.MutableArcs(s);
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const ArcEstimate& e = table.arcs[index.Id(s, i)];
      if (e.candidates.empty())
        throw UncoveredArcError("arc " + std::to_string(index.Id(s, i)) + " has no score");
      arcs[i].graph_cost = l * e.estimate + (1.0 - l) * arcs[i].graph_cost;
    }
    if (out.IsFinal(s)) {
      const ArcEstimate& e = table.finals[s];
      if (e.candidates.empty())
        throw UncoveredArcError("final state " + std::to_string(s) + " has no score");
      out.SetFinal(s, l * e.estimate + (1.0 - l) * out.Final(s));
    }
  }
  return out;
}

// Cover, score, estimate and merge without changing the lattice structure.
inline Lattice ReplaceScores(const Lattice& lat, Scorer& scorer, EstimationMethod method,
                             const InterpolationConfig& cfg) {
  cfg.Check();
  const PathCover cover = ConstrainedPathCover(lat);
  const ScoreBatch batch = ScoreHypotheses(scorer, CoverToHypotheses(cover));
  return MergeScores(lat, BuildArcScores(lat, cover, batch, method), cfg);
}

}  // namespace latrescore
