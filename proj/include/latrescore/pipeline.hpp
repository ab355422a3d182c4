// latrescore/pipeline.hpp

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
#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "latrescore/cover.hpp"
#include "latrescore/errors.hpp"
#include "latrescore/expand.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/paths.hpp"
#include "latrescore/score.hpp"
#include "latrescore/scorer.hpp"
#include "latrescore/text_format.hpp"

namespace latrescore {

enum class Strategy { kNonIterative, kIterative, kReplace, kNbest };
enum class ExpansionMethod { kPosterior, kNgram };

inline Strategy ParseStrategy(std::string_view s) {
  if (s == "non-iterative") return Strategy::kNonIterative;
  if (s == "iterative") return Strategy::kIterative;
  if (s == "replace") return Strategy::kReplace;
  if (s == "nbest") return Strategy::kNbest;
  throw ConfigError("unknown strategy '" + std::string(s) +
                    "' (non-iterative|iterative|replace|nbest)");
}

inline std::string_view Name(Strategy s) {
  switch (s) {
    case Strategy::kNonIterative: return "non-iterative";
    case Strategy::kIterative: return "iterative";
    case Strategy::kReplace: return "replace";
    case Strategy::kNbest: return "nbest";
  }
  return "?";
}

inline ExpansionMethod ParseExpansion(std::string_view s) {
  if (s == "posterior") return ExpansionMethod::kPosterior;
  if (s == "ngram") return ExpansionMethod::kNgram;
  throw ConfigError("unknown expansion '" + std::string(s) + "' (posterior|ngram)");
}

struct RescoreConfig {
  Strategy strategy = Strategy::kNonIterative;
  ExpansionMethod expansion = ExpansionMethod::kPosterior;
  double epsilon = 0.5;
  int ngram_order = 3;
  double beam = 8.0;
  EstimationMethod estimation = EstimationMethod::kSemiViterbi;
  double lambda = 0.8;
  // Interpolation weight of the score-replacement stage of the iterative
  // strategy; defaults to lambda.
  std::optional<double> lambda1;
  int nbest = 20;
  Semiring posterior_semiring = Semiring::kSum;

  void Check() const {
    if (!(beam >= 0.0)) throw ConfigError("beam must be non-negative");
    InterpolationConfig{lambda}.Check();
    if (lambda1) InterpolationConfig{*lambda1}.Check();
    const bool expands =
        strategy == Strategy::kNonIterative || strategy == Strategy::kIterative;
    if (expands && expansion == ExpansionMethod::kPosterior)
      ExpansionConfig{epsilon, posterior_semiring}.Check();
    if (expands && expansion == ExpansionMethod::kNgram && ngram_order < 2)
      throw ConfigError("n-gram expansion order must be at least 2");
    if (strategy == Strategy::kNbest && nbest < 1)
      throw ConfigError("n-best size must be at least 1");
  }
};

struct RescoreStats {
  std::uint64_t scorer_calls = 0;
  std::uint64_t hypotheses_scored = 0;
  // Size of the lattice the final stage scored (expanded, when expanding).
  std::uint64_t states = 0;
  std::uint64_t arcs = 0;
  std::uint64_t arc_frames = 0;
  std::uint64_t utterance_frames = 0;

  RescoreStats& operator+=(const RescoreStats& o) {
    scorer_calls += o.scorer_calls;
    hypotheses_scored += o.hypotheses_scored;
    states += o.states;
    arcs += o.arcs;
    arc_frames += o.arc_frames;
    utterance_frames += o.utterance_frames;
    return *this;
  }
};

struct RescoreResult {
  Lattice lattice;
  RescoreStats stats;
};

// Longest path measured in frames.
inline std::int64_t MaxPathFrames(const Lattice& lat) {
  std::vector<std::int64_t> best(lat.NumStates(), -1);
  std::int64_t out = 0;
  for (StateId s = lat.NumStates() - 1; s >= 0; --s) {
    std::int64_t b = lat.IsFinal(s) ? 0 : -1;
    for (const Arc& a : lat.Arcs(s))
      if (best[a.next_state] >= 0) b = std::max(b, best[a.next_state] + a.num_frames);
    best[s] = b;
  }
  if (!lat.Empty()) out = std::max<std::int64_t>(best[lat.Start()], 0);
  return out;
}

inline std::int64_t TotalArcFrames(const Lattice& lat) {
  std::int64_t f = 0;
  for (StateId s = 0; s < lat.NumStates(); ++s)
    for (const Arc& a : lat.Arcs(s)) f += a.num_frames;
  return f;
}

// Average number of arcs crossing a frame: all arc frames over the longest
// path's frames.
inline double LatticeDepth(const Lattice& lat) {
  const std::int64_t frames = MaxPathFrames(lat);
  return frames == 0 ? 0.0 : double(TotalArcFrames(lat)) / double(frames);
}

namespace internal {

inline void RecordSize(const Lattice& lat, RescoreStats* stats) {
  stats->states = static_cast<std::uint64_t>(lat.NumStates());
  stats->arcs = lat.NumArcs();
  stats->arc_frames = static_cast<std::uint64_t>(TotalArcFrames(lat));
  stats->utterance_frames = static_cast<std::uint64_t>(MaxPathFrames(lat));
}

inline Lattice Expand(const Lattice& lat, const RescoreConfig& cfg) {
  if (cfg.expansion == ExpansionMethod::kNgram) return ExpandNgram(lat, cfg.ngram_order);
  return ExpandPosterior(lat, {cfg.epsilon, cfg.posterior_semiring});
}

// Expansion, cover, one scorer batch, estimation and merge.  No pruning.
inline RescoreResult ExpandAndRescore(const Lattice& lat, Scorer& scorer,
                                      const RescoreConfig& cfg) {
  RescoreResult r;
  const Lattice expanded = Expand(lat, cfg);
  const PathCover cover = ConstrainedPathCover(expanded);
  const std::vector<Hypothesis> hyps = CoverToHypotheses(cover);
  const ScoreBatch batch = ScoreHypotheses(scorer, hyps);
  r.lattice = MergeScores(expanded, BuildArcScores(expanded, cover, batch, cfg.estimation),
                          {cfg.lambda});
  r.stats.scorer_calls = 1;
  r.stats.hypotheses_scored = hyps.size();
  RecordSize(expanded, &r.stats);
  return r;
}

}  // namespace internal

// prune -> expand -> cover -> score (one batch) -> estimate -> merge.
inline RescoreResult RescoreNonIterative(const Lattice& lat, Scorer& scorer,
                                         const RescoreConfig& cfg) {
  cfg.Check();
  return internal::ExpandAndRescore(Prune(lat, cfg.beam), scorer, cfg);
}

// Score replacement on the pruned lattice, then expansion and rescoring of
// the result.  Two scorer batches.
inline RescoreResult RescoreIterative(const Lattice& lat, Scorer& scorer,
                                      const RescoreConfig& cfg) {
  cfg.Check();
  const Lattice pruned = Prune(lat, cfg.beam);
  const PathCover cover = ConstrainedPathCover(pruned);
  const std::vector<Hypothesis> hyps = CoverToHypotheses(cover);
  const ScoreBatch batch = ScoreHypotheses(scorer, hyps);
  const Lattice replaced =
      MergeScores(pruned, BuildArcScores(pruned, cover, batch, cfg.estimation),
                  {cfg.lambda1.value_or(cfg.lambda)});
  RescoreResult r = internal::ExpandAndRescore(replaced, scorer, cfg);
  r.stats.scorer_calls += 1;
  r.stats.hypotheses_scored += hyps.size();
  return r;
}

inline RescoreResult RescoreReplace(const Lattice& lat, Scorer& scorer,
                                    const RescoreConfig& cfg) {
  cfg.Check();
  RescoreResult r;
  const Lattice pruned = Prune(lat, cfg.beam);
  const PathCover cover = ConstrainedPathCover(pruned);
  const std::vector<Hypothesis> hyps = CoverToHypotheses(cover);
  const ScoreBatch batch = ScoreHypotheses(scorer, hyps);
  r.lattice = MergeScores(pruned, BuildArcScores(pruned, cover, batch, cfg.estimation),
                          {cfg.lambda});
  r.stats.scorer_calls = 1;
  r.stats.hypotheses_scored = hyps.size();
  internal::RecordSize(pruned, &r.stats);
  return r;
}

// The n cheapest complete paths in PathLess order (fewer if the lattice has
// fewer).  Best-first search with exact completion costs as heuristic.
inline std::vector<Path> NBestPaths(const Lattice& lat, std::size_t n) {
  std::vector<Path> out;
  if (lat.Empty() || n == 0) return out;
  const std::vector<double> h = internal::BackwardBestCosts(lat);
  struct Node {
    std::int64_t parent;
    ArcRef arc;
    StateId state;
    double cost;
  };
  std::vector<Node> nodes{{-1, {}, lat.Start(), 0.0}};
  // (estimated total, done flag, insertion order, node)
  using Entry = std::tuple<double, int, std::uint64_t, std::int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::uint64_t tick = 0;
  queue.emplace(h[lat.Start()], 1, tick++, 0);
  auto arcs_of = [&](std::int64_t node) {
    std::vector<ArcRef> arcs;
    for (; nodes[node].parent >= 0; node = nodes[node].parent) arcs.push_back(nodes[node].arc);
    std::reverse(arcs.begin(), arcs.end());
    return arcs;
  };
  while (!queue.empty() && out.size() < n) {
    const auto [f, open, order, id] = queue.top();
    queue.pop();
    (void)order;
    if (!open) {
      out.push_back(MakePath(lat, arcs_of(id)));
      continue;
    }
    const Node node = nodes[id];
    if (lat.IsFinal(node.state))
      queue.emplace(node.cost + lat.Final(node.state), 0, tick++, id);
    for (std::size_t i = 0; i < lat.Arcs(node.state).size(); ++i) {
      const Arc& a = lat.Arcs(node.state)[i];
      nodes.push_back({id, {node.state, static_cast<std::int32_t>(i)}, a.next_state,
                       node.cost + a.Cost()});
      queue.emplace(nodes.back().cost + h[a.next_state], 1, tick++,
                    static_cast<std::int64_t>(nodes.size() - 1));
    }
  }
  std::sort(out.begin(), out.end(), PathLess);
  return out;
}

// Interpolated cost of a path given per-token scores (words + end of
// sentence): lambda * sum(scores) + (1 - lambda) * graph + acoustic.
inline double InterpolatedPathCost(const Lattice& lat, const Path& p,
                                   std::span<const double> scores, double lambda) {
  double nn = 0.0;
  for (double c : scores) nn += c;
  return lambda * nn + (1.0 - lambda) * PathGraphCost(lat, p) + PathAcousticCost(lat, p);
}

// A path as a linear lattice whose graph costs are interpolated with the
// given per-token scores.
inline Lattice RescoredPathLattice(const Lattice& lat, const Path& p,
                                   std::span<const double> scores, double lambda) {
  Lattice out = PathToLattice(lat, p);
  for (StateId s = 0; s + 1 < out.NumStates(); ++s) {
    Arc& a = out.MutableArcs(s)[0];
    a.graph_cost = lambda * scores[s] + (1.0 - lambda) * a.graph_cost;
  }
  const StateId f = out.NumStates() - 1;
  out.SetFinal(f, lambda * scores.back() + (1.0 - lambda) * out.Final(f));
  return out;
}

struct NbestResult {
  Path path;  // a path of the input lattice
  double cost = 0.0;
  Lattice lattice;  // the chosen path with interpolated costs
  RescoreStats stats;
};

// Rescores the n cheapest paths exactly, in one batch, and returns the one
// with the lowest interpolated cost (earliest in n-best order on ties).
inline NbestResult RescoreNbest(const Lattice& lat, Scorer& scorer, int n, double lambda) {
  if (n < 1) throw ConfigError("n-best size must be at least 1");
  InterpolationConfig{lambda}.Check();
  std::vector<Path> paths = NBestPaths(lat, static_cast<std::size_t>(n));
  if (paths.empty()) throw ValidationError("n-best of an empty lattice");
  std::vector<Hypothesis> hyps;
  for (std::size_t i = 0; i < paths.size(); ++i) hyps.push_back({i, paths[i].words});
  const ScoreBatch batch = ScoreHypotheses(scorer, hyps);
  std::size_t best = 0;
  double best_cost = kInfinity;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double c = InterpolatedPathCost(lat, paths[i], batch.response[i].costs, lambda);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  NbestResult r;
  r.path = paths[best];
  r.cost = best_cost;
  r.lattice = RescoredPathLattice(lat, paths[best], batch.response[best].costs, lambda);
  r.stats.scorer_calls = 1;
  r.stats.hypotheses_scored = paths.size();
  internal::RecordSize(r.lattice, &r.stats);
  return r;
}

inline RescoreResult Rescore(const Lattice& lat, Scorer& scorer, const RescoreConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::kNonIterative: return RescoreNonIterative(lat, scorer, cfg);
    case Strategy::kIterative: return RescoreIterative(lat, scorer, cfg);
    case Strategy::kReplace: return RescoreReplace(lat, scorer, cfg);
    case Strategy::kNbest: {
      cfg.Check();
      NbestResult n = RescoreNbest(lat, scorer, cfg.nbest, cfg.lambda);
      return {std::move(n.lattice), n.stats};
    }
  }
  throw ConfigError("unknown strategy");
}

/** Runs `task(i)` for i in [0, count) on `jobs` worker threads.  The first
 *  exception (lowest index) is rethrown after all workers finish.
 */
template <typename Task>
void ParallelFor(std::size_t count, int jobs, Task&& task) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, jobs < 1 ? 1 : jobs));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct ArchiveResult {
  Archive archive;  // input order
  std::vector<RescoreStats> stats;
  RescoreStats total;
};

// One lattice per task; output order follows the input regardless of
// completion order.
inline ArchiveResult RescoreArchive(const Archive& in, Scorer& scorer,
                                    const RescoreConfig& cfg, int jobs = 1) {
  cfg.Check();
  ArchiveResult r;
  r.archive.resize(in.size());
  r.stats.resize(in.size());
  ParallelFor(in.size(), jobs, [&](std::size_t i) {
    RescoreResult res = Rescore(in[i].lattice, scorer, cfg);
    r.archive[i] = {in[i].id, std::move(res.lattice)};
    r.stats[i] = res.stats;
  });
  for (const auto& s : r.stats) r.total += s;
  return r;
}

}  // namespace latrescore
