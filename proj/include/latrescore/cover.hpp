// latrescore/cover.hpp

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
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "latrescore/lattice.hpp"
#include "latrescore/paths.hpp"
#include "latrescore/viterbi.hpp"

namespace latrescore {

// Sum over states of max(out-degree - in-degree, 0).  This counts the paths
// of an arc-disjoint decomposition; covers may share arcs, so the actual
// minimum (MinCoverSize) can be smaller or larger.
inline std::size_t DegreeBound(const Lattice& lat) {
  const std::vector<int> in = InDegrees(lat);
  std::size_t total = 0;
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    const int out = static_cast<int>(lat.Arcs(s).size());
    const int deg_in = s == lat.Start() ? 0 : in[s];
    total += static_cast<std::size_t>(std::max(out - deg_in, 0));
  }
  return total;
}

namespace internal {

// Dinic max flow on a small graph with 64-bit capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : graph_(n) {}

  void AddEdge(int u, int v, std::int64_t cap) {
    graph_[u].push_back({v, static_cast<int>(graph_[v].size()), cap});
    graph_[v].push_back({u, static_cast<int>(graph_[u].size()) - 1, 0});
  }

  std::int64_t Run(int s, int t) {
    std::int64_t flow = 0;
    while (Levels(s, t)) {
      iter_.assign(graph_.size(), 0);
      while (std::int64_t f = Augment(s, t, std::numeric_limits<std::int64_t>::max()))
        flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    int to, rev;
    std::int64_t cap;
  };

  bool Levels(int s, int t) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const Edge& e : graph_[u]) {
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  // Recursion depth is bounded by the longest path.
  std::int64_t Augment(int u, int t, std::int64_t limit) {
    if (u == t) return limit;
    for (std::size_t& i = iter_[u]; i < graph_[u].size(); ++i) {
      Edge& e = graph_[u][i];
      if (e.cap <= 0 || level_[e.to] != level_[u] + 1) continue;
      std::int64_t f = Augment(e.to, t, std::min(limit, e.cap));
      if (f > 0) {
        e.cap -= f;
        graph_[e.to][e.rev].cap += f;
        return f;
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace internal

/** Fewest complete paths such that every arc, and every final exit, lies on
 *  at least one of them.
 *
 *  Solved as a minimum flow with unit lower bounds: start from the feasible
 *  flow given by one best path per arc and per final exit, then cancel as
 *  much flow as possible by a max flow from the sink back to the start in
 *  the residual graph.
 */
inline std::size_t MinCoverSize(const Lattice& lat) {
  if (lat.Empty()) return 0;
  const StateId n = lat.NumStates();
  const int sink = n;
  const ArcIndex index(lat);
  const ForwardBackwardTable fb = ForwardBackward(lat, Semiring::kMax);
  std::vector<std::int64_t> arc_flow(index.size(), 0), final_flow(n, 0);
  std::int64_t total = 0;
  auto add_path = [&](const std::vector<ArcRef>& arcs) {
    for (const ArcRef& r : arcs) ++arc_flow[index.Id(r)];
    const StateId f = arcs.empty() ? lat.Start()
                                   : lat.GetArc(arcs.back().state, arcs.back().index)
                                         .next_state;
    ++final_flow[f];
    ++total;
  };
  for (StateId s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i)
      add_path(BestArcsThrough(lat, fb, {s, static_cast<std::int32_t>(i)}));
    if (lat.IsFinal(s)) add_path(BestArcsEndingAt(fb, s));
  }
  constexpr std::int64_t kUnbounded = std::int64_t{1} << 40;
  internal::MaxFlow mf(n + 1);
  for (StateId s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i) {
      const StateId t = lat.Arcs(s)[i].next_state;
      const std::int64_t f = arc_flow[index.Id(s, i)];
      mf.AddEdge(t, s, f - 1);
      mf.AddEdge(s, t, kUnbounded);
    }
    if (lat.IsFinal(s)) {
      mf.AddEdge(sink, s, final_flow[s] - 1);
      mf.AddEdge(s, sink, kUnbounded);
    }
  }
  return static_cast<std::size_t>(total - mf.Run(sink, lat.Start()));
}

struct CoverPath {
  Path path;
  // Arcs (ArcIndex ids) whose best path is this path.
  std::vector<std::size_t> covered_arcs;
  // True if this is also the best path ending at its final state.
  bool covers_final = false;
};

struct PathPosition {
  std::size_t path = 0;
  std::size_t position = 0;
};

struct PathCover {
  std::vector<CoverPath> paths;  // ascending PathLess order
  // Per ArcIndex id: every cover path through the arc, in cover order.
  std::vector<std::vector<PathPosition>> arc_to_paths;
  // Per state: the cover paths that end there.
  std::vector<std::vector<std::size_t>> final_to_paths;
  // Paths generated before redundancy removal.
  std::size_t num_generated = 0;
};

/** Constrained path cover.
 *
 *  For every arc, and every final exit, the best complete path through it is
 *  built from the Viterbi predecessor and successor links.  While a path is
 *  built, every other arc for which it is also the best path is recorded, so
 *  no best path is generated twice.  The paths are sorted by cost and then
 *  swept from the worst to the best, dropping any path whose arcs and final
 *  exit all stay covered by the remaining ones.  Every kept path is the best
 *  path of at least one of its arcs.
 */
inline PathCover ConstrainedPathCover(const Lattice& lat) {
  PathCover cover;
  if (lat.Empty()) return cover;
  const StateId n = lat.NumStates();
  const ArcIndex index(lat);
  const ForwardBackwardTable fb = ForwardBackward(lat, Semiring::kMax);

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> arc_best(index.size(), kNone), final_best(n, kNone);
  std::vector<Path> generated;
  std::map<std::vector<ArcRef>, std::size_t> seen;

  auto record = [&](std::vector<ArcRef> arcs) {
    auto [it, inserted] = seen.try_emplace(arcs, generated.size());
    const std::size_t id = it->second;
    if (inserted) generated.push_back(MakePath(lat, std::move(arcs)));
    const Path& p = generated[id];
    const std::size_t k = p.arcs.size();
    // prefix_ok[i]: arcs before i follow best predecessor links.
    // suffix_ok[i]: arcs after i follow best successor links and the path
    // ends where ending is best.
    std::vector<bool> prefix_ok(k + 1, true), suffix_ok(k + 1, true);
    for (std::size_t i = 0; i < k; ++i) {
      const StateId dst = lat.GetArc(p.arcs[i].state, p.arcs[i].index).next_state;
      prefix_ok[i + 1] = prefix_ok[i] && fb.best_pred[dst] == p.arcs[i];
    }
    bool ok = !fb.best_succ[p.final_state].has_value();
    for (std::size_t i = k; i-- > 0;) {
      suffix_ok[i] = ok;
      ok = ok && fb.best_succ[p.arcs[i].state] == p.arcs[i];
    }
    for (std::size_t i = 0; i < k; ++i)
      if (prefix_ok[i] && suffix_ok[i] && arc_best[index.Id(p.arcs[i])] == kNone)
        arc_best[index.Id(p.arcs[i])] = id;
    if (prefix_ok[k] && final_best[p.final_state] == kNone)
      final_best[p.final_state] = id;
    return id;
  };

  for (StateId s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i) {
      const std::size_t id = index.Id(s, i);
      if (arc_best[id] != kNone) continue;
      arc_best[id] = record(BestArcsThrough(lat, fb, {s, static_cast<std::int32_t>(i)}));
    }
    if (lat.IsFinal(s) && final_best[s] == kNone)
      final_best[s] = record(BestArcsEndingAt(fb, s));
  }
  cover.num_generated = generated.size();

  std::vector<std::size_t> order(generated.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return PathLess(generated[a], generated[b]);
  });

  // Worst-first redundancy sweep.
  std::vector<int> arc_count(index.size(), 0), final_count(n, 0);
  for (const Path& p : generated) {
    for (const ArcRef& r : p.arcs) ++arc_count[index.Id(r)];
    ++final_count[p.final_state];
  }
  std::vector<bool> keep(generated.size(), true);
  for (std::size_t k = order.size(); k-- > 0;) {
    const Path& p = generated[order[k]];
    bool redundant = final_count[p.final_state] > 1;
    for (const ArcRef& r : p.arcs) redundant = redundant && arc_count[index.Id(r)] > 1;
    if (!redundant) continue;
    keep[order[k]] = false;
    for (const ArcRef& r : p.arcs) --arc_count[index.Id(r)];
    --final_count[p.final_state];
  }

  std::vector<std::size_t> new_id(generated.size(), kNone);
  for (std::size_t id : order) {
    if (!keep[id]) continue;
    new_id[id] = cover.paths.size();
    cover.paths.push_back({generated[id], {}, false});
  }
  for (std::size_t a = 0; a < index.size(); ++a)
    if (new_id[arc_best[a]] != kNone)
      cover.paths[new_id[arc_best[a]]].covered_arcs.push_back(a);
  for (StateId s = 0; s < n; ++s)
    if (lat.IsFinal(s) && new_id[final_best[s]] != kNone)
      cover.paths[new_id[final_best[s]]].covers_final = true;

  cover.arc_to_paths.assign(index.size(), {});
  cover.final_to_paths.assign(n, {});
  for (std::size_t pi = 0; pi < cover.paths.size(); ++pi) {
    const Path& p = cover.paths[pi].path;
    for (std::size_t pos = 0; pos < p.arcs.size(); ++pos)
      cover.arc_to_paths[index.Id(p.arcs[pos])].push_back({pi, pos});
    cover.final_to_paths[p.final_state].push_back(pi);
  }
  return cover;
}

struct Hypothesis {
  std::size_t id = 0;
  std::vector<std::string> words;
};

// Word sequences of the cover paths, ids equal to cover positions.
inline std::vector<Hypothesis> CoverToHypotheses(const PathCover& cover) {
  std::vector<Hypothesis> out;
  out.reserve(cover.paths.size());
  for (std::size_t i = 0; i < cover.paths.size(); ++i) {
    Hypothesis h{i, {}};
    for (const std::string& w : cover.paths[i].path.words)
      if (!IsStructuralToken(w)) h.words.push_back(w);
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace latrescore
