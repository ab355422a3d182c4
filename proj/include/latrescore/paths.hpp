// latrescore/paths.hpp

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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"

namespace latrescore {

// A complete path: arcs from the start state to `final_state`, which is final.
struct Path {
  std::vector<ArcRef> arcs;
  std::vector<std::string> words;
  StateId final_state = kNoStateId;
  // Sum of arc graph and acoustic costs plus the final cost.
  double cost = 0.0;
};

// Builds a Path from a sequence of arcs leaving the start state.
inline Path MakePath(const Lattice& lat, std::vector<ArcRef> arcs) {
  Path p;
  StateId s = lat.Start();
  double cost = 0.0;
  for (const ArcRef& r : arcs) {
    if (r.state != s) throw Error("path arcs are not consecutive");
    const Arc& a = lat.GetArc(r.state, r.index);
    cost += a.graph_cost + a.acoustic_cost;
    p.words.push_back(a.word);
    s = a.next_state;
  }
  if (!lat.IsFinal(s)) throw Error("path does not end in a final state");
  p.arcs = std::move(arcs);
  p.final_state = s;
  p.cost = cost + lat.Final(s);
  return p;
}

// The path spelling `words`, if any (a deterministic lattice has at most
// one).
inline std::optional<Path> FindPath(const Lattice& lat,
                                    const std::vector<std::string>& words) {
  if (lat.Empty()) return std::nullopt;
  StateId s = lat.Start();
  std::vector<ArcRef> arcs;
  for (const std::string& w : words) {
    const auto out = lat.Arcs(s);
    std::size_t i = 0;
    while (i < out.size() && out[i].word != w) ++i;
    if (i == out.size()) return std::nullopt;
    arcs.push_back({s, static_cast<std::int32_t>(i)});
    s = out[i].next_state;
  }
  if (!lat.IsFinal(s)) return std::nullopt;
  return MakePath(lat, std::move(arcs));
}

// States visited by the path, start first.
inline std::vector<StateId> PathStates(const Lattice& lat, const Path& p) {
  std::vector<StateId> states{lat.Start()};
  for (const ArcRef& r : p.arcs)
    states.push_back(lat.GetArc(r.state, r.index).next_state);
  return states;
}

// Graph part of a path cost.  Final costs count as graph cost.
inline double PathGraphCost(const Lattice& lat, const Path& p) {
  double c = 0.0;
  for (const ArcRef& r : p.arcs) c += lat.GetArc(r.state, r.index).graph_cost;
  return c + lat.Final(p.final_state);
}

inline double PathAcousticCost(const Lattice& lat, const Path& p) {
  double c = 0.0;
  for (const ArcRef& r : p.arcs) c += lat.GetArc(r.state, r.index).acoustic_cost;
  return c;
}

inline std::int64_t PathFrames(const Lattice& lat, const Path& p) {
  std::int64_t f = 0;
  for (const ArcRef& r : p.arcs) f += lat.GetArc(r.state, r.index).num_frames;
  return f;
}

// Library-wide order: ascending cost, then word sequence, then the arc
// sequence (smallest state id first).
inline bool PathLess(const Path& a, const Path& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.words != b.words) return a.words < b.words;
  return a.arcs < b.arcs;
}

// Linear lattice holding a single path of `lat`.
inline Lattice PathToLattice(const Lattice& lat, const Path& p) {
  Lattice out;
  out.AddStates(static_cast<StateId>(p.arcs.size() + 1));
  out.SetStart(0);
  for (std::size_t i = 0; i < p.arcs.size(); ++i) {
    Arc a = lat.GetArc(p.arcs[i].state, p.arcs[i].index);
    a.next_state = static_cast<StateId>(i + 1);
    out.AddArc(static_cast<StateId>(i), std::move(a));
  }
  out.SetFinal(static_cast<StateId>(p.arcs.size()), lat.Final(p.final_state));
  return out;
}

// Number of complete paths, saturating at `cap`.
inline std::uint64_t CountPaths(const Lattice& lat,
                                std::uint64_t cap = UINT64_MAX) {
  const StateId n = lat.NumStates();
  std::vector<std::uint64_t> suffix(n, 0);
  for (StateId s = n - 1; s >= 0; --s) {
    std::uint64_t c = lat.IsFinal(s) ? 1 : 0;
    for (const Arc& a : lat.Arcs(s)) c = std::min(cap, c + suffix[a.next_state]);
    suffix[s] = std::min(cap, c);
  }
  return n == 0 ? 0 : suffix[lat.Start()];
}

// All complete paths in PathLess order.  Requires a topologically sorted
// lattice.
inline std::vector<Path> EnumeratePaths(const Lattice& lat, std::size_t limit) {
  if (lat.Empty()) return {};
  const std::uint64_t count = CountPaths(lat, limit + 1);
  if (count > limit)
    throw TooManyPathsError("lattice has more than " + std::to_string(limit) +
                            " paths");
  std::vector<Path> out;
  out.reserve(count);
  std::vector<ArcRef> stack;
  // Iterative DFS; `next` holds the next arc index to try at each depth.
  std::vector<StateId> states{lat.Start()};
  std::vector<std::int32_t> next{-1};
  while (!states.empty()) {
    const StateId s = states.back();
    std::int32_t& i = next.back();
    if (i == -1) {
      if (lat.IsFinal(s)) out.push_back(MakePath(lat, stack));
      i = 0;
    }
    if (i < static_cast<std::int32_t>(lat.Arcs(s).size())) {
      const std::int32_t idx = i++;
      stack.push_back({s, idx});
      states.push_back(lat.GetArc(s, idx).next_state);
      next.push_back(-1);
    } else {
      states.pop_back();
      next.pop_back();
      if (!stack.empty()) stack.pop_back();
    }
  }
  std::sort(out.begin(), out.end(), PathLess);
  return out;
}

namespace internal {

// Best (minimum) cost from the start to each state.
inline std::vector<double> ForwardBestCosts(const Lattice& lat) {
  std::vector<double> fwd(lat.NumStates(), kInfinity);
  if (lat.Empty()) return fwd;
  fwd[lat.Start()] = 0.0;
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    if (fwd[s] == kInfinity) continue;
    for (const Arc& a : lat.Arcs(s))
      fwd[a.next_state] = std::min(fwd[a.next_state], fwd[s] + a.Cost());
  }
  return fwd;
}

// Best cost from each state to the end (final cost included).
inline std::vector<double> BackwardBestCosts(const Lattice& lat) {
  std::vector<double> bwd(lat.NumStates(), kInfinity);
  for (StateId s = lat.NumStates() - 1; s >= 0; --s) {
    double b = lat.Final(s);
    for (const Arc& a : lat.Arcs(s)) b = std::min(b, a.Cost() + bwd[a.next_state]);
    bwd[s] = b;
  }
  return bwd;
}

}  // namespace internal

inline double BestCost(const Lattice& lat) {
  if (lat.Empty()) return kInfinity;
  return internal::BackwardBestCosts(lat)[lat.Start()];
}

// Removes arcs and final exits whose best complete path costs more than
// BestCost(lat) + beam, then trims.  The best path always survives.
inline Lattice Prune(const Lattice& lat, double beam) {
  if (!(beam >= 0.0)) throw ConfigError("prune beam must be non-negative");
  if (lat.Empty()) return lat;
  const std::vector<double> fwd = internal::ForwardBestCosts(lat);
  const std::vector<double> bwd = internal::BackwardBestCosts(lat);
  const double best = bwd[lat.Start()];
  // Accumulation order differs between the two passes; allow for rounding.
  const double limit = best + beam + 1e-9 * std::max(1.0, std::abs(best));
  Lattice out;
  out.AddStates(lat.NumStates());
  out.SetStart(lat.Start());
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    for (const Arc& a : lat.Arcs(s))
      if (fwd[s] + a.Cost() + bwd[a.next_state] <= limit) out.AddArc(s, a);
    if (lat.IsFinal(s) && fwd[s] + lat.Final(s) <= limit)
      out.SetFinal(s, lat.Final(s));
  }
  return Trim(out);
}

}  // namespace latrescore
