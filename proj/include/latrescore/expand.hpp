// latrescore/expand.hpp

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
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/viterbi.hpp"

namespace latrescore {

struct ExpansionConfig {
  // Arcs whose posterior exceeds epsilon get a private copy of their
  // destination state.
  double epsilon = 0.5;
  Semiring posterior_semiring = Semiring::kSum;

  void Check() const {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw ConfigError("expansion epsilon must lie in (0, 1)");
  }
};

// Output of an expansion together with the input state each output state
// copies.
struct ExpandedLattice {
  Lattice lattice;
  std::vector<StateId> input_state;
};

namespace internal {

// Pairs (input state, output state), smallest input state first.  Input
// states are topologically numbered, so every copy of a state has received
// all of its incoming arcs by the time it is dequeued.
using PairQueue =
    std::priority_queue<std::pair<StateId, StateId>,
                        std::vector<std::pair<StateId, StateId>>, std::greater<>>;

inline ExpandedLattice Finish(const Lattice& out, std::vector<StateId> origin) {
  std::vector<StateId> order = TopologicalOrder(out);
  ExpandedLattice e;
  e.lattice = Renumber(out, order);
  e.input_state.reserve(order.size());
  for (StateId s : order) e.input_state.push_back(origin[s]);
  return e;
}

}  // namespace internal

/** Posterior-based expansion.
 *
 *  A composition-style walk over (input state, output state) pairs.  For
 *  every arc leaving a dequeued pair, the posterior of the corresponding
 *  output arc is computed from the dynamically accumulated forward score of
 *  the output state and the precomputed backward score of the input
 *  destination.  If it exceeds epsilon the arc gets a fresh copy of its
 *  destination; otherwise it goes to the single shared copy of that input
 *  state, created on first use.  Word sequences and path costs are preserved.
 */
inline ExpandedLattice ExpandPosteriorDetailed(const Lattice& in,
                                               const ExpansionConfig& cfg) {
  cfg.Check();
  if (in.Empty()) return {};
  const ForwardBackwardTable fb = ForwardBackward(in, cfg.posterior_semiring);
  const std::vector<double>& beta = fb.beta;
  const double total = fb.TotalLogProb();

  Lattice out;
  std::vector<double> alpha;      // forward log-probs of output states
  std::vector<StateId> origin;    // output state -> input state
  std::vector<StateId> shared(in.NumStates(), kNoStateId);
  auto add_state = [&](StateId s_in, double a) {
    const StateId s = out.AddState();
    alpha.push_back(a);
    origin.push_back(s_in);
    if (in.IsFinal(s_in)) out.SetFinal(s, in.Final(s_in));
    return s;
  };

  out.SetStart(add_state(in.Start(), 0.0));
  shared[in.Start()] = out.Start();
  internal::PairQueue queue;
  queue.emplace(in.Start(), out.Start());
  while (!queue.empty()) {
    const auto [s_in, s_out] = queue.top();
    queue.pop();
    for (const Arc& e : in.Arcs(s_in)) {
      const StateId next_in = e.next_state;
      const double a_e = alpha[s_out] - e.Cost();
      const double post = std::exp(a_e + beta[next_in] - total);
      StateId next_out;
      if (post > cfg.epsilon) {
        next_out = add_state(next_in, a_e);
        queue.emplace(next_in, next_out);
      } else if (shared[next_in] == kNoStateId) {
        next_out = add_state(next_in, a_e);
        shared[next_in] = next_out;
        queue.emplace(next_in, next_out);
      } else {
        next_out = shared[next_in];
        alpha[next_out] = Accumulate(cfg.posterior_semiring, alpha[next_out], a_e);
      }
      Arc copy = e;
      copy.next_state = next_out;
      out.AddArc(s_out, std::move(copy));
    }
  }
  return internal::Finish(out, std::move(origin));
}

inline Lattice ExpandPosterior(const Lattice& in, const ExpansionConfig& cfg) {
  return ExpandPosteriorDetailed(in, cfg).lattice;
}

// Smallest posterior (sum semiring) of any complete path.  Every arc of
// every partial expansion carries at least this much mass.
inline double MinPathPosterior(const Lattice& lat) {
  if (lat.Empty()) return 1.0;
  const std::vector<StateId> order = TopologicalOrder(lat);
  std::vector<double> worst(lat.NumStates(), -kInfinity);
  worst[lat.Start()] = 0.0;
  double max_cost = -kInfinity;
  for (StateId s : order) {
    if (worst[s] == -kInfinity) continue;
    if (lat.IsFinal(s)) max_cost = std::max(max_cost, worst[s] + lat.Final(s));
    for (const Arc& a : lat.Arcs(s))
      worst[a.next_state] = std::max(worst[a.next_state], worst[s] + a.Cost());
  }
  const double total = ForwardBackward(lat, Semiring::kSum).TotalLogProb();
  return std::min(1.0, std::exp(-max_cost - total));
}

// An epsilon below which posterior expansion produces a prefix tree.
inline double FullExpansionEpsilon(const Lattice& lat) {
  return std::max(0.5 * MinPathPosterior(lat), std::numeric_limits<double>::denorm_min());
}

/** n-gram approximation expansion: output states are (input state, last
 *  n-1 words) pairs reachable from the start, so states sharing the same
 *  n-1 most recent words are merged.
 */
inline ExpandedLattice ExpandNgramDetailed(const Lattice& in, int order) {
  if (order < 2) throw ConfigError("n-gram expansion order must be at least 2");
  if (in.Empty()) return {};
  const std::size_t keep = static_cast<std::size_t>(order - 1);

  using Key = std::pair<StateId, std::vector<std::string>>;
  std::map<Key, StateId> states;
  std::vector<const std::vector<std::string>*> history;
  std::vector<StateId> origin;
  Lattice out;

  auto get_state = [&](StateId s_in, std::vector<std::string> h,
                       internal::PairQueue& queue) {
    auto [it, inserted] = states.try_emplace(Key{s_in, std::move(h)}, kNoStateId);
    if (inserted) {
      it->second = out.AddState();
      history.push_back(&it->first.second);
      origin.push_back(s_in);
      if (in.IsFinal(s_in)) out.SetFinal(it->second, in.Final(s_in));
      queue.emplace(s_in, it->second);
    }
    return it->second;
  };

  internal::PairQueue queue;
  out.SetStart(get_state(in.Start(), {}, queue));
  while (!queue.empty()) {
    const auto [s_in, s_out] = queue.top();
    queue.pop();
    for (const Arc& e : in.Arcs(s_in)) {
      std::vector<std::string> h = *history[s_out];
      h.push_back(e.word);
      if (h.size() > keep) h.erase(h.begin(), h.begin() + (h.size() - keep));
      Arc copy = e;
      copy.next_state = get_state(e.next_state, std::move(h), queue);
      out.AddArc(s_out, std::move(copy));
    }
  }
  return internal::Finish(out, std::move(origin));
}

inline Lattice ExpandNgram(const Lattice& in, int order) {
  return ExpandNgramDetailed(in, order).lattice;
}

}  // namespace latrescore
