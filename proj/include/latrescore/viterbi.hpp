// latrescore/viterbi.hpp

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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/paths.hpp"

namespace latrescore {

enum class Semiring { kMax, kSum };

inline Semiring ParseSemiring(std::string_view s) {
  if (s == "max") return Semiring::kMax;
  if (s == "sum") return Semiring::kSum;
  throw ConfigError("unknown semiring '" + std::string(s) + "' (max|sum)");
}

inline constexpr double kLogZero = -kInfinity;

// log(exp(a) + exp(b)), shifted by the larger argument.
inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double Accumulate(Semiring sr, double a, double b) {
  return sr == Semiring::kMax ? std::max(a, b) : LogAdd(a, b);
}

/** Forward and backward scores of a normalized lattice, as log-probabilities
 *  (negated costs).
 *
 *  alpha[s] accumulates over prefixes from the start to s, beta[s] over
 *  suffixes from s to the end including the final cost, so beta[start] is
 *  the total (sum) or best (max) log-probability of the lattice.  In the max
 *  semiring the best predecessor arc and best successor arc of every state
 *  are recorded; best_succ is empty where ending at the state is best, and
 *  best_pred is empty only for the start state.
 */
struct ForwardBackwardTable {
  Semiring semiring = Semiring::kSum;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::optional<ArcRef>> best_pred;
  std::vector<std::optional<ArcRef>> best_succ;

  double TotalLogProb() const { return beta.empty() ? kLogZero : beta[0]; }
};

namespace internal {

// Word sequence of the best prefix ending at `s`, following best_pred links.
inline std::vector<std::string_view> BestPrefixWords(
    const Lattice& lat, const std::vector<std::optional<ArcRef>>& best_pred,
    StateId s) {
  std::vector<std::string_view> words;
  while (best_pred[s]) {
    const ArcRef r = *best_pred[s];
    words.push_back(lat.GetArc(r.state, r.index).word);
    s = r.state;
  }
  std::reverse(words.begin(), words.end());
  return words;
}

}  // namespace internal

inline ForwardBackwardTable ForwardBackward(const Lattice& lat, Semiring sr) {
  const StateId n = lat.NumStates();
  ForwardBackwardTable t;
  t.semiring = sr;
  t.alpha.assign(n, kLogZero);
  t.beta.assign(n, kLogZero);
  if (n == 0) return t;
  if (!IsTopologicallySorted(lat) || lat.Start() != 0)
    throw ValidationError("forward-backward needs a normalized lattice");
  const bool max = sr == Semiring::kMax;
  if (max) {
    t.best_pred.assign(n, std::nullopt);
    t.best_succ.assign(n, std::nullopt);
  }

  t.alpha[0] = 0.0;
  for (StateId s = 0; s < n; ++s) {
    if (t.alpha[s] == kLogZero) continue;
    for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i) {
      const Arc& a = lat.Arcs(s)[i];
      const double v = t.alpha[s] - a.Cost();
      double& dst = t.alpha[a.next_state];
      if (!max) {
        dst = LogAdd(dst, v);
        continue;
      }
      auto& link = t.best_pred[a.next_state];
      const ArcRef cand{s, static_cast<std::int32_t>(i)};
      bool take = !link || v > dst;
      if (link && v == dst) {
        // Equal scores: lexicographically smaller prefix wins.
        auto cw = internal::BestPrefixWords(lat, t.best_pred, s);
        cw.push_back(a.word);
        auto ow = internal::BestPrefixWords(lat, t.best_pred, link->state);
        ow.push_back(lat.GetArc(link->state, link->index).word);
        take = cw < ow;
      }
      if (take) {
        dst = v;
        link = cand;
      }
    }
  }

  for (StateId s = n - 1; s >= 0; --s) {
    double b = lat.IsFinal(s) ? -lat.Final(s) : kLogZero;
    std::optional<ArcRef> succ;
    for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i) {
      const Arc& a = lat.Arcs(s)[i];
      const double v = t.beta[a.next_state] - a.Cost();
      if (!max) {
        b = LogAdd(b, v);
        continue;
      }
      // Ending here is the empty suffix and wins ties; arcs of one state
      // carry distinct words, so the word alone breaks ties between them.
      bool take = v > b;
      if (v == b && v != kLogZero && succ)
        take = a.word < lat.GetArc(succ->state, succ->index).word;
      if (take) {
        b = v;
        succ = ArcRef{s, static_cast<std::int32_t>(i)};
      }
    }
    t.beta[s] = b;
    if (max) t.best_succ[s] = succ;
  }
  return t;
}

// Arc sequence of the best path through arc `r`, under the max-semiring
// table `t`.
inline std::vector<ArcRef> BestArcsThrough(const Lattice& lat,
                                           const ForwardBackwardTable& t,
                                           ArcRef r) {
  std::vector<ArcRef> arcs;
  StateId s = r.state;
  while (t.best_pred[s]) {
    arcs.push_back(*t.best_pred[s]);
    s = t.best_pred[s]->state;
  }
  std::reverse(arcs.begin(), arcs.end());
  arcs.push_back(r);
  s = lat.GetArc(r.state, r.index).next_state;
  while (t.best_succ[s]) {
    arcs.push_back(*t.best_succ[s]);
    s = lat.GetArc(t.best_succ[s]->state, t.best_succ[s]->index).next_state;
  }
  return arcs;
}

// Best path that ends at final state `f`.
inline std::vector<ArcRef> BestArcsEndingAt(const ForwardBackwardTable& t,
                                            StateId f) {
  std::vector<ArcRef> arcs;
  StateId s = f;
  while (t.best_pred[s]) {
    arcs.push_back(*t.best_pred[s]);
    s = t.best_pred[s]->state;
  }
  std::reverse(arcs.begin(), arcs.end());
  return arcs;
}

// Minimum-cost complete path; ties go to the smaller word sequence.
inline Path BestPath(const Lattice& lat) {
  if (lat.Empty()) throw ValidationError("best path of an empty lattice");
  const ForwardBackwardTable t = ForwardBackward(lat, Semiring::kMax);
  std::vector<ArcRef> arcs;
  StateId s = lat.Start();
  while (t.best_succ[s]) {
    arcs.push_back(*t.best_succ[s]);
    s = lat.GetArc(t.best_succ[s]->state, t.best_succ[s]->index).next_state;
  }
  return MakePath(lat, std::move(arcs));
}

// Per-arc posteriors in ArcIndex order:
//   exp(alpha[src] + logp(arc) + beta[dst] - beta[start]).
// In the max semiring this is exp(best path through the arc - best path), and
// the arcs of the best path get exactly 1.
inline std::vector<double> ArcPosteriors(const Lattice& lat,
                                         Semiring sr = Semiring::kSum) {
  const ForwardBackwardTable t = ForwardBackward(lat, sr);
  std::vector<double> post;
  post.reserve(lat.NumArcs());
  const double total = t.TotalLogProb();
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    for (const Arc& a : lat.Arcs(s)) {
      const double v = std::exp(t.alpha[s] - a.Cost() + t.beta[a.next_state] - total);
      post.push_back(std::clamp(v, 0.0, 1.0));
    }
  }
  if (sr == Semiring::kMax && !lat.Empty()) {
    const ArcIndex index(lat);
    StateId s = lat.Start();
    while (t.best_succ[s]) {
      post[index.Id(*t.best_succ[s])] = 1.0;
      s = lat.GetArc(t.best_succ[s]->state, t.best_succ[s]->index).next_state;
    }
  }
  return post;
}

// Posterior of ending at each state (0 for non-final states).
inline std::vector<double> FinalPosteriors(const Lattice& lat,
                                           Semiring sr = Semiring::kSum) {
  const ForwardBackwardTable t = ForwardBackward(lat, sr);
  std::vector<double> post(lat.NumStates(), 0.0);
  for (StateId s = 0; s < lat.NumStates(); ++s)
    if (lat.IsFinal(s))
      post[s] = std::clamp(std::exp(t.alpha[s] - lat.Final(s) - t.TotalLogProb()),
                           0.0, 1.0);
  return post;
}

}  // namespace latrescore
