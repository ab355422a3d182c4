// latrescore/lattice.hpp

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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "latrescore/errors.hpp"

namespace latrescore {

using StateId = std::int32_t;
inline constexpr StateId kNoStateId = -1;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Reserved structural tokens.  They never appear as arc labels of a
// validated lattice (see ParseLattice), but scorers and hypothesis files use
// them.
inline constexpr std::string_view kEpsilon = "<eps>";
inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

inline bool IsStructuralToken(std::string_view word) {
  return word == kEpsilon || word == kSentenceStart || word == kSentenceEnd;
}

// Costs are negative natural-log probabilities (nats).  The LM part and the
// acoustic part are kept apart so that rescoring can touch the LM part only.
struct Arc {
  std::string word;
  double graph_cost = 0.0;
  double acoustic_cost = 0.0;
  std::int32_t num_frames = 1;
  StateId next_state = kNoStateId;

  double Cost() const { return graph_cost + acoustic_cost; }

  friend bool operator==(const Arc&, const Arc&) = default;
};

/** Weighted acyclic word acceptor with one start state and final costs.
 *
 *  Arcs are stored per source state in insertion order.  Algorithms in this
 *  library expect a normalized lattice: trimmed, topologically numbered
 *  (every arc goes from a lower to a higher state id) and start == 0; see
 *  Normalize().
 */
class Lattice {
 public:
  Lattice() = default;

  StateId AddState() {
    arcs_.emplace_back();
    finals_.push_back(kInfinity);
    return static_cast<StateId>(arcs_.size() - 1);
  }

  void AddStates(StateId n) {
    for (StateId i = 0; i < n; ++i) AddState();
  }

  void SetStart(StateId s) { start_ = s; }
  StateId Start() const { return start_; }

  void AddArc(StateId s, Arc arc) { arcs_[Check(s)].push_back(std::move(arc)); }

  void SetFinal(StateId s, double cost) { finals_[Check(s)] = cost; }
  void ClearFinal(StateId s) { finals_[Check(s)] = kInfinity; }

  StateId NumStates() const { return static_cast<StateId>(arcs_.size()); }
  bool Empty() const { return arcs_.empty(); }

  std::span<const Arc> Arcs(StateId s) const { return arcs_[Check(s)]; }
  std::vector<Arc>& MutableArcs(StateId s) { return arcs_[Check(s)]; }
  const Arc& GetArc(StateId s, std::size_t i) const { return arcs_[Check(s)][i]; }

  double Final(StateId s) const { return finals_[Check(s)]; }
  bool IsFinal(StateId s) const { return finals_[Check(s)] != kInfinity; }

  std::size_t NumArcs() const {
    std::size_t n = 0;
    for (const auto& v : arcs_) n += v.size();
    return n;
  }

  friend bool operator==(const Lattice&, const Lattice&) = default;

 private:
  std::size_t Check(StateId s) const {
    if (s < 0 || static_cast<std::size_t>(s) >= arcs_.size())
      throw Error("state id " + std::to_string(s) + " out of range");
    return static_cast<std::size_t>(s);
  }

  StateId start_ = kNoStateId;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> finals_;
};

// Identifies an arc by its source state and position in that state's list.
struct ArcRef {
  StateId state = kNoStateId;
  std::int32_t index = -1;

  friend auto operator<=>(const ArcRef&, const ArcRef&) = default;
};

// Dense arc numbering: arcs of state 0 first, then state 1, and so on.
class ArcIndex {
 public:
  explicit ArcIndex(const Lattice& lat) {
    offsets_.reserve(static_cast<std::size_t>(lat.NumStates()) + 1);
    std::size_t n = 0;
    for (StateId s = 0; s < lat.NumStates(); ++s) {
      offsets_.push_back(n);
      for (std::size_t i = 0; i < lat.Arcs(s).size(); ++i)
        refs_.push_back({s, static_cast<std::int32_t>(i)});
      n += lat.Arcs(s).size();
    }
    offsets_.push_back(n);
  }

  std::size_t Id(StateId s, std::size_t i) const { return offsets_[s] + i; }
  std::size_t Id(ArcRef r) const { return Id(r.state, r.index); }
  ArcRef Ref(std::size_t id) const { return refs_[id]; }
  std::size_t size() const { return refs_.size(); }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<ArcRef> refs_;
};

inline std::vector<int> InDegrees(const Lattice& lat) {
  std::vector<int> in(lat.NumStates(), 0);
  for (StateId s = 0; s < lat.NumStates(); ++s)
    for (const Arc& a : lat.Arcs(s)) ++in[a.next_state];
  return in;
}

// Kahn's algorithm, smallest ready state first.  Returns an empty vector if
// the graph has a cycle (and only then, for a non-empty lattice).
inline std::vector<StateId> TopologicalOrder(const Lattice& lat) {
  const StateId n = lat.NumStates();
  std::vector<int> in = InDegrees(lat);
  std::priority_queue<StateId, std::vector<StateId>, std::greater<>> ready;
  for (StateId s = 0; s < n; ++s)
    if (in[s] == 0) ready.push(s);
  std::vector<StateId> order;
  order.reserve(n);
  while (!ready.empty()) {
    StateId s = ready.top();
    ready.pop();
    order.push_back(s);
    for (const Arc& a : lat.Arcs(s))
      if (--in[a.next_state] == 0) ready.push(a.next_state);
  }
  if (static_cast<StateId>(order.size()) != n) return {};
  return order;
}

// Copies `lat` keeping the states listed in `order` (in that order) and the
// arcs between them.  Arcs into states absent from `order` are dropped.
inline Lattice Renumber(const Lattice& lat, std::span<const StateId> order) {
  std::vector<StateId> map(lat.NumStates(), kNoStateId);
  for (std::size_t i = 0; i < order.size(); ++i)
    map[order[i]] = static_cast<StateId>(i);
  Lattice out;
  out.AddStates(static_cast<StateId>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const StateId s = order[i];
    for (const Arc& a : lat.Arcs(s)) {
      if (map[a.next_state] == kNoStateId) continue;
      Arc b = a;
      b.next_state = map[a.next_state];
      out.AddArc(static_cast<StateId>(i), std::move(b));
    }
    if (lat.IsFinal(s)) out.SetFinal(static_cast<StateId>(i), lat.Final(s));
  }
  if (lat.Start() != kNoStateId && map[lat.Start()] != kNoStateId)
    out.SetStart(map[lat.Start()]);
  return out;
}

inline bool IsTopologicallySorted(const Lattice& lat) {
  for (StateId s = 0; s < lat.NumStates(); ++s)
    for (const Arc& a : lat.Arcs(s))
      if (a.next_state <= s) return false;
  return true;
}

// Marks states that are reachable from the start and can reach a final state.
inline std::vector<bool> ConnectedStates(const Lattice& lat) {
  const StateId n = lat.NumStates();
  std::vector<bool> acc(n, false), coacc(n, false);
  if (lat.Start() == kNoStateId || n == 0) return acc;
  std::vector<StateId> stack{lat.Start()};
  acc[lat.Start()] = true;
  std::vector<std::vector<StateId>> preds(n);
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const Arc& a : lat.Arcs(s)) {
      if (!acc[a.next_state]) {
        acc[a.next_state] = true;
        stack.push_back(a.next_state);
      }
    }
  }
  for (StateId s = 0; s < n; ++s)
    for (const Arc& a : lat.Arcs(s)) preds[a.next_state].push_back(s);
  for (StateId s = 0; s < n; ++s) {
    if (lat.IsFinal(s)) {
      coacc[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s]) {
      if (!coacc[p]) {
        coacc[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<bool> keep(n);
  for (StateId s = 0; s < n; ++s) keep[s] = acc[s] && coacc[s];
  return keep;
}

// Removes states not on any start-to-final path.  Relative state order is
// kept.  The result is empty when no final state is reachable.
inline Lattice Trim(const Lattice& lat, std::size_t* num_removed = nullptr) {
  std::vector<bool> keep = ConnectedStates(lat);
  std::vector<StateId> order;
  for (StateId s = 0; s < lat.NumStates(); ++s)
    if (keep[s]) order.push_back(s);
  if (num_removed) *num_removed = lat.NumStates() - order.size();
  if (order.empty()) return Lattice();
  return Renumber(lat, order);
}

inline Lattice TopSort(const Lattice& lat) {
  std::vector<StateId> order = TopologicalOrder(lat);
  if (order.empty() && lat.NumStates() > 0)
    throw CycleError("lattice contains a cycle");
  return Renumber(lat, order);
}

// Trim followed by topological renumbering.  For a trimmed acyclic lattice the
// start state is the only state without incoming arcs, so it becomes 0.
inline Lattice Normalize(const Lattice& lat, std::size_t* num_removed = nullptr) {
  return TopSort(Trim(lat, num_removed));
}

// Full structural check of a (normalized) lattice; throws on the first
// violation.
inline void Validate(const Lattice& lat) {
  if (lat.Empty()) throw ValidationError("lattice has no states");
  if (lat.Start() != 0) throw ValidationError("start state is not 0");
  if (!IsTopologicallySorted(lat))
    throw ValidationError("states are not in topological order");
  std::vector<bool> keep = ConnectedStates(lat);
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    if (!keep[s])
      throw ValidationError("state " + std::to_string(s) +
                            " is not on a complete path");
    if (lat.IsFinal(s) && !std::isfinite(lat.Final(s)))
      throw ValidationError("non-finite final cost");
    std::unordered_set<std::string_view> words;
    for (const Arc& a : lat.Arcs(s)) {
      if (!std::isfinite(a.graph_cost) || !std::isfinite(a.acoustic_cost))
        throw ValidationError("non-finite arc cost");
      if (a.num_frames < 1)
        throw ValidationError("word arc with fewer than one frame");
      if (IsStructuralToken(a.word))
        throw ValidationError("structural token '" + a.word + "' on an arc");
      if (!words.insert(a.word).second)
        throw NondeterminismError("state " + std::to_string(s) +
                                  " has two arcs labelled '" + a.word + "'");
    }
  }
}

}  // namespace latrescore
