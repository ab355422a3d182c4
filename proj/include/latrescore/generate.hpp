// latrescore/generate.hpp

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
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/text_format.hpp"

namespace latrescore {

// Shape of synthetic lattices.  Defaults give small lattices with a
// moderate posterior spread.
struct LatticeProfile {
  int min_states = 4;
  int max_states = 12;
  int max_branching = 3;   // out-degree per state
  int max_span = 3;        // arcs skip at most this many states ahead
  int vocab_size = 40;
  double cost_noise = 2.0; // spread of arc costs, nats
  int max_frames = 3;      // frames between consecutive states
  double extra_final_prob = 0.0;

  void Check() const {
    if (min_states < 2 || max_states < min_states || max_states > 200)
      throw ConfigError("profile needs 2 <= min_states <= max_states <= 200");
    if (max_branching < 1 || max_branching > 4)
      throw ConfigError("profile branching must lie in [1, 4]");
    if (max_span < 1) throw ConfigError("profile span must be at least 1");
    if (vocab_size < max_branching)
      throw ConfigError("profile vocabulary smaller than the branching factor");
    if (!(cost_noise >= 0.0)) throw ConfigError("profile cost noise must be >= 0");
    if (max_frames < 1) throw ConfigError("profile needs at least one frame per arc");
    if (!(extra_final_prob >= 0.0 && extra_final_prob <= 1.0))
      throw ConfigError("profile final probability must lie in [0, 1]");
  }
};

namespace internal {

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// std::mt19937_64's output is fixed by the standard; the distributions are
// not, so these are done by hand to keep archives identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi].
  int Int(int lo, int hi) {
    const std::uint64_t range = std::uint64_t(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return lo + int(x % range);
  }

 private:
  std::mt19937_64 engine_;
};

inline std::string WordName(int i) { return "w" + std::to_string(i); }

}  // namespace internal

/** One pseudo-random decoded-lattice stand-in: states on a time line,
 *  forward arcs only, distinct words and distinct targets per state, the
 *  last state final.  Every state is reachable (each gets an incoming arc
 *  from one of its `max_span` predecessors) and co-reachable (each non-final
 *  state gets an outgoing arc).
 */
inline Lattice GenerateLattice(std::uint64_t seed, const LatticeProfile& p) {
  p.Check();
  internal::Rng rng(seed);
  const int n = rng.Int(p.min_states, p.max_states);
  std::vector<int> time(n, 0);
  for (int s = 1; s < n; ++s) time[s] = time[s - 1] + rng.Int(1, p.max_frames);

  std::vector<std::vector<int>> targets(n);
  auto has = [&](int s, int t) {
    for (int x : targets[s])
      if (x == t) return true;
    return false;
  };
  // Sources with spare out-degree; t - 1 has none of its targets yet.
  std::vector<int> sources;
  for (int t = 1; t < n; ++t) {
    sources.clear();
    for (int s = std::max(0, t - p.max_span); s < t; ++s)
      if (static_cast<int>(targets[s].size()) < p.max_branching) sources.push_back(s);
    targets[sources[rng.Int(0, static_cast<int>(sources.size()) - 1)]].push_back(t);
  }
  for (int s = 0; s + 1 < n; ++s) {
    const int reach = std::min(n - 1, s + p.max_span);
    const int available = reach - s;
    const int want = std::min(available, rng.Int(1, p.max_branching));
    while (static_cast<int>(targets[s].size()) < want) {
      const int t = rng.Int(s + 1, reach);
      if (!has(s, t)) targets[s].push_back(t);
    }
  }

  Lattice lat;
  lat.AddStates(n);
  lat.SetStart(0);
  for (int s = 0; s < n; ++s) {
    std::sort(targets[s].begin(), targets[s].end());
    std::vector<int> words;
    for (std::size_t k = 0; k < targets[s].size(); ++k) {
      int w;
      do w = rng.Int(0, p.vocab_size - 1);
      while (std::find(words.begin(), words.end(), w) != words.end());
      words.push_back(w);
      const int t = targets[s][k];
      const int frames = time[t] - time[s];
      Arc a;
      a.word = internal::WordName(w);
      a.graph_cost = 0.5 + p.cost_noise * rng.Uniform();
      a.acoustic_cost = 0.5 * frames + p.cost_noise * rng.Uniform();
      a.num_frames = frames;
      a.next_state = t;
      lat.AddArc(s, std::move(a));
    }
    if (s == n - 1) lat.SetFinal(s, 0.25 * rng.Uniform());
    else if (p.extra_final_prob > 0.0 && rng.Uniform() < p.extra_final_prob)
      lat.SetFinal(s, 1.0 + p.cost_noise * rng.Uniform());
  }
  return lat;
}

inline std::string UtteranceId(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt%05zu", i);
  return buf;
}

inline Archive GenerateArchive(std::uint64_t seed, std::size_t count,
                               const LatticeProfile& p) {
  p.Check();
  Archive out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({UtteranceId(i),
                   GenerateLattice(internal::SplitMix64(seed ^ internal::SplitMix64(i)), p)});
  return out;
}

// Training text for the bigram scorer over the generator's vocabulary: a
// first-order chain in which every word prefers a few successors.
inline std::string GenerateCorpus(std::uint64_t seed, std::size_t sentences,
                                  int vocab_size, int max_length = 12) {
  if (vocab_size < 1) throw ConfigError("corpus vocabulary must not be empty");
  internal::Rng rng(internal::SplitMix64(seed));
  constexpr int kPreferred = 3;
  std::vector<std::vector<int>> next(vocab_size + 1);
  for (auto& v : next)
    for (int k = 0; k < kPreferred; ++k) v.push_back(rng.Int(0, vocab_size - 1));
  std::string text;
  for (std::size_t i = 0; i < sentences; ++i) {
    const int len = rng.Int(1, max_length);
    int prev = vocab_size;  // sentence start
    for (int k = 0; k < len; ++k) {
      const int w = rng.Uniform() < 0.8 ? next[prev][rng.Int(0, kPreferred - 1)]
                                        : rng.Int(0, vocab_size - 1);
      if (k > 0) text += ' ';
      text += internal::WordName(w);
      prev = w;
    }
    text += '\n';
  }
  return text;
}

}  // namespace latrescore
