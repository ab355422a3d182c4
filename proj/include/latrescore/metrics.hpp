// latrescore/metrics.hpp

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
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/pipeline.hpp"
#include "latrescore/text_format.hpp"
#include "latrescore/viterbi.hpp"

namespace latrescore {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t Total() const { return substitutions + deletions + insertions; }
};

// Levenshtein alignment of hyp against ref; among minimum-cost alignments
// substitutions are preferred, then deletions.
inline EditCounts AlignWords(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  struct Cell {
    std::size_t cost = 0;
    EditCounts e;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, {0, 0, j}};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, {0, i, 0}};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell diag = prev[j - 1];
      if (ref[i - 1] != hyp[j - 1]) {
        ++diag.cost;
        ++diag.e.substitutions;
      }
      Cell del = prev[j];
      ++del.cost;
      ++del.e.deletions;
      Cell ins = cur[j - 1];
      ++ins.cost;
      ++ins.e.insertions;
      cur[j] = diag;
      if (del.cost < cur[j].cost) cur[j] = del;
      if (ins.cost < cur[j].cost) cur[j] = ins;
    }
    std::swap(prev, cur);
  }
  return prev[m].e;
}

using References = std::map<std::string, std::vector<std::string>>;

// Kaldi-style text: "<utt-id> w1 w2 ..." per line.
inline References ParseReferences(std::string_view text) {
  References refs;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string id;
    if (!(ls >> id) || id.front() == '#') continue;
    std::vector<std::string> words;
    for (std::string w; ls >> w;) words.push_back(w);
    if (!refs.emplace(id, std::move(words)).second)
      throw ParseError(lineno, "duplicate reference for " + id);
  }
  return refs;
}

struct Metrics {
  double wer = 0.0;  // percent
  std::size_t errors = 0;
  std::size_t ref_words = 0;
  // Frame-weighted over the archive: all arc frames / all utterance frames.
  double lattice_depth = 0.0;
  // Mean over utterances of the negated best-path cost.
  double best_path_loglik = 0.0;
  std::size_t utterances = 0;
  std::uint64_t scorer_calls = 0;
  std::uint64_t hypotheses_scored = 0;
};

inline Metrics ComputeMetrics(const References& refs, const Archive& hyps) {
  Metrics m;
  std::int64_t arc_frames = 0, utt_frames = 0;
  double loglik = 0.0;
  for (const LatticeEntry& e : hyps) {
    auto it = refs.find(e.id);
    if (it == refs.end()) throw MissingReferenceError("no reference for " + e.id);
    const Path best = BestPath(e.lattice);
    m.errors += AlignWords(it->second, best.words).Total();
    m.ref_words += it->second.size();
    arc_frames += TotalArcFrames(e.lattice);
    utt_frames += MaxPathFrames(e.lattice);
    loglik += -best.cost;
    ++m.utterances;
  }
  if (m.ref_words > 0) m.wer = 100.0 * double(m.errors) / double(m.ref_words);
  else if (m.errors > 0) m.wer = 100.0;
  if (utt_frames > 0) m.lattice_depth = double(arc_frames) / double(utt_frames);
  if (m.utterances > 0) m.best_path_loglik = loglik / double(m.utterances);
  return m;
}

}  // namespace latrescore
