// latrescore/bench.hpp

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

#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "latrescore/paths.hpp"
#include "latrescore/pipeline.hpp"
#include "latrescore/score.hpp"
#include "latrescore/scorer.hpp"
#include "latrescore/text_format.hpp"
#include "latrescore/viterbi.hpp"

namespace latrescore {

struct BenchConfig {
  // Strategy, beam, estimation and lambda of the expansion sweep rows.
  RescoreConfig base;
  std::vector<double> epsilons{0.5, 0.1, 0.05, 0.005};
  std::vector<int> orders{2, 3, 4};
  int nbest = 20;         // 0 disables the n-best row
  bool replace_row = true;
  int jobs = 1;
};

struct BenchRow {
  std::string strategy;
  std::string expansion;  // posterior, ngram or none
  std::string param;      // eps=..., n=... or -
  double epsilon = 0.0;
  int order = 0;
  double mean_depth = 0.0;
  // Mean over utterances of the negated exact interpolated cost of the
  // selected best path (every token scored on its true history).
  double mean_loglik = 0.0;
  std::uint64_t hypotheses = 0;
  std::uint64_t scorer_calls = 0;
  double wall_ms = 0.0;
};

// Exact interpolated cost of each archive entry's best word sequence,
// evaluated on the original lattices with one extra (uncounted) batch.
inline std::vector<double> ExactBestPathCosts(const Archive& original,
                                              const Archive& rescored, Scorer& scorer,
                                              double lambda) {
  std::vector<Hypothesis> hyps;
  std::vector<Path> paths;
  for (std::size_t i = 0; i < rescored.size(); ++i) {
    const Path best = BestPath(rescored[i].lattice);
    std::optional<Path> p = FindPath(original[i].lattice, best.words);
    if (!p) throw Error("rescored best path is not a path of " + original[i].id);
    hyps.push_back({i, best.words});
    paths.push_back(std::move(*p));
  }
  if (hyps.empty()) return {};
  const ScoreBatch batch = ScoreHypotheses(scorer, hyps);
  std::vector<double> out;
  for (std::size_t i = 0; i < paths.size(); ++i)
    out.push_back(InterpolatedPathCost(original[i].lattice, paths[i],
                                       batch.response[i].costs, lambda));
  return out;
}

inline BenchRow RunBenchRow(const Archive& archive, Scorer& scorer,
                            const RescoreConfig& cfg, int jobs) {
  CountingScorer counter(scorer);
  const auto t0 = std::chrono::steady_clock::now();
  ArchiveResult res = RescoreArchive(archive, counter, cfg, jobs);
  const auto t1 = std::chrono::steady_clock::now();
  BenchRow row;
  row.strategy = std::string(Name(cfg.strategy));
  row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  row.hypotheses = counter.hypotheses();
  row.scorer_calls = counter.calls();
  if (res.total.utterance_frames > 0)
    row.mean_depth = double(res.total.arc_frames) / double(res.total.utterance_frames);
  const std::vector<double> exact =
      ExactBestPathCosts(archive, res.archive, scorer, cfg.lambda);
  double sum = 0.0;
  for (double c : exact) sum -= c;
  if (!exact.empty()) row.mean_loglik = sum / double(exact.size());
  return row;
}

inline std::vector<BenchRow> RunBench(const Archive& archive, Scorer& scorer,
                                      const BenchConfig& bc) {
  std::vector<BenchRow> rows;
  for (double eps : bc.epsilons) {
    RescoreConfig cfg = bc.base;
    cfg.expansion = ExpansionMethod::kPosterior;
    cfg.epsilon = eps;
    BenchRow row = RunBenchRow(archive, scorer, cfg, bc.jobs);
    row.expansion = "posterior";
    row.param = "eps=" + FormatDouble(eps);
    row.epsilon = eps;
    rows.push_back(std::move(row));
  }
  for (int order : bc.orders) {
    RescoreConfig cfg = bc.base;
    cfg.expansion = ExpansionMethod::kNgram;
    cfg.ngram_order = order;
    BenchRow row = RunBenchRow(archive, scorer, cfg, bc.jobs);
    row.expansion = "ngram";
    row.param = "n=" + std::to_string(order);
    row.order = order;
    rows.push_back(std::move(row));
  }
  if (bc.replace_row) {
    RescoreConfig cfg = bc.base;
    cfg.strategy = Strategy::kReplace;
    BenchRow row = RunBenchRow(archive, scorer, cfg, bc.jobs);
    row.expansion = "none";
    row.param = "-";
    rows.push_back(std::move(row));
  }
  if (bc.nbest > 0) {
    RescoreConfig cfg = bc.base;
    cfg.strategy = Strategy::kNbest;
    cfg.nbest = bc.nbest;
    BenchRow row = RunBenchRow(archive, scorer, cfg, bc.jobs);
    row.expansion = "none";
    row.param = "n=" + std::to_string(bc.nbest);
    row.mean_depth = 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

// CSV with a header line.  Wall time is printed only when `timing` is set,
// so the default output is reproducible byte for byte.
inline void WriteBenchCsv(std::ostream& os, const std::vector<BenchRow>& rows,
                          bool timing) {
  os << "strategy,expansion,param,mean_depth,mean_loglik,hypotheses,scorer_calls,wall_ms\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    os << r.strategy << ',' << r.expansion << ',' << r.param << ',';
    if (r.expansion == "none" && r.strategy == "nbest") {
      os << "NA";
    } else {
      std::snprintf(buf, sizeof(buf), "%.6f", r.mean_depth);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", r.mean_loglik);
    os << ',' << buf << ',' << r.hypotheses << ',' << r.scorer_calls << ',';
    if (timing) {
      std::snprintf(buf, sizeof(buf), "%.3f", r.wall_ms);
      os << buf;
    } else {
      os << "NA";
    }
    os << '\n';
  }
}

}  // namespace latrescore
