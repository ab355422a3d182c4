// tools/lattice_rescore.cpp

// Copyright 2026  The latrescore Authors

// See ../LICENSE for clarification regarding multiple authors
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


// Command-line front end: lattice-rescore <subcommand> [options] [input].

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latrescore/latrescore.hpp"

namespace lr = latrescore;

namespace {

std::string ReadInput(const std::string& path) {
  if (path == "-") return lr::ReadAll(std::cin);
  std::ifstream is(path);
  if (!is) throw lr::ValidationError("cannot open " + path);
  return lr::ReadAll(is);
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw lr::ValidationError("cannot write " + path);
  os << text;
}

lr::Archive ReadArchive(const std::string& path) {
  std::vector<std::string> warnings;
  lr::Archive a = lr::ParseArchive(ReadInput(path), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return a;
}

struct Io {
  std::string input = "-";
  std::string output = "-";
};

void AddIo(CLI::App* cmd, Io* io) {
  cmd->add_option("input", io->input, "input file, - for stdin");
  cmd->add_option("-o,--output", io->output, "output file, - for stdout");
}

struct Options {
  Io io;
  double beam = 8.0;
  std::string method = "posterior";
  double epsilon = 0.5;
  int order = 3;
  std::string semiring = "sum";
  std::string strategy = "non-iterative";
  std::string scorer = "hash";
  std::string estimation = "semi-viterbi";
  double lambda = 0.8;
  std::optional<double> lambda1;
  int nbest = 20;
  int jobs = 1;
  bool stats = false;
  // metrics
  std::string refs;
  // generate
  std::uint64_t seed = 1;
  std::size_t count = 10;
  lr::LatticeProfile profile;
  std::size_t corpus = 0;
  // bench
  std::vector<double> epsilons{0.5, 0.1, 0.05, 0.005};
  std::vector<int> orders{2, 3, 4};
  bool timing = false;
};

void AddRescoreFlags(CLI::App* cmd, Options* o) {
  cmd->add_option("--beam", o->beam, "pruning beam in nats")->capture_default_str();
  cmd->add_option("--expansion,--method", o->method, "posterior or ngram")
      ->capture_default_str();
  cmd->add_option("--epsilon", o->epsilon, "posterior expansion threshold")
      ->capture_default_str();
  cmd->add_option("--order", o->order, "n-gram expansion order")->capture_default_str();
  cmd->add_option("--posterior-semiring", o->semiring, "sum or max")->capture_default_str();
  cmd->add_option("--scorer", o->scorer,
                  "uniform[:N] | bigram:PATH | hash[:K] | exec:CMD | file:HYPS,SCORES")
      ->capture_default_str();
  cmd->add_option("--estimation", o->estimation, "average, weighted or semi-viterbi")
      ->capture_default_str();
  cmd->add_option("--lambda", o->lambda, "weight of the rescoring LM")->capture_default_str();
  cmd->add_option("--lambda1", o->lambda1, "weight of the replacement stage (iterative)");
  cmd->add_option("--nbest", o->nbest, "list size for the nbest strategy")
      ->capture_default_str();
  cmd->add_option("--jobs", o->jobs, "worker threads")->capture_default_str();
}

lr::RescoreConfig MakeConfig(const Options& o) {
  lr::RescoreConfig cfg;
  cfg.strategy = lr::ParseStrategy(o.strategy);
  cfg.expansion = lr::ParseExpansion(o.method);
  cfg.epsilon = o.epsilon;
  cfg.ngram_order = o.order;
  cfg.beam = o.beam;
  cfg.estimation = lr::ParseEstimation(o.estimation);
  cfg.lambda = o.lambda;
  cfg.lambda1 = o.lambda1;
  cfg.nbest = o.nbest;
  cfg.posterior_semiring = lr::ParseSemiring(o.semiring);
  cfg.Check();
  return cfg;
}

std::string RunPrune(const Options& o) {
  lr::Archive a = ReadArchive(o.io.input);
  for (auto& e : a) e.lattice = lr::Prune(e.lattice, o.beam);
  return lr::ArchiveToString(a);
}

std::string RunExpand(const Options& o) {
  lr::Archive a = ReadArchive(o.io.input);
  const lr::ExpansionMethod m = lr::ParseExpansion(o.method);
  const lr::ExpansionConfig cfg{o.epsilon, lr::ParseSemiring(o.semiring)};
  for (auto& e : a) {
    e.lattice = m == lr::ExpansionMethod::kPosterior ? lr::ExpandPosterior(e.lattice, cfg)
                                                     : lr::ExpandNgram(e.lattice, o.order);
  }
  return lr::ArchiveToString(a);
}

std::string RunToList(const Options& o) {
  const lr::Archive a = ReadArchive(o.io.input);
  std::ostringstream os;
  for (const auto& e : a) {
    os << "UTT " << e.id << '\n';
    const lr::PathCover cover = lr::ConstrainedPathCover(e.lattice);
    for (std::size_t i = 0; i < cover.paths.size(); ++i) {
      const lr::Path& p = cover.paths[i].path;
      os << "PATH " << i << ' ' << lr::FormatDouble(p.cost);
      for (const auto& w : p.words) os << ' ' << w;
      os << '\n';
    }
  }
  return os.str();
}

std::string RunPosteriors(const Options& o) {
  const lr::Archive a = ReadArchive(o.io.input);
  const lr::Semiring sr = lr::ParseSemiring(o.semiring);
  std::ostringstream os;
  for (const auto& e : a) {
    const lr::Lattice& lat = e.lattice;
    const std::vector<double> post = lr::ArcPosteriors(lat, sr);
    os << "UTT " << e.id << '\n';
    std::size_t id = 0;
    for (lr::StateId s = 0; s < lat.NumStates(); ++s) {
      for (const lr::Arc& arc : lat.Arcs(s)) {
        lr::WriteArc(os, s, arc);
        os << " # post=" << lr::FormatDouble(post[id++]) << '\n';
      }
    }
    for (lr::StateId s = 0; s < lat.NumStates(); ++s)
      if (lat.IsFinal(s)) os << s << ' ' << lr::FormatDouble(lat.Final(s)) << '\n';
    os << '\n';
  }
  return os.str();
}

std::string RunRescore(const Options& o) {
  const lr::RescoreConfig cfg = MakeConfig(o);
  const lr::Archive a = ReadArchive(o.io.input);
  std::unique_ptr<lr::Scorer> scorer = lr::MakeScorer(o.scorer);
  const lr::ArchiveResult r = lr::RescoreArchive(a, *scorer, cfg, o.jobs);
  if (o.stats) {
    std::cerr << "utterances=" << a.size() << " scorer_calls=" << r.total.scorer_calls
              << " hypotheses_scored=" << r.total.hypotheses_scored
              << " states=" << r.total.states << " arcs=" << r.total.arcs << '\n';
  }
  return lr::ArchiveToString(r.archive);
}

std::string RunMetrics(const Options& o) {
  const lr::Archive a = ReadArchive(o.io.input);
  const lr::References refs = lr::ParseReferences(ReadInput(o.refs));
  const lr::Metrics m = lr::ComputeMetrics(refs, a);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "utterances=%zu\nref_words=%zu\nerrors=%zu\nwer=%.4f\n"
                "lattice_depth=%.6f\nbest_path_loglik=%.6f\n",
                m.utterances, m.ref_words, m.errors, m.wer, m.lattice_depth,
                m.best_path_loglik);
  return buf;
}

std::string RunGenerate(const Options& o) {
  if (o.corpus > 0) return lr::GenerateCorpus(o.seed, o.corpus, o.profile.vocab_size);
  return lr::ArchiveToString(lr::GenerateArchive(o.seed, o.count, o.profile));
}

std::string RunBench(const Options& o) {
  lr::BenchConfig bc;
  bc.base = MakeConfig(o);
  bc.epsilons = o.epsilons;
  bc.orders = o.orders;
  bc.nbest = o.nbest;
  bc.jobs = o.jobs;
  const lr::Archive a = ReadArchive(o.io.input);
  std::unique_ptr<lr::Scorer> scorer = lr::MakeScorer(o.scorer);
  std::ostringstream os;
  lr::WriteBenchCsv(os, lr::RunBench(a, *scorer, bc), o.timing);
  return os.str();
}

// Reads `PATH <pid> <cost> words...` records and writes `<pid> c1 c2 ...`
// score records, one batch per utterance.
std::string RunScore(const Options& o) {
  std::unique_ptr<lr::Scorer> scorer = lr::MakeScorer(o.scorer);
  std::istringstream is(ReadInput(o.io.input));
  std::ostringstream os;
  std::string line, utt;
  std::vector<std::string> pids;
  std::vector<lr::Hypothesis> hyps;
  std::size_t lineno = 0;
  bool started = false;
  auto flush = [&] {
    if (!started) return;
    os << "UTT " << utt << '\n';
    if (!hyps.empty()) {
      const lr::ScoreBatch b = lr::ScoreHypotheses(*scorer, hyps);
      for (std::size_t i = 0; i < hyps.size(); ++i) {
        os << pids[i];
        for (double c : b.response[i].costs) os << ' ' << lr::FormatDouble(c);
        os << '\n';
      }
    }
    hyps.clear();
    pids.clear();
  };
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty() || f[0].front() == '#') continue;
    if (f[0] == "UTT") {
      if (f.size() != 2) throw lr::ParseError(lineno, "UTT header needs one id");
      flush();
      utt = f[1];
      started = true;
      continue;
    }
    if (f.size() < 3 || f[0] != "PATH")
      throw lr::ParseError(lineno, "expected 'PATH <pid> <cost> words...'");
    started = true;
    pids.push_back(f[1]);
    hyps.push_back({hyps.size(), std::vector<std::string>(f.begin() + 3, f.end())});
  }
  flush();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice rescoring with batched language-model evaluation"};
  app.name("lattice-rescore");
  app.require_subcommand(1);
  Options o;

  auto* prune = app.add_subcommand("prune", "beam-prune lattices");
  AddIo(prune, &o.io);
  prune->add_option("--beam", o.beam, "beam in nats")->capture_default_str();

  auto* expand = app.add_subcommand("expand", "expand lattices");
  AddIo(expand, &o.io);
  expand->add_option("--method,--expansion", o.method, "posterior or ngram")
      ->capture_default_str();
  expand->add_option("--epsilon", o.epsilon, "posterior threshold")->capture_default_str();
  expand->add_option("--order", o.order, "n-gram order")->capture_default_str();
  expand->add_option("--posterior-semiring", o.semiring, "sum or max")
      ->capture_default_str();

  auto* to_list = app.add_subcommand("to-list", "write a path cover as hypotheses");
  AddIo(to_list, &o.io);

  auto* posteriors = app.add_subcommand("posteriors", "annotate arcs with posteriors");
  AddIo(posteriors, &o.io);
  posteriors->add_option("--posterior-semiring", o.semiring, "sum or max")
      ->capture_default_str();

  auto* rescore = app.add_subcommand("rescore", "rescore lattices");
  AddIo(rescore, &o.io);
  AddRescoreFlags(rescore, &o);
  rescore->add_option("--strategy", o.strategy, "non-iterative, iterative, replace or nbest")
      ->capture_default_str();
  rescore->add_flag("--stats", o.stats, "print scorer accounting to stderr");

  auto* metrics = app.add_subcommand("metrics", "WER, depth and log-likelihood");
  AddIo(metrics, &o.io);
  metrics->add_option("--ref", o.refs, "reference transcripts (utt-id words...)")
      ->required();

  auto* generate = app.add_subcommand("generate", "synthetic lattices or training text");
  generate->add_option("-o,--output", o.io.output, "output file, - for stdout");
  generate->add_option("--seed", o.seed)->capture_default_str();
  generate->add_option("--count", o.count)->capture_default_str();
  generate->add_option("--min-states", o.profile.min_states)->capture_default_str();
  generate->add_option("--max-states", o.profile.max_states)->capture_default_str();
  generate->add_option("--branching", o.profile.max_branching)->capture_default_str();
  generate->add_option("--span", o.profile.max_span)->capture_default_str();
  generate->add_option("--vocab", o.profile.vocab_size)->capture_default_str();
  generate->add_option("--noise", o.profile.cost_noise)->capture_default_str();
  generate->add_option("--max-frames", o.profile.max_frames)->capture_default_str();
  generate->add_option("--extra-final", o.profile.extra_final_prob)->capture_default_str();
  generate->add_option("--corpus", o.corpus, "emit this many training sentences instead");

  auto* bench = app.add_subcommand("bench", "depth / likelihood / accounting table (CSV)");
  AddIo(bench, &o.io);
  AddRescoreFlags(bench, &o);
  bench->add_option("--strategy", o.strategy, "strategy of the sweep rows")
      ->capture_default_str();
  bench->add_option("--epsilons", o.epsilons)->delimiter(',')->allow_extra_args(false)->capture_default_str();
  bench->add_option("--orders", o.orders)->delimiter(',')->allow_extra_args(false)->capture_default_str();
  bench->add_flag("--timing", o.timing, "fill in the wall-time column");

  auto* score = app.add_subcommand("score", "score a hypothesis list (to-list output)");
  AddIo(score, &o.io);
  score->add_option("--scorer", o.scorer)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    std::string out;
    if (*prune) out = RunPrune(o);
    else if (*expand) out = RunExpand(o);
    else if (*to_list) out = RunToList(o);
    else if (*posteriors) out = RunPosteriors(o);
    else if (*rescore) out = RunRescore(o);
    else if (*metrics) out = RunMetrics(o);
    else if (*generate) out = RunGenerate(o);
    else if (*bench) out = RunBench(o);
    else if (*score) out = RunScore(o);
    WriteOutput(o.io.output, out);
  } catch (const lr::ScorerError& e) {
    std::cerr << "lattice-rescore: scorer error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lattice-rescore: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
