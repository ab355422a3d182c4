// latrescore/text_format.hpp

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

#include <charconv>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "latrescore/errors.hpp"
#include "latrescore/lattice.hpp"

namespace latrescore {

// Lattice text format, one line per record:
//
//   SRC DST WORD GRAPH_COST,ACOUSTIC_COST[,NUM_FRAMES]   arc
//   STATE [FINAL_COST]                                  final state
//   UTT <id>                                            archive header
//   # ...                                               comment
//
// The start state is the source of the first arc line.  Blank lines separate
// lattices in an archive.  An arc line may carry a trailing "#..." field,
// which is ignored (annotated output uses it).

struct LatticeEntry {
  std::string id;
  Lattice lattice;
};

using Archive = std::vector<LatticeEntry>;

// Shortest decimal form that reads back to the same double.
inline std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

namespace internal {

inline std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline double ParseNumber(std::string_view s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, "malformed number '" + std::string(s) + "'");
  if (!std::isfinite(v))
    throw ParseError(line, "non-finite number '" + std::string(s) + "'");
  return v;
}

inline std::int64_t ParseInteger(std::string_view s, std::size_t line,
                                 const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v < 0)
    throw ParseError(line, std::string("malformed ") + what + " '" +
                               std::string(s) + "'");
  return v;
}

struct RawArc {
  std::int64_t src, dst;
  Arc arc;
  std::size_t line;
};

struct RawLattice {
  std::vector<RawArc> arcs;
  std::vector<std::pair<std::int64_t, double>> finals;
  std::vector<std::size_t> final_lines;
  std::int64_t start = -1;
  std::size_t first_line = 0;
};

// Builds a normalized lattice from raw records.
inline Lattice BuildLattice(const RawLattice& raw,
                            std::vector<std::string>* warnings) {
  if (raw.start < 0) throw ParseError(raw.first_line, "no start state");

  // Dense ids in ascending order of the input ids, so an input that is
  // already topologically numbered keeps its numbering.
  std::map<std::int64_t, StateId> ids;
  ids[raw.start] = 0;
  for (const RawArc& r : raw.arcs) {
    ids[r.src] = 0;
    ids[r.dst] = 0;
  }
  for (const auto& [s, c] : raw.finals) ids[s] = 0;
  StateId next = 0;
  for (auto& [k, v] : ids) v = next++;

  Lattice lat;
  lat.AddStates(next);
  lat.SetStart(ids[raw.start]);
  for (std::size_t i = 0; i < raw.finals.size(); ++i) {
    const StateId s = ids[raw.finals[i].first];
    if (lat.IsFinal(s))
      throw ParseError(raw.final_lines[i], "duplicate final line for state " +
                                               std::to_string(raw.finals[i].first));
    lat.SetFinal(s, raw.finals[i].second);
  }

  // Epsilon arcs are accepted only as cost-only exits: the destination must
  // be a final state without outgoing arcs.  They fold into the source's
  // final cost.
  std::vector<std::map<std::string, std::size_t>> seen(next);
  std::vector<std::pair<StateId, double>> folded;
  for (const RawArc& r : raw.arcs) {
    const StateId s = ids[r.src], d = ids[r.dst];
    if (!seen[s].emplace(r.arc.word, r.line).second)
      throw NondeterminismError("line " + std::to_string(r.line) + ": state " +
                                std::to_string(r.src) + " has two arcs labelled '" +
                                r.arc.word + "'");
    if (r.arc.word == kEpsilon) {
      bool dst_has_out = false;
      for (const RawArc& q : raw.arcs)
        if (q.src == r.dst) dst_has_out = true;
      if (dst_has_out || !lat.IsFinal(d))
        throw ParseError(r.line, "epsilon arc must lead to a final state "
                                 "without outgoing arcs");
      folded.emplace_back(s, r.arc.Cost() + lat.Final(d));
      continue;
    }
    if (IsStructuralToken(r.arc.word))
      throw ParseError(r.line, "reserved token '" + r.arc.word + "' on an arc");
    Arc a = r.arc;
    a.next_state = d;
    lat.AddArc(s, std::move(a));
  }
  for (const auto& [s, cost] : folded) {
    if (lat.IsFinal(s))
      throw NondeterminismError("epsilon exit from state that is already final");
    lat.SetFinal(s, cost);
  }
  // An epsilon target reached by nothing else is no longer needed.
  for (const RawArc& r : raw.arcs) {
    if (r.arc.word != kEpsilon) continue;
    const StateId d = ids[r.dst];
    bool other_in = false;
    for (const RawArc& q : raw.arcs)
      if (q.dst == r.dst && q.arc.word != kEpsilon) other_in = true;
    if (!other_in && d != lat.Start()) lat.ClearFinal(d);
  }

  if (TopologicalOrder(lat).empty())
    throw CycleError("lattice starting at line " + std::to_string(raw.first_line) +
                     " contains a cycle");
  std::size_t removed = 0;
  Lattice out = Normalize(lat, &removed);
  if (removed > 0 && warnings)
    warnings->push_back("lattice at line " + std::to_string(raw.first_line) +
                        ": removed " + std::to_string(removed) +
                        " unreachable or dead-end state(s)");
  if (out.Empty())
    throw ParseError(raw.first_line, "no complete path from the start state");
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  // Reads the next lattice block.  Returns false at end of input.
  bool Next(std::string* id, RawLattice* raw) {
    *raw = RawLattice();
    id->clear();
    bool in_block = false;
    while (pos_ <= text_.size()) {
      if (pos_ == text_.size()) {
        pos_ = text_.size() + 1;
        break;
      }
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      const std::size_t lineno = ++line_;
      auto fields = SplitFields(line);
      if (fields.empty()) {
        pos_ = end + 1;
        if (in_block) return true;
        continue;
      }
      if (fields[0].front() == '#') {
        pos_ = end + 1;
        continue;
      }
      if (fields[0] == "UTT") {
        if (in_block) {  // header starts the next block; re-read it
          --line_;
          return true;
        }
        if (fields.size() != 2) throw ParseError(lineno, "UTT header needs one id");
        *id = std::string(fields[1]);
        in_block = true;
        raw->first_line = lineno;
        pos_ = end + 1;
        continue;
      }
      if (!in_block) {
        in_block = true;
        raw->first_line = lineno;
      }
      ParseRecord(fields, lineno, raw);
      pos_ = end + 1;
    }
    return in_block;
  }

 private:
  static void ParseRecord(const std::vector<std::string_view>& f,
                          std::size_t lineno, RawLattice* raw) {
    std::size_t n = f.size();
    if (n >= 5 && f[4].front() == '#') n = 4;
    if (n == 1 || n == 2) {
      std::int64_t s = ParseInteger(f[0], lineno, "state id");
      double cost = n == 2 ? ParseNumber(f[1], lineno) : 0.0;
      raw->finals.emplace_back(s, cost);
      raw->final_lines.push_back(lineno);
      if (raw->start < 0 && raw->arcs.empty()) raw->start = s;
      return;
    }
    if (n != 4) throw ParseError(lineno, "expected an arc or a final-state line");
    RawArc r;
    r.line = lineno;
    r.src = ParseInteger(f[0], lineno, "state id");
    r.dst = ParseInteger(f[1], lineno, "state id");
    if (r.src > std::numeric_limits<StateId>::max() ||
        r.dst > std::numeric_limits<StateId>::max())
      throw ParseError(lineno, "state id too large");
    r.arc.word = std::string(f[2]);
    auto weights = f[3];
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (true) {
      std::size_t j = weights.find(',', i);
      parts.push_back(weights.substr(i, j == std::string_view::npos ? j : j - i));
      if (j == std::string_view::npos) break;
      i = j + 1;
    }
    if (parts.size() != 2 && parts.size() != 3)
      throw ParseError(lineno, "weight must be GRAPH,ACOUSTIC[,FRAMES]");
    r.arc.graph_cost = ParseNumber(parts[0], lineno);
    r.arc.acoustic_cost = ParseNumber(parts[1], lineno);
    if (parts.size() == 3) {
      std::int64_t frames = ParseInteger(parts[2], lineno, "frame count");
      if (frames > std::numeric_limits<std::int32_t>::max())
        throw ParseError(lineno, "frame count too large");
      r.arc.num_frames = static_cast<std::int32_t>(frames);
    }
    if (r.arc.num_frames < 1 && r.arc.word != kEpsilon)
      throw ParseError(lineno, "word arcs span at least one frame");
    const bool first_arc = raw->arcs.empty();
    raw->arcs.push_back(std::move(r));
    // The first arc line names the start state, even after leading final lines.
    if (first_arc) raw->start = raw->arcs.back().src;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace internal

// Parses a document holding a single lattice (an optional UTT header is
// accepted).  Unreachable states are removed; a note is appended to
// `warnings` when that happens.
inline Lattice ParseLattice(std::string_view text,
                            std::vector<std::string>* warnings = nullptr) {
  internal::Reader reader(text);
  std::string id;
  internal::RawLattice raw;
  if (!reader.Next(&id, &raw)) throw ParseError(0, "no start state: empty document");
  Lattice lat = internal::BuildLattice(raw, warnings);
  std::string id2;
  internal::RawLattice extra;
  if (reader.Next(&id2, &extra))
    throw ParseError(extra.first_line, "more than one lattice in document");
  return lat;
}

// Parses a multi-lattice archive.  Blocks without UTT header get their
// zero-based position as id.
inline Archive ParseArchive(std::string_view text,
                            std::vector<std::string>* warnings = nullptr) {
  internal::Reader reader(text);
  Archive out;
  std::string id;
  internal::RawLattice raw;
  while (reader.Next(&id, &raw)) {
    if (id.empty()) id = std::to_string(out.size());
    out.push_back({id, internal::BuildLattice(raw, warnings)});
  }
  return out;
}

inline std::string ReadAll(std::istream& is) {
  return std::string(std::istreambuf_iterator<char>(is), {});
}

inline void WriteArc(std::ostream& os, StateId s, const Arc& a) {
  os << s << ' ' << a.next_state << ' ' << a.word << ' '
     << FormatDouble(a.graph_cost) << ',' << FormatDouble(a.acoustic_cost) << ','
     << a.num_frames;
}

// Arc lines state by state, then final lines.  The start state is 0 for any
// normalized lattice, so the first arc line leaves it.
inline void WriteLattice(std::ostream& os, const Lattice& lat) {
  for (StateId s = 0; s < lat.NumStates(); ++s) {
    for (const Arc& a : lat.Arcs(s)) {
      WriteArc(os, s, a);
      os << '\n';
    }
  }
  for (StateId s = 0; s < lat.NumStates(); ++s)
    if (lat.IsFinal(s)) os << s << ' ' << FormatDouble(lat.Final(s)) << '\n';
}

inline std::string LatticeToString(const Lattice& lat) {
  std::ostringstream os;
  WriteLattice(os, lat);
  return os.str();
}

inline void WriteArchive(std::ostream& os, const Archive& archive) {
  for (const LatticeEntry& e : archive) {
    os << "UTT " << e.id << '\n';
    WriteLattice(os, e.lattice);
    os << '\n';
  }
}

inline std::string ArchiveToString(const Archive& archive) {
  std::ostringstream os;
  WriteArchive(os, archive);
  return os.str();
}

}  // namespace latrescore
