// Copyright 2026 The simulst Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Session traces: a time-ordered event log (chunk arrivals, search steps,
// commits, terminal summary) serialized as JSON Lines. The validator replays
// a trace independently of the engine that produced it.

#ifndef SIMULST_TRACE_HPP
#define SIMULST_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "simulst/policy.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  int trace_version = kTraceVersion;
  std::string utt_id;
  PolicyKind policy = PolicyKind::kSh;
  int k = 3;  // kWaitForever encodes k = infinity
  int chunk_frames = 48;
  int downsample_rate = 4;
  int beam_size = 5;
  int lookahead_frames = 10;
  std::uint64_t seed = 0;
};

// One source chunk handed to the encoder. wall_compute_ms is the compute
// charged for encoding this chunk and running the search rounds it unlocks.
struct ChunkEvent {
  int i = 0;  // 1-based
  std::int64_t arrival_ms = 0;
  int valid_frames = 0;
  double wall_compute_ms = 0.0;
};

struct BeamEntry {
  std::vector<TokenId> prefix;
  std::string text;
  double joint = 0.0;
  double ctc = 0.0;
  double att = 0.0;
  double lm = 0.0;
};

// Beam state after search step j, with raw and envelope-enforced phi values.
struct AsrStepEvent {
  int j = 0;  // 1-based encoder step index
  std::vector<BeamEntry> beam;
  int phi_lcp_raw = 0;
  int phi_sh_raw = 0;
  int phi_lcp = 0;
  int phi_sh = 0;
  double wall_compute_ms = 0.0;
};

// One committed translation token. t counts committed tokens including this
// one; tail marks commits made after the source stream ended.
struct CommitEvent {
  int t = 0;
  TokenId token = kUnkId;
  std::string token_text;
  std::int64_t source_consumed_ms = 0;
  double wall_compute_ms = 0.0;
  bool tail = false;
};

struct SummaryEvent {
  std::vector<TokenId> translation;
  std::string translation_text;
  std::vector<TokenId> transcript;  // best final ASR hypothesis
  std::string transcript_text;
  std::int64_t total_source_ms = 0;
  int n_frames = 0;
  int phi_final = 0;
  double total_wall_ms = 0.0;
};

using TraceEvent = std::variant<ChunkEvent, AsrStepEvent, CommitEvent>;

struct SessionTrace {
  TraceHeader header;
  std::vector<TraceEvent> events;
  SummaryEvent summary;
  bool has_summary = false;
};

// JSONL round trip. The header is the first line, the summary the last.
// Non-finite scores serialize as the strings "-inf"/"inf".
void write_trace(const SessionTrace& trace, std::ostream& out);
std::string trace_to_jsonl(const SessionTrace& trace);
SessionTrace read_trace(std::istream& in);
SessionTrace trace_from_jsonl(const std::string& text);
void save_trace(const SessionTrace& trace, const std::string& path);
SessionTrace load_trace(const std::string& path);

// Independent replay validator. Returns human-readable violations; an empty
// vector means the trace is sound. Checks, among others: chunk arrival order
// and spacing, phi recomputation from beam snapshots, the phi envelope law,
// the commit trigger (phi - k >= t before each non-tail commit), commit
// ordering, source consumption never outrunning arrived chunks, and summary
// consistency with the committed tokens.
std::vector<std::string> validate_trace(const SessionTrace& trace);

}  // namespace simulst

#endif  // SIMULST_TRACE_HPP
