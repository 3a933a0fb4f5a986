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
// Session orchestrator: feeds chunks to the encoder, advances the ASR beam,
// evaluates the wait-k policy on the beam, and commits translation tokens.
// The beam guides when to commit; the translation decoder conditions only on
// encoder states and its own committed prefix, never on beam content.

#ifndef SIMULST_SIMUL_ST_HPP
#define SIMULST_SIMUL_ST_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "simulst/frames.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/policy.hpp"
#include "simulst/scorers.hpp"
#include "simulst/trace.hpp"

namespace simulst {

// How wall_compute_ms is filled in trace events. The fixed model charges a
// constant per chunk and per commit, keeping traces byte-reproducible across
// machines; the measured model records real timings.
struct ComputeModel {
  enum class Kind { kFixed, kMeasured };
  Kind kind = Kind::kFixed;
  double fixed_chunk_ms = 10.0;
  double fixed_commit_ms = 2.0;
};

struct SessionConfig {
  int k = 3;  // kWaitForever = wait until stream end
  PolicyKind policy = PolicyKind::kSh;
  int chunk_frames = 48;
  int downsample_rate = 4;
  int beam_size = 5;
  JointScoreWeights weights;
  int lookahead_frames = 10;
  // Tail decoding stops at ceil(tail_factor * phi_final) + tail_offset
  // tokens if the model never produces EOS.
  double tail_factor = 1.5;
  int tail_offset = 10;
  std::uint64_t seed = 0;
  ComputeModel compute;
  int max_prefix_len = 256;
  std::string utt_id;

  void validate() const;
};

// Test seams. beam_filter rewrites the beam snapshot seen by the policy and
// the trace (the search keeps its own state); it exists so tests can corrupt
// token identities while preserving hypothesis lengths and prove the
// translation only depends on the beam through phi.
struct SessionHooks {
  std::function<Beam(const Beam&)> beam_filter;
};

// Greedy translation step: argmax of the bundle's ST distribution given the
// current encoder state and committed prefix. Blank, BOS and UNK are never
// produced; ties resolve to the lowest token id.
TokenId st_step(const EncoderState& state, const std::vector<TokenId>& target_prefix,
                const ScorerBundle& bundle);

// Runs one streaming session over the frame stream and returns the trace.
// Loop per chunk: encode, run one search round per new encoder state, then
// while phi - k >= t commit one token at a time. After the final chunk the
// encoder flushes, remaining rounds run, and the translation decodes to EOS
// (tail commits, marked in the trace).
SessionTrace run_session(const SessionConfig& config,
                         const std::vector<FeatureFrame>& frames,
                         const ScorerBundle& bundle,
                         const SessionHooks& hooks = {});

struct OfflineResult {
  std::vector<TokenId> transcript;
  std::vector<TokenId> translation;
};

// Full-sentence decode: encode everything, finish the beam search, then
// greedy translation with full context. Matches run_session with k = forever
// token for token. Empty frame streams yield empty outputs.
OfflineResult run_offline(const SessionConfig& config,
                          const std::vector<FeatureFrame>& frames,
                          const ScorerBundle& bundle);

}  // namespace simulst

#endif  // SIMULST_SIMUL_ST_HPP
