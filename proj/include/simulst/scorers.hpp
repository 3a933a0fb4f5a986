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

#ifndef SIMULST_SCORERS_HPP
#define SIMULST_SCORERS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "simulst/ctc_prefix.hpp"
#include "simulst/frames.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

// Streaming encoder output. States are emitted once enough frames exist to
// satisfy the lookahead and are never revised afterwards; the pending buffer
// holds consumed frames that are not yet part of any state.
struct EncoderState {
  std::vector<std::vector<double>> hidden;
  std::vector<std::vector<float>> pending;
  std::int64_t consumed_frames = 0;  // valid frames only; padding is ignored
  int chunks_consumed = 0;
  bool flushed = false;
  int r = 4;
  int lookahead = 10;

  // Source frames represented by the emitted states.
  std::int64_t covered_frames() const {
    return flushed ? consumed_frames
                   : static_cast<std::int64_t>(hidden.size()) * r;
  }
};

// Incremental encoder contract: chunks in arrival order, lookahead of L raw
// frames withheld until future context exists, full flush at stream end.
class IncrementalEncoder {
 public:
  virtual ~IncrementalEncoder() = default;

  virtual EncoderState initial_state() const = 0;

  // Consumes the next chunk (padding beyond valid_frames ignored) and returns
  // the number of newly emitted hidden states. Throws
  // std::invalid_argument("non-monotonic stream") on out-of-order chunks.
  virtual int encode_chunk(EncoderState& state, const Chunk& chunk) const = 0;

  // Emits every withheld state at stream end; returns how many were emitted.
  virtual int flush(EncoderState& state) const = 0;

  virtual int downsample_rate() const = 0;
  virtual int lookahead_frames() const = 0;
};

// Attention-decoder scorer over V union {EOS} (full id space; zero mass on
// blank/BOS/UNK).
class AttScorer {
 public:
  virtual ~AttScorer() = default;
  virtual LogDist logdist(const EncoderState& state,
                          const std::vector<TokenId>& prefix) const = 0;
};

// Per-step CTC posteriors over V union {BLANK}. Steps index emitted encoder
// states; requesting beyond them throws
// std::invalid_argument("state not yet available").
class CtcScorer {
 public:
  virtual ~CtcScorer() = default;
  virtual std::vector<LogDist> frame_posteriors(const EncoderState& state,
                                                int from_step, int to_step) const = 0;
};

// Prefix language model over V union {EOS}.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  virtual LogDist logdist(const std::vector<TokenId>& prefix) const = 0;
};

// Translation decoder over the target vocabulary union {EOS}.
class StScorer {
 public:
  virtual ~StScorer() = default;
  virtual LogDist logdist(const EncoderState& state,
                          const std::vector<TokenId>& target_prefix) const = 0;
};

// One encoder shared by the ASR attention decoder, CTC head and ST decoder,
// plus the external LM and the joint-score weights.
struct ScorerBundle {
  std::shared_ptr<IncrementalEncoder> encoder;
  std::shared_ptr<AttScorer> asr_att;
  std::shared_ptr<CtcScorer> ctc;
  std::shared_ptr<LmScorer> lm;
  std::shared_ptr<StScorer> st;
  JointScoreWeights weights;
};

}  // namespace simulst

#endif  // SIMULST_SCORERS_HPP
