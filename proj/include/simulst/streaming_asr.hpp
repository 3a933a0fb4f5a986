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

#ifndef SIMULST_STREAMING_ASR_HPP
#define SIMULST_STREAMING_ASR_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "simulst/ctc_prefix.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/scorers.hpp"

namespace simulst {

struct BeamSearchConfig {
  int b = 5;
  JointScoreWeights weights;
  int max_prefix_len = 256;        // hard cap on hypothesis length
  std::vector<TokenId> candidates;  // extension tokens; empty = all regular ids
  std::uint64_t seed = 0;

  void validate() const {
    if (b < 1) throw std::invalid_argument("beam width must be at least 1");
    weights.validate();
  }
};

// Beam entry plus its CTC scorer state.
struct SearchHypothesis {
  Hypothesis hyp;
  PrefixScoreState ctc;
};

// One expansion round at step j: every hypothesis yields a stay candidate
// (no token emitted this step; only the CTC component moves, by the ratio of
// exactly-this-prefix masses) and one extension per candidate token (CTC
// component becomes the prefix probability at j; attention and LM add their
// next-token log-probabilities). Hypothesis states must cover step j-1.
std::vector<SearchHypothesis> next_candidates(const std::vector<SearchHypothesis>& beam,
                                              int j, const EncoderState& state,
                                              const ScorerBundle& bundle,
                                              std::span<const LogDist> posteriors,
                                              const BeamSearchConfig& config);

// Deduplicates by prefix (keeping the best-scoring copy), sorts by the beam
// order (joint descending, prefix ascending) and keeps the top b.
std::vector<SearchHypothesis> top_b(std::vector<SearchHypothesis> candidates, int b);

// Chunk-synchronous beam search: advances one expansion round per emitted
// encoder state.
class StreamingBeamSearch {
 public:
  StreamingBeamSearch(BeamSearchConfig config, const ScorerBundle& bundle);

  // Runs rounds for every encoder state emitted beyond the last observed
  // step. Call after each encode_chunk and after the final flush.
  // Returns the number of rounds run; on_round (optional) observes the beam
  // after each round.
  using RoundObserver = std::function<void(int j, const Beam& beam)>;
  int advance(const EncoderState& state, const RoundObserver& on_round = nullptr);

  // Rescores hypotheses for end of stream: the CTC component is rebased to
  // the complete-labeling probability and the attention decoder and LM add
  // their end-of-sequence terms. Requires a flushed state.
  Beam finalize(const EncoderState& state);

  Beam snapshot() const;
  int step_index() const { return step_; }

 private:
  BeamSearchConfig config_;
  const ScorerBundle* bundle_;
  std::vector<LogDist> posteriors_;
  std::vector<SearchHypothesis> beam_;
  int step_ = 0;
};

}  // namespace simulst

#endif  // SIMULST_STREAMING_ASR_HPP
