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

#ifndef SIMULST_TOY_MODELS_HPP
#define SIMULST_TOY_MODELS_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "simulst/corpus.hpp"
#include "simulst/scorers.hpp"

namespace simulst {

// Parameters shared by the toy models and the corpus generator: per-token
// prototype vectors, the bijective source-to-target lexicon, and the
// first-order transition table source sequences are drawn from.
struct ToyModelSpec {
  int vocab_size = 0;  // regular source tokens
  int frame_dim = 0;
  std::vector<std::vector<double>> prototypes;  // vocab_size x frame_dim
  std::vector<int> lexicon;       // source regular index -> target regular index
  std::vector<double> lm_init;    // initial token distribution, size vocab_size
  std::vector<std::vector<double>> lm_trans;  // row-stochastic, zero diagonal
  double eps = 0.05;         // tabular scorer off-truth mass
  double att_peak = 0.9;     // prototype attention confidence
  double temperature = 4.0;  // prototype softmax temperature
  int min_run = 2;           // states needed to count a segment
  double lm_eos = 0.1;       // bigram LM end-of-sequence mass
  std::uint64_t seed = 0;
};

void save_model_spec(const std::string& path, const ToyModelSpec& spec);
ToyModelSpec load_model_spec(const std::string& path);

// Mean-pools r consecutive frames per hidden state, withholding states until
// L frames of future context exist (or the stream is flushed).
class MeanPoolEncoder : public IncrementalEncoder {
 public:
  MeanPoolEncoder(int frame_dim, int r, int lookahead);

  EncoderState initial_state() const override;
  int encode_chunk(EncoderState& state, const Chunk& chunk) const override;
  int flush(EncoderState& state) const override;
  int downsample_rate() const override { return r_; }
  int lookahead_frames() const override { return lookahead_; }

 private:
  int frame_dim_;
  int r_;
  int lookahead_;
};

// Ground-truth-driven scorer: peaked distributions around the utterance's
// true alignment, transcript and translation. Observability is limited to
// tokens whose frames are fully covered by emitted encoder states, so the
// scorer behaves causally despite knowing the answer.
class TabularOracleScorer : public AttScorer, public CtcScorer {
 public:
  TabularOracleScorer(SyntheticUtterance utt, const ToyModelSpec& spec,
                      int source_vocab_size, int target_vocab_size);

  LogDist logdist(const EncoderState& state,
                  const std::vector<TokenId>& prefix) const override;  // att
  std::vector<LogDist> frame_posteriors(const EncoderState& state, int from_step,
                                        int to_step) const override;
  LogDist st_logdist(const EncoderState& state,
                     const std::vector<TokenId>& target_prefix) const;

  // Source tokens fully covered by the emitted encoder states.
  int observable_tokens(const EncoderState& state) const;

 private:
  SyntheticUtterance utt_;
  double eps_;
  std::vector<int> lexicon_;
  int source_vocab_size_;
  int target_vocab_size_;
  std::vector<TokenId> frame_label_;  // per-frame source token id or blank
};

// Frames-only scorer: classifies hidden states against the prototype table
// and decodes by counting consumed segments. Degrades with frame noise.
class PrototypeScorer : public AttScorer, public CtcScorer {
 public:
  PrototypeScorer(ToyModelSpec spec, int source_vocab_size, int target_vocab_size);

  LogDist logdist(const EncoderState& state,
                  const std::vector<TokenId>& prefix) const override;  // att
  std::vector<LogDist> frame_posteriors(const EncoderState& state, int from_step,
                                        int to_step) const override;
  LogDist st_logdist(const EncoderState& state,
                     const std::vector<TokenId>& target_prefix) const;

  // Classification of one hidden state over blank + regular source ids.
  LogDist classify(const std::vector<double>& hidden) const;

  // Segment estimate: argmax-classified runs of at least min_run states.
  std::vector<TokenId> segments(const EncoderState& state) const;

 private:
  ToyModelSpec spec_;
  int source_vocab_size_;
  int target_vocab_size_;
};

// Uniform LM over V union {EOS}.
class UniformLm : public LmScorer {
 public:
  explicit UniformLm(int source_vocab_size) : source_vocab_size_(source_vocab_size) {}
  LogDist logdist(const std::vector<TokenId>& prefix) const override;

 private:
  int source_vocab_size_;
};

// First-order LM built from the generator's transition table, lightly
// smoothed, with constant EOS mass.
class BigramLm : public LmScorer {
 public:
  BigramLm(const ToyModelSpec& spec, int source_vocab_size, double smoothing = 0.05);
  LogDist logdist(const std::vector<TokenId>& prefix) const override;

 private:
  std::vector<double> init_;                // over regular tokens
  std::vector<std::vector<double>> trans_;  // per previous regular token
  double eos_mass_;
  int source_vocab_size_;
};

// Adapters so one object can fill several bundle slots.
struct StAdapter : StScorer {
  template <typename T>
  explicit StAdapter(std::shared_ptr<T> impl)
      : fn_([impl](const EncoderState& s, const std::vector<TokenId>& p) {
          return impl->st_logdist(s, p);
        }) {}
  LogDist logdist(const EncoderState& state,
                  const std::vector<TokenId>& prefix) const override {
    return fn_(state, prefix);
  }
  std::function<LogDist(const EncoderState&, const std::vector<TokenId>&)> fn_;
};

enum class LmKind { kUniform, kBigram };

// Bundle wiring. The tabular bundle needs the per-utterance ground truth;
// the prototype bundle only needs the model parameters.
ScorerBundle make_tabular_bundle(const SyntheticUtterance& utt, const ToyModelSpec& spec,
                                 const GeneratorConfig& config,
                                 const JointScoreWeights& weights, int r, int lookahead,
                                 LmKind lm_kind = LmKind::kBigram);
ScorerBundle make_prototype_bundle(const ToyModelSpec& spec, const GeneratorConfig& config,
                                   const JointScoreWeights& weights, int r, int lookahead,
                                   LmKind lm_kind = LmKind::kBigram);

}  // namespace simulst

#endif  // SIMULST_TOY_MODELS_HPP
