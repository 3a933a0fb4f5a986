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

#ifndef SIMULST_CORPUS_HPP
#define SIMULST_CORPUS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simulst/frames.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

struct ToyModelSpec;

// One labeled stretch of frames: a source token or silence.
struct TokenSpan {
  int token_index = -1;       // position in the source sequence; -1 = silence
  TokenId token = kBlankId;   // source token id; kBlankId for silence
  std::int64_t start = 0;
  std::int64_t length = 0;
};

// A generated utterance with its full ground truth.
struct SyntheticUtterance {
  std::string id;
  std::vector<TokenId> source;       // source token ids
  std::vector<TokenId> translation;  // target token ids, same length as source
  std::vector<int> order;            // order[i] = source position rendered at target i
  std::vector<TokenSpan> spans;      // partition of [0, frames.size())
  std::vector<FeatureFrame> frames;
  std::uint64_t seed = 0;
};

struct GeneratorConfig {
  int n_utts = 20;
  int vocab_size = 20;   // regular source tokens (target side same size)
  int frame_dim = 16;
  int tokens_min = 6;
  int tokens_max = 12;
  int duration_min = 12;  // frames per token
  int duration_max = 20;
  double silence_prob = 0.2;  // chance of a silence gap between tokens
  int silence_min = 4;
  int silence_max = 12;
  double noise_sigma = 0.3;
  double reorder_prob = 0.3;
  std::uint64_t seed = 2026;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct UtteranceRecord {
  std::string id;
  std::string frames_file;  // relative to the manifest directory
  std::string labels_file;
  int n_frames = 0;
  std::string transcript;    // space-separated source token names
  std::string translation;   // space-separated target token names
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  GeneratorConfig config;
  std::string model_file;
  std::vector<UtteranceRecord> utterances;
};

// Deterministic model parameters (prototypes, lexicon, transition table)
// derived from the generator config.
ToyModelSpec make_model_spec(const GeneratorConfig& config);

// Generates utterance `index` of the corpus. Pure given (spec, config, index).
SyntheticUtterance generate_utterance(const ToyModelSpec& spec,
                                      const GeneratorConfig& config, int index);

// Generates the corpus under `out_dir`: frame files, label sidecars, the
// model file and manifest.json. Returns the manifest.
CorpusManifest generate_corpus(const GeneratorConfig& config, const std::string& out_dir);

// Frame file round trip (binary layout documented in docs/formats.md).
void write_frames_file(const std::string& path, const std::vector<FeatureFrame>& frames,
                       int dim);
std::vector<FeatureFrame> read_frames_file(const std::string& path);

// Label sidecar and manifest round trips.
void write_labels_file(const std::string& path, const SyntheticUtterance& utt);
SyntheticUtterance read_labels_file(const std::string& path);
void write_manifest(const std::string& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::string& path);

// Loads the utterance ground truth plus frames for one manifest record.
SyntheticUtterance load_utterance(const std::string& manifest_dir,
                                  const UtteranceRecord& record);

// Source and target vocabularies implied by a generator config.
Vocab source_vocab(const GeneratorConfig& config);
Vocab target_vocab(const GeneratorConfig& config);

}  // namespace simulst

#endif  // SIMULST_CORPUS_HPP
