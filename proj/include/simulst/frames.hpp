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

#ifndef SIMULST_FRAMES_HPP
#define SIMULST_FRAMES_HPP

#include <cstdint>
#include <vector>

namespace simulst {

// One 10 ms feature frame. The engine never inspects feature semantics, it
// only carries the vectors to the encoder.
struct FeatureFrame {
  std::vector<float> values;
  std::int64_t index = 0;  // 0-based position in the source stream
};

// Fixed-size window of frames. The last chunk of a stream may be zero-padded;
// valid_frames marks how many leading frames are real.
struct Chunk {
  std::vector<FeatureFrame> frames;
  int chunk_index = 0;       // 1-based
  std::int64_t arrival_time_ms = 0;  // chunk_index * w * 10
  int valid_frames = 0;      // <= frames.size(); padding beyond this is zeros
};

// Splits a frame stream into chunks of w frames, zero-padding the tail.
// Throws std::invalid_argument("empty stream") on empty input and
// std::invalid_argument("invalid chunk size") when w <= 0.
std::vector<Chunk> make_chunks(const std::vector<FeatureFrame>& frames, int w);

// Beam steps taken per full chunk, w/r. Throws std::invalid_argument
// ("chunk size not divisible by downsampling rate") when r does not divide w.
int steps_per_chunk(int w, int r);

// Number of chunks observable after j encoder steps: ceil(j*r/w).
int tau(int j, int r, int w);

// Milliseconds of source audio represented by n frames (10 ms clock).
inline std::int64_t frames_to_ms(std::int64_t n_frames) { return n_frames * 10; }

}  // namespace simulst

#endif  // SIMULST_FRAMES_HPP
