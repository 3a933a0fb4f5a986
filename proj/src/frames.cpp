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

#include "simulst/frames.hpp"

#include <stdexcept>

namespace simulst {

std::vector<Chunk> make_chunks(const std::vector<FeatureFrame>& frames, int w) {
  if (w <= 0) throw std::invalid_argument("invalid chunk size");
  if (frames.empty()) throw std::invalid_argument("empty stream");

  const std::size_t dim = frames.front().values.size();
  std::vector<Chunk> chunks;
  const std::size_t n = frames.size();
  const std::size_t uw = static_cast<std::size_t>(w);
  chunks.reserve((n + uw - 1) / uw);

  for (std::size_t start = 0; start < n; start += uw) {
    Chunk c;
    c.chunk_index = static_cast<int>(chunks.size()) + 1;
    c.arrival_time_ms = static_cast<std::int64_t>(c.chunk_index) * w * 10;
    const std::size_t end = std::min(start + uw, n);
    c.valid_frames = static_cast<int>(end - start);
    c.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(start),
                    frames.begin() + static_cast<std::ptrdiff_t>(end));
    for (std::size_t i = end - start; i < uw; ++i) {
      FeatureFrame pad;
      pad.values.assign(dim, 0.0f);
      pad.index = static_cast<std::int64_t>(start + i);
      c.frames.push_back(std::move(pad));
    }
    chunks.push_back(std::move(c));
  }
  return chunks;
}

int steps_per_chunk(int w, int r) {
  if (w <= 0) throw std::invalid_argument("invalid chunk size");
  if (r <= 0 || w % r != 0) {
    throw std::invalid_argument("chunk size not divisible by downsampling rate");
  }
  return w / r;
}

int tau(int j, int r, int w) {
  if (j < 0) throw std::invalid_argument("negative step index");
  const std::int64_t num = static_cast<std::int64_t>(j) * r;
  return static_cast<int>((num + w - 1) / w);
}

}  // namespace simulst
