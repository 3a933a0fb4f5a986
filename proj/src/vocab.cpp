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

#include "simulst/vocab.hpp"

#include <cstdio>
#include <stdexcept>

namespace simulst {

namespace {

const char* kReservedNames[kNumReserved] = {"<blank>", "<s>", "</s>", "<unk>"};

}  // namespace

Vocab Vocab::make(int n_regular, const std::string& prefix) {
  std::vector<std::string> regular;
  regular.reserve(static_cast<std::size_t>(n_regular));
  char buf[64];
  for (int i = 0; i < n_regular; ++i) {
    std::snprintf(buf, sizeof(buf), "%s_%02d", prefix.c_str(), i);
    regular.emplace_back(buf);
  }
  return from_tokens(regular);
}

Vocab Vocab::from_tokens(const std::vector<std::string>& regular) {
  Vocab v;
  v.tokens_.reserve(regular.size() + kNumReserved);
  for (const char* name : kReservedNames) v.tokens_.emplace_back(name);
  for (const auto& t : regular) v.tokens_.push_back(t);
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], static_cast<TokenId>(i)).second) {
      throw std::invalid_argument("duplicate token: " + v.tokens_[i]);
    }
  }
  return v;
}

TokenId Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return kUnkId;
  return it->second;
}

std::vector<TokenId> Vocab::regular_ids() const {
  std::vector<TokenId> ids;
  ids.reserve(static_cast<std::size_t>(n_regular()));
  for (TokenId id = kNumReserved; id < size(); ++id) ids.push_back(id);
  return ids;
}

std::string detokenize(const Vocab& vocab, const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += vocab.token(ids[i]);
  }
  return out;
}

}  // namespace simulst
