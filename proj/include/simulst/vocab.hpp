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

#ifndef SIMULST_VOCAB_HPP
#define SIMULST_VOCAB_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace simulst {

using TokenId = std::int32_t;

// Reserved ids shared by every vocabulary. Blank is the CTC no-label symbol
// and is never a valid prefix token.
inline constexpr TokenId kBlankId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kUnkId = 3;
inline constexpr TokenId kNumReserved = 4;

// Fixed-size token table: four reserved symbols followed by regular tokens.
class Vocab {
 public:
  Vocab() = default;

  // Builds a vocabulary with `n_regular` tokens named `<prefix>_00`,
  // `<prefix>_01`, ... after the reserved block.
  static Vocab make(int n_regular, const std::string& prefix);

  // Builds from explicit regular-token names (reserved block is implicit).
  static Vocab from_tokens(const std::vector<std::string>& regular);

  int size() const { return static_cast<int>(tokens_.size()); }
  int n_regular() const { return size() - kNumReserved; }

  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  TokenId id(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  // Regular ids in ascending order, i.e. [kNumReserved, size()).
  std::vector<TokenId> regular_ids() const;

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Renders a token-id sequence as space-separated token names.
std::string detokenize(const Vocab& vocab, const std::vector<TokenId>& ids);

}  // namespace simulst

#endif  // SIMULST_VOCAB_HPP
