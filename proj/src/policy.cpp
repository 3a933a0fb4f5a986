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

#include "simulst/policy.hpp"

#include <stdexcept>

#include "simulst/vocab.hpp"

namespace simulst {

PolicyKind policy_from_string(const std::string& name) {
  if (name == "lcp") return PolicyKind::kLcp;
  if (name == "sh") return PolicyKind::kSh;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string policy_to_string(PolicyKind kind) {
  return kind == PolicyKind::kLcp ? "lcp" : "sh";
}

int valid_token_count(const Hypothesis& hyp) {
  int n = 0;
  for (TokenId id : hyp.prefix) {
    if (id == kEosId) break;
    ++n;
  }
  return n;
}

int phi_lcp(const Beam& beam) {
  if (beam.hyps.empty()) throw std::logic_error("phi of empty beam");
  int limit = valid_token_count(beam.hyps.front());
  for (const Hypothesis& hyp : beam.hyps) {
    limit = std::min(limit, valid_token_count(hyp));
  }
  const auto& base = beam.hyps.front().prefix;
  int lcp = 0;
  while (lcp < limit) {
    TokenId id = base[static_cast<std::size_t>(lcp)];
    bool all = true;
    for (const Hypothesis& hyp : beam.hyps) {
      if (hyp.prefix[static_cast<std::size_t>(lcp)] != id) {
        all = false;
        break;
      }
    }
    if (!all) break;
    ++lcp;
  }
  return lcp;
}

int phi_sh(const Beam& beam) {
  if (beam.hyps.empty()) throw std::logic_error("phi of empty beam");
  int shortest = valid_token_count(beam.hyps.front());
  for (const Hypothesis& hyp : beam.hyps) {
    shortest = std::min(shortest, valid_token_count(hyp));
  }
  return shortest;
}

int phi_value(const Beam& beam, PolicyKind kind) {
  return kind == PolicyKind::kLcp ? phi_lcp(beam) : phi_sh(beam);
}

bool should_commit(int phi, int k, int t) {
  if (k == kWaitForever) return false;
  return phi - k >= t;
}

}  // namespace simulst
