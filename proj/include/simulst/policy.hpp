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

#ifndef SIMULST_POLICY_HPP
#define SIMULST_POLICY_HPP

#include <algorithm>
#include <limits>
#include <string>

#include "simulst/hypothesis.hpp"

namespace simulst {

// Valid-token counting policies: longest common prefix across the beam
// (conservative) or shortest hypothesis (aggressive).
enum class PolicyKind { kLcp, kSh };

PolicyKind policy_from_string(const std::string& name);
std::string policy_to_string(PolicyKind kind);

// Sentinel for k = infinity (never trigger before stream end).
inline constexpr int kWaitForever = std::numeric_limits<int>::max();

// Tokens in a hypothesis that count toward phi: EOS never counts.
int valid_token_count(const Hypothesis& hyp);

// Longest prefix shared by every hypothesis in the beam. Empty beam is a
// logic error (beams are non-empty after initialization).
int phi_lcp(const Beam& beam);

// Length of the shortest hypothesis in the beam.
int phi_sh(const Beam& beam);

int phi_value(const Beam& beam, PolicyKind kind);

// Trigger predicate: commit while phi - k >= t. k = kWaitForever never fires.
bool should_commit(int phi, int k, int t);

// Running maximum applied to raw phi values before triggering, since beam
// pruning can shrink the raw value even though commitments cannot be taken
// back. Raw values are still logged for audit.
class PhiEnvelope {
 public:
  int update(int raw) {
    value_ = std::max(value_, raw);
    return value_;
  }
  int value() const { return value_; }

 private:
  int value_ = 0;
};

}  // namespace simulst

#endif  // SIMULST_POLICY_HPP
