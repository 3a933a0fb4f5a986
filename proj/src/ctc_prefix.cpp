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

#include "simulst/ctc_prefix.hpp"

#include <stdexcept>

namespace simulst {

PrefixScoreState PrefixScoreState::initial() {
  PrefixScoreState s;
  GammaPair base;
  base.n = kLogZero;
  base.b = 0.0;  // zero frames collapse to the empty prefix with certainty
  s.rows_.push_back(base);
  s.traj_.push_back(base);
  s.log_psi_ = 0.0;
  s.steps_ = 0;
  return s;
}

void PrefixScoreState::advance(std::span<const LogDist> posteriors, int to_step) {
  if (to_step < steps_) throw std::invalid_argument("cannot rewind prefix score state");
  if (static_cast<std::size_t>(to_step) > posteriors.size()) {
    throw std::invalid_argument("state not yet available");
  }
  const std::size_t len = tokens_.size();
  for (int j = steps_ + 1; j <= to_step; ++j) {
    const LogDist& p = posteriors[static_cast<std::size_t>(j - 1)];
    // Rows update top-down so row i still sees row i-1's previous-step pair.
    for (std::size_t i = len; i >= 1; --i) {
      const TokenId c = tokens_[i - 1];
      const GammaPair& below = rows_[i - 1];
      const bool differs = (i == 1) || (tokens_[i - 2] != c);
      const double phi = differs ? log_add(below.b, below.n) : below.b;
      const GammaPair old = rows_[i];
      rows_[i].n = p[static_cast<std::size_t>(c)] + log_add(phi, old.n);
      rows_[i].b = p[kBlankId] + log_add(old.b, old.n);
      if (i == len) log_psi_ = log_add(log_psi_, p[static_cast<std::size_t>(c)] + phi);
    }
    {
      const GammaPair old = rows_[0];
      rows_[0].b = p[kBlankId] + log_add(old.b, old.n);
      rows_[0].n = kLogZero;
    }
    traj_.push_back(rows_[len]);
  }
  steps_ = to_step;
}

PrefixScoreState PrefixScoreState::extended(std::span<const LogDist> posteriors,
                                            TokenId c) const {
  if (c == kBlankId) throw std::invalid_argument("blank is not a prefix token");
  if (static_cast<std::size_t>(steps_) > posteriors.size()) {
    throw std::invalid_argument("state not yet available");
  }
  PrefixScoreState child;
  child.tokens_ = tokens_;
  child.tokens_.push_back(c);
  child.rows_ = rows_;
  child.steps_ = steps_;

  const bool differs = tokens_.empty() || tokens_.back() != c;
  GammaPair cur;  // child pair, = (-inf, -inf) at step 0
  child.traj_.assign(1, cur);
  double psi = kLogZero;
  for (int j = 1; j <= steps_; ++j) {
    const LogDist& p = posteriors[static_cast<std::size_t>(j - 1)];
    const GammaPair& parent = traj_[static_cast<std::size_t>(j - 1)];
    const double phi = differs ? log_add(parent.b, parent.n) : parent.b;
    const double emit = p[static_cast<std::size_t>(c)];
    GammaPair next;
    next.n = emit + log_add(phi, cur.n);
    next.b = p[kBlankId] + log_add(cur.b, cur.n);
    psi = log_add(psi, emit + phi);
    cur = next;
    child.traj_.push_back(cur);
  }
  child.rows_.push_back(cur);
  child.log_psi_ = psi;
  return child;
}

std::pair<double, PrefixScoreState> prefix_extend_score(
    const PrefixScoreState& state, std::span<const LogDist> posteriors, TokenId c) {
  PrefixScoreState child = state.extended(posteriors, c);
  return {child.log_prefix_prob(), std::move(child)};
}

}  // namespace simulst
