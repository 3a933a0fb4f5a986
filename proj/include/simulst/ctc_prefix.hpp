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

#ifndef SIMULST_CTC_PREFIX_HPP
#define SIMULST_CTC_PREFIX_HPP

#include <span>
#include <utility>
#include <vector>

#include "simulst/logmath.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

// Log-distribution over token ids; index kBlankId carries the CTC no-label
// probability.
using LogDist = std::vector<double>;

// Incremental CTC prefix scorer for one hypothesis.
//
// For a prefix z and step count J the state tracks, per chain prefix of z,
// the pair (gamma_n, gamma_b): log-probability that the first J frames
// collapse to exactly that chain prefix, with the last frame emitting a
// non-blank / blank label. The full-prefix pair is kept for every past step
// so that extending by one token can be scored exactly without rescoring
// from scratch:
//
//   gamma_n[j](z.c) = p_j(c) * (phi_j + gamma_n[j-1](z.c))
//   gamma_b[j](z.c) = p_j(blank) * (gamma_b[j-1](z.c) + gamma_n[j-1](z.c))
//   phi_j           = gamma_b[j-1](z) + [c != last(z)] * gamma_n[j-1](z)
//   psi[J](z.c)     = sum_{j<=J} p_j(c) * phi_j
//
// psi is the prefix probability: total mass of alignments whose collapsed
// labeling begins with z.c. All arithmetic stays in log space.
class PrefixScoreState {
 public:
  // State for the empty prefix over zero steps (psi = 1).
  static PrefixScoreState initial();

  // Consumes posteriors for steps (steps(), to_step]. posteriors[t] is the
  // log-distribution of 1-based step t+1; to_step must not exceed
  // posteriors.size().
  void advance(std::span<const LogDist> posteriors, int to_step);

  // Scores appending token c using the same steps this state has consumed.
  // Returns the state for prefix z.c with psi covering those steps.
  // Throws std::invalid_argument("blank is not a prefix token") when
  // c == kBlankId.
  PrefixScoreState extended(std::span<const LogDist> posteriors, TokenId c) const;

  // log psi: mass of alignments whose collapse starts with the prefix.
  double log_prefix_prob() const { return log_psi_; }

  // log (gamma_n + gamma_b): mass of alignments collapsing to exactly the
  // prefix. Used for stay pricing and end-of-stream rescoring.
  double log_exact_prob() const { return log_add(rows_.back().n, rows_.back().b); }

  int steps() const { return steps_; }
  const std::vector<TokenId>& prefix() const { return tokens_; }

 private:
  struct GammaPair {
    double n = kLogZero;
    double b = kLogZero;
  };

  std::vector<TokenId> tokens_;
  std::vector<GammaPair> rows_;  // rows_[i] covers tokens_[0, i), current step
  std::vector<GammaPair> traj_;  // full-prefix pair per step, size steps_ + 1
  double log_psi_ = 0.0;
  int steps_ = 0;
};

// Convenience wrapper matching (state, posteriors, c) -> (score, new state).
std::pair<double, PrefixScoreState> prefix_extend_score(
    const PrefixScoreState& state, std::span<const LogDist> posteriors, TokenId c);

}  // namespace simulst

#endif  // SIMULST_CTC_PREFIX_HPP
