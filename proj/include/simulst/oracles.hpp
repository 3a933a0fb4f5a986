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

#ifndef SIMULST_ORACLES_HPP
#define SIMULST_ORACLES_HPP

#include <functional>
#include <span>
#include <vector>

#include "simulst/ctc_prefix.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

// Reference implementations that trade running time for obviousness. They
// enumerate alignment or prefix spaces directly and exist only to check the
// incremental engine; nothing here is reachable from a production session.

// CTC collapse: merge adjacent repeats, then drop blanks.
std::vector<TokenId> collapse_alignment(const std::vector<TokenId>& alignment);

// Probability (linear space) that the collapsed labeling of all steps begins
// with `prefix`, summed over every alignment in (|V|+1)^steps. Instances with
// more than 5 non-blank tokens or more than 8 steps throw
// std::invalid_argument("oracle limit exceeded").
double brute_force_prefix_prob(std::span<const LogDist> posteriors,
                               const std::vector<TokenId>& prefix);

// Probability that the collapsed labeling equals `labels` exactly.
double brute_force_exact_prob(std::span<const LogDist> posteriors,
                              const std::vector<TokenId>& labels);

// A hypothesis produced by the exhaustive reference search.
struct ReferenceHyp {
  std::vector<TokenId> prefix;
  ComponentScores scores;
  double joint = 0.0;
};

// Level-by-level reference search over the full prefix space. Applies the
// same transition rules as the streaming beam search (stay plus one-token
// extensions, per-prefix best-score merge) but computes every CTC quantity
// by brute-force enumeration. With a beam wide enough to never prune, the
// streaming search must reproduce these hypotheses exactly.
std::vector<ReferenceHyp> exhaustive_reference_search(
    std::span<const LogDist> ctc_posteriors,
    const std::function<LogDist(const std::vector<TokenId>&, int)>& att_logdist,
    const std::function<LogDist(const std::vector<TokenId>&)>& lm_logdist,
    const std::vector<TokenId>& candidates, int steps, const JointScoreWeights& weights);

}  // namespace simulst

#endif  // SIMULST_ORACLES_HPP
