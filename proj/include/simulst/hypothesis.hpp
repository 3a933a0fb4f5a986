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

#ifndef SIMULST_HYPOTHESIS_HPP
#define SIMULST_HYPOTHESIS_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "simulst/vocab.hpp"

namespace simulst {

// Per-scorer log contributions, kept separate so ablations can be reported
// without re-decoding.
struct ComponentScores {
  double ctc = 0.0;
  double att = 0.0;
  double lm = 0.0;
};

// Mixing weights for the joint score. The attention and CTC weights form a
// convex combination; the LM weight is additive shallow fusion.
struct JointScoreWeights {
  double lambda_ctc = 0.3;
  double lambda_att = 0.7;
  double lambda_lm = 0.3;

  void validate() const {
    if (lambda_ctc < 0.0 || lambda_att < 0.0 || lambda_lm < 0.0) {
      throw std::invalid_argument("joint score weights must be non-negative");
    }
    if (std::abs(lambda_ctc + lambda_att - 1.0) > 1e-9) {
      throw std::invalid_argument("ctc and attention weights must sum to 1");
    }
  }
};

inline double joint_score(const ComponentScores& s, const JointScoreWeights& w) {
  // Zero-weight terms contribute nothing even when the component is -inf,
  // so ablated configurations never produce NaN.
  auto term = [](double lambda, double x) { return lambda == 0.0 ? 0.0 : lambda * x; };
  return term(w.lambda_ctc, s.ctc) + term(w.lambda_att, s.att) + term(w.lambda_lm, s.lm);
}

// Candidate pair <z, p>: a blank-free token prefix with its accumulated
// log-probability. `joint` is always derived from `scores` via the active
// weights; it is cached here so sorting does not re-multiply.
struct Hypothesis {
  std::vector<TokenId> prefix;
  ComponentScores scores;
  double joint = 0.0;

  void refresh_joint(const JointScoreWeights& w) { joint = joint_score(scores, w); }
};

// True when `a` ranks strictly ahead of `b`: higher score first, ties broken
// by lexicographically smaller token-id sequence for reproducible output.
inline bool hyp_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.joint != b.joint) return a.joint > b.joint;
  return a.prefix < b.prefix;
}

struct Beam {
  std::vector<Hypothesis> hyps;  // sorted by hyp_before
  int step_index = 0;            // encoder states consumed so far

  const Hypothesis& best() const {
    if (hyps.empty()) throw std::logic_error("empty beam");
    return hyps.front();
  }
};

inline bool beam_sorted(const Beam& beam) {
  for (std::size_t i = 1; i < beam.hyps.size(); ++i) {
    if (hyp_before(beam.hyps[i], beam.hyps[i - 1])) return false;
  }
  return true;
}

}  // namespace simulst

#endif  // SIMULST_HYPOTHESIS_HPP
