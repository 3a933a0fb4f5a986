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

#include "simulst/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace simulst {

namespace {

constexpr int kMaxOracleTokens = 5;
constexpr int kMaxOracleSteps = 8;

void check_oracle_limits(std::span<const LogDist> posteriors) {
  if (posteriors.size() > kMaxOracleSteps) {
    throw std::invalid_argument("oracle limit exceeded");
  }
  for (const auto& p : posteriors) {
    if (static_cast<int>(p.size()) - 1 > kMaxOracleTokens) {
      throw std::invalid_argument("oracle limit exceeded");
    }
  }
}

bool starts_with(const std::vector<TokenId>& seq, const std::vector<TokenId>& prefix) {
  if (prefix.size() > seq.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), seq.begin());
}

// Sums alignment probabilities over all (|V|+1)^steps label sequences,
// keeping those whose collapse satisfies `accept`.
double enumerate_alignments(
    std::span<const LogDist> posteriors,
    const std::function<bool(const std::vector<TokenId>&)>& accept) {
  check_oracle_limits(posteriors);
  const int steps = static_cast<int>(posteriors.size());
  std::vector<TokenId> alignment(static_cast<std::size_t>(steps), 0);
  double total = 0.0;

  std::function<void(int, double)> walk = [&](int t, double prob) {
    if (t == steps) {
      if (accept(collapse_alignment(alignment))) total += prob;
      return;
    }
    const LogDist& p = posteriors[static_cast<std::size_t>(t)];
    for (std::size_t v = 0; v < p.size(); ++v) {
      alignment[static_cast<std::size_t>(t)] = static_cast<TokenId>(v);
      walk(t + 1, prob * std::exp(p[v]));
    }
  };
  walk(0, 1.0);
  return total;
}

}  // namespace

std::vector<TokenId> collapse_alignment(const std::vector<TokenId>& alignment) {
  std::vector<TokenId> out;
  TokenId prev = -1;
  for (TokenId v : alignment) {
    if (v != prev) {
      if (v != kBlankId) out.push_back(v);
      prev = v;
    }
  }
  return out;
}

double brute_force_prefix_prob(std::span<const LogDist> posteriors,
                               const std::vector<TokenId>& prefix) {
  return enumerate_alignments(
      posteriors, [&](const std::vector<TokenId>& c) { return starts_with(c, prefix); });
}

double brute_force_exact_prob(std::span<const LogDist> posteriors,
                              const std::vector<TokenId>& labels) {
  return enumerate_alignments(
      posteriors, [&](const std::vector<TokenId>& c) { return c == labels; });
}

namespace {

double safe_log(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

// Delta of log values where both may be -inf; an impossible previous state
// yields an impossible transition rather than NaN.
double log_delta(double cur, double prev) {
  if (prev == kLogZero) return kLogZero;
  return cur - prev;
}

bool ref_better(const ReferenceHyp& a, const ReferenceHyp& b) {
  if (a.joint != b.joint) return a.joint > b.joint;
  if (a.scores.ctc != b.scores.ctc) return a.scores.ctc > b.scores.ctc;
  if (a.scores.att != b.scores.att) return a.scores.att > b.scores.att;
  return a.scores.lm > b.scores.lm;
}

}  // namespace

std::vector<ReferenceHyp> exhaustive_reference_search(
    std::span<const LogDist> ctc_posteriors,
    const std::function<LogDist(const std::vector<TokenId>&, int)>& att_logdist,
    const std::function<LogDist(const std::vector<TokenId>&)>& lm_logdist,
    const std::vector<TokenId>& candidates, int steps, const JointScoreWeights& weights) {
  if (static_cast<std::size_t>(steps) > ctc_posteriors.size()) {
    throw std::invalid_argument("state not yet available");
  }

  std::map<std::vector<TokenId>, ReferenceHyp> level;
  ReferenceHyp root;
  root.joint = joint_score(root.scores, weights);
  level.emplace(root.prefix, root);

  auto merge = [](std::map<std::vector<TokenId>, ReferenceHyp>& m, ReferenceHyp h) {
    auto [it, inserted] = m.try_emplace(h.prefix, h);
    if (!inserted && ref_better(h, it->second)) it->second = std::move(h);
  };

  for (int j = 1; j <= steps; ++j) {
    const auto window = ctc_posteriors.subspan(0, static_cast<std::size_t>(j));
    const auto prev_window = ctc_posteriors.subspan(0, static_cast<std::size_t>(j - 1));
    std::map<std::vector<TokenId>, ReferenceHyp> next;

    for (const auto& [prefix, node] : level) {
      const double e_prev = safe_log(brute_force_exact_prob(prev_window, prefix));
      const double e_cur = safe_log(brute_force_exact_prob(window, prefix));

      ReferenceHyp stay = node;
      stay.scores.ctc += log_delta(e_cur, e_prev);
      stay.joint = joint_score(stay.scores, weights);
      merge(next, std::move(stay));

      const LogDist att = att_logdist(prefix, j);
      const LogDist lm = lm_logdist(prefix);
      for (TokenId c : candidates) {
        ReferenceHyp ext = node;
        ext.prefix.push_back(c);
        ext.scores.ctc = safe_log(brute_force_prefix_prob(window, ext.prefix));
        ext.scores.att += att[static_cast<std::size_t>(c)];
        ext.scores.lm += lm[static_cast<std::size_t>(c)];
        ext.joint = joint_score(ext.scores, weights);
        merge(next, std::move(ext));
      }
    }
    level = std::move(next);
  }

  std::vector<ReferenceHyp> out;
  out.reserve(level.size());
  for (auto& [prefix, node] : level) out.push_back(std::move(node));
  std::sort(out.begin(), out.end(), [](const ReferenceHyp& a, const ReferenceHyp& b) {
    if (a.joint != b.joint) return a.joint > b.joint;
    return a.prefix < b.prefix;
  });
  return out;
}

}  // namespace simulst
