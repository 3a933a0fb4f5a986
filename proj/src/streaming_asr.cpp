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

#include "simulst/streaming_asr.hpp"

#include <algorithm>
#include <stdexcept>

namespace simulst {

namespace {

// Score change between two log masses where both can be -inf; an impossible
// starting point stays impossible instead of producing NaN.
double log_delta(double cur, double prev) {
  if (prev == kLogZero) return kLogZero;
  return cur - prev;
}

bool component_before(const ComponentScores& a, const ComponentScores& b) {
  if (a.ctc != b.ctc) return a.ctc > b.ctc;
  if (a.att != b.att) return a.att > b.att;
  return a.lm > b.lm;
}

// Ordering used while merging duplicates: group by prefix, best copy first.
bool dedup_before(const SearchHypothesis& a, const SearchHypothesis& b) {
  if (a.hyp.prefix != b.hyp.prefix) return a.hyp.prefix < b.hyp.prefix;
  if (a.hyp.joint != b.hyp.joint) return a.hyp.joint > b.hyp.joint;
  return component_before(a.hyp.scores, b.hyp.scores);
}

std::vector<TokenId> candidate_tokens(const BeamSearchConfig& config,
                                      std::size_t posterior_width) {
  if (!config.candidates.empty()) return config.candidates;
  std::vector<TokenId> out;
  for (TokenId id = kNumReserved; id < static_cast<TokenId>(posterior_width); ++id) {
    out.push_back(id);
  }
  return out;
}

}  // namespace

std::vector<SearchHypothesis> next_candidates(const std::vector<SearchHypothesis>& beam,
                                              int j, const EncoderState& state,
                                              const ScorerBundle& bundle,
                                              std::span<const LogDist> posteriors,
                                              const BeamSearchConfig& config) {
  if (static_cast<std::size_t>(j) > posteriors.size()) {
    throw std::invalid_argument("state not yet available");
  }
  const auto tokens =
      candidate_tokens(config, posteriors[static_cast<std::size_t>(j - 1)].size());

  std::vector<SearchHypothesis> out;
  out.reserve(beam.size() * (tokens.size() + 1));
  for (const auto& entry : beam) {
    PrefixScoreState advanced = entry.ctc;
    advanced.advance(posteriors, j);

    SearchHypothesis stay;
    stay.hyp = entry.hyp;
    stay.hyp.scores.ctc +=
        log_delta(advanced.log_exact_prob(), entry.ctc.log_exact_prob());
    stay.hyp.refresh_joint(config.weights);
    stay.ctc = advanced;
    out.push_back(std::move(stay));

    const int len = static_cast<int>(entry.hyp.prefix.size());
    if (len + 1 > j || len + 1 > config.max_prefix_len) continue;

    const LogDist att = bundle.asr_att->logdist(state, entry.hyp.prefix);
    const LogDist lm = bundle.lm->logdist(entry.hyp.prefix);
    for (TokenId c : tokens) {
      SearchHypothesis ext;
      ext.ctc = advanced.extended(posteriors, c);
      ext.hyp.prefix = entry.hyp.prefix;
      ext.hyp.prefix.push_back(c);
      ext.hyp.scores.ctc = ext.ctc.log_prefix_prob();
      ext.hyp.scores.att = entry.hyp.scores.att + att[static_cast<std::size_t>(c)];
      ext.hyp.scores.lm = entry.hyp.scores.lm + lm[static_cast<std::size_t>(c)];
      ext.hyp.refresh_joint(config.weights);
      out.push_back(std::move(ext));
    }
  }
  return out;
}

std::vector<SearchHypothesis> top_b(std::vector<SearchHypothesis> candidates, int b) {
  std::sort(candidates.begin(), candidates.end(), dedup_before);
  std::vector<SearchHypothesis> merged;
  for (auto& c : candidates) {
    if (merged.empty() || merged.back().hyp.prefix != c.hyp.prefix) {
      merged.push_back(std::move(c));
    }
  }
  std::sort(merged.begin(), merged.end(), [](const SearchHypothesis& a,
                                             const SearchHypothesis& b2) {
    return hyp_before(a.hyp, b2.hyp);
  });
  if (static_cast<int>(merged.size()) > b) {
    merged.resize(static_cast<std::size_t>(b));
  }
  return merged;
}

StreamingBeamSearch::StreamingBeamSearch(BeamSearchConfig config, const ScorerBundle& bundle)
    : config_(std::move(config)), bundle_(&bundle) {
  config_.validate();
  SearchHypothesis root;
  root.ctc = PrefixScoreState::initial();
  root.hyp.refresh_joint(config_.weights);
  beam_.push_back(std::move(root));
}

int StreamingBeamSearch::advance(const EncoderState& state,
                                 const RoundObserver& on_round) {
  const int total = static_cast<int>(state.hidden.size());
  if (total < step_) throw std::invalid_argument("non-monotonic stream");
  if (total > step_) {
    const auto fresh = bundle_->ctc->frame_posteriors(state, step_, total);
    posteriors_.insert(posteriors_.end(), fresh.begin(), fresh.end());
  }
  int rounds = 0;
  for (int j = step_ + 1; j <= total; ++j) {
    auto candidates = next_candidates(beam_, j, state, *bundle_, posteriors_, config_);
    beam_ = top_b(std::move(candidates), config_.b);
    step_ = j;
    ++rounds;
    if (on_round) on_round(j, snapshot());
  }
  return rounds;
}

Beam StreamingBeamSearch::finalize(const EncoderState& state) {
  if (!state.flushed) throw std::invalid_argument("state not yet available");
  advance(state);
  Beam out;
  out.step_index = step_;
  for (const auto& entry : beam_) {
    Hypothesis h = entry.hyp;
    h.scores.ctc = entry.ctc.log_exact_prob();
    const LogDist att = bundle_->asr_att->logdist(state, h.prefix);
    const LogDist lm = bundle_->lm->logdist(h.prefix);
    h.scores.att += att[kEosId];
    h.scores.lm += lm[kEosId];
    h.refresh_joint(config_.weights);
    out.hyps.push_back(std::move(h));
  }
  std::sort(out.hyps.begin(), out.hyps.end(), hyp_before);
  return out;
}

Beam StreamingBeamSearch::snapshot() const {
  Beam out;
  out.step_index = step_;
  out.hyps.reserve(beam_.size());
  for (const auto& entry : beam_) out.hyps.push_back(entry.hyp);
  return out;
}

}  // namespace simulst
