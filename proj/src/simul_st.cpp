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

#include "simulst/simul_st.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "simulst/streaming_asr.hpp"
#include "simulst/vocab.hpp"

namespace simulst {
namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
      .count();
}

// Token text without a vocab object: token ids are stable, so traces carry a
// generic name when the bundle has no vocabulary attached.
std::string generic_token_text(TokenId id) {
  switch (id) {
    case kBlankId:
      return "<blank>";
    case kBosId:
      return "<s>";
    case kEosId:
      return "</s>";
    case kUnkId:
      return "<unk>";
    default:
      return "tok_" + std::to_string(id);
  }
}

std::string ids_text(const std::vector<TokenId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += generic_token_text(ids[i]);
  }
  return out;
}

}  // namespace

void SessionConfig::validate() const {
  if (k != kWaitForever && k < 1) {
    throw std::invalid_argument("wait parameter k must be >= 1 or infinity");
  }
  if (chunk_frames <= 0) throw std::invalid_argument("invalid chunk size");
  if (downsample_rate <= 0) {
    throw std::invalid_argument("invalid downsampling rate");
  }
  if (chunk_frames % downsample_rate != 0) {
    throw std::invalid_argument("chunk size not divisible by downsampling rate");
  }
  if (beam_size < 1) throw std::invalid_argument("beam width must be at least 1");
  if (lookahead_frames < 0) throw std::invalid_argument("invalid lookahead");
  if (tail_factor <= 0.0) throw std::invalid_argument("tail factor must be positive");
  if (tail_offset < 0) throw std::invalid_argument("tail offset must be non-negative");
  weights.validate();
}

TokenId st_step(const EncoderState& state, const std::vector<TokenId>& target_prefix,
                const ScorerBundle& bundle) {
  const LogDist dist = bundle.st->logdist(state, target_prefix);
  TokenId best = kEosId;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t id = 0; id < dist.size(); ++id) {
    const TokenId tok = static_cast<TokenId>(id);
    if (tok == kBlankId || tok == kBosId || tok == kUnkId) continue;
    if (dist[id] > best_score) {
      best_score = dist[id];
      best = tok;
    }
  }
  return best;
}

namespace {

struct SessionState {
  SessionTrace trace;
  PhiEnvelope lcp_env;
  PhiEnvelope sh_env;
  std::vector<TokenId> committed;
  bool translation_done = false;
  double total_wall = 0.0;
};

// Logs one AsrStep event from a (possibly hook-filtered) beam snapshot.
void record_round(SessionState& s, const SessionHooks& hooks, int j,
                  const Beam& beam) {
  Beam view = hooks.beam_filter ? hooks.beam_filter(beam) : beam;
  AsrStepEvent step;
  step.j = j;
  step.phi_lcp_raw = phi_lcp(view);
  step.phi_sh_raw = phi_sh(view);
  step.phi_lcp = s.lcp_env.update(step.phi_lcp_raw);
  step.phi_sh = s.sh_env.update(step.phi_sh_raw);
  step.wall_compute_ms = 0.0;
  step.beam.reserve(view.hyps.size());
  for (const Hypothesis& hyp : view.hyps) {
    BeamEntry entry;
    entry.prefix = hyp.prefix;
    entry.text = ids_text(hyp.prefix);
    entry.joint = hyp.joint;
    entry.ctc = hyp.scores.ctc;
    entry.att = hyp.scores.att;
    entry.lm = hyp.scores.lm;
    step.beam.push_back(std::move(entry));
  }
  s.trace.events.push_back(std::move(step));
}

void record_commit(SessionState& s, TokenId token, std::int64_t source_ms,
                   double wall_ms, bool tail) {
  s.committed.push_back(token);
  CommitEvent commit;
  commit.t = static_cast<int>(s.committed.size());
  commit.token = token;
  commit.token_text = generic_token_text(token);
  commit.source_consumed_ms = source_ms;
  commit.wall_compute_ms = wall_ms;
  commit.tail = tail;
  s.total_wall += wall_ms;
  s.trace.events.push_back(std::move(commit));
}

}  // namespace

SessionTrace run_session(const SessionConfig& config,
                         const std::vector<FeatureFrame>& frames,
                         const ScorerBundle& bundle,
                         const SessionHooks& hooks) {
  config.validate();
  if (frames.empty()) throw std::invalid_argument("empty stream");
  if (!bundle.encoder || !bundle.asr_att || !bundle.ctc || !bundle.lm || !bundle.st) {
    throw std::invalid_argument("incomplete scorer bundle");
  }

  const bool measured = config.compute.kind == ComputeModel::Kind::kMeasured;
  const std::int64_t total_source_ms = frames_to_ms(frames.size());
  const auto chunks = make_chunks(frames, config.chunk_frames);

  SessionState s;
  s.trace.header.utt_id = config.utt_id;
  s.trace.header.policy = config.policy;
  s.trace.header.k = config.k;
  s.trace.header.chunk_frames = config.chunk_frames;
  s.trace.header.downsample_rate = config.downsample_rate;
  s.trace.header.beam_size = config.beam_size;
  s.trace.header.lookahead_frames = config.lookahead_frames;
  s.trace.header.seed = config.seed;

  BeamSearchConfig search_config;
  search_config.b = config.beam_size;
  search_config.weights = config.weights;
  search_config.max_prefix_len = config.max_prefix_len;
  search_config.seed = config.seed;
  StreamingBeamSearch search(search_config, bundle);

  EncoderState state = bundle.encoder->initial_state();
  auto on_round = [&s, &hooks](int j, const Beam& beam) {
    record_round(s, hooks, j, beam);
  };

  int t = 0;
  for (const Chunk& chunk : chunks) {
    const double start = measured ? now_ms() : 0.0;
    bundle.encoder->encode_chunk(state, chunk);

    ChunkEvent event;
    event.i = chunk.chunk_index;
    event.arrival_ms = chunk.arrival_time_ms;
    event.valid_frames = chunk.valid_frames;
    // Events are appended in arrival order: the chunk first, then the search
    // rounds it unlocks, then any commits it triggers.
    const std::size_t chunk_pos = s.trace.events.size();
    s.trace.events.push_back(event);

    search.advance(state, on_round);
    const double chunk_wall =
        measured ? now_ms() - start : config.compute.fixed_chunk_ms;
    std::get<ChunkEvent>(s.trace.events[chunk_pos]).wall_compute_ms = chunk_wall;
    s.total_wall += chunk_wall;

    const std::int64_t consumed_ms =
        std::min(static_cast<std::int64_t>(chunk.chunk_index) *
                     frames_to_ms(static_cast<std::size_t>(config.chunk_frames)),
                 total_source_ms);
    const int phi = config.policy == PolicyKind::kLcp ? s.lcp_env.value()
                                                      : s.sh_env.value();
    while (!s.translation_done && should_commit(phi, config.k, t)) {
      const double commit_start = measured ? now_ms() : 0.0;
      const TokenId token = st_step(state, s.committed, bundle);
      const double commit_wall =
          measured ? now_ms() - commit_start : config.compute.fixed_commit_ms;
      if (token == kEosId) {
        s.translation_done = true;
        break;
      }
      record_commit(s, token, consumed_ms, commit_wall, /*tail=*/false);
      ++t;
    }
  }

  // Stream ended: flush the encoder lookahead, run the remaining search
  // rounds, then let the translation decode to EOS with full context.
  const double tail_start = measured ? now_ms() : 0.0;
  bundle.encoder->flush(state);
  search.advance(state, on_round);
  const Beam final_beam = search.finalize(state);
  double tail_wall = measured ? now_ms() - tail_start : 0.0;

  const int phi_final = config.policy == PolicyKind::kLcp ? s.lcp_env.value()
                                                          : s.sh_env.value();
  const int cap = static_cast<int>(
      std::ceil(config.tail_factor * static_cast<double>(phi_final))) +
      config.tail_offset;
  while (!s.translation_done && t < cap) {
    const double commit_start = measured ? now_ms() : 0.0;
    const TokenId token = st_step(state, s.committed, bundle);
    double commit_wall =
        measured ? now_ms() - commit_start : config.compute.fixed_commit_ms;
    commit_wall += tail_wall;  // flush cost lands on the first tail commit
    tail_wall = 0.0;
    if (token == kEosId) {
      s.translation_done = true;
      break;
    }
    record_commit(s, token, total_source_ms, commit_wall, /*tail=*/true);
    ++t;
  }
  s.total_wall += tail_wall;  // no tail commits: keep the flush cost in totals

  s.trace.summary.translation = s.committed;
  s.trace.summary.translation_text = ids_text(s.committed);
  if (!final_beam.hyps.empty()) {
    s.trace.summary.transcript = final_beam.hyps.front().prefix;
    s.trace.summary.transcript_text = ids_text(s.trace.summary.transcript);
  }
  s.trace.summary.total_source_ms = total_source_ms;
  s.trace.summary.n_frames = static_cast<int>(frames.size());
  s.trace.summary.phi_final = phi_final;
  s.trace.summary.total_wall_ms = s.total_wall;
  s.trace.has_summary = true;
  return s.trace;
}

OfflineResult run_offline(const SessionConfig& config,
                          const std::vector<FeatureFrame>& frames,
                          const ScorerBundle& bundle) {
  config.validate();
  OfflineResult out;
  if (frames.empty()) return out;

  BeamSearchConfig search_config;
  search_config.b = config.beam_size;
  search_config.weights = config.weights;
  search_config.max_prefix_len = config.max_prefix_len;
  search_config.seed = config.seed;
  StreamingBeamSearch search(search_config, bundle);

  // Mirror the streaming advance schedule exactly: attention conditions on
  // the encoder state current at each round, so rounds must run after the
  // same chunks here as they do in run_session. With k = forever the session
  // commits nothing before stream end, making the outputs identical.
  PhiEnvelope env;
  const PolicyKind policy = config.policy;
  const auto on_round = [&env, policy](int, const Beam& beam) {
    env.update(phi_value(beam, policy));
  };
  EncoderState state = bundle.encoder->initial_state();
  for (const Chunk& chunk : make_chunks(frames, config.chunk_frames)) {
    bundle.encoder->encode_chunk(state, chunk);
    search.advance(state, on_round);
  }
  bundle.encoder->flush(state);
  search.advance(state, on_round);
  const Beam final_beam = search.finalize(state);
  if (!final_beam.hyps.empty()) out.transcript = final_beam.hyps.front().prefix;

  const int cap = static_cast<int>(
      std::ceil(config.tail_factor * static_cast<double>(env.value()))) +
      config.tail_offset;
  while (static_cast<int>(out.translation.size()) < cap) {
    const TokenId token = st_step(state, out.translation, bundle);
    if (token == kEosId) break;
    out.translation.push_back(token);
  }
  return out;
}

}  // namespace simulst
