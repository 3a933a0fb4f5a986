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

#include "simulst/toy_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "simulst/logmath.hpp"

namespace simulst {

namespace {

using nlohmann::json;

// Peaked distribution: `peak_mass` on `peak`, remainder spread uniformly over
// the other support ids; everything else impossible.
LogDist peaked_dist(int size, const std::vector<TokenId>& support, TokenId peak,
                    double peak_mass) {
  LogDist out(static_cast<std::size_t>(size), kLogZero);
  const double rest = (1.0 - peak_mass) / static_cast<double>(support.size() - 1);
  for (TokenId id : support) {
    out[static_cast<std::size_t>(id)] = (id == peak) ? std::log(peak_mass) : std::log(rest);
  }
  return out;
}

LogDist uniform_dist(int size, const std::vector<TokenId>& support) {
  LogDist out(static_cast<std::size_t>(size), kLogZero);
  const double mass = 1.0 / static_cast<double>(support.size());
  for (TokenId id : support) out[static_cast<std::size_t>(id)] = std::log(mass);
  return out;
}

std::vector<TokenId> regular_plus_eos(int vocab_size) {
  std::vector<TokenId> support;
  support.push_back(kEosId);
  for (TokenId id = kNumReserved; id < vocab_size; ++id) support.push_back(id);
  return support;
}

std::vector<TokenId> blank_plus_regular(int vocab_size) {
  std::vector<TokenId> support;
  support.push_back(kBlankId);
  for (TokenId id = kNumReserved; id < vocab_size; ++id) support.push_back(id);
  return support;
}

void check_step_range(const EncoderState& state, int from_step, int to_step) {
  if (from_step < 0 || to_step < from_step ||
      static_cast<std::size_t>(to_step) > state.hidden.size()) {
    throw std::invalid_argument("state not yet available");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Model spec serialization

void save_model_spec(const std::string& path, const ToyModelSpec& spec) {
  json j;
  j["model_version"] = 1;
  j["vocab_size"] = spec.vocab_size;
  j["frame_dim"] = spec.frame_dim;
  j["prototypes"] = spec.prototypes;
  j["lexicon"] = spec.lexicon;
  j["lm_init"] = spec.lm_init;
  j["lm_trans"] = spec.lm_trans;
  j["eps"] = spec.eps;
  j["att_peak"] = spec.att_peak;
  j["temperature"] = spec.temperature;
  j["min_run"] = spec.min_run;
  j["lm_eos"] = spec.lm_eos;
  j["seed"] = spec.seed;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << "\n";
}

ToyModelSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  json j;
  in >> j;
  ToyModelSpec spec;
  spec.vocab_size = j.at("vocab_size").get<int>();
  spec.frame_dim = j.at("frame_dim").get<int>();
  spec.prototypes = j.at("prototypes").get<std::vector<std::vector<double>>>();
  spec.lexicon = j.at("lexicon").get<std::vector<int>>();
  spec.lm_init = j.at("lm_init").get<std::vector<double>>();
  spec.lm_trans = j.at("lm_trans").get<std::vector<std::vector<double>>>();
  spec.eps = j.at("eps").get<double>();
  spec.att_peak = j.at("att_peak").get<double>();
  spec.temperature = j.at("temperature").get<double>();
  spec.min_run = j.at("min_run").get<int>();
  spec.lm_eos = j.at("lm_eos").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

// ---------------------------------------------------------------------------
// MeanPoolEncoder

MeanPoolEncoder::MeanPoolEncoder(int frame_dim, int r, int lookahead)
    : frame_dim_(frame_dim), r_(r), lookahead_(lookahead) {
  if (r <= 0) throw std::invalid_argument("downsampling rate must be positive");
  if (lookahead < 0) throw std::invalid_argument("lookahead must be non-negative");
}

EncoderState MeanPoolEncoder::initial_state() const {
  EncoderState s;
  s.r = r_;
  s.lookahead = lookahead_;
  return s;
}

namespace {

void pool_groups(EncoderState& state, int frame_dim, int r, std::int64_t target_states) {
  while (static_cast<std::int64_t>(state.hidden.size()) < target_states) {
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(r), state.pending.size());
    std::vector<double> pooled(static_cast<std::size_t>(frame_dim), 0.0);
    for (std::size_t i = 0; i < take; ++i) {
      for (int d = 0; d < frame_dim; ++d) {
        pooled[static_cast<std::size_t>(d)] += state.pending[i][static_cast<std::size_t>(d)];
      }
    }
    for (auto& x : pooled) x /= static_cast<double>(take);
    state.pending.erase(state.pending.begin(),
                        state.pending.begin() + static_cast<std::ptrdiff_t>(take));
    state.hidden.push_back(std::move(pooled));
  }
}

}  // namespace

int MeanPoolEncoder::encode_chunk(EncoderState& state, const Chunk& chunk) const {
  if (chunk.chunk_index != state.chunks_consumed + 1) {
    throw std::invalid_argument("non-monotonic stream");
  }
  if (state.flushed) throw std::invalid_argument("non-monotonic stream");
  for (int i = 0; i < chunk.valid_frames; ++i) {
    const auto& f = chunk.frames[static_cast<std::size_t>(i)];
    if (static_cast<int>(f.values.size()) != frame_dim_) {
      throw std::invalid_argument("frame dimension mismatch");
    }
    std::vector<float> v(f.values.begin(), f.values.end());
    state.pending.push_back(std::move(v));
  }
  state.consumed_frames += chunk.valid_frames;
  state.chunks_consumed = chunk.chunk_index;

  const std::size_t before = state.hidden.size();
  const std::int64_t usable = state.consumed_frames - lookahead_;
  const std::int64_t target = usable > 0 ? usable / r_ : 0;
  pool_groups(state, frame_dim_, r_, target);
  return static_cast<int>(state.hidden.size() - before);
}

int MeanPoolEncoder::flush(EncoderState& state) const {
  if (state.flushed) return 0;
  const std::size_t before = state.hidden.size();
  const std::int64_t target = (state.consumed_frames + r_ - 1) / r_;
  pool_groups(state, frame_dim_, r_, target);
  state.flushed = true;
  return static_cast<int>(state.hidden.size() - before);
}

// ---------------------------------------------------------------------------
// TabularOracleScorer

TabularOracleScorer::TabularOracleScorer(SyntheticUtterance utt, const ToyModelSpec& spec,
                                         int source_vocab_size, int target_vocab_size)
    : utt_(std::move(utt)),
      eps_(spec.eps),
      lexicon_(spec.lexicon),
      source_vocab_size_(source_vocab_size),
      target_vocab_size_(target_vocab_size) {
  frame_label_.assign(utt_.frames.size(), kBlankId);
  for (const auto& span : utt_.spans) {
    for (std::int64_t i = span.start; i < span.start + span.length; ++i) {
      frame_label_[static_cast<std::size_t>(i)] = span.token;
    }
  }
}

int TabularOracleScorer::observable_tokens(const EncoderState& state) const {
  const std::int64_t covered = state.covered_frames();
  int obs = 0;
  for (const auto& span : utt_.spans) {
    if (span.token_index < 0) continue;
    if (span.start + span.length <= covered) ++obs;
  }
  return obs;
}

std::vector<LogDist> TabularOracleScorer::frame_posteriors(const EncoderState& state,
                                                           int from_step,
                                                           int to_step) const {
  check_step_range(state, from_step, to_step);
  const auto support = blank_plus_regular(source_vocab_size_);
  std::vector<LogDist> out;
  out.reserve(static_cast<std::size_t>(to_step - from_step));
  for (int s = from_step; s < to_step; ++s) {
    const std::int64_t start = static_cast<std::int64_t>(s) * state.r;
    const std::int64_t end =
        std::min<std::int64_t>(start + state.r, state.consumed_frames);
    // Majority frame label over the state's receptive field; earliest label
    // wins ties.
    std::unordered_map<TokenId, int> counts;
    TokenId best = kBlankId;
    int best_count = 0;
    for (std::int64_t i = start; i < end; ++i) {
      const TokenId label = frame_label_[static_cast<std::size_t>(i)];
      const int c = ++counts[label];
      if (c > best_count) {
        best_count = c;
        best = label;
      }
    }
    out.push_back(peaked_dist(source_vocab_size_, support, best, 1.0 - eps_));
  }
  return out;
}

LogDist TabularOracleScorer::logdist(const EncoderState& state,
                                     const std::vector<TokenId>& prefix) const {
  const auto support = regular_plus_eos(source_vocab_size_);
  const int obs = observable_tokens(state);
  const int len = static_cast<int>(prefix.size());
  const int n = static_cast<int>(utt_.source.size());

  const bool matched =
      len <= n && std::equal(prefix.begin(), prefix.end(), utt_.source.begin());
  if (!matched || obs == 0) return uniform_dist(source_vocab_size_, support);
  if (len < obs) {
    return peaked_dist(source_vocab_size_, support, utt_.source[static_cast<std::size_t>(len)],
                       1.0 - eps_);
  }
  if (state.flushed && len == n) {
    return peaked_dist(source_vocab_size_, support, kEosId, 1.0 - eps_);
  }
  return uniform_dist(source_vocab_size_, support);
}

LogDist TabularOracleScorer::st_logdist(const EncoderState& state,
                                        const std::vector<TokenId>& target_prefix) const {
  const auto support = regular_plus_eos(target_vocab_size_);
  const int t = static_cast<int>(target_prefix.size());
  const int n = static_cast<int>(utt_.translation.size());
  if (t >= n) return peaked_dist(target_vocab_size_, support, kEosId, 1.0 - eps_);

  const std::int64_t covered = state.covered_frames();
  const int obs = observable_tokens(state);
  const int needed = utt_.order[static_cast<std::size_t>(t)];

  std::int64_t needed_end = -1;
  for (const auto& span : utt_.spans) {
    if (span.token_index == needed) needed_end = span.start + span.length;
  }
  if (needed_end >= 0 && needed_end <= covered) {
    return peaked_dist(target_vocab_size_, support,
                       utt_.translation[static_cast<std::size_t>(t)], 1.0 - eps_);
  }
  if (obs == 0) return uniform_dist(target_vocab_size_, support);

  // Dependency not yet audible: best deterministic guess assumes monotone
  // order over what has been heard.
  const int fallback = std::min(t, obs - 1);
  const int src_regular = utt_.source[static_cast<std::size_t>(fallback)] - kNumReserved;
  const TokenId guess = static_cast<TokenId>(
      kNumReserved + lexicon_[static_cast<std::size_t>(src_regular)]);
  return peaked_dist(target_vocab_size_, support, guess, 1.0 - eps_);
}

// ---------------------------------------------------------------------------
// PrototypeScorer

PrototypeScorer::PrototypeScorer(ToyModelSpec spec, int source_vocab_size,
                                 int target_vocab_size)
    : spec_(std::move(spec)),
      source_vocab_size_(source_vocab_size),
      target_vocab_size_(target_vocab_size) {}

LogDist PrototypeScorer::classify(const std::vector<double>& hidden) const {
  LogDist out(static_cast<std::size_t>(source_vocab_size_), kLogZero);
  std::vector<double> logits;
  std::vector<TokenId> ids;
  ids.push_back(kBlankId);
  double sq = 0.0;
  for (double x : hidden) sq += x * x;  // silence prototype is the zero vector
  logits.push_back(-sq / spec_.temperature);
  for (int v = 0; v < spec_.vocab_size; ++v) {
    const auto& proto = spec_.prototypes[static_cast<std::size_t>(v)];
    double d2 = 0.0;
    for (std::size_t d = 0; d < hidden.size(); ++d) {
      const double diff = hidden[d] - proto[d];
      d2 += diff * diff;
    }
    ids.push_back(static_cast<TokenId>(kNumReserved + v));
    logits.push_back(-d2 / spec_.temperature);
  }
  const double norm = log_sum_exp(logits);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[static_cast<std::size_t>(ids[i])] = logits[i] - norm;
  }
  return out;
}

std::vector<LogDist> PrototypeScorer::frame_posteriors(const EncoderState& state,
                                                       int from_step, int to_step) const {
  check_step_range(state, from_step, to_step);
  std::vector<LogDist> out;
  out.reserve(static_cast<std::size_t>(to_step - from_step));
  for (int s = from_step; s < to_step; ++s) {
    out.push_back(classify(state.hidden[static_cast<std::size_t>(s)]));
  }
  return out;
}

std::vector<TokenId> PrototypeScorer::segments(const EncoderState& state) const {
  std::vector<TokenId> segs;
  TokenId run_token = kBlankId;
  int run_len = 0;
  auto close_run = [&]() {
    if (run_token != kBlankId && run_len >= spec_.min_run) segs.push_back(run_token);
  };
  for (const auto& h : state.hidden) {
    const LogDist dist = classify(h);
    const TokenId label = static_cast<TokenId>(
        std::max_element(dist.begin(), dist.end()) - dist.begin());
    if (label == run_token) {
      ++run_len;
    } else {
      close_run();
      run_token = label;
      run_len = 1;
    }
  }
  close_run();
  return segs;
}

LogDist PrototypeScorer::logdist(const EncoderState& state,
                                 const std::vector<TokenId>& prefix) const {
  const auto support = regular_plus_eos(source_vocab_size_);
  const auto segs = segments(state);
  const int len = static_cast<int>(prefix.size());
  const int m = static_cast<int>(segs.size());
  const bool matched =
      len <= m && std::equal(prefix.begin(), prefix.end(), segs.begin());
  if (!matched) return uniform_dist(source_vocab_size_, support);
  if (len < m) {
    return peaked_dist(source_vocab_size_, support, segs[static_cast<std::size_t>(len)],
                       spec_.att_peak);
  }
  if (state.flushed) return peaked_dist(source_vocab_size_, support, kEosId, spec_.att_peak);
  return uniform_dist(source_vocab_size_, support);
}

LogDist PrototypeScorer::st_logdist(const EncoderState& state,
                                    const std::vector<TokenId>& target_prefix) const {
  const auto support = regular_plus_eos(target_vocab_size_);
  const auto segs = segments(state);
  const int t = static_cast<int>(target_prefix.size());
  if (t < static_cast<int>(segs.size())) {
    const int src_regular = segs[static_cast<std::size_t>(t)] - kNumReserved;
    const TokenId target = static_cast<TokenId>(
        kNumReserved + spec_.lexicon[static_cast<std::size_t>(src_regular)]);
    return peaked_dist(target_vocab_size_, support, target, spec_.att_peak);
  }
  if (state.flushed) return peaked_dist(target_vocab_size_, support, kEosId, spec_.att_peak);
  return uniform_dist(target_vocab_size_, support);
}

// ---------------------------------------------------------------------------
// Language models

LogDist UniformLm::logdist(const std::vector<TokenId>& prefix) const {
  (void)prefix;
  const auto support = regular_plus_eos(source_vocab_size_);
  return uniform_dist(source_vocab_size_, support);
}

BigramLm::BigramLm(const ToyModelSpec& spec, int source_vocab_size, double smoothing)
    : eos_mass_(spec.lm_eos), source_vocab_size_(source_vocab_size) {
  const int v = spec.vocab_size;
  const double floor = smoothing / static_cast<double>(v);
  auto smooth = [&](const std::vector<double>& row) {
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      out[i] = (1.0 - smoothing) * row[i] + floor;
    }
    return out;
  };
  init_ = smooth(spec.lm_init);
  trans_.reserve(static_cast<std::size_t>(v));
  for (const auto& row : spec.lm_trans) trans_.push_back(smooth(row));
}

LogDist BigramLm::logdist(const std::vector<TokenId>& prefix) const {
  LogDist out(static_cast<std::size_t>(source_vocab_size_), kLogZero);
  const std::vector<double>* row = &init_;
  if (!prefix.empty()) {
    const TokenId prev = prefix.back();
    if (prev >= kNumReserved && prev < source_vocab_size_) {
      row = &trans_[static_cast<std::size_t>(prev - kNumReserved)];
    }
  }
  out[kEosId] = std::log(eos_mass_);
  for (std::size_t i = 0; i < row->size(); ++i) {
    out[static_cast<std::size_t>(kNumReserved) + i] =
        std::log((1.0 - eos_mass_) * (*row)[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bundle wiring

namespace {

std::shared_ptr<LmScorer> make_lm(LmKind kind, const ToyModelSpec& spec,
                                  int source_vocab_size) {
  if (kind == LmKind::kUniform) return std::make_shared<UniformLm>(source_vocab_size);
  return std::make_shared<BigramLm>(spec, source_vocab_size);
}

}  // namespace

ScorerBundle make_tabular_bundle(const SyntheticUtterance& utt, const ToyModelSpec& spec,
                                 const GeneratorConfig& config,
                                 const JointScoreWeights& weights, int r, int lookahead,
                                 LmKind lm_kind) {
  const int src_size = kNumReserved + config.vocab_size;
  const int tgt_size = kNumReserved + config.vocab_size;
  auto scorer = std::make_shared<TabularOracleScorer>(utt, spec, src_size, tgt_size);
  ScorerBundle bundle;
  bundle.encoder = std::make_shared<MeanPoolEncoder>(config.frame_dim, r, lookahead);
  bundle.asr_att = scorer;
  bundle.ctc = scorer;
  bundle.lm = make_lm(lm_kind, spec, src_size);
  bundle.st = std::make_shared<StAdapter>(scorer);
  bundle.weights = weights;
  return bundle;
}

ScorerBundle make_prototype_bundle(const ToyModelSpec& spec, const GeneratorConfig& config,
                                   const JointScoreWeights& weights, int r, int lookahead,
                                   LmKind lm_kind) {
  const int src_size = kNumReserved + config.vocab_size;
  const int tgt_size = kNumReserved + config.vocab_size;
  auto scorer = std::make_shared<PrototypeScorer>(spec, src_size, tgt_size);
  ScorerBundle bundle;
  bundle.encoder = std::make_shared<MeanPoolEncoder>(config.frame_dim, r, lookahead);
  bundle.asr_att = scorer;
  bundle.ctc = scorer;
  bundle.lm = make_lm(lm_kind, spec, src_size);
  bundle.st = std::make_shared<StAdapter>(scorer);
  bundle.weights = weights;
  return bundle;
}

}  // namespace simulst
