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

#include "simulst/corpus.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "simulst/rng.hpp"
#include "simulst/toy_models.hpp"

namespace simulst {

namespace {

using nlohmann::json;

constexpr char kFrameMagic[4] = {'S', 'F', 'R', 'M'};
constexpr std::uint32_t kFrameVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t x = 0;
  in.read(reinterpret_cast<char*>(&x), sizeof(x));
  return x;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_utts < 1) throw std::invalid_argument("invalid n_utts");
  if (vocab_size < 2) throw std::invalid_argument("invalid vocab_size");
  if (frame_dim < 1) throw std::invalid_argument("invalid frame_dim");
  if (tokens_min < 1 || tokens_max < tokens_min) {
    throw std::invalid_argument("invalid tokens_range");
  }
  if (duration_min < 1 || duration_max < duration_min) {
    throw std::invalid_argument("invalid duration_range");
  }
  if (silence_prob < 0.0 || silence_prob > 1.0) {
    throw std::invalid_argument("invalid silence_prob");
  }
  if (silence_prob > 0.0 && (silence_min < 1 || silence_max < silence_min)) {
    throw std::invalid_argument("invalid silence_range");
  }
  if (noise_sigma < 0.0) throw std::invalid_argument("invalid noise_sigma");
  if (reorder_prob < 0.0 || reorder_prob > 1.0) {
    throw std::invalid_argument("invalid reorder_prob");
  }
}

Vocab source_vocab(const GeneratorConfig& config) {
  return Vocab::make(config.vocab_size, "src");
}

Vocab target_vocab(const GeneratorConfig& config) {
  return Vocab::make(config.vocab_size, "tgt");
}

ToyModelSpec make_model_spec(const GeneratorConfig& config) {
  config.validate();
  ToyModelSpec spec;
  spec.vocab_size = config.vocab_size;
  spec.frame_dim = config.frame_dim;
  spec.seed = config.seed;

  Rng rng(mix_seed(config.seed, 0));
  const int v = config.vocab_size;

  spec.prototypes.assign(static_cast<std::size_t>(v), {});
  for (auto& proto : spec.prototypes) {
    proto.resize(static_cast<std::size_t>(config.frame_dim));
    for (auto& x : proto) x = rng.normal();
  }

  spec.lexicon.resize(static_cast<std::size_t>(v));
  for (int i = 0; i < v; ++i) spec.lexicon[static_cast<std::size_t>(i)] = i;
  for (int i = v - 1; i > 0; --i) {
    const auto j = rng.uniform_int(0, i);
    std::swap(spec.lexicon[static_cast<std::size_t>(i)],
              spec.lexicon[static_cast<std::size_t>(j)]);
  }

  spec.lm_init.resize(static_cast<std::size_t>(v));
  double total = 0.0;
  for (auto& x : spec.lm_init) {
    x = 0.5 + rng.uniform();
    total += x;
  }
  for (auto& x : spec.lm_init) x /= total;

  // Sharp transition rows: three successors per token so the LM carries a
  // real signal. Zero diagonal keeps repeated tokens out of source strings,
  // which would otherwise be ambiguous after CTC collapse.
  const double masses[3] = {0.55, 0.3, 0.15};
  spec.lm_trans.assign(static_cast<std::size_t>(v),
                       std::vector<double>(static_cast<std::size_t>(v), 0.0));
  for (int prev = 0; prev < v; ++prev) {
    std::vector<int> others;
    others.reserve(static_cast<std::size_t>(v - 1));
    for (int c = 0; c < v; ++c) {
      if (c != prev) others.push_back(c);
    }
    for (std::size_t i = others.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(others[i], others[j]);
    }
    const int n_succ = std::min<int>(3, static_cast<int>(others.size()));
    double used = 0.0;
    for (int i = 0; i < n_succ; ++i) used += masses[i];
    for (int i = 0; i < n_succ; ++i) {
      spec.lm_trans[static_cast<std::size_t>(prev)][static_cast<std::size_t>(others[static_cast<std::size_t>(i)])] =
          masses[i] / used;
    }
  }
  return spec;
}

namespace {

void emit_frames(std::vector<FeatureFrame>& frames, const std::vector<double>* base,
                 int count, int dim, double sigma, Rng& rng) {
  for (int i = 0; i < count; ++i) {
    FeatureFrame f;
    f.index = static_cast<std::int64_t>(frames.size());
    f.values.resize(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const double mean = base ? (*base)[static_cast<std::size_t>(d)] : 0.0;
      f.values[static_cast<std::size_t>(d)] = static_cast<float>(mean + sigma * rng.normal());
    }
    frames.push_back(std::move(f));
  }
}

}  // namespace

SyntheticUtterance generate_utterance(const ToyModelSpec& spec,
                                      const GeneratorConfig& config, int index) {
  config.validate();
  SyntheticUtterance utt;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt_%04d", index);
  utt.id = buf;
  utt.seed = mix_seed(config.seed, static_cast<std::uint64_t>(1000 + index));
  Rng rng(utt.seed);

  const int n = static_cast<int>(rng.uniform_int(config.tokens_min, config.tokens_max));

  std::vector<int> regular;
  regular.reserve(static_cast<std::size_t>(n));
  regular.push_back(static_cast<int>(rng.categorical(spec.lm_init)));
  for (int i = 1; i < n; ++i) {
    const auto& row = spec.lm_trans[static_cast<std::size_t>(regular.back())];
    regular.push_back(static_cast<int>(rng.categorical(row)));
  }
  utt.source.reserve(static_cast<std::size_t>(n));
  for (int idx : regular) utt.source.push_back(static_cast<TokenId>(kNumReserved + idx));

  // Right-to-left adjacent swaps: one pass lets late source tokens bubble far
  // leftward, so early target positions can depend on source arbitrarily far
  // ahead. That forward reach is what makes small k measurably worse.
  utt.order.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) utt.order[static_cast<std::size_t>(i)] = i;
  for (int i = n - 2; i >= 0; --i) {
    if (rng.uniform() < config.reorder_prob) {
      std::swap(utt.order[static_cast<std::size_t>(i)],
                utt.order[static_cast<std::size_t>(i + 1)]);
    }
  }

  utt.translation.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int src_regular = regular[static_cast<std::size_t>(utt.order[static_cast<std::size_t>(i)])];
    utt.translation.push_back(
        static_cast<TokenId>(kNumReserved + spec.lexicon[static_cast<std::size_t>(src_regular)]));
  }

  for (int i = 0; i < n; ++i) {
    if (i > 0 && rng.uniform() < config.silence_prob) {
      const int len =
          static_cast<int>(rng.uniform_int(config.silence_min, config.silence_max));
      TokenSpan span;
      span.token_index = -1;
      span.token = kBlankId;
      span.start = static_cast<std::int64_t>(utt.frames.size());
      span.length = len;
      utt.spans.push_back(span);
      emit_frames(utt.frames, nullptr, len, config.frame_dim, config.noise_sigma, rng);
    }
    const int dur =
        static_cast<int>(rng.uniform_int(config.duration_min, config.duration_max));
    TokenSpan span;
    span.token_index = i;
    span.token = utt.source[static_cast<std::size_t>(i)];
    span.start = static_cast<std::int64_t>(utt.frames.size());
    span.length = dur;
    utt.spans.push_back(span);
    emit_frames(utt.frames, &spec.prototypes[static_cast<std::size_t>(regular[static_cast<std::size_t>(i)])],
                dur, config.frame_dim, config.noise_sigma, rng);
  }
  return utt;
}

// ---------------------------------------------------------------------------
// File formats

void write_frames_file(const std::string& path, const std::vector<FeatureFrame>& frames,
                       int dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write frames file: " + path);
  out.write(kFrameMagic, 4);
  write_u32(out, kFrameVersion);
  write_u32(out, static_cast<std::uint32_t>(frames.size()));
  write_u32(out, static_cast<std::uint32_t>(dim));
  for (const auto& f : frames) {
    if (static_cast<int>(f.values.size()) != dim) {
      throw std::invalid_argument("frame dimension mismatch");
    }
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(sizeof(float) * f.values.size()));
  }
}

std::vector<FeatureFrame> read_frames_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read frames file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kFrameMagic, 4) != 0) {
    throw std::runtime_error("bad frames file magic: " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kFrameVersion) {
    throw std::runtime_error("unsupported frames file version: " + path);
  }
  const std::uint32_t count = read_u32(in);
  const std::uint32_t dim = read_u32(in);
  std::vector<FeatureFrame> frames(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    frames[i].index = i;
    frames[i].values.resize(dim);
    in.read(reinterpret_cast<char*>(frames[i].values.data()),
            static_cast<std::streamsize>(sizeof(float) * dim));
  }
  if (!in) throw std::runtime_error("truncated frames file: " + path);
  return frames;
}

void write_labels_file(const std::string& path, const SyntheticUtterance& utt) {
  json j;
  j["labels_version"] = 1;
  j["id"] = utt.id;
  j["seed"] = utt.seed;
  j["n_frames"] = utt.frames.size();
  j["source_ids"] = utt.source;
  j["translation_ids"] = utt.translation;
  j["order"] = utt.order;
  json spans = json::array();
  for (const auto& s : utt.spans) {
    spans.push_back({s.token_index, s.token, s.start, s.length});
  }
  j["spans"] = spans;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write labels file: " + path);
  out << j.dump(2) << "\n";
}

SyntheticUtterance read_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read labels file: " + path);
  json j;
  in >> j;
  SyntheticUtterance utt;
  utt.id = j.at("id").get<std::string>();
  utt.seed = j.at("seed").get<std::uint64_t>();
  utt.source = j.at("source_ids").get<std::vector<TokenId>>();
  utt.translation = j.at("translation_ids").get<std::vector<TokenId>>();
  utt.order = j.at("order").get<std::vector<int>>();
  for (const auto& s : j.at("spans")) {
    TokenSpan span;
    span.token_index = s.at(0).get<int>();
    span.token = s.at(1).get<TokenId>();
    span.start = s.at(2).get<std::int64_t>();
    span.length = s.at(3).get<std::int64_t>();
    utt.spans.push_back(span);
  }
  return utt;
}

namespace {

json config_to_json(const GeneratorConfig& c) {
  json j;
  j["n_utts"] = c.n_utts;
  j["vocab_size"] = c.vocab_size;
  j["frame_dim"] = c.frame_dim;
  j["tokens_min"] = c.tokens_min;
  j["tokens_max"] = c.tokens_max;
  j["duration_min"] = c.duration_min;
  j["duration_max"] = c.duration_max;
  j["silence_prob"] = c.silence_prob;
  j["silence_min"] = c.silence_min;
  j["silence_max"] = c.silence_max;
  j["noise_sigma"] = c.noise_sigma;
  j["reorder_prob"] = c.reorder_prob;
  j["seed"] = c.seed;
  return j;
}

GeneratorConfig config_from_json(const json& j) {
  GeneratorConfig c;
  c.n_utts = j.at("n_utts").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.frame_dim = j.at("frame_dim").get<int>();
  c.tokens_min = j.at("tokens_min").get<int>();
  c.tokens_max = j.at("tokens_max").get<int>();
  c.duration_min = j.at("duration_min").get<int>();
  c.duration_max = j.at("duration_max").get<int>();
  c.silence_prob = j.at("silence_prob").get<double>();
  c.silence_min = j.at("silence_min").get<int>();
  c.silence_max = j.at("silence_max").get<int>();
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.reorder_prob = j.at("reorder_prob").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void write_manifest(const std::string& path, const CorpusManifest& manifest) {
  json j;
  j["manifest_version"] = 1;
  j["model_file"] = manifest.model_file;
  j["generator_config"] = config_to_json(manifest.config);
  json utts = json::array();
  for (const auto& u : manifest.utterances) {
    json rec;
    rec["id"] = u.id;
    rec["frames_file"] = u.frames_file;
    rec["labels_file"] = u.labels_file;
    rec["n_frames"] = u.n_frames;
    rec["transcript"] = u.transcript;
    rec["translation"] = u.translation;
    rec["seed"] = u.seed;
    utts.push_back(rec);
  }
  j["utterances"] = utts;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

CorpusManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  json j;
  in >> j;
  CorpusManifest m;
  m.model_file = j.at("model_file").get<std::string>();
  m.config = config_from_json(j.at("generator_config"));
  for (const auto& rec : j.at("utterances")) {
    UtteranceRecord u;
    u.id = rec.at("id").get<std::string>();
    u.frames_file = rec.at("frames_file").get<std::string>();
    u.labels_file = rec.at("labels_file").get<std::string>();
    u.n_frames = rec.at("n_frames").get<int>();
    u.transcript = rec.at("transcript").get<std::string>();
    u.translation = rec.at("translation").get<std::string>();
    u.seed = rec.at("seed").get<std::uint64_t>();
    m.utterances.push_back(std::move(u));
  }
  return m;
}

CorpusManifest generate_corpus(const GeneratorConfig& config, const std::string& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const ToyModelSpec spec = make_model_spec(config);
  save_model_spec(out_dir + "/model.json", spec);

  const Vocab src = source_vocab(config);
  const Vocab tgt = target_vocab(config);

  CorpusManifest manifest;
  manifest.config = config;
  manifest.model_file = "model.json";
  for (int i = 0; i < config.n_utts; ++i) {
    const SyntheticUtterance utt = generate_utterance(spec, config, i);
    UtteranceRecord rec;
    rec.id = utt.id;
    rec.frames_file = utt.id + ".bin";
    rec.labels_file = utt.id + ".json";
    rec.n_frames = static_cast<int>(utt.frames.size());
    rec.transcript = detokenize(src, utt.source);
    rec.translation = detokenize(tgt, utt.translation);
    rec.seed = utt.seed;
    write_frames_file(out_dir + "/" + rec.frames_file, utt.frames, config.frame_dim);
    write_labels_file(out_dir + "/" + rec.labels_file, utt);
    manifest.utterances.push_back(std::move(rec));
  }
  write_manifest(out_dir + "/manifest.json", manifest);
  return manifest;
}

SyntheticUtterance load_utterance(const std::string& manifest_dir,
                                  const UtteranceRecord& record) {
  SyntheticUtterance utt = read_labels_file(manifest_dir + "/" + record.labels_file);
  utt.frames = read_frames_file(manifest_dir + "/" + record.frames_file);
  return utt;
}

}  // namespace simulst
