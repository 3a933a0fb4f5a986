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
//
// Corpus generator and file-format tests: structural invariants of generated
// utterances, binary/JSON round trips, and byte-level determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "simulst/corpus.hpp"
#include "simulst/rng.hpp"
#include "simulst/toy_models.hpp"

using namespace simulst;
namespace fs = std::filesystem;

namespace {

GeneratorConfig test_config(std::uint64_t seed) {
  GeneratorConfig config;
  config.n_utts = 3;
  config.vocab_size = 12;
  config.frame_dim = 6;
  config.seed = seed;
  return config;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("generator_config") {
  TEST_CASE("validation names the offending field") {
    GeneratorConfig c = test_config(1);
    c.n_utts = 0;
    CHECK_THROWS_WITH(c.validate(), "invalid n_utts");
    c = test_config(1);
    c.vocab_size = 1;
    CHECK_THROWS_WITH(c.validate(), "invalid vocab_size");
    c = test_config(1);
    c.frame_dim = 0;
    CHECK_THROWS_WITH(c.validate(), "invalid frame_dim");
    c = test_config(1);
    c.tokens_max = c.tokens_min - 1;
    CHECK_THROWS_WITH(c.validate(), "invalid tokens_range");
    c = test_config(1);
    c.duration_min = 0;
    CHECK_THROWS_WITH(c.validate(), "invalid duration_range");
    c = test_config(1);
    c.silence_prob = 1.5;
    CHECK_THROWS_WITH(c.validate(), "invalid silence_prob");
    c = test_config(1);
    c.silence_max = c.silence_min - 1;
    CHECK_THROWS_WITH(c.validate(), "invalid silence_range");
    c = test_config(1);
    c.noise_sigma = -0.1;
    CHECK_THROWS_WITH(c.validate(), "invalid noise_sigma");
    c = test_config(1);
    c.reorder_prob = -0.5;
    CHECK_THROWS_WITH(c.validate(), "invalid reorder_prob");
  }
}

TEST_SUITE("utterance_structure") {
  TEST_CASE("spans partition the frames and labels are consistent") {
    GeneratorConfig config = test_config(7);
    config.reorder_prob = 0.5;
    config.silence_prob = 0.4;
    ToyModelSpec spec = make_model_spec(config);
    for (int idx = 0; idx < 10; ++idx) {
      const SyntheticUtterance utt = generate_utterance(spec, config, idx);
      const int n = static_cast<int>(utt.source.size());
      CHECK(n >= config.tokens_min);
      CHECK(n <= config.tokens_max);
      CHECK(utt.translation.size() == utt.source.size());
      CHECK(utt.order.size() == utt.source.size());

      // order is a permutation. The right-to-left swap pass moves a token
      // right at most once but can bubble a late token far left, so early
      // target positions may depend on source arbitrarily far ahead.
      std::set<int> seen(utt.order.begin(), utt.order.end());
      CHECK(static_cast<int>(seen.size()) == n);
      CHECK(*seen.begin() == 0);
      CHECK(*seen.rbegin() == n - 1);
      for (int i = 0; i < n; ++i) CHECK(utt.order[static_cast<std::size_t>(i)] >= i - 1);

      // translation = lexicon image of the reordered source.
      for (int i = 0; i < n; ++i) {
        const int src = utt.source[static_cast<std::size_t>(
                            utt.order[static_cast<std::size_t>(i)])] -
                        kNumReserved;
        CHECK(utt.translation[static_cast<std::size_t>(i)] ==
              kNumReserved + spec.lexicon[static_cast<std::size_t>(src)]);
      }

      // Spans tile [0, n_frames) with silence only between token spans.
      std::int64_t cursor = 0;
      int next_token = 0;
      bool prev_silence = false;
      for (std::size_t s = 0; s < utt.spans.size(); ++s) {
        const TokenSpan& span = utt.spans[s];
        CHECK(span.start == cursor);
        CHECK(span.length >= 1);
        cursor += span.length;
        if (span.token_index < 0) {
          CHECK(span.token == kBlankId);
          CHECK(s > 0);                      // never leads
          CHECK(s + 1 < utt.spans.size());   // never trails
          CHECK_FALSE(prev_silence);         // never doubled
          CHECK(span.length >= config.silence_min);
          CHECK(span.length <= config.silence_max);
          prev_silence = true;
        } else {
          CHECK(span.token_index == next_token);
          CHECK(span.token == utt.source[static_cast<std::size_t>(next_token)]);
          CHECK(span.length >= config.duration_min);
          CHECK(span.length <= config.duration_max);
          ++next_token;
          prev_silence = false;
        }
      }
      CHECK(cursor == static_cast<std::int64_t>(utt.frames.size()));
      CHECK(next_token == n);

      // Source strings never repeat a token back to back (CTC collapse would
      // otherwise be ambiguous).
      for (int i = 1; i < n; ++i) {
        CHECK(utt.source[static_cast<std::size_t>(i)] !=
              utt.source[static_cast<std::size_t>(i - 1)]);
      }
    }
  }

  TEST_CASE("noiseless frames equal the prototypes") {
    GeneratorConfig config = test_config(11);
    config.noise_sigma = 0.0;
    ToyModelSpec spec = make_model_spec(config);
    const SyntheticUtterance utt = generate_utterance(spec, config, 0);
    for (const TokenSpan& span : utt.spans) {
      for (std::int64_t f = span.start; f < span.start + span.length; ++f) {
        const auto& values = utt.frames[static_cast<std::size_t>(f)].values;
        for (int d = 0; d < config.frame_dim; ++d) {
          const double expect =
              span.token_index < 0
                  ? 0.0
                  : spec.prototypes[static_cast<std::size_t>(span.token - kNumReserved)]
                                   [static_cast<std::size_t>(d)];
          CHECK(values[static_cast<std::size_t>(d)] == static_cast<float>(expect));
        }
      }
    }
  }

  TEST_CASE("generation is pure in index and seed") {
    GeneratorConfig config = test_config(23);
    ToyModelSpec spec = make_model_spec(config);
    const SyntheticUtterance a = generate_utterance(spec, config, 2);
    const SyntheticUtterance b = generate_utterance(spec, config, 2);
    CHECK(a.source == b.source);
    CHECK(a.translation == b.translation);
    CHECK(a.order == b.order);
    CHECK(a.frames.size() == b.frames.size());
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
      CHECK(a.frames[i].values == b.frames[i].values);
    }

    const SyntheticUtterance c = generate_utterance(spec, config, 3);
    CHECK(c.seed != a.seed);
  }
}

TEST_SUITE("frame_files") {
  TEST_CASE("binary round trip is exact") {
    TempDir dir("simulst_frames_test");
    Rng rng(99);
    std::vector<FeatureFrame> frames(17);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      frames[i].index = static_cast<std::int64_t>(i);
      frames[i].values.resize(5);
      for (auto& x : frames[i].values) x = static_cast<float>(rng.normal());
    }
    const std::string path = (dir.path / "f.bin").string();
    write_frames_file(path, frames, 5);
    const auto back = read_frames_file(path);
    REQUIRE(back.size() == frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      CHECK(back[i].values == frames[i].values);
      CHECK(back[i].index == static_cast<std::int64_t>(i));
    }
  }

  TEST_CASE("corrupt files are rejected") {
    TempDir dir("simulst_frames_bad");
    const std::string path = (dir.path / "f.bin").string();
    std::vector<FeatureFrame> frames(3);
    for (auto& f : frames) f.values = {1.0f, 2.0f};
    write_frames_file(path, frames, 2);

    SUBCASE("dimension mismatch on write") {
      frames[1].values = {1.0f};
      CHECK_THROWS_WITH(write_frames_file(path, frames, 2), "frame dimension mismatch");
    }
    SUBCASE("bad magic") {
      std::string bytes = slurp(path);
      bytes[0] = 'X';
      std::ofstream(path, std::ios::binary) << bytes;
      CHECK_THROWS_AS(read_frames_file(path), std::runtime_error);
    }
    SUBCASE("unsupported version") {
      std::string bytes = slurp(path);
      bytes[4] = 9;
      std::ofstream(path, std::ios::binary) << bytes;
      CHECK_THROWS_AS(read_frames_file(path), std::runtime_error);
    }
    SUBCASE("truncated payload") {
      std::string bytes = slurp(path);
      bytes.resize(bytes.size() - 3);
      std::ofstream(path, std::ios::binary) << bytes;
      CHECK_THROWS_AS(read_frames_file(path), std::runtime_error);
    }
    SUBCASE("missing file") {
      CHECK_THROWS_AS(read_frames_file((dir.path / "absent.bin").string()),
                      std::runtime_error);
    }
  }
}

TEST_SUITE("corpus_io") {
  TEST_CASE("generate_corpus writes a loadable corpus") {
    TempDir dir("simulst_corpus_test");
    GeneratorConfig config = test_config(31);
    const CorpusManifest manifest = generate_corpus(config, dir.path.string());

    CHECK(fs::exists(dir.path / "model.json"));
    CHECK(fs::exists(dir.path / "manifest.json"));
    REQUIRE(manifest.utterances.size() == 3);
    CHECK(manifest.utterances[0].id == "utt_0000");
    CHECK(fs::exists(dir.path / "utt_0000.bin"));
    CHECK(fs::exists(dir.path / "utt_0002.json"));

    // The manifest read back equals the returned one.
    const CorpusManifest back = read_manifest((dir.path / "manifest.json").string());
    CHECK(back.model_file == "model.json");
    CHECK(back.config.vocab_size == config.vocab_size);
    CHECK(back.config.seed == config.seed);
    REQUIRE(back.utterances.size() == manifest.utterances.size());
    for (std::size_t i = 0; i < back.utterances.size(); ++i) {
      CHECK(back.utterances[i].id == manifest.utterances[i].id);
      CHECK(back.utterances[i].frames_file == manifest.utterances[i].frames_file);
      CHECK(back.utterances[i].n_frames == manifest.utterances[i].n_frames);
      CHECK(back.utterances[i].transcript == manifest.utterances[i].transcript);
      CHECK(back.utterances[i].translation == manifest.utterances[i].translation);
      CHECK(back.utterances[i].seed == manifest.utterances[i].seed);
    }

    // load_utterance restores exactly what the generator produced.
    const ToyModelSpec spec = load_model_spec((dir.path / "model.json").string());
    for (const auto& rec : back.utterances) {
      const SyntheticUtterance loaded = load_utterance(dir.path.string(), rec);
      const SyntheticUtterance fresh = generate_utterance(
          spec, back.config,
          static_cast<int>(&rec - back.utterances.data()));
      CHECK(loaded.id == fresh.id);
      CHECK(loaded.source == fresh.source);
      CHECK(loaded.translation == fresh.translation);
      CHECK(loaded.order == fresh.order);
      REQUIRE(loaded.spans.size() == fresh.spans.size());
      for (std::size_t s = 0; s < loaded.spans.size(); ++s) {
        CHECK(loaded.spans[s].token_index == fresh.spans[s].token_index);
        CHECK(loaded.spans[s].token == fresh.spans[s].token);
        CHECK(loaded.spans[s].start == fresh.spans[s].start);
        CHECK(loaded.spans[s].length == fresh.spans[s].length);
      }
      REQUIRE(loaded.frames.size() == fresh.frames.size());
      for (std::size_t f = 0; f < loaded.frames.size(); ++f) {
        CHECK(loaded.frames[f].values == fresh.frames[f].values);
      }
      CHECK(static_cast<int>(loaded.frames.size()) == rec.n_frames);
    }
  }

  TEST_CASE("same seed regenerates byte-identical files") {
    TempDir a("simulst_corpus_a");
    TempDir b("simulst_corpus_b");
    TempDir c("simulst_corpus_c");
    GeneratorConfig config = test_config(47);
    generate_corpus(config, a.path.string());
    generate_corpus(config, b.path.string());
    GeneratorConfig other = config;
    other.seed = 48;
    generate_corpus(other, c.path.string());

    for (const char* name :
         {"model.json", "manifest.json", "utt_0000.bin", "utt_0000.json",
          "utt_0001.bin", "utt_0002.json"}) {
      CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    CHECK(slurp(a.path / "utt_0000.bin") != slurp(c.path / "utt_0000.bin"));
  }

  TEST_CASE("labels round trip") {
    TempDir dir("simulst_labels_test");
    GeneratorConfig config = test_config(53);
    ToyModelSpec spec = make_model_spec(config);
    const SyntheticUtterance utt = generate_utterance(spec, config, 1);
    const std::string path = (dir.path / "l.json").string();
    write_labels_file(path, utt);
    const SyntheticUtterance back = read_labels_file(path);
    CHECK(back.id == utt.id);
    CHECK(back.seed == utt.seed);
    CHECK(back.source == utt.source);
    CHECK(back.translation == utt.translation);
    CHECK(back.order == utt.order);
    REQUIRE(back.spans.size() == utt.spans.size());
    for (std::size_t i = 0; i < back.spans.size(); ++i) {
      CHECK(back.spans[i].token_index == utt.spans[i].token_index);
      CHECK(back.spans[i].start == utt.spans[i].start);
      CHECK(back.spans[i].length == utt.spans[i].length);
    }
  }

  TEST_CASE("vocabularies name tokens by side") {
    GeneratorConfig config = test_config(1);
    const Vocab src = source_vocab(config);
    const Vocab tgt = target_vocab(config);
    CHECK(src.n_regular() == config.vocab_size);
    CHECK(tgt.n_regular() == config.vocab_size);
    CHECK(src.token(kNumReserved).substr(0, 3) == "src");
    CHECK(tgt.token(kNumReserved).substr(0, 3) == "tgt");
    CHECK(detokenize(src, {kNumReserved, kNumReserved + 1}) ==
          src.token(kNumReserved) + " " + src.token(kNumReserved + 1));
  }
}
