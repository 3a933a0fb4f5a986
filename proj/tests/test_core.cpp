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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "simulst/frames.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/logmath.hpp"
#include "simulst/rng.hpp"
#include "simulst/vocab.hpp"

using namespace simulst;

namespace {

std::vector<FeatureFrame> make_frames(int n, int dim = 4) {
  std::vector<FeatureFrame> frames(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    frames[static_cast<std::size_t>(i)].index = i;
    frames[static_cast<std::size_t>(i)].values.assign(static_cast<std::size_t>(dim),
                                                      static_cast<float>(i));
  }
  return frames;
}

}  // namespace

TEST_SUITE("logmath") {
  TEST_CASE("log_add basic identities") {
    CHECK(log_add(kLogZero, kLogZero) == kLogZero);
    CHECK(log_add(0.0, kLogZero) == doctest::Approx(0.0));
    CHECK(log_add(std::log(0.25), std::log(0.75)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(log_add(std::log(0.5), std::log(0.5)) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("log_sum_exp matches pairwise accumulation") {
    std::vector<double> xs = {std::log(0.1), std::log(0.2), std::log(0.3), std::log(0.4)};
    CHECK(log_sum_exp(xs) == doctest::Approx(0.0).epsilon(1e-12));
    std::vector<double> zeros = {kLogZero, kLogZero};
    CHECK(log_sum_exp(zeros) == kLogZero);
  }
}

TEST_SUITE("rng") {
  TEST_CASE("same seed gives identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
      CHECK(a.uniform() == b.uniform());
      CHECK(a.uniform_int(0, 9) == b.uniform_int(0, 9));
      CHECK(a.normal() == b.normal());
    }
  }

  TEST_CASE("uniform stays in range and varies") {
    Rng r(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = r.uniform();
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    CHECK(lo < 0.1);
    CHECK(hi > 0.9);
  }

  TEST_CASE("uniform_int covers endpoints") {
    Rng r(11);
    bool saw_lo = false, saw_hi = false;
    for (int i = 0; i < 500; ++i) {
      const auto x = r.uniform_int(3, 6);
      CHECK(x >= 3);
      CHECK(x <= 6);
      saw_lo = saw_lo || x == 3;
      saw_hi = saw_hi || x == 6;
    }
    CHECK(saw_lo);
    CHECK(saw_hi);
  }

  TEST_CASE("categorical respects weights") {
    Rng r(5);
    std::vector<double> weights = {0.0, 1.0, 0.0};
    for (int i = 0; i < 50; ++i) {
      CHECK(r.categorical(weights) == 1);
    }
  }

  TEST_CASE("mix_seed separates salts") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) == mix_seed(1, 0));
  }
}

TEST_SUITE("vocab") {
  TEST_CASE("reserved ids are fixed") {
    Vocab v = Vocab::make(3, "src");
    CHECK(v.token(kBlankId) == "<blank>");
    CHECK(v.token(kBosId) == "<s>");
    CHECK(v.token(kEosId) == "</s>");
    CHECK(v.token(kUnkId) == "<unk>");
    CHECK(v.size() == 7);
    CHECK(v.n_regular() == 3);
    CHECK(v.token(4) == "src_00");
    CHECK(v.id("src_02") == 6);
    CHECK(v.id("missing") == kUnkId);
  }

  TEST_CASE("regular ids are dense") {
    Vocab v = Vocab::make(4, "t");
    const auto ids = v.regular_ids();
    REQUIRE(ids.size() == 4);
    CHECK(ids.front() == kNumReserved);
    CHECK(ids.back() == v.size() - 1);
  }

  TEST_CASE("detokenize joins with spaces") {
    Vocab v = Vocab::make(2, "x");
    CHECK(detokenize(v, {4, 5}) == "x_00 x_01");
    CHECK(detokenize(v, {}).empty());
  }
}

TEST_SUITE("frames") {
  TEST_CASE("exact division") {
    const auto chunks = make_chunks(make_frames(96), 48);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].arrival_time_ms == 480);
    CHECK(chunks[1].arrival_time_ms == 960);
    CHECK(chunks[0].valid_frames == 48);
    CHECK(chunks[1].valid_frames == 48);
  }

  TEST_CASE("remainder chunk is padded with valid length") {
    const auto chunks = make_chunks(make_frames(100), 48);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[2].valid_frames == 4);
    CHECK(chunks[2].frames.size() == 48);
    for (std::size_t i = 4; i < 48; ++i) {
      for (float x : chunks[2].frames[i].values) CHECK(x == 0.0f);
    }
  }

  TEST_CASE("single chunk arrival time") {
    const auto chunks = make_chunks(make_frames(32), 32);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].arrival_time_ms == 320);
  }

  TEST_CASE("round trip ignoring padding") {
    const auto input = make_frames(75);
    const auto chunks = make_chunks(input, 32);
    std::vector<FeatureFrame> flat;
    for (const auto& c : chunks) {
      flat.insert(flat.end(), c.frames.begin(),
                  c.frames.begin() + c.valid_frames);
    }
    REQUIRE(flat.size() == input.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
      CHECK(flat[i].index == input[i].index);
      CHECK(flat[i].values == input[i].values);
    }
  }

  TEST_CASE("error strings") {
    CHECK_THROWS_WITH(make_chunks({}, 48), "empty stream");
    CHECK_THROWS_WITH(make_chunks(make_frames(8), 0), "invalid chunk size");
    CHECK_THROWS_WITH(make_chunks(make_frames(8), -3), "invalid chunk size");
    CHECK_THROWS_WITH(steps_per_chunk(48, 5),
                      "chunk size not divisible by downsampling rate");
  }

  TEST_CASE("steps per chunk") {
    CHECK(steps_per_chunk(32, 4) == 8);
    CHECK(steps_per_chunk(48, 4) == 12);
  }

  TEST_CASE("tau examples and monotonicity") {
    CHECK(tau(8, 4, 32) == 1);
    CHECK(tau(9, 4, 32) == 2);
    CHECK(tau(0, 4, 32) == 0);
    for (int j = 0; j < 100; ++j) {
      const int a = tau(j, 4, 48);
      const int b = tau(j + 1, 4, 48);
      CHECK(a <= b);
      CHECK(b <= a + 1);
    }
  }
}

TEST_SUITE("hypothesis") {
  TEST_CASE("joint score is the weighted component sum") {
    JointScoreWeights w;
    ComponentScores s{-1.0, -2.0, -3.0};
    CHECK(joint_score(s, w) ==
          doctest::Approx(0.3 * -1.0 + 0.7 * -2.0 + 0.3 * -3.0));
  }

  TEST_CASE("zero weight ignores minus infinity component") {
    JointScoreWeights w;
    w.lambda_ctc = 1.0;
    w.lambda_att = 0.0;
    w.lambda_lm = 0.0;
    ComponentScores s{-2.5, kLogZero, kLogZero};
    CHECK(joint_score(s, w) == doctest::Approx(-2.5));
    CHECK(std::isfinite(joint_score(s, w)));
  }

  TEST_CASE("weight validation") {
    JointScoreWeights w;
    CHECK_NOTHROW(w.validate());
    w.lambda_ctc = 0.5;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    w.lambda_ctc = 0.3;
    w.lambda_lm = -0.1;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  }

  TEST_CASE("ordering: score descending then lexicographic prefix") {
    Hypothesis a{{4, 5}, {}, -1.0};
    Hypothesis b{{4, 6}, {}, -2.0};
    Hypothesis c{{4, 5, 6}, {}, -1.0};
    CHECK(hyp_before(a, b));
    CHECK_FALSE(hyp_before(b, a));
    CHECK(hyp_before(a, c));   // same score, [4,5] < [4,5,6]
    CHECK_FALSE(hyp_before(c, a));
  }

  TEST_CASE("beam sortedness check") {
    Beam beam;
    beam.hyps = {Hypothesis{{4}, {}, -1.0}, Hypothesis{{5}, {}, -2.0}};
    CHECK(beam_sorted(beam));
    std::swap(beam.hyps[0], beam.hyps[1]);
    CHECK_FALSE(beam_sorted(beam));
    CHECK(beam.best().prefix == std::vector<TokenId>{5});
  }
}
