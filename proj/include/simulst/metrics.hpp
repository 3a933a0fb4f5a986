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
// Latency metrics (AL, AP, computational-aware AL) over session traces plus
// desk-scale quality proxies (positional token accuracy, smoothed BLEU-4).

#ifndef SIMULST_METRICS_HPP
#define SIMULST_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "simulst/trace.hpp"
#include "simulst/vocab.hpp"

namespace simulst {

// Per-session latency summary. d_i is the source audio (ms) consumed when
// translation token i was committed; d_ca_i additionally accumulates
// wall_compute_ms over every trace event up to and including that commit.
struct LatencyReport {
  double al_ms = 0.0;
  double ap = 0.0;
  double ca_al_ms = 0.0;
  std::vector<double> delays_ms;
  std::vector<double> ca_delays_ms;
  double total_source_ms = 0.0;
};

// Average lagging with lambda = |y| / T tokens per ms and the cutoff
// tau = min{i : d_i = T} (|y| if no token waited for the full stream):
// AL = (1/tau) * sum_{i<=tau} (d_i - (i-1)/lambda). Throws "empty hypothesis"
// when d is empty.
double al_from_delays(const std::vector<double>& delays_ms, double total_source_ms,
                      std::size_t target_len);

// AP = sum(d_i) / (T * |y|), in (0, 1] for sound traces.
double ap_from_delays(const std::vector<double>& delays_ms, double total_source_ms);

double average_lagging(const SessionTrace& trace);
double average_proportion(const SessionTrace& trace);
// AL over computation-aware delays; the cutoff still comes from the raw d_i.
double computational_aware_al(const SessionTrace& trace);
LatencyReport latency_report(const SessionTrace& trace);

// Exact-position matches / max(|hyp|, |ref|). Two empty sequences count as a
// perfect match.
double token_accuracy(const std::vector<TokenId>& hyp, const std::vector<TokenId>& ref);

// Corpus BLEU-4 with add-one smoothing on the clipped n-gram counts and the
// standard brevity penalty, scaled to [0, 100]. Lists must be aligned; a
// corpus with zero sentence pairs throws "length-0 corpus".
double corpus_bleu(const std::vector<std::vector<TokenId>>& hyps,
                   const std::vector<std::vector<TokenId>>& refs);

// Aggregate over sessions: mean AL/AP/CA-AL, corpus BLEU and mean token
// accuracy of the committed translations against the references.
struct EvaluationReport {
  double al_ms = 0.0;
  double ap = 0.0;
  double ca_al_ms = 0.0;
  double bleu = 0.0;
  double token_accuracy = 0.0;
  int n_sessions = 0;
};

EvaluationReport evaluate_sessions(const std::vector<SessionTrace>& traces,
                                   const std::vector<std::vector<TokenId>>& references);

// Report JSON with values rounded to 1e-6 for reproducible bytes.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& text);

}  // namespace simulst

#endif  // SIMULST_METRICS_HPP
