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

#include "simulst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <variant>

#include "json.hpp"

namespace simulst {
namespace {

// Commit delays plus computation-aware delays: wall_compute_ms accumulates
// over every event in trace order, sampled at each commit.
void collect_delays(const SessionTrace& trace, std::vector<double>* delays,
                    std::vector<double>* ca_delays) {
  double wall = 0.0;
  for (const TraceEvent& event : trace.events) {
    if (const auto* chunk = std::get_if<ChunkEvent>(&event)) {
      wall += chunk->wall_compute_ms;
    } else if (const auto* step = std::get_if<AsrStepEvent>(&event)) {
      wall += step->wall_compute_ms;
    } else {
      const auto& commit = std::get<CommitEvent>(event);
      wall += commit.wall_compute_ms;
      delays->push_back(static_cast<double>(commit.source_consumed_ms));
      ca_delays->push_back(static_cast<double>(commit.source_consumed_ms) + wall);
    }
  }
}

double total_source_ms(const SessionTrace& trace) {
  if (!trace.has_summary) throw std::invalid_argument("trace missing summary event");
  return static_cast<double>(trace.summary.total_source_ms);
}

std::size_t al_cutoff(const std::vector<double>& delays_ms, double total) {
  for (std::size_t i = 0; i < delays_ms.size(); ++i) {
    if (delays_ms[i] >= total) return i + 1;
  }
  return delays_ms.size();
}

}  // namespace

double al_from_delays(const std::vector<double>& delays_ms, double total_source_ms,
                      std::size_t target_len) {
  if (delays_ms.empty() || target_len == 0) {
    throw std::invalid_argument("empty hypothesis");
  }
  if (total_source_ms <= 0.0) throw std::invalid_argument("invalid source length");
  const double lambda = static_cast<double>(target_len) / total_source_ms;
  const std::size_t tau = al_cutoff(delays_ms, total_source_ms);
  double sum = 0.0;
  for (std::size_t i = 0; i < tau; ++i) {
    sum += delays_ms[i] - static_cast<double>(i) / lambda;
  }
  return sum / static_cast<double>(tau);
}

double ap_from_delays(const std::vector<double>& delays_ms, double total_source_ms) {
  if (delays_ms.empty()) throw std::invalid_argument("empty hypothesis");
  if (total_source_ms <= 0.0) throw std::invalid_argument("invalid source length");
  double sum = 0.0;
  for (double d : delays_ms) sum += d;
  return sum / (total_source_ms * static_cast<double>(delays_ms.size()));
}

double average_lagging(const SessionTrace& trace) {
  std::vector<double> delays, ca;
  collect_delays(trace, &delays, &ca);
  return al_from_delays(delays, total_source_ms(trace), delays.size());
}

double average_proportion(const SessionTrace& trace) {
  std::vector<double> delays, ca;
  collect_delays(trace, &delays, &ca);
  return ap_from_delays(delays, total_source_ms(trace));
}

double computational_aware_al(const SessionTrace& trace) {
  std::vector<double> delays, ca;
  collect_delays(trace, &delays, &ca);
  if (delays.empty()) throw std::invalid_argument("empty hypothesis");
  const double total = total_source_ms(trace);
  const double lambda = static_cast<double>(delays.size()) / total;
  // Cutoff from the raw delays so CA-AL >= AL holds pointwise on the same
  // summation range.
  const std::size_t tau = al_cutoff(delays, total);
  double sum = 0.0;
  for (std::size_t i = 0; i < tau; ++i) {
    sum += ca[i] - static_cast<double>(i) / lambda;
  }
  return sum / static_cast<double>(tau);
}

LatencyReport latency_report(const SessionTrace& trace) {
  LatencyReport report;
  collect_delays(trace, &report.delays_ms, &report.ca_delays_ms);
  report.total_source_ms = total_source_ms(trace);
  report.al_ms = al_from_delays(report.delays_ms, report.total_source_ms,
                                report.delays_ms.size());
  report.ap = ap_from_delays(report.delays_ms, report.total_source_ms);
  report.ca_al_ms = computational_aware_al(trace);
  return report;
}

double token_accuracy(const std::vector<TokenId>& hyp, const std::vector<TokenId>& ref) {
  const std::size_t longest = std::max(hyp.size(), ref.size());
  if (longest == 0) return 1.0;
  const std::size_t shared = std::min(hyp.size(), ref.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < shared; ++i) {
    if (hyp[i] == ref[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(longest);
}

namespace {

using Ngram = std::vector<TokenId>;

std::map<Ngram, int> ngram_counts(const std::vector<TokenId>& seq, std::size_t n) {
  std::map<Ngram, int> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    Ngram gram(seq.begin() + static_cast<std::ptrdiff_t>(i),
               seq.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[gram];
  }
  return counts;
}

}  // namespace

double corpus_bleu(const std::vector<std::vector<TokenId>>& hyps,
                   const std::vector<std::vector<TokenId>>& refs) {
  if (hyps.size() != refs.size()) {
    throw std::invalid_argument("hypothesis/reference corpus length mismatch");
  }
  if (hyps.empty()) throw std::invalid_argument("length-0 corpus");

  constexpr std::size_t kMaxOrder = 4;
  double hyp_len = 0.0;
  double ref_len = 0.0;
  double matched[kMaxOrder] = {0.0, 0.0, 0.0, 0.0};
  double total[kMaxOrder] = {0.0, 0.0, 0.0, 0.0};

  for (std::size_t s = 0; s < hyps.size(); ++s) {
    hyp_len += static_cast<double>(hyps[s].size());
    ref_len += static_cast<double>(refs[s].size());
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto hyp_counts = ngram_counts(hyps[s], n);
      const auto ref_counts = ngram_counts(refs[s], n);
      for (const auto& [gram, count] : hyp_counts) {
        total[n - 1] += count;
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) {
          matched[n - 1] += std::min(count, it->second);
        }
      }
    }
  }

  if (hyp_len == 0.0) return 0.0;
  double log_precision = 0.0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    // Add-one smoothing keeps zero-match orders finite on toy corpora.
    log_precision += std::log((matched[n] + 1.0) / (total[n] + 1.0));
  }
  const double brevity =
      hyp_len >= ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return 100.0 * brevity * std::exp(log_precision / static_cast<double>(kMaxOrder));
}

EvaluationReport evaluate_sessions(const std::vector<SessionTrace>& traces,
                                   const std::vector<std::vector<TokenId>>& references) {
  if (traces.size() != references.size()) {
    throw std::invalid_argument("hypothesis/reference corpus length mismatch");
  }
  if (traces.empty()) throw std::invalid_argument("length-0 corpus");

  EvaluationReport report;
  report.n_sessions = static_cast<int>(traces.size());
  std::vector<std::vector<TokenId>> hyps;
  hyps.reserve(traces.size());
  double accuracy = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const LatencyReport latency = latency_report(traces[i]);
    report.al_ms += latency.al_ms;
    report.ap += latency.ap;
    report.ca_al_ms += latency.ca_al_ms;
    hyps.push_back(traces[i].summary.translation);
    accuracy += token_accuracy(traces[i].summary.translation, references[i]);
  }
  const double n = static_cast<double>(traces.size());
  report.al_ms /= n;
  report.ap /= n;
  report.ca_al_ms /= n;
  report.token_accuracy = accuracy / n;
  report.bleu = corpus_bleu(hyps, references);
  return report;
}

namespace {

double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::json j{{"report_version", 1},
                   {"al_ms", round6(report.al_ms)},
                   {"ap", round6(report.ap)},
                   {"ca_al_ms", round6(report.ca_al_ms)},
                   {"bleu", round6(report.bleu)},
                   {"token_accuracy", round6(report.token_accuracy)},
                   {"n_sessions", report.n_sessions}};
  return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EvaluationReport report;
  report.al_ms = j.at("al_ms").get<double>();
  report.ap = j.at("ap").get<double>();
  report.ca_al_ms = j.at("ca_al_ms").get<double>();
  report.bleu = j.at("bleu").get<double>();
  report.token_accuracy = j.at("token_accuracy").get<double>();
  report.n_sessions = j.at("n_sessions").get<int>();
  return report;
}

}  // namespace simulst
