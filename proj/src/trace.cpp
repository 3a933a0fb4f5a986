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

#include "simulst/trace.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "simulst/hypothesis.hpp"

namespace simulst {
namespace {

using nlohmann::json;

// JSON has no -inf literal; nlohmann serializes non-finite doubles as null.
// Scores are stored as strings in that case so the round trip is lossless.
json score_to_json(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x < 0 ? "-inf" : "inf";
}

double score_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::runtime_error("invalid score value in trace");
}

json k_to_json(int k) {
  if (k == kWaitForever) return "inf";
  return k;
}

int k_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kWaitForever;
    throw std::runtime_error("invalid k in trace header");
  }
  return j.get<int>();
}

json header_to_json(const TraceHeader& h) {
  return json{{"trace_version", h.trace_version},
              {"utt_id", h.utt_id},
              {"policy", policy_to_string(h.policy)},
              {"k", k_to_json(h.k)},
              {"chunk_frames", h.chunk_frames},
              {"downsample_rate", h.downsample_rate},
              {"beam_size", h.beam_size},
              {"lookahead_frames", h.lookahead_frames},
              {"seed", h.seed}};
}

TraceHeader header_from_json(const json& j) {
  TraceHeader h;
  h.trace_version = j.at("trace_version").get<int>();
  h.utt_id = j.at("utt_id").get<std::string>();
  h.policy = policy_from_string(j.at("policy").get<std::string>());
  h.k = k_from_json(j.at("k"));
  h.chunk_frames = j.at("chunk_frames").get<int>();
  h.downsample_rate = j.at("downsample_rate").get<int>();
  h.beam_size = j.at("beam_size").get<int>();
  h.lookahead_frames = j.at("lookahead_frames").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  return h;
}

json event_to_json(const TraceEvent& event) {
  json j;
  if (const auto* chunk = std::get_if<ChunkEvent>(&event)) {
    j["event"] = "chunk";
    j["i"] = chunk->i;
    j["arrival_ms"] = chunk->arrival_ms;
    j["valid_frames"] = chunk->valid_frames;
    j["wall_compute_ms"] = chunk->wall_compute_ms;
  } else if (const auto* step = std::get_if<AsrStepEvent>(&event)) {
    j["event"] = "asr_step";
    j["j"] = step->j;
    json beam = json::array();
    for (const BeamEntry& entry : step->beam) {
      beam.push_back(json{{"prefix", entry.prefix},
                          {"text", entry.text},
                          {"joint", score_to_json(entry.joint)},
                          {"ctc", score_to_json(entry.ctc)},
                          {"att", score_to_json(entry.att)},
                          {"lm", score_to_json(entry.lm)}});
    }
    j["beam"] = std::move(beam);
    j["phi_lcp_raw"] = step->phi_lcp_raw;
    j["phi_sh_raw"] = step->phi_sh_raw;
    j["phi_lcp"] = step->phi_lcp;
    j["phi_sh"] = step->phi_sh;
    j["wall_compute_ms"] = step->wall_compute_ms;
  } else {
    const auto& commit = std::get<CommitEvent>(event);
    j["event"] = "commit";
    j["t"] = commit.t;
    j["token"] = commit.token;
    j["token_text"] = commit.token_text;
    j["source_consumed_ms"] = commit.source_consumed_ms;
    j["wall_compute_ms"] = commit.wall_compute_ms;
    j["tail"] = commit.tail;
  }
  return j;
}

TraceEvent event_from_json(const json& j) {
  const std::string kind = j.at("event").get<std::string>();
  if (kind == "chunk") {
    ChunkEvent e;
    e.i = j.at("i").get<int>();
    e.arrival_ms = j.at("arrival_ms").get<std::int64_t>();
    e.valid_frames = j.at("valid_frames").get<int>();
    e.wall_compute_ms = j.at("wall_compute_ms").get<double>();
    return e;
  }
  if (kind == "asr_step") {
    AsrStepEvent e;
    e.j = j.at("j").get<int>();
    for (const json& entry : j.at("beam")) {
      BeamEntry b;
      b.prefix = entry.at("prefix").get<std::vector<TokenId>>();
      b.text = entry.at("text").get<std::string>();
      b.joint = score_from_json(entry.at("joint"));
      b.ctc = score_from_json(entry.at("ctc"));
      b.att = score_from_json(entry.at("att"));
      b.lm = score_from_json(entry.at("lm"));
      e.beam.push_back(std::move(b));
    }
    e.phi_lcp_raw = j.at("phi_lcp_raw").get<int>();
    e.phi_sh_raw = j.at("phi_sh_raw").get<int>();
    e.phi_lcp = j.at("phi_lcp").get<int>();
    e.phi_sh = j.at("phi_sh").get<int>();
    e.wall_compute_ms = j.at("wall_compute_ms").get<double>();
    return e;
  }
  if (kind == "commit") {
    CommitEvent e;
    e.t = j.at("t").get<int>();
    e.token = j.at("token").get<TokenId>();
    e.token_text = j.at("token_text").get<std::string>();
    e.source_consumed_ms = j.at("source_consumed_ms").get<std::int64_t>();
    e.wall_compute_ms = j.at("wall_compute_ms").get<double>();
    e.tail = j.at("tail").get<bool>();
    return e;
  }
  throw std::runtime_error("unknown trace event: " + kind);
}

json summary_to_json(const SummaryEvent& s) {
  return json{{"event", "summary"},
              {"translation", s.translation},
              {"translation_text", s.translation_text},
              {"transcript", s.transcript},
              {"transcript_text", s.transcript_text},
              {"total_source_ms", s.total_source_ms},
              {"n_frames", s.n_frames},
              {"phi_final", s.phi_final},
              {"total_wall_ms", s.total_wall_ms}};
}

SummaryEvent summary_from_json(const json& j) {
  SummaryEvent s;
  s.translation = j.at("translation").get<std::vector<TokenId>>();
  s.translation_text = j.at("translation_text").get<std::string>();
  s.transcript = j.at("transcript").get<std::vector<TokenId>>();
  s.transcript_text = j.at("transcript_text").get<std::string>();
  s.total_source_ms = j.at("total_source_ms").get<std::int64_t>();
  s.n_frames = j.at("n_frames").get<int>();
  s.phi_final = j.at("phi_final").get<int>();
  s.total_wall_ms = j.at("total_wall_ms").get<double>();
  return s;
}

}  // namespace

void write_trace(const SessionTrace& trace, std::ostream& out) {
  out << header_to_json(trace.header).dump() << "\n";
  for (const TraceEvent& event : trace.events) {
    out << event_to_json(event).dump() << "\n";
  }
  if (trace.has_summary) {
    out << summary_to_json(trace.summary).dump() << "\n";
  }
}

std::string trace_to_jsonl(const SessionTrace& trace) {
  std::ostringstream out;
  write_trace(trace, out);
  return out.str();
}

SessionTrace read_trace(std::istream& in) {
  SessionTrace trace;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!have_header) {
      if (!j.contains("trace_version")) {
        throw std::runtime_error("trace missing header line");
      }
      trace.header = header_from_json(j);
      have_header = true;
      continue;
    }
    if (j.at("event").get<std::string>() == "summary") {
      trace.summary = summary_from_json(j);
      trace.has_summary = true;
      continue;
    }
    trace.events.push_back(event_from_json(j));
  }
  if (!have_header) throw std::runtime_error("trace missing header line");
  return trace;
}

SessionTrace trace_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

void save_trace(const SessionTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  write_trace(trace, out);
}

SessionTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace(in);
}

namespace {

// Recompute raw phi values from a serialized beam snapshot.
Beam snapshot_to_beam(const AsrStepEvent& step) {
  Beam beam;
  for (const BeamEntry& entry : step.beam) {
    Hypothesis hyp;
    hyp.prefix = entry.prefix;
    hyp.scores = ComponentScores{entry.ctc, entry.att, entry.lm};
    hyp.joint = entry.joint;
    beam.hyps.push_back(std::move(hyp));
  }
  return beam;
}

}  // namespace

std::vector<std::string> validate_trace(const SessionTrace& trace) {
  std::vector<std::string> issues;
  auto fail = [&issues](const std::string& msg) { issues.push_back(msg); };

  const TraceHeader& h = trace.header;
  if (h.trace_version != kTraceVersion) fail("unsupported trace_version");
  if (h.k != kWaitForever && h.k < 1) fail("header k must be >= 1");
  if (h.chunk_frames <= 0) fail("header chunk_frames must be positive");
  if (h.downsample_rate <= 0) fail("header downsample_rate must be positive");
  if (h.beam_size < 1) fail("header beam_size must be >= 1");
  if (h.lookahead_frames < 0) fail("header lookahead_frames negative");
  if (!trace.has_summary) fail("trace missing summary event");

  const std::int64_t chunk_ms =
      static_cast<std::int64_t>(h.chunk_frames) * 10;

  int next_chunk = 1;
  int last_step_j = 0;
  int phi_lcp_env = 0;
  int phi_sh_env = 0;
  bool have_step = false;
  int last_phi_lcp = 0;
  int last_phi_sh = 0;
  int commits_seen = 0;
  std::int64_t last_source_ms = 0;
  std::int64_t arrived_ms = 0;
  bool saw_tail_commit = false;
  std::vector<TokenId> committed;

  // Index of the last chunk event, to distinguish tail commits.
  std::size_t last_chunk_pos = 0;
  bool any_chunk = false;
  for (std::size_t idx = 0; idx < trace.events.size(); ++idx) {
    if (std::holds_alternative<ChunkEvent>(trace.events[idx])) {
      last_chunk_pos = idx;
      any_chunk = true;
    }
  }
  if (!any_chunk) fail("trace has no chunk events");

  for (std::size_t idx = 0; idx < trace.events.size(); ++idx) {
    const TraceEvent& event = trace.events[idx];
    if (const auto* chunk = std::get_if<ChunkEvent>(&event)) {
      if (chunk->i != next_chunk) {
        fail("chunk index " + std::to_string(chunk->i) + " out of order");
      }
      if (chunk->arrival_ms !=
          static_cast<std::int64_t>(chunk->i) * chunk_ms) {
        fail("chunk " + std::to_string(chunk->i) + " arrival_ms mismatch");
      }
      if (chunk->valid_frames < 1 || chunk->valid_frames > h.chunk_frames) {
        fail("chunk " + std::to_string(chunk->i) + " valid_frames out of range");
      }
      if (chunk->wall_compute_ms < 0) {
        fail("chunk " + std::to_string(chunk->i) + " negative wall_compute_ms");
      }
      arrived_ms = chunk->arrival_ms;
      ++next_chunk;
    } else if (const auto* step = std::get_if<AsrStepEvent>(&event)) {
      if (step->j <= last_step_j) {
        fail("asr_step j " + std::to_string(step->j) + " not increasing");
      }
      last_step_j = step->j;
      if (step->beam.empty()) {
        fail("asr_step " + std::to_string(step->j) + " has empty beam");
      } else {
        Beam beam = snapshot_to_beam(*step);
        if (phi_lcp(beam) != step->phi_lcp_raw) {
          fail("asr_step " + std::to_string(step->j) +
               " phi_lcp_raw does not match beam snapshot");
        }
        if (phi_sh(beam) != step->phi_sh_raw) {
          fail("asr_step " + std::to_string(step->j) +
               " phi_sh_raw does not match beam snapshot");
        }
        for (std::size_t b = 1; b < beam.hyps.size(); ++b) {
          if (beam.hyps[b - 1].joint < beam.hyps[b].joint) {
            fail("asr_step " + std::to_string(step->j) +
                 " beam not sorted by joint score");
            break;
          }
        }
        if (static_cast<int>(beam.hyps.size()) > h.beam_size) {
          fail("asr_step " + std::to_string(step->j) + " beam exceeds width");
        }
      }
      if (step->phi_lcp_raw > step->phi_sh_raw) {
        fail("asr_step " + std::to_string(step->j) + " phi_lcp_raw > phi_sh_raw");
      }
      phi_lcp_env = std::max(phi_lcp_env, step->phi_lcp_raw);
      phi_sh_env = std::max(phi_sh_env, step->phi_sh_raw);
      if (step->phi_lcp != phi_lcp_env) {
        fail("asr_step " + std::to_string(step->j) +
             " enforced phi_lcp is not the running max of raw values");
      }
      if (step->phi_sh != phi_sh_env) {
        fail("asr_step " + std::to_string(step->j) +
             " enforced phi_sh is not the running max of raw values");
      }
      if (step->phi_lcp < last_phi_lcp || step->phi_sh < last_phi_sh) {
        fail("asr_step " + std::to_string(step->j) + " enforced phi decreased");
      }
      if (step->phi_lcp > step->phi_sh) {
        fail("asr_step " + std::to_string(step->j) + " enforced phi_lcp > phi_sh");
      }
      last_phi_lcp = step->phi_lcp;
      last_phi_sh = step->phi_sh;
      if (step->wall_compute_ms < 0) {
        fail("asr_step " + std::to_string(step->j) + " negative wall_compute_ms");
      }
      have_step = true;
    } else {
      const auto& commit = std::get<CommitEvent>(event);
      if (commit.t != commits_seen + 1) {
        fail("commit t " + std::to_string(commit.t) + " not strictly increasing");
      }
      commits_seen = commit.t;
      committed.push_back(commit.token);
      if (commit.source_consumed_ms < last_source_ms) {
        fail("commit " + std::to_string(commit.t) +
             " source_consumed_ms decreased");
      }
      last_source_ms = commit.source_consumed_ms;
      if (commit.source_consumed_ms > arrived_ms) {
        fail("commit " + std::to_string(commit.t) +
             " consumed source beyond arrived chunks");
      }
      if (commit.source_consumed_ms <= 0) {
        fail("commit " + std::to_string(commit.t) +
             " source_consumed_ms not positive");
      }
      if (commit.wall_compute_ms < 0) {
        fail("commit " + std::to_string(commit.t) + " negative wall_compute_ms");
      }
      if (commit.tail) {
        saw_tail_commit = true;
        if (any_chunk && idx < last_chunk_pos) {
          fail("commit " + std::to_string(commit.t) +
               " marked tail before the final chunk");
        }
      } else {
        if (saw_tail_commit) {
          fail("commit " + std::to_string(commit.t) +
               " non-tail commit after a tail commit");
        }
        if (!have_step) {
          fail("commit " + std::to_string(commit.t) +
               " has no preceding asr_step");
        } else {
          const int phi =
              h.policy == PolicyKind::kLcp ? last_phi_lcp : last_phi_sh;
          const int t_before = commit.t - 1;
          if (!should_commit(phi, h.k, t_before)) {
            fail("commit " + std::to_string(commit.t) +
                 " violates trigger: phi=" + std::to_string(phi) +
                 " k=" + (h.k == kWaitForever ? std::string("inf")
                                              : std::to_string(h.k)) +
                 " t=" + std::to_string(t_before));
          }
        }
      }
    }
  }

  if (trace.has_summary) {
    const SummaryEvent& s = trace.summary;
    if (s.total_source_ms != static_cast<std::int64_t>(s.n_frames) * 10) {
      fail("summary total_source_ms does not equal n_frames * 10");
    }
    if (s.translation != committed) {
      fail("summary translation does not match committed tokens");
    }
    if (last_source_ms > s.total_source_ms) {
      fail("commit consumed more source than the stream contains");
    }
    const int final_phi =
        h.policy == PolicyKind::kLcp ? last_phi_lcp : last_phi_sh;
    if (have_step && s.phi_final != final_phi) {
      fail("summary phi_final does not match last enforced phi");
    }
    if (s.total_wall_ms < 0) fail("summary negative total_wall_ms");
  }

  return issues;
}

}  // namespace simulst
