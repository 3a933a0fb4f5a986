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
// Command line front end.
//
//   gen-corpus    synthetic speech-like corpus with full ground truth
//   simulate      one streaming session -> JSONL trace (validated)
//   evaluate      traces + references -> latency/quality report JSON
//   sweep         policy x k x chunk grid -> CSV rows, one per cell
//   oracle-check  brute-force cross-checks of the incremental engine
//
// Exit codes: 0 success, 1 runtime failure or invariant violation, 2 usage
// error. A JSON config file (--config) supplies defaults for any flag of the
// subcommand; flags given explicitly always win.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simulst/corpus.hpp"
#include "simulst/ctc_prefix.hpp"
#include "simulst/hypothesis.hpp"
#include "simulst/metrics.hpp"
#include "simulst/oracles.hpp"
#include "simulst/policy.hpp"
#include "simulst/rng.hpp"
#include "simulst/simul_st.hpp"
#include "simulst/streaming_asr.hpp"
#include "simulst/toy_models.hpp"
#include "simulst/trace.hpp"
#include "simulst/vocab.hpp"

using namespace simulst;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Raised for bad flag or config values discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --config merging: a flat JSON object whose keys are long flag names
// (underscores and dashes are interchangeable) is turned into synthesized
// flags appended to argv before parsing, so a flag given explicitly always
// beats its config value. Arrays feed multi-value options element by element.

std::string config_scalar(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_structured()) {
    throw UsageError("config values must be scalars or flat arrays");
  }
  return value.dump();
}

std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot read config file: " + config_path);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!parsed.is_object()) throw UsageError("config file must hold a JSON object");

  std::set<std::string> given;
  for (const std::string& arg : args) {
    if (arg.rfind("--", 0) == 0) {
      const std::size_t eq = arg.find('=');
      given.insert(eq == std::string::npos ? arg.substr(2) : arg.substr(2, eq - 2));
    }
  }
  // Flags whose config value must also yield to an explicitly given partner.
  static const std::map<std::string, std::string> kExclusive = {{"utt", "index"},
                                                                {"index", "utt"}};
  for (const auto& [key, value] : parsed.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config" || given.count(name) > 0) continue;
    const auto partner = kExclusive.find(name);
    if (partner != kExclusive.end() && given.count(partner->second) > 0) continue;
    args.push_back("--" + name);
    if (value.is_array()) {
      if (value.empty()) throw UsageError("config key '" + key + "' has an empty array");
      for (const auto& element : value) args.push_back(config_scalar(element));
    } else {
      args.push_back(config_scalar(value));
    }
  }
  return args;
}

int parse_k(const std::string& text) {
  if (text == "inf") return kWaitForever;
  try {
    std::size_t used = 0;
    const int k = std::stoi(text, &used);
    if (used == text.size() && k >= 1) return k;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid k '" + text + "' (want a positive integer or 'inf')");
}

std::string k_to_string(int k) {
  return k == kWaitForever ? "inf" : std::to_string(k);
}

PolicyKind parse_policy(const std::string& text) {
  try {
    return policy_from_string(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Fixed-width decimal for CSV cells; byte-stable across runs and platforms.
std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --- corpus plumbing -------------------------------------------------------

struct LoadedCorpus {
  std::filesystem::path dir;
  CorpusManifest manifest;
  ToyModelSpec spec;
};

LoadedCorpus open_corpus(const std::string& dir) {
  LoadedCorpus corpus;
  corpus.dir = dir;
  const std::filesystem::path manifest_path = corpus.dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    throw std::runtime_error("no manifest.json under " + dir);
  }
  corpus.manifest = read_manifest(manifest_path.string());
  corpus.spec = load_model_spec((corpus.dir / corpus.manifest.model_file).string());
  return corpus;
}

// --- shared session flags --------------------------------------------------

enum class ModelChoice { kTabular, kPrototype };

struct SessionFlags {
  int beam_size = 5;
  int downsample_rate = 4;
  int lookahead = 10;
  double lambda_ctc = 0.3;
  double lambda_att = 0.7;
  double lambda_lm = 0.3;
  double tail_factor = 1.5;
  int tail_offset = 10;
  int max_prefix_len = 256;
  std::uint64_t seed = 0;
  std::string model = "tabular";
  std::string lm = "bigram";
  std::string compute = "fixed";
};

void add_session_flags(CLI::App* cmd, SessionFlags* flags) {
  cmd->add_option("--beam-size", flags->beam_size, "Beam width b")->capture_default_str();
  cmd->add_option("--downsample-rate", flags->downsample_rate,
                  "Source frames per encoder state r")
      ->capture_default_str();
  cmd->add_option("--lookahead", flags->lookahead, "Encoder lookahead frames L")
      ->capture_default_str();
  cmd->add_option("--lambda-ctc", flags->lambda_ctc, "CTC weight in the joint score")
      ->capture_default_str();
  cmd->add_option("--lambda-att", flags->lambda_att, "Attention weight in the joint score")
      ->capture_default_str();
  cmd->add_option("--lambda-lm", flags->lambda_lm, "LM weight in the joint score")
      ->capture_default_str();
  cmd->add_option("--tail-factor", flags->tail_factor, "Tail decode cap factor")
      ->capture_default_str();
  cmd->add_option("--tail-offset", flags->tail_offset, "Tail decode cap offset")
      ->capture_default_str();
  cmd->add_option("--max-prefix-len", flags->max_prefix_len, "Hypothesis length cap")
      ->capture_default_str();
  cmd->add_option("--seed", flags->seed, "Session seed recorded in trace headers")
      ->capture_default_str();
  cmd->add_option("--model", flags->model, "Scorer family: tabular or prototype")
      ->capture_default_str();
  cmd->add_option("--lm", flags->lm, "Language model: bigram or uniform")
      ->capture_default_str();
  cmd->add_option("--compute", flags->compute, "Wall-clock accounting: fixed or measured")
      ->capture_default_str();
}

JointScoreWeights weights_of(const SessionFlags& flags) {
  JointScoreWeights weights;
  weights.lambda_ctc = flags.lambda_ctc;
  weights.lambda_att = flags.lambda_att;
  weights.lambda_lm = flags.lambda_lm;
  try {
    weights.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return weights;
}

ModelChoice model_of(const SessionFlags& flags) {
  if (flags.model == "tabular") return ModelChoice::kTabular;
  if (flags.model == "prototype") return ModelChoice::kPrototype;
  throw UsageError("unknown model '" + flags.model + "' (want tabular or prototype)");
}

LmKind lm_of(const SessionFlags& flags) {
  if (flags.lm == "bigram") return LmKind::kBigram;
  if (flags.lm == "uniform") return LmKind::kUniform;
  throw UsageError("unknown lm '" + flags.lm + "' (want bigram or uniform)");
}

ComputeModel compute_of(const SessionFlags& flags) {
  ComputeModel model;
  if (flags.compute == "fixed") {
    model.kind = ComputeModel::Kind::kFixed;
  } else if (flags.compute == "measured") {
    model.kind = ComputeModel::Kind::kMeasured;
  } else {
    throw UsageError("unknown compute model '" + flags.compute + "' (want fixed or measured)");
  }
  return model;
}

SessionConfig session_config_of(const SessionFlags& flags, int k, PolicyKind policy,
                                int chunk_frames, const std::string& utt_id) {
  SessionConfig config;
  config.k = k;
  config.policy = policy;
  config.chunk_frames = chunk_frames;
  config.downsample_rate = flags.downsample_rate;
  config.beam_size = flags.beam_size;
  config.weights = weights_of(flags);
  config.lookahead_frames = flags.lookahead;
  config.tail_factor = flags.tail_factor;
  config.tail_offset = flags.tail_offset;
  config.seed = flags.seed;
  config.compute = compute_of(flags);
  config.max_prefix_len = flags.max_prefix_len;
  config.utt_id = utt_id;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

ScorerBundle bundle_for(ModelChoice model, const SyntheticUtterance& utt,
                        const LoadedCorpus& corpus, const JointScoreWeights& weights,
                        const SessionFlags& flags) {
  const LmKind lm = lm_of(flags);
  if (model == ModelChoice::kTabular) {
    return make_tabular_bundle(utt, corpus.spec, corpus.manifest.config, weights,
                               flags.downsample_rate, flags.lookahead, lm);
  }
  return make_prototype_bundle(corpus.spec, corpus.manifest.config, weights,
                               flags.downsample_rate, flags.lookahead, lm);
}

// --- gen-corpus ------------------------------------------------------------

struct GenCorpusArgs {
  std::string out_dir;
  GeneratorConfig config;
  std::pair<int, int> tokens{6, 12};
  std::pair<int, int> duration{12, 20};
  std::pair<int, int> silence{4, 12};
};

int run_gen_corpus(GenCorpusArgs& args) {
  GeneratorConfig config = args.config;
  config.tokens_min = args.tokens.first;
  config.tokens_max = args.tokens.second;
  config.duration_min = args.duration.first;
  config.duration_max = args.duration.second;
  config.silence_min = args.silence.first;
  config.silence_max = args.silence.second;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const CorpusManifest manifest = generate_corpus(config, args.out_dir);
  std::cout << "wrote " << manifest.utterances.size() << " utterances to " << args.out_dir
            << "\n";
  return kExitOk;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string corpus_dir;
  std::string utt_id;
  int index = 0;
  std::string out_path;
  std::string k_text = "3";
  std::string policy_text = "sh";
  int chunk_frames = 48;
  SessionFlags flags;
};

int run_simulate(const SimulateArgs& args) {
  const LoadedCorpus corpus = open_corpus(args.corpus_dir);
  const UtteranceRecord* record = nullptr;
  if (!args.utt_id.empty()) {
    for (const UtteranceRecord& r : corpus.manifest.utterances) {
      if (r.id == args.utt_id) record = &r;
    }
    if (record == nullptr) {
      throw std::runtime_error("utterance '" + args.utt_id + "' not in manifest");
    }
  } else {
    const int n = static_cast<int>(corpus.manifest.utterances.size());
    if (args.index < 0 || args.index >= n) {
      throw UsageError("--index out of range (corpus has " + std::to_string(n) +
                       " utterances)");
    }
    record = &corpus.manifest.utterances[static_cast<std::size_t>(args.index)];
  }

  const SyntheticUtterance utt = load_utterance(corpus.dir.string(), *record);
  const SessionConfig config =
      session_config_of(args.flags, parse_k(args.k_text), parse_policy(args.policy_text),
                        args.chunk_frames, record->id);
  const ScorerBundle bundle =
      bundle_for(model_of(args.flags), utt, corpus, config.weights, args.flags);

  const SessionTrace trace = run_session(config, utt.frames, bundle);
  if (args.out_path.empty()) {
    write_trace(trace, std::cout);
  } else {
    save_trace(trace, args.out_path);
    std::cerr << "wrote trace to " << args.out_path << "\n";
  }
  const std::vector<std::string> violations = validate_trace(trace);
  for (const std::string& v : violations) {
    std::cerr << "invariant violation: " << v << "\n";
  }
  return violations.empty() ? kExitOk : kExitFailure;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string corpus_dir;
  std::vector<std::string> trace_paths;
  std::string trace_dir;
  std::string out_path;
};

int run_evaluate(const EvaluateArgs& args) {
  const LoadedCorpus corpus = open_corpus(args.corpus_dir);
  std::map<std::string, std::vector<TokenId>> references;
  for (const UtteranceRecord& record : corpus.manifest.utterances) {
    const SyntheticUtterance labels =
        read_labels_file((corpus.dir / record.labels_file).string());
    references[record.id] = labels.translation;
  }

  std::vector<std::string> paths = args.trace_paths;
  if (!args.trace_dir.empty()) {
    std::vector<std::string> found;
    for (const auto& entry : std::filesystem::directory_iterator(args.trace_dir)) {
      if (entry.path().extension() == ".jsonl") found.push_back(entry.path().string());
    }
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  if (paths.empty()) throw UsageError("no traces given (use --trace or --trace-dir)");

  std::vector<SessionTrace> traces;
  std::vector<std::vector<TokenId>> refs;
  bool sound = true;
  for (const std::string& path : paths) {
    SessionTrace trace = load_trace(path);
    for (const std::string& v : validate_trace(trace)) {
      std::cerr << path << ": invariant violation: " << v << "\n";
      sound = false;
    }
    const auto it = references.find(trace.header.utt_id);
    if (it == references.end()) {
      throw std::runtime_error("utterance '" + trace.header.utt_id + "' from " + path +
                               " not in corpus");
    }
    refs.push_back(it->second);
    traces.push_back(std::move(trace));
  }
  if (!sound) return kExitFailure;

  const std::string text = report_to_json(evaluate_sessions(traces, refs));
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out_path, text);
  }
  return kExitOk;
}

// --- sweep -------------------------------------------------------------------

struct SweepArgs {
  std::string corpus_dir;
  std::vector<std::string> k_texts{"3"};
  std::vector<std::string> policy_texts{"sh"};
  std::vector<int> chunk_list{48};
  std::string out_path;
  std::string trace_dir;
  SessionFlags flags;
};

int run_sweep(const SweepArgs& args) {
  const LoadedCorpus corpus = open_corpus(args.corpus_dir);
  if (corpus.manifest.utterances.empty()) throw std::runtime_error("corpus has no utterances");

  std::vector<int> ks;
  for (const std::string& text : args.k_texts) ks.push_back(parse_k(text));
  std::vector<PolicyKind> policies;
  for (const std::string& text : args.policy_texts) policies.push_back(parse_policy(text));
  for (int w : args.chunk_list) {
    if (w < 1) throw UsageError("invalid chunk-frames value " + std::to_string(w));
  }
  const ModelChoice model = model_of(args.flags);

  std::vector<SyntheticUtterance> utts;
  std::vector<std::vector<TokenId>> refs;
  for (const UtteranceRecord& record : corpus.manifest.utterances) {
    utts.push_back(load_utterance(corpus.dir.string(), record));
    refs.push_back(utts.back().translation);
  }
  if (!args.trace_dir.empty()) std::filesystem::create_directories(args.trace_dir);

  std::ostringstream csv;
  csv << "policy,k,w,al_ms,ca_al_ms,ap,bleu\n";
  for (PolicyKind policy : policies) {
    for (int k : ks) {
      for (int w : args.chunk_list) {
        std::vector<SessionTrace> traces;
        for (const SyntheticUtterance& utt : utts) {
          const SessionConfig config = session_config_of(args.flags, k, policy, w, utt.id);
          const ScorerBundle bundle =
              bundle_for(model, utt, corpus, config.weights, args.flags);
          SessionTrace trace = run_session(config, utt.frames, bundle);
          const std::vector<std::string> violations = validate_trace(trace);
          if (!violations.empty()) {
            for (const std::string& v : violations) {
              std::cerr << policy_to_string(policy) << " k=" << k_to_string(k) << " w=" << w
                        << " " << utt.id << ": invariant violation: " << v << "\n";
            }
            return kExitFailure;
          }
          if (!args.trace_dir.empty()) {
            const std::string name = policy_to_string(policy) + "_k" + k_to_string(k) +
                                     "_w" + std::to_string(w) + "_" + utt.id + ".jsonl";
            save_trace(trace, (std::filesystem::path(args.trace_dir) / name).string());
          }
          traces.push_back(std::move(trace));
        }
        const EvaluationReport report = evaluate_sessions(traces, refs);
        csv << policy_to_string(policy) << ',' << k_to_string(k) << ',' << w << ','
            << format_fixed(report.al_ms) << ',' << format_fixed(report.ca_al_ms) << ','
            << format_fixed(report.ap) << ',' << format_fixed(report.bleu) << "\n";
      }
    }
  }

  if (args.out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(args.out_path, csv.str());
  }
  return kExitOk;
}

// --- oracle-check ------------------------------------------------------------
// Self-contained stochastic suites over a raw alphabet (blank = 0, tokens
// 1..V) so the enumeration oracles stay tiny. Mirrors the unit-test stubs.

struct OracleCheckArgs {
  int ctc_instances = 500;
  int beam_instances = 100;
  int policy_samples = 1000;
  std::uint64_t seed = 2026;
};

LogDist hash_dist(std::uint64_t seed, const std::vector<TokenId>& prefix, int width) {
  std::uint64_t h = seed;
  for (TokenId id : prefix) h = h * 1000003 + static_cast<std::uint64_t>(id) + 1;
  Rng rng(mix_seed(h, 0x5eed));
  std::vector<double> mass(static_cast<std::size_t>(width));
  double total = 0.0;
  for (double& m : mass) {
    m = 0.05 + rng.uniform();
    total += m;
  }
  LogDist out(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) out[i] = std::log(mass[i] / total);
  return out;
}

std::vector<LogDist> random_posteriors(Rng& rng, int steps, int width) {
  std::vector<LogDist> table;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> mass(static_cast<std::size_t>(width));
    double total = 0.0;
    for (double& m : mass) {
      m = 0.05 + rng.uniform();
      total += m;
    }
    LogDist row(mass.size());
    for (std::size_t i = 0; i < mass.size(); ++i) row[i] = std::log(mass[i] / total);
    table.push_back(std::move(row));
  }
  return table;
}

struct TableCtcScorer : CtcScorer {
  std::vector<LogDist> table;
  std::vector<LogDist> frame_posteriors(const EncoderState& state, int from_step,
                                        int to_step) const override {
    if (from_step < 0 || to_step < from_step ||
        static_cast<std::size_t>(to_step) > state.hidden.size() ||
        static_cast<std::size_t>(to_step) > table.size()) {
      throw std::invalid_argument("state not yet available");
    }
    return {table.begin() + from_step, table.begin() + to_step};
  }
};

struct HashAttScorer : AttScorer {
  std::uint64_t seed = 1;
  int width = 4;
  LogDist logdist(const EncoderState&, const std::vector<TokenId>& prefix) const override {
    return hash_dist(seed, prefix, width);
  }
};

struct HashLmScorer : LmScorer {
  std::uint64_t seed = 2;
  int width = 4;
  LogDist logdist(const std::vector<TokenId>& prefix) const override {
    return hash_dist(seed, prefix, width);
  }
};

EncoderState fake_state(int steps) {
  EncoderState state;
  state.hidden.assign(static_cast<std::size_t>(steps), std::vector<double>());
  state.consumed_frames = static_cast<std::int64_t>(steps) * state.r;
  return state;
}

bool close(double a, double b, double tol = 1e-9) {
  if (a == b) return true;  // covers matching infinities
  return std::abs(a - b) <= tol;
}

void report_check(std::ostream& out, bool ok, const std::string& label) {
  out << (ok ? "[PASS] " : "[FAIL] ") << label << "\n";
}

// Incremental prefix scorer against direct alignment enumeration.
bool check_ctc_oracle(const OracleCheckArgs& args, std::ostream& out) {
  double worst = 0.0;
  for (int i = 0; i < args.ctc_instances; ++i) {
    Rng rng(mix_seed(args.seed, 0xc7c0000ULL + static_cast<std::uint64_t>(i)));
    const int vocab = static_cast<int>(rng.uniform_int(1, 4));
    const int steps = static_cast<int>(rng.uniform_int(1, 6));
    const auto table = random_posteriors(rng, steps, vocab + 1);

    const int len = static_cast<int>(rng.uniform_int(0, std::min(steps, 4)));
    std::vector<TokenId> prefix;
    std::vector<int> grow_steps;
    for (int t = 0; t < len; ++t) {
      prefix.push_back(static_cast<TokenId>(rng.uniform_int(1, vocab)));
      grow_steps.push_back(static_cast<int>(rng.uniform_int(1, steps)));
    }
    std::sort(grow_steps.begin(), grow_steps.end());

    // Extend one token at a time at a random step, like the search does.
    PrefixScoreState state = PrefixScoreState::initial();
    for (int t = 0; t < len; ++t) {
      state.advance(table, grow_steps[static_cast<std::size_t>(t)]);
      state = state.extended(table, prefix[static_cast<std::size_t>(t)]);
    }
    state.advance(table, steps);

    const double got_prefix = std::exp(state.log_prefix_prob());
    const double got_exact = std::exp(state.log_exact_prob());
    const double want_prefix = brute_force_prefix_prob(table, prefix);
    const double want_exact = brute_force_exact_prob(table, prefix);
    worst = std::max({worst, std::abs(got_prefix - want_prefix),
                      std::abs(got_exact - want_exact)});
  }
  const bool ok = worst <= 1e-9;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "ctc prefix/exact masses match alignment enumeration (%d instances, max "
                "|error| %.3e)",
                args.ctc_instances, worst);
  report_check(out, ok, detail);
  return ok;
}

// Unpruned streaming search against the level-by-level reference search.
bool check_beam_oracle(const OracleCheckArgs& args, std::ostream& out) {
  int mismatches = 0;
  for (int i = 0; i < args.beam_instances; ++i) {
    Rng rng(mix_seed(args.seed, 0xbea0000ULL + static_cast<std::uint64_t>(i)));
    const int vocab = static_cast<int>(rng.uniform_int(1, 3));
    const int steps = static_cast<int>(rng.uniform_int(1, 5));
    const int width = vocab + 1;
    const auto table = random_posteriors(rng, steps, width);

    std::vector<TokenId> candidates;
    for (TokenId c = 1; c <= vocab; ++c) candidates.push_back(c);

    JointScoreWeights weights{0.3, 0.7, 0.3};
    if (i % 3 == 1) weights = JointScoreWeights{0.5, 0.5, 0.0};
    if (i % 3 == 2) weights = JointScoreWeights{1.0, 0.0, 0.0};

    const auto att_seed = static_cast<std::uint64_t>(rng.uniform_int(0, 1 << 30));
    const auto lm_seed = static_cast<std::uint64_t>(rng.uniform_int(0, 1 << 30));
    auto ctc = std::make_shared<TableCtcScorer>();
    ctc->table = table;
    auto att = std::make_shared<HashAttScorer>();
    att->seed = att_seed;
    att->width = width;
    auto lm = std::make_shared<HashLmScorer>();
    lm->seed = lm_seed;
    lm->width = width;
    ScorerBundle bundle;
    bundle.ctc = ctc;
    bundle.asr_att = att;
    bundle.lm = lm;

    int b = 1;
    for (int s = 0; s < steps; ++s) b *= vocab + 1;
    BeamSearchConfig config;
    config.b = b;
    config.weights = weights;
    config.candidates = candidates;

    StreamingBeamSearch search(config, bundle);
    search.advance(fake_state(steps));
    const Beam got = search.snapshot();

    const std::vector<ReferenceHyp> want = exhaustive_reference_search(
        table,
        [&](const std::vector<TokenId>& prefix, int) {
          return hash_dist(att_seed, prefix, width);
        },
        [&](const std::vector<TokenId>& prefix) { return hash_dist(lm_seed, prefix, width); },
        candidates, steps, weights);

    bool match = got.hyps.size() == want.size() && !want.empty() &&
                 got.best().prefix == want.front().prefix &&
                 close(got.best().joint, want.front().joint);
    if (match) {
      std::map<std::vector<TokenId>, ComponentScores> expected;
      for (const ReferenceHyp& ref : want) expected.emplace(ref.prefix, ref.scores);
      for (const Hypothesis& hyp : got.hyps) {
        const auto it = expected.find(hyp.prefix);
        if (it == expected.end() || !close(hyp.scores.ctc, it->second.ctc) ||
            !close(hyp.scores.att, it->second.att) || !close(hyp.scores.lm, it->second.lm)) {
          match = false;
          break;
        }
        expected.erase(it);
      }
      match = match && expected.empty();
    }
    if (!match) ++mismatches;
  }
  const bool ok = mismatches == 0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "unpruned beam search equals the exhaustive reference (%d instances, %d "
                "mismatches)",
                args.beam_instances, mismatches);
  report_check(out, ok, detail);
  return ok;
}

// phi_lcp <= phi_sh on random beams plus the trigger predicate laws.
bool check_policy_laws(const OracleCheckArgs& args, std::ostream& out) {
  int violations = 0;
  for (int i = 0; i < args.policy_samples; ++i) {
    Rng rng(mix_seed(args.seed, 0x9010000ULL + static_cast<std::uint64_t>(i)));
    Beam beam;
    const int n = static_cast<int>(rng.uniform_int(1, 5));
    for (int h = 0; h < n; ++h) {
      Hypothesis hyp;
      const int len = static_cast<int>(rng.uniform_int(0, 6));
      for (int t = 0; t < len; ++t) {
        hyp.prefix.push_back(kNumReserved + static_cast<TokenId>(rng.uniform_int(0, 3)));
      }
      if (len > 0 && rng.uniform() < 0.2) hyp.prefix.push_back(kEosId);
      beam.hyps.push_back(std::move(hyp));
    }
    if (phi_lcp(beam) > phi_sh(beam)) ++violations;

    const int phi = static_cast<int>(rng.uniform_int(0, 12));
    const int k = static_cast<int>(rng.uniform_int(1, 8));
    const int t = static_cast<int>(rng.uniform_int(0, 12));
    if (should_commit(phi, k, t) != (phi - k >= t)) ++violations;
    if (should_commit(phi, kWaitForever, t)) ++violations;
  }
  const bool ok = violations == 0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "policy laws hold: phi_lcp <= phi_sh and trigger semantics (%d samples, %d "
                "violations)",
                args.policy_samples, violations);
  report_check(out, ok, detail);
  return ok;
}

int run_oracle_check(const OracleCheckArgs& args) {
  bool ok = true;
  ok &= check_ctc_oracle(args, std::cout);
  ok &= check_beam_oracle(args, std::cout);
  ok &= check_policy_laws(args, std::cout);
  std::cout << (ok ? "all oracle checks passed\n" : "oracle checks FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming simultaneous speech-to-text translation sandbox"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // Bound by every subcommand; read ahead of parsing by merge_config_args.
  std::string config_path;
  constexpr const char* kConfigHelp =
      "JSON file with defaults for this subcommand's flags (explicit flags win)";

  GenCorpusArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--n-utts", gen_args.config.n_utts, "Number of utterances")
      ->capture_default_str();
  gen->add_option("--vocab-size", gen_args.config.vocab_size, "Regular source tokens")
      ->capture_default_str();
  gen->add_option("--frame-dim", gen_args.config.frame_dim, "Feature dimensions per frame")
      ->capture_default_str();
  gen->add_option("--tokens", gen_args.tokens, "Tokens per utterance: min,max")
      ->delimiter(',');
  gen->add_option("--duration", gen_args.duration, "Frames per token: min,max")
      ->delimiter(',');
  gen->add_option("--silence-prob", gen_args.config.silence_prob,
                  "Chance of a silence gap between tokens")
      ->capture_default_str();
  gen->add_option("--silence", gen_args.silence, "Silence gap frames: min,max")
      ->delimiter(',');
  gen->add_option("--noise-sigma", gen_args.config.noise_sigma, "Frame noise sigma")
      ->capture_default_str();
  gen->add_option("--reorder-prob", gen_args.config.reorder_prob,
                  "Adjacent-pair reorder probability")
      ->capture_default_str();
  gen->add_option("--seed", gen_args.config.seed, "Corpus seed")->capture_default_str();
  gen->add_option("--config", config_path, kConfigHelp);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Run one streaming session");
  sim->add_option("--corpus", sim_args.corpus_dir, "Corpus directory")->required();
  CLI::Option* sim_index =
      sim->add_option("--index", sim_args.index, "Utterance index")->capture_default_str();
  sim->add_option("--utt", sim_args.utt_id, "Utterance id (overrides --index)")
      ->excludes(sim_index);
  sim->add_option("--out", sim_args.out_path, "Trace path (default: stdout)");
  sim->add_option("--k", sim_args.k_text, "Wait-k lag: positive integer or 'inf'")
      ->capture_default_str();
  sim->add_option("--policy", sim_args.policy_text, "Commit policy: lcp or sh")
      ->capture_default_str();
  sim->add_option("--chunk-frames", sim_args.chunk_frames, "Source frames per chunk w")
      ->capture_default_str();
  add_session_flags(sim, &sim_args.flags);
  sim->add_option("--config", config_path, kConfigHelp);

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand("evaluate", "Score traces against references");
  eval->add_option("--corpus", eval_args.corpus_dir, "Corpus directory with references")
      ->required();
  eval->add_option("--trace", eval_args.trace_paths, "Trace file (repeatable)");
  eval->add_option("--trace-dir", eval_args.trace_dir, "Directory of *.jsonl traces");
  eval->add_option("--out", eval_args.out_path, "Report path (default: stdout)");
  eval->add_option("--config", config_path, kConfigHelp);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid of sessions -> CSV");
  sweep->add_option("--corpus", sweep_args.corpus_dir, "Corpus directory")->required();
  sweep->add_option("--k", sweep_args.k_texts, "Comma list of wait-k lags ('inf' allowed)")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--policy", sweep_args.policy_texts, "Comma list of policies")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--chunk-frames", sweep_args.chunk_list, "Comma list of chunk sizes")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--out", sweep_args.out_path, "CSV path (default: stdout)");
  sweep->add_option("--trace-dir", sweep_args.trace_dir, "Keep per-session traces here");
  add_session_flags(sweep, &sweep_args.flags);
  sweep->add_option("--config", config_path, kConfigHelp);

  OracleCheckArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle-check", "Brute-force engine cross-checks");
  oracle->add_option("--ctc-instances", oracle_args.ctc_instances,
                     "Random CTC equivalence instances")
      ->capture_default_str();
  oracle->add_option("--beam-instances", oracle_args.beam_instances,
                     "Random beam exhaustiveness instances")
      ->capture_default_str();
  oracle->add_option("--policy-samples", oracle_args.policy_samples,
                     "Random policy-law samples")
      ->capture_default_str();
  oracle->add_option("--seed", oracle_args.seed, "Suite seed")->capture_default_str();
  oracle->add_option("--config", config_path, kConfigHelp);

  std::vector<std::string> args;
  try {
    args = merge_config_args(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes back to front

  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_gen_corpus(gen_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (eval->parsed()) return run_evaluate(eval_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (oracle->parsed()) return run_oracle_check(oracle_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
