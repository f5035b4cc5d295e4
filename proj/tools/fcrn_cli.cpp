/* Copyright (c) 2026 The FCRN Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcrn/checkpoint.hpp"
#include "fcrn/ctc.hpp"
#include "fcrn/decoder.hpp"
#include "fcrn/error.hpp"
#include "fcrn/eval.hpp"
#include "fcrn/ink.hpp"
#include "fcrn/langmodel.hpp"
#include "fcrn/model.hpp"
#include "fcrn/receptive_field.hpp"
#include "fcrn/synth.hpp"
#include "fcrn/trainer.hpp"

namespace fs = std::filesystem;
using namespace fcrn;

namespace {

struct RunConfig {
  std::uint64_t seed = 1;
  int symbols = 10;
  int sig_level = 2;
  int window_radius = 4;
  std::string preset = "desk";
  std::string lm_path;
  DecodeConfig decode;
};

struct SynthArgs {
  std::size_t lines = 100;
  int order = 3;
  int min_length = 3;
  int max_length = 8;
  std::string ink;
  std::string corpus;
};

struct FeaturizeArgs {
  std::string ink;
  std::string out_dir;
  std::size_t limit = 1;
};

struct TrainArgs {
  std::string ink;
  std::string model;
  std::string log;
  std::size_t iterations = 1000;
  std::size_t batch = 8;
  double learning_rate = 1.0;
  int threads = 1;
};

struct DecodeArgs {
  std::string model;
  std::string ink;
  std::string out;
};

struct EvalArgs {
  std::string ref;
  std::string hyp;
  std::string out;
};

struct LmArgs {
  std::string corpus;
  std::string out;
  int order = 3;
  std::string smoothing = "katz";
  double k = 1.0;
};

// FNV-1a over the canonical option dump.
std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) throw Error(std::string(what) + " not found: " + path);
}

// Writes through a sibling temporary so a failed command leaves no partial file.
template <typename Fn>
void write_atomically(const fs::path& path, Fn&& fill) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    try {
      fill(out);
    } catch (...) {
      out.close();
      fs::remove(tmp);
      throw;
    }
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error("write failed for " + path.string());
    }
  }
  fs::rename(tmp, path);
}

int cmd_synth(const RunConfig& cfg, const SynthArgs& args) {
  if (args.corpus.empty() && args.ink.empty()) throw ConfigError("synth needs --corpus and/or --ink");
  CorpusOptions opts{cfg.symbols, args.min_length, args.max_length};
  MarkovSource source(cfg.symbols, args.order);
  Rng rng(mix_seed(cfg.seed, 0x5e7));
  std::vector<Label> labels;
  labels.reserve(args.lines);
  for (std::size_t i = 0; i < args.lines; ++i) {
    const int len = opts.min_length + static_cast<int>(rng.below(opts.max_length - opts.min_length + 1));
    labels.push_back(source.sample_line(rng, len));
  }
  const auto alphabet = Alphabet::make_default(cfg.symbols);
  if (!args.corpus.empty()) save_corpus(args.corpus, labels, alphabet);
  if (!args.ink.empty()) save_ink(args.ink, synth_lines(labels, mix_seed(cfg.seed, 0x1e)), alphabet);
  std::cout << "synthesized " << labels.size() << " lines\n";
  return 0;
}

// One plain-text PGM per channel, values mapped linearly from [min, max].
void write_pgm(const fs::path& path, const FeatureMaps& maps, int c) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int y = 0; y < maps.height(); ++y) {
    for (int x = 0; x < maps.width(); ++x) {
      const double v = maps.at(c, y, x);
      if (first || v < lo) lo = v;
      if (first || v > hi) hi = v;
      first = false;
    }
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "P2\n# channel " << c << " min " << format_number(lo) << " max " << format_number(hi) << '\n';
  out << maps.width() << ' ' << maps.height() << "\n255\n";
  for (int y = 0; y < maps.height(); ++y) {
    for (int x = 0; x < maps.width(); ++x) {
      const int g = hi > lo ? static_cast<int>(std::lround(255.0 * (maps.at(c, y, x) - lo) / (hi - lo))) : 0;
      out << g << (x + 1 == maps.width() ? '\n' : ' ');
    }
  }
}

int cmd_featurize(const RunConfig& cfg, const FeaturizeArgs& args) {
  require_file(args.ink, "ink file");
  if (args.out_dir.empty()) throw ConfigError("missing --out directory");
  const auto alphabet = Alphabet::make_default(cfg.symbols);
  const auto samples = load_ink(args.ink, alphabet);
  const int height = architecture_preset(cfg.preset).height;
  Featurizer featurize{RasterOptions{cfg.sig_level, cfg.window_radius, height, 0}, 1};
  fs::create_directories(args.out_dir);
  const std::size_t n = std::min(args.limit, samples.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto maps = featurize(samples[i]);
    for (int c = 0; c < maps.channels(); ++c) {
      write_pgm(fs::path(args.out_dir) / ("line" + std::to_string(i) + "_c" + std::to_string(c) + ".pgm"), maps, c);
    }
    std::cout << "line " << i << ": " << maps.channels() << "x" << maps.height() << "x" << maps.width() << '\n';
  }
  return 0;
}

int cmd_train(const RunConfig& cfg, const TrainArgs& args) {
  require_file(args.ink, "ink file");
  if (args.model.empty()) throw ConfigError("missing --model output path");
  const auto alphabet = Alphabet::make_default(cfg.symbols);
  const auto samples = load_ink(args.ink, alphabet);
  const auto arch_cfg = architecture_preset(cfg.preset);
  Model model(build_architecture(arch_cfg, alphabet.num_labels()), static_cast<int>(signature_dim(cfg.sig_level)),
              mix_seed(cfg.seed, 0x10));
  const auto featurizer = make_featurizer(model, cfg.sig_level, cfg.window_radius, arch_cfg.height);

  std::ofstream log;
  if (!args.log.empty()) {
    log.open(args.log);
    if (!log) throw Error("cannot write " + args.log);
  }
  TrainConfig tc;
  tc.iterations = args.iterations;
  tc.batch_size = args.batch;
  tc.seed = mix_seed(cfg.seed, 0x7a);
  tc.optimizer.learning_rate = args.learning_rate;
  tc.threads = args.threads;
  tc.on_iteration = [&](const IterationRecord& r) {
    if (log.is_open()) log << r.iteration << ' ' << format_number(r.loss) << ' ' << r.used << '\n';
  };
  const auto result = train(model, samples, featurizer, tc);

  CheckpointMeta meta;
  for (int i = 1; i <= alphabet.num_symbols(); ++i) meta.alphabet.push_back(alphabet.name(i));
  meta.signature_level = cfg.sig_level;
  meta.window_radius = cfg.window_radius;
  meta.height = arch_cfg.height;
  meta.seed = cfg.seed;
  meta.iteration = result.loss_trace.size();
  save_checkpoint(args.model, model, meta);
  std::cout << "trained " << result.loss_trace.size() << " iterations";
  if (!result.loss_trace.empty()) std::cout << ", final loss " << format_number(result.loss_trace.back());
  std::cout << ", skipped " << result.skipped_samples << " samples\n";
  if (result.diverged) {
    std::cerr << "warning: training diverged; parameters restored to the last finite step\n";
  }
  return 0;
}

int cmd_decode(const RunConfig& cfg, const DecodeArgs& args, bool sig_level_given) {
  require_file(args.model, "checkpoint");
  require_file(args.ink, "ink file");
  if (args.out.empty()) throw ConfigError("missing --out hypothesis path");
  auto ckpt = load_checkpoint(args.model);
  if (sig_level_given && ckpt.meta.signature_level != cfg.sig_level) {
    throw ConfigError("signature level " + std::to_string(cfg.sig_level) + " does not match the checkpoint's " +
                      std::to_string(ckpt.meta.signature_level));
  }
  const Alphabet alphabet(ckpt.meta.alphabet);
  const auto samples = load_ink(args.ink, alphabet);
  std::optional<NGramModel> lm;
  std::optional<LmScorer> scorer;
  if (!cfg.lm_path.empty()) {
    require_file(cfg.lm_path, "language model");
    lm.emplace(load_arpa(cfg.lm_path));
    scorer.emplace(*lm, alphabet);
  }
  const auto featurizer =
      make_featurizer(ckpt.model, ckpt.meta.signature_level, ckpt.meta.window_radius, ckpt.meta.height);
  const auto posteriors = infer(ckpt.model, samples, featurizer);
  write_atomically(args.out, [&](std::ostream& out) {
    for (const auto& post : posteriors) {
      const auto labels = scorer || cfg.decode.beam_width > 1
                              ? beam_search(post, scorer ? &*scorer : nullptr, cfg.decode).best.labels
                              : greedy_decode(post);
      out << alphabet.format(labels) << '\n';
    }
  });
  std::cout << "decoded " << posteriors.size() << " lines\n";
  return 0;
}

// References come from an ink file's labels or a plain corpus file.
std::vector<Label> load_references(const std::string& path, const Alphabet& alphabet) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  if (first.rfind("LABEL", 0) == 0) {
    std::vector<Label> out;
    for (auto& s : load_ink(path, alphabet)) out.push_back(std::move(s.label));
    return out;
  }
  return fcrn::load_transcriptions(path, alphabet);
}

int cmd_eval(const RunConfig& cfg, const EvalArgs& args, const std::string& hash) {
  require_file(args.ref, "reference file");
  require_file(args.hyp, "hypothesis file");
  const auto alphabet = Alphabet::make_default(cfg.symbols);
  const auto refs = load_references(args.ref, alphabet);
  const auto hyps = fcrn::load_transcriptions(args.hyp, alphabet);
  if (refs.size() != hyps.size()) {
    throw ConfigError("reference has " + std::to_string(refs.size()) + " lines but hypothesis has " +
                      std::to_string(hyps.size()));
  }
  std::vector<TranscriptionPair> pairs;
  for (std::size_t i = 0; i < refs.size(); ++i) pairs.push_back({refs[i], hyps[i]});
  const auto report = evaluate(pairs);
  if (args.out.empty()) {
    write_report(std::cout, report, hash);
  } else {
    write_atomically(args.out, [&](std::ostream& out) { write_report(out, report, hash); });
    std::printf("CR %.2f AR %.2f\n", 100.0 * report.rates.cr, 100.0 * report.rates.ar);
  }
  return 0;
}

int cmd_rf(const RunConfig& cfg) {
  const auto arch_cfg = architecture_preset(cfg.preset);
  const auto chain = spatial_layers(build_architecture(arch_cfg, Alphabet::make_default(cfg.symbols).num_labels()));
  for (const auto& row : receptive_field_table(chain)) {
    std::cout << to_string(row.layer) << "  field " << row.field.height << 'x' << row.field.width << "  jump "
              << row.jump.h << 'x' << row.jump.w << '\n';
  }
  const auto rf = receptive_field(chain);
  std::cout << "receptive field " << rf.height << 'x' << rf.width << '\n';
  return 0;
}

int cmd_lm(const RunConfig& cfg, const LmArgs& args) {
  require_file(args.corpus, "corpus");
  if (args.out.empty()) throw ConfigError("missing --out ARPA path");
  SmoothingConfig smoothing;
  if (args.smoothing == "katz") {
    smoothing.kind = Smoothing::katz;
  } else if (args.smoothing == "addk") {
    smoothing.kind = Smoothing::addk;
    smoothing.k = args.k;
  } else {
    throw ConfigError("unknown smoothing " + args.smoothing);
  }
  const auto alphabet = Alphabet::make_default(cfg.symbols);
  const auto model = train_ngram(load_corpus(args.corpus, alphabet), alphabet, args.order, smoothing);
  write_atomically(args.out, [&](std::ostream& out) { write_arpa(out, model); });
  std::cout << "wrote " << args.order << "-gram model\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online handwriting line recognition toolkit"};
  app.set_config("--config", "", "Declarative config file (TOML/INI); flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  app.add_option("--symbols", cfg.symbols, "Alphabet size |C|")->check(CLI::Range(1, Alphabet::kMaxSymbols))
      ->capture_default_str();
  auto* sig_opt = app.add_option("--sig-level", cfg.sig_level, "Signature truncation level")
                      ->check(CLI::Range(0, 3))->capture_default_str();
  app.add_option("--window-radius", cfg.window_radius, "Signature window radius in points")->capture_default_str();
  app.add_option("--preset", cfg.preset, "Architecture preset")
      ->check(CLI::IsMember({"full", "desk", "compact", "micro"}))->capture_default_str();
  app.add_option("--lm", cfg.lm_path, "ARPA language model for decoding");
  app.add_option("--lm-weight", cfg.decode.lm_weight, "LM weight lambda")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--beam", cfg.decode.beam_width, "Beam width N; 1 without --lm is naive decoding")
      ->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threshold", cfg.decode.threshold, "Candidate posterior threshold")->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--length-bonus", cfg.decode.length_bonus, "Per-symbol score bonus")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic ink lines and their label corpus");
  synth->add_option("--lines", synth_args.lines, "Number of lines")->capture_default_str();
  synth->add_option("--order", synth_args.order, "Order of the Markov text source")->check(CLI::Range(1, 4))
      ->capture_default_str();
  synth->add_option("--min-length", synth_args.min_length, "Shortest line in symbols")->capture_default_str();
  synth->add_option("--max-length", synth_args.max_length, "Longest line in symbols")->capture_default_str();
  synth->add_option("--ink", synth_args.ink, "Ink output path");
  synth->add_option("--corpus", synth_args.corpus, "Label corpus output path");

  FeaturizeArgs feat_args;
  auto* featurize = app.add_subcommand("featurize", "Dump signature feature maps as PGM images");
  featurize->add_option("--ink", feat_args.ink, "Ink input")->required();
  featurize->add_option("--out", feat_args.out_dir, "Output directory")->required();
  featurize->add_option("--limit", feat_args.limit, "Number of lines to dump")->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model with CTC and AdaDelta");
  train_cmd->add_option("--ink", train_args.ink, "Training ink")->required();
  train_cmd->add_option("--model", train_args.model, "Checkpoint output path")->required();
  train_cmd->add_option("--log", train_args.log, "Per-iteration loss log");
  train_cmd->add_option("--iterations", train_args.iterations, "Optimizer steps")->capture_default_str();
  train_cmd->add_option("--batch", train_args.batch, "Lines per step")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--learning-rate", train_args.learning_rate, "AdaDelta step scale")->capture_default_str();
  train_cmd->add_option("--threads", train_args.threads, "Worker threads per batch")->check(CLI::PositiveNumber)->capture_default_str();

  DecodeArgs decode_args;
  auto* decode = app.add_subcommand("decode", "Transcribe ink with a trained checkpoint");
  decode->add_option("--model", decode_args.model, "Checkpoint")->required();
  decode->add_option("--ink", decode_args.ink, "Ink input")->required();
  decode->add_option("--out", decode_args.out, "Hypothesis output, one line per sample")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Correct rate and accuracy rate of hypotheses");
  eval->add_option("--ref", eval_args.ref, "Reference ink or corpus")->required();
  eval->add_option("--hyp", eval_args.hyp, "Hypothesis file")->required();
  eval->add_option("--out", eval_args.out, "Report path; stdout when omitted");

  auto* rf = app.add_subcommand("rf", "Receptive-field table of the configured architecture");

  LmArgs lm_args;
  auto* lm = app.add_subcommand("lm", "Train a character n-gram model and write it as ARPA");
  lm->add_option("--corpus", lm_args.corpus, "Label corpus")->required();
  lm->add_option("--out", lm_args.out, "ARPA output path")->required();
  lm->add_option("--order", lm_args.order, "N-gram order")->check(CLI::Range(1, 3))->capture_default_str();
  lm->add_option("--smoothing", lm_args.smoothing)->check(CLI::IsMember({"katz", "addk"}))->capture_default_str();
  lm->add_option("-k", lm_args.k, "Additive constant for addk")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(cfg, synth_args);
    if (featurize->parsed()) return cmd_featurize(cfg, feat_args);
    if (train_cmd->parsed()) return cmd_train(cfg, train_args);
    if (decode->parsed()) return cmd_decode(cfg, decode_args, sig_opt->count() > 0);
    if (eval->parsed()) {
      std::ostringstream canon;
      canon << "ref=" << fs::path(eval_args.ref).filename().string()
            << " hyp=" << fs::path(eval_args.hyp).filename().string() << " symbols=" << cfg.symbols;
      return cmd_eval(cfg, eval_args, config_hash(canon.str()));
    }
    if (rf->parsed()) return cmd_rf(cfg);
    if (lm->parsed()) return cmd_lm(cfg, lm_args);
  } catch (const std::exception& e) {
    std::cerr << "fcrn: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
