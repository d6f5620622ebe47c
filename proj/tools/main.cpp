#include <iostream>

#include <CLI11.hpp>

#include "msdiar/cli.hpp"

int main(int argc, char** argv) {
  using namespace msdiar::cli;
  CLI::App app{"Multi-stage streaming speaker clustering"};
  app.require_subcommand(1);

  DiarizeArgs diarize;
  auto* d = app.add_subcommand("diarize", "Cluster an embedding stream and write RTTM");
  d->add_option("--input", diarize.input, "JSON Lines embeddings")->required();
  d->add_option("--config", diarize.config, "Clustering config file");
  d->add_option("--out-rttm", diarize.out_rttm, "Output RTTM path")->required();
  d->add_option("--trace", diarize.trace, "Per-step trace CSV");
  d->add_flag("--stable-labels", diarize.stable_labels, "Keep labels stable across steps");
  d->add_option("--file-id", diarize.file_id, "RTTM file id (default: input stem)");

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Score a hypothesis RTTM against a reference");
  s->add_option("--ref", score.ref, "Reference RTTM")->required();
  s->add_option("--hyp", score.hyp, "Hypothesis RTTM")->required();
  s->add_option("--uem", score.uem, "UEM file");
  s->add_option("--collar", score.collar, "Collar in seconds")->capture_default_str();
  s->add_option("--merge-gap", score.merge_gap, "Same-speaker merge gap")->capture_default_str();
  s->add_flag("--json", score.json, "Emit JSON");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Per-step operation counts at checkpoints");
  b->add_option("--config", bench.config, "Clustering config file");
  b->add_option("--checkpoints", bench.checkpoints, "Comma-separated N values")
      ->capture_default_str();
  b->add_option("--stream", bench.stream, "Embeddings (.jsonl) or simulation spec")->required();

  SynthArgs synth;
  auto* y = app.add_subcommand("synth", "Generate a synthetic stream and reference RTTM");
  y->add_option("--spec", synth.spec, "Simulation spec file")->required();
  y->add_option("--out", synth.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*d) return cmd_diarize(diarize, std::cout, std::cerr);
  if (*s) return cmd_score(score, std::cout, std::cerr);
  if (*b) return cmd_bench(bench, std::cout, std::cerr);
  return cmd_synth(synth, std::cout, std::cerr);
}
