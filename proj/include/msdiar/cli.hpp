#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msdiar/metrics.hpp"
#include "msdiar/session.hpp"

namespace msdiar::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kDegenerateScore = 2;

struct DiarizeArgs {
  std::string input;
  std::string config;  // empty: defaults
  std::string out_rttm;
  std::string trace;   // empty: no trace
  bool stable_labels = false;
  std::string file_id;  // empty: input file stem
};

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  std::string uem;
  double collar = 0.25;
  double merge_gap = 0.01;
  bool json = false;
};

struct BenchArgs {
  std::string config;
  std::string checkpoints = "100,500,2000";
  std::string stream;  // .jsonl embeddings, anything else a simulation spec
};

struct SynthArgs {
  std::string spec;
  std::string out;
};

int cmd_diarize(const DiarizeArgs& args, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

// Consecutive records become RTTM segments labelled "spk<label>"; abutting
// segments with the same label are merged.
std::vector<RttmSegment> labeling_to_rttm(const std::vector<EmbeddingRecord>& records,
                                          const SpeakerLabeling& labeling,
                                          const std::string& file_id);

// Pushes every record, optionally keeping display labels stable between
// steps. Returns the final (displayed) labeling and the trace.
SessionResult run_session(const ClusteringConfig& config,
                          const std::vector<EmbeddingRecord>& records, bool stable_labels);

std::string trace_csv(const std::vector<StepTrace>& trace);

}  // namespace msdiar::cli
