#include "msdiar/cli.hpp"

#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>

#include "msdiar/costmodel.hpp"
#include "msdiar/embedding_io.hpp"
#include "msdiar/errors.hpp"
#include "msdiar/simgen.hpp"

namespace msdiar::cli {

namespace {

constexpr double kAbutTolerance = 1e-6;

ClusteringConfig load_config(const std::string& path) {
  if (path.empty()) return validate_config(ClusteringConfig{});
  try {
    return parse_config(read_text_file(path));
  } catch (const Error& e) {
    throw InvalidConfigError(path + ": " + e.what());
  }
}

std::vector<EmbeddingRecord> load_records(const std::string& path) {
  try {
    return parse_embeddings_jsonl(read_text_file(path));
  } catch (const Error& e) {
    throw InvalidRecordError(path + ": " + e.what());
  }
}

std::vector<RttmSegment> load_rttm(const std::string& path) {
  try {
    return parse_rttm(read_text_file(path));
  } catch (const Error& e) {
    throw InvalidRecordError(path + ": " + e.what());
  }
}

bool is_jsonl(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".jsonl" || ext == ".json";
}

}  // namespace

std::vector<RttmSegment> labeling_to_rttm(const std::vector<EmbeddingRecord>& records,
                                          const SpeakerLabeling& labeling,
                                          const std::string& file_id) {
  if (records.size() != labeling.size()) {
    throw SizeMismatchError("labeling size differs from record count");
  }
  std::vector<RttmSegment> out;
  int current = -1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const int label = labeling.labels[i];
    if (!out.empty() && label == current && r.start_time <= out.back().end() + kAbutTolerance) {
      out.back().duration = std::max(out.back().end(), r.end_time) - out.back().onset;
      continue;
    }
    out.push_back({file_id, 1, r.start_time, r.end_time - r.start_time,
                   "spk" + std::to_string(label)});
    current = label;
  }
  return out;
}

SessionResult run_session(const ClusteringConfig& config,
                          const std::vector<EmbeddingRecord>& records, bool stable_labels) {
  DiarizationSession session(config);
  SpeakerLabeling shown;
  for (const auto& r : records) {
    const SpeakerLabeling& current = session.push(r);
    shown = stable_labels ? stable_display_labels(shown, current) : current;
  }
  SessionResult result = session.finalize();
  result.labeling = shown;
  return result;
}

std::string trace_csv(const std::vector<StepTrace>& trace) {
  std::ostringstream out;
  out << "step,stage,num_speakers,total_ops\n";
  for (const auto& t : trace) {
    out << t.step << ',' << stage_name(t.stage) << ',' << t.num_speakers << ','
        << t.cost.total() << '\n';
  }
  return out.str();
}

int cmd_diarize(const DiarizeArgs& args, std::ostream& /*out*/, std::ostream& err) {
  try {
    const ClusteringConfig config = load_config(args.config);
    const auto records = load_records(args.input);
    if (records.empty()) throw EmptyInputError(args.input + ": no records");
    const std::string file_id =
        args.file_id.empty() ? std::filesystem::path(args.input).stem().string() : args.file_id;
    const SessionResult result = run_session(config, records, args.stable_labels);
    write_text_file(args.out_rttm, write_rttm(labeling_to_rttm(records, result.labeling, file_id)));
    if (!args.trace.empty()) write_text_file(args.trace, trace_csv(result.trace));
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  CorpusScore score;
  try {
    const auto ref = load_rttm(args.ref);
    const auto hyp = load_rttm(args.hyp);
    ScoringOptions options;
    options.collar = args.collar;
    options.merge_gap = args.merge_gap;
    if (args.collar < 0.0) throw InvalidConfigError("--collar must be non-negative");
    if (args.merge_gap < 0.0) throw InvalidConfigError("--merge-gap must be non-negative");
    if (!args.uem.empty()) {
      try {
        options.uem = parse_uem(read_text_file(args.uem));
      } catch (const Error& e) {
        throw InvalidRecordError(args.uem + ": " + e.what());
      }
    }
    try {
      score = score_corpus(ref, hyp, options);
    } catch (const NoScoredTimeError& e) {
      err << "error: " << e.what() << '\n';
      return kDegenerateScore;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  std::vector<std::pair<int, int>> counts;
  for (const auto& f : score.files) counts.emplace_back(f.reference_speakers, f.hypothesis_speakers);
  const SpeakerCountStats stats = speaker_count_stats(counts);
  if (args.json) {
    out << report_json(score, stats);
  } else {
    out << format_report(score.total) << format_count_stats(stats);
  }
  return kOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const ClusteringConfig config = load_config(args.config);
    const auto checkpoints = parse_checkpoints(args.checkpoints);
    std::vector<EmbeddingRecord> records;
    if (is_jsonl(args.stream)) {
      records = load_records(args.stream);
    } else {
      SimSpec spec;
      try {
        spec = parse_sim_spec(read_text_file(args.stream));
      } catch (const Error& e) {
        throw InvalidConfigError(args.stream + ": " + e.what());
      }
      records = generate(spec).records;
    }
    const CostReport report = sweep(config, records, checkpoints);
    out << to_csv(report);
    err << "# " << report.notes << '\n';
    std::istringstream echo(write_config(report.config));
    for (std::string line; std::getline(echo, line);) err << "# " << line << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  try {
    SimSpec spec;
    try {
      spec = parse_sim_spec(read_text_file(args.spec));
    } catch (const InvalidConfigError& e) {
      throw InvalidConfigError(args.spec + ": " + e.what());
    }
    const SimOutput sim = generate(spec, "synth");
    std::error_code ec;
    std::filesystem::create_directories(args.out, ec);
    if (ec) throw Error("cannot create '" + args.out + "': " + ec.message());
    const auto dir = std::filesystem::path(args.out);
    write_text_file((dir / "synth.jsonl").string(), write_embeddings_jsonl(sim.records));
    write_text_file((dir / "synth.rttm").string(), write_rttm(sim.reference));
    out << "records=" << sim.records.size() << "\nspeakers=" << sim.speakers_present << '\n';
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace msdiar::cli
