#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace msdiar {

struct RttmSegment {
  std::string file_id;
  int channel = 1;
  double onset = 0.0;
  double duration = 0.0;
  std::string speaker;

  double end() const { return onset + duration; }
  friend bool operator==(const RttmSegment&, const RttmSegment&) = default;
};

struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// file_id -> scored intervals
using Uem = std::map<std::string, std::vector<Interval>>;

struct ScoringOptions {
  double collar = 0.25;
  double merge_gap = 0.01;
  std::optional<Uem> uem;
};

struct DerReport {
  double scored_time = 0.0;  // reference speech inside the scored region
  double missed_time = 0.0;
  double false_alarm_time = 0.0;
  double confusion_time = 0.0;
  double der = 0.0;

  DerReport& operator+=(const DerReport& other);
};

// Standard 10-field SPEAKER lines; other line types are ignored.
// Throws MalformedLineError with the line number.
std::vector<RttmSegment> parse_rttm(const std::string& text);
// Times use the shortest representation that reads back exactly.
std::string write_rttm(std::span<const RttmSegment> segments);

// UEM lines: "file_id channel start end".
Uem parse_uem(const std::string& text);

// Coalesces same-speaker segments whose gap is strictly below merge_gap
// (overlapping ones included). Output is ordered by onset; segments of
// different speakers are never merged.
std::vector<RttmSegment> merge_same_speaker(std::span<const RttmSegment> segments,
                                            double merge_gap);

// Non-overlapping union of the segments, sorted.
std::vector<Interval> derive_uem(std::span<const RttmSegment> reference);

// Scored region: UEM minus [b - collar, b + collar] around every reference
// boundary b (after merging).
std::vector<Interval> scored_region(std::span<const RttmSegment> reference,
                                    const std::vector<Interval>& uem, double collar);

// DER for one file. Both sides are merged with options.merge_gap first;
// the UEM is options.uem[file] when present, else derived from the
// reference. Speakers are mapped one-to-one by maximum overlap.
// Throws NoScoredTimeError when no reference speech remains to score.
DerReport compute_der(std::span<const RttmSegment> reference,
                      std::span<const RttmSegment> hypothesis,
                      const ScoringOptions& options = {});

struct FileScore {
  std::string file_id;
  DerReport report;
  int reference_speakers = 0;
  int hypothesis_speakers = 0;
};

struct CorpusScore {
  std::vector<FileScore> files;  // ordered by file id
  DerReport total;
};

// Scores every file of the reference; components are summed across files.
CorpusScore score_corpus(std::span<const RttmSegment> reference,
                         std::span<const RttmSegment> hypothesis,
                         const ScoringOptions& options = {});

struct SpeakerCountStats {
  double mae = 0.0;
  double pct_correct = 0.0;
  double pct_over = 0.0;
  double pct_under = 0.0;
};

// pairs are (reference count, hypothesis count).
SpeakerCountStats speaker_count_stats(std::span<const std::pair<int, int>> pairs);

// key=value lines; der printed with four decimals.
std::string format_report(const DerReport& report);
std::string format_count_stats(const SpeakerCountStats& stats);
std::string report_json(const CorpusScore& score, const SpeakerCountStats& stats);

}  // namespace msdiar
