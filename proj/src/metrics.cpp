#include "msdiar/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

#include "msdiar/assignment.hpp"
#include "msdiar/errors.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

DerReport& DerReport::operator+=(const DerReport& other) {
  scored_time += other.scored_time;
  missed_time += other.missed_time;
  false_alarm_time += other.false_alarm_time;
  confusion_time += other.confusion_time;
  der = scored_time > 0.0
            ? (missed_time + false_alarm_time + confusion_time) / scored_time
            : 0.0;
  return *this;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

template <typename T>
bool parse_value(const std::string& text, T& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::string shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Merges intervals that overlap or touch. Input need not be sorted.
std::vector<Interval> union_of(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  std::vector<Interval> out;
  for (const Interval& iv : intervals) {
    if (!(iv.end > iv.start)) continue;
    if (!out.empty() && iv.start <= out.back().end) {
      out.back().end = std::max(out.back().end, iv.end);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// a minus b; both sorted and disjoint.
std::vector<Interval> subtract(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (Interval cur : a) {
    while (j < b.size() && b[j].end <= cur.start) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].start < cur.end) {
      if (b[k].start > cur.start) out.push_back({cur.start, b[k].start});
      cur.start = std::max(cur.start, b[k].end);
      if (cur.start >= cur.end) break;
      ++k;
    }
    if (cur.end > cur.start) out.push_back(cur);
  }
  return out;
}

}  // namespace

std::vector<RttmSegment> parse_rttm(const std::string& text) {
  std::vector<RttmSegment> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0] != "SPEAKER") continue;
    if (fields.size() < 8) {
      throw MalformedLineError(line_no, "SPEAKER line needs at least 8 fields");
    }
    RttmSegment seg;
    seg.file_id = fields[1];
    seg.speaker = fields[7];
    if (!parse_value(fields[2], seg.channel)) {
      throw MalformedLineError(line_no, "bad channel '" + fields[2] + "'");
    }
    if (!parse_value(fields[3], seg.onset) || !parse_value(fields[4], seg.duration)) {
      throw MalformedLineError(line_no, "bad onset or duration");
    }
    if (!(seg.duration > 0.0)) throw MalformedLineError(line_no, "duration must be positive");
    if (!(seg.onset >= 0.0)) throw MalformedLineError(line_no, "onset must be non-negative");
    out.push_back(std::move(seg));
  }
  return out;
}

std::string write_rttm(std::span<const RttmSegment> segments) {
  std::string out;
  for (const auto& s : segments) {
    out += "SPEAKER " + s.file_id + ' ' + std::to_string(s.channel) + ' ' +
           shortest(s.onset) + ' ' + shortest(s.duration) + " <NA> <NA> " + s.speaker +
           " <NA> <NA>\n";
  }
  return out;
}

Uem parse_uem(const std::string& text) {
  Uem out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#' || fields[0][0] == ';') continue;
    if (fields.size() != 4) throw MalformedLineError(line_no, "UEM line needs 4 fields");
    Interval iv;
    int channel = 0;
    if (!parse_value(fields[1], channel) || !parse_value(fields[2], iv.start) ||
        !parse_value(fields[3], iv.end)) {
      throw MalformedLineError(line_no, "bad UEM field");
    }
    if (!(iv.end > iv.start)) throw MalformedLineError(line_no, "UEM end must exceed start");
    out[fields[0]].push_back(iv);
  }
  for (auto& [file, intervals] : out) intervals = union_of(std::move(intervals));
  return out;
}

std::vector<RttmSegment> merge_same_speaker(std::span<const RttmSegment> segments,
                                            double merge_gap) {
  // Two segment ends are compared after a subtraction, so "exactly
  // merge_gap" must not be decided by rounding noise.
  constexpr double kTimeTolerance = 1e-9;
  std::map<std::tuple<std::string, int, std::string>, std::vector<RttmSegment>> groups;
  for (const auto& s : segments) groups[{s.file_id, s.channel, s.speaker}].push_back(s);

  std::vector<RttmSegment> out;
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const RttmSegment& a, const RttmSegment& b) { return a.onset < b.onset; });
    RttmSegment cur = group.front();
    for (std::size_t i = 1; i < group.size(); ++i) {
      const RttmSegment& next = group[i];
      if (next.onset - cur.end() < merge_gap - kTimeTolerance) {
        const double end = std::max(cur.end(), next.end());
        cur.duration = end - cur.onset;
      } else {
        out.push_back(cur);
        cur = next;
      }
    }
    out.push_back(cur);
  }
  std::stable_sort(out.begin(), out.end(), [](const RttmSegment& a, const RttmSegment& b) {
    if (a.file_id != b.file_id) return a.file_id < b.file_id;
    return a.onset < b.onset;
  });
  return out;
}

std::vector<Interval> derive_uem(std::span<const RttmSegment> reference) {
  std::vector<Interval> intervals;
  intervals.reserve(reference.size());
  for (const auto& s : reference) intervals.push_back({s.onset, s.end()});
  return union_of(std::move(intervals));
}

std::vector<Interval> scored_region(std::span<const RttmSegment> reference,
                                    const std::vector<Interval>& uem, double collar) {
  const std::vector<Interval> base = union_of(uem);
  if (collar <= 0.0) return base;
  std::vector<Interval> collars;
  collars.reserve(2 * reference.size());
  for (const auto& s : reference) {
    collars.push_back({s.onset - collar, s.onset + collar});
    collars.push_back({s.end() - collar, s.end() + collar});
  }
  return subtract(base, union_of(std::move(collars)));
}

DerReport compute_der(std::span<const RttmSegment> reference,
                      std::span<const RttmSegment> hypothesis,
                      const ScoringOptions& options) {
  const auto ref = merge_same_speaker(reference, options.merge_gap);
  const auto hyp = merge_same_speaker(hypothesis, options.merge_gap);

  std::vector<Interval> uem;
  bool have_uem = false;
  if (options.uem && !ref.empty()) {
    if (auto it = options.uem->find(ref.front().file_id); it != options.uem->end()) {
      uem = it->second;
      have_uem = true;
    }
  }
  if (!have_uem) uem = derive_uem(ref);
  const std::vector<Interval> region = scored_region(ref, uem, options.collar);

  std::map<std::string, int> ref_ids, hyp_ids;
  for (const auto& s : ref) ref_ids.try_emplace(s.speaker, static_cast<int>(ref_ids.size()));
  for (const auto& s : hyp) hyp_ids.try_emplace(s.speaker, static_cast<int>(hyp_ids.size()));

  struct Piece {
    double duration;
    std::vector<int> ref_active;
    std::vector<int> hyp_active;
  };
  std::vector<Piece> pieces;
  Matrix overlap = Matrix::Zero(static_cast<Eigen::Index>(ref_ids.size()),
                                static_cast<Eigen::Index>(hyp_ids.size()));

  std::vector<double> cuts;
  for (const auto& s : ref) {
    cuts.push_back(s.onset);
    cuts.push_back(s.end());
  }
  for (const auto& s : hyp) {
    cuts.push_back(s.onset);
    cuts.push_back(s.end());
  }
  std::sort(cuts.begin(), cuts.end());

  for (const Interval& iv : region) {
    std::vector<double> points{iv.start};
    for (auto it = std::upper_bound(cuts.begin(), cuts.end(), iv.start);
         it != cuts.end() && *it < iv.end; ++it) {
      if (*it > points.back()) points.push_back(*it);
    }
    points.push_back(iv.end);
    for (std::size_t p = 0; p + 1 < points.size(); ++p) {
      const double t0 = points[p];
      const double t1 = points[p + 1];
      if (!(t1 > t0)) continue;
      const double mid = 0.5 * (t0 + t1);
      Piece piece{t1 - t0, {}, {}};
      for (const auto& s : ref) {
        if (s.onset <= mid && mid < s.end()) piece.ref_active.push_back(ref_ids.at(s.speaker));
      }
      for (const auto& s : hyp) {
        if (s.onset <= mid && mid < s.end()) piece.hyp_active.push_back(hyp_ids.at(s.speaker));
      }
      for (int r : piece.ref_active) {
        for (int h : piece.hyp_active) overlap(r, h) += piece.duration;
      }
      pieces.push_back(std::move(piece));
    }
  }

  const std::vector<int> mapping = max_weight_assignment(overlap);
  DerReport report;
  for (const Piece& piece : pieces) {
    const auto nr = static_cast<double>(piece.ref_active.size());
    const auto nh = static_cast<double>(piece.hyp_active.size());
    double correct = 0.0;
    for (int r : piece.ref_active) {
      const int h = mapping.empty() ? -1 : mapping[static_cast<std::size_t>(r)];
      if (h >= 0 && std::find(piece.hyp_active.begin(), piece.hyp_active.end(), h) !=
                        piece.hyp_active.end()) {
        correct += 1.0;
      }
    }
    report.scored_time += piece.duration * nr;
    report.missed_time += piece.duration * std::max(0.0, nr - nh);
    report.false_alarm_time += piece.duration * std::max(0.0, nh - nr);
    report.confusion_time += piece.duration * (std::min(nr, nh) - correct);
  }
  if (!(report.scored_time > 0.0)) {
    throw NoScoredTimeError("no reference speech inside the scored region");
  }
  report.der =
      (report.missed_time + report.false_alarm_time + report.confusion_time) / report.scored_time;
  return report;
}

CorpusScore score_corpus(std::span<const RttmSegment> reference,
                         std::span<const RttmSegment> hypothesis,
                         const ScoringOptions& options) {
  std::map<std::string, std::vector<RttmSegment>> ref_by_file, hyp_by_file;
  for (const auto& s : reference) ref_by_file[s.file_id].push_back(s);
  for (const auto& s : hypothesis) hyp_by_file[s.file_id].push_back(s);

  CorpusScore out;
  for (const auto& [file, ref] : ref_by_file) {
    const auto& hyp = hyp_by_file[file];
    FileScore score;
    score.file_id = file;
    std::set<std::string> ref_spk, hyp_spk;
    for (const auto& s : ref) ref_spk.insert(s.speaker);
    for (const auto& s : hyp) hyp_spk.insert(s.speaker);
    score.reference_speakers = static_cast<int>(ref_spk.size());
    score.hypothesis_speakers = static_cast<int>(hyp_spk.size());
    try {
      score.report = compute_der(ref, hyp, options);
    } catch (const NoScoredTimeError&) {
      continue;
    }
    out.total += score.report;
    out.files.push_back(std::move(score));
  }
  if (out.files.empty()) throw NoScoredTimeError("no file has scored reference speech");
  return out;
}

SpeakerCountStats speaker_count_stats(std::span<const std::pair<int, int>> pairs) {
  if (pairs.empty()) throw EmptyInputError("speaker count stats need at least one pair");
  SpeakerCountStats stats;
  std::size_t correct = 0, over = 0, under = 0;
  double abs_sum = 0.0;
  for (const auto& [ref, hyp] : pairs) {
    abs_sum += std::abs(hyp - ref);
    if (hyp == ref) ++correct;
    else if (hyp > ref) ++over;
    else ++under;
  }
  const auto n = static_cast<double>(pairs.size());
  stats.mae = abs_sum / n;
  stats.pct_correct = 100.0 * static_cast<double>(correct) / n;
  stats.pct_over = 100.0 * static_cast<double>(over) / n;
  stats.pct_under = 100.0 * static_cast<double>(under) / n;
  return stats;
}

std::string format_report(const DerReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "scored_time=%.4f\nmissed_time=%.4f\nfalse_alarm_time=%.4f\n"
                "confusion_time=%.4f\nder=%.4f\n",
                report.scored_time, report.missed_time, report.false_alarm_time,
                report.confusion_time, report.der);
  return buf;
}

std::string format_count_stats(const SpeakerCountStats& stats) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "speaker_count_mae=%.4f\nspeaker_count_correct_pct=%.2f\n"
                "speaker_count_over_pct=%.2f\nspeaker_count_under_pct=%.2f\n",
                stats.mae, stats.pct_correct, stats.pct_over, stats.pct_under);
  return buf;
}

std::string report_json(const CorpusScore& score, const SpeakerCountStats& stats) {
  using nlohmann::json;
  auto der_json = [](const DerReport& r) {
    return json{{"scored_time", r.scored_time},
                {"missed_time", r.missed_time},
                {"false_alarm_time", r.false_alarm_time},
                {"confusion_time", r.confusion_time},
                {"der", r.der}};
  };
  json j = der_json(score.total);
  j["speaker_count"] = json{{"mae", stats.mae},
                            {"pct_correct", stats.pct_correct},
                            {"pct_over", stats.pct_over},
                            {"pct_under", stats.pct_under}};
  json files = json::array();
  for (const auto& f : score.files) {
    json item = der_json(f.report);
    item["file_id"] = f.file_id;
    item["reference_speakers"] = f.reference_speakers;
    item["hypothesis_speakers"] = f.hypothesis_speakers;
    files.push_back(std::move(item));
  }
  j["files"] = std::move(files);
  return j.dump(2) + "\n";
}

}  // namespace msdiar
