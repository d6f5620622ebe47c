#include <gtest/gtest.h>

#include "msdiar/errors.hpp"
#include "msdiar/metrics.hpp"
#include "oracles.hpp"

using namespace msdiar;
using msdiar::testing::frame_der;

namespace {

RttmSegment seg(const std::string& spk, double start, double end, const std::string& file = "f") {
  return {file, 1, start, end - start, spk};
}

}  // namespace

TEST(Rttm, ParseFields) {
  const auto segs = parse_rttm("SPEAKER f 1 0.00 2.50 <NA> <NA> A <NA> <NA>\n");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (RttmSegment{"f", 1, 0.0, 2.5, "A"}));
  EXPECT_TRUE(parse_rttm("").empty());
  EXPECT_TRUE(parse_rttm("SPKR-INFO f 1 <NA> <NA> <NA> unknown A <NA> <NA>\n").empty());
}

TEST(Rttm, RejectsBadLines) {
  try {
    parse_rttm("SPEAKER f 1 0 1 <NA> <NA> A <NA> <NA>\nSPEAKER f 1 2 0 <NA> <NA> A <NA> <NA>\n");
    FAIL();
  } catch (const MalformedLineError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_rttm("SPEAKER f 1 0 -1 <NA> <NA> A <NA> <NA>\n"), MalformedLineError);
  EXPECT_THROW(parse_rttm("SPEAKER f 1 x 1 <NA> <NA> A <NA> <NA>\n"), MalformedLineError);
  EXPECT_THROW(parse_rttm("SPEAKER f 1 0\n"), MalformedLineError);
}

TEST(Rttm, RoundTrip) {
  Rng rng(3);
  std::vector<RttmSegment> segs;
  for (int i = 0; i < 200; ++i) {
    segs.push_back({"file" + std::to_string(i % 3), 1 + static_cast<int>(rng.index(2)),
                    100.0 * rng.uniform(), 1e-3 + 5.0 * rng.uniform(),
                    "spk" + std::to_string(rng.index(5))});
  }
  EXPECT_EQ(parse_rttm(write_rttm(segs)), segs);
}

TEST(Uem, Parse) {
  const Uem uem = parse_uem("f 1 0.0 10.0\ng 1 2 3\nf 1 12 14\n");
  ASSERT_EQ(uem.at("f").size(), 2u);
  EXPECT_EQ(uem.at("f")[1], (Interval{12, 14}));
  EXPECT_THROW(parse_uem("f 1 5 4\n"), MalformedLineError);
  EXPECT_THROW(parse_uem("f 1 5\n"), MalformedLineError);
}

TEST(Merge, Examples) {
  const std::vector<RttmSegment> close{seg("A", 0, 1.0), seg("A", 1.005, 2.0)};
  const auto merged = merge_same_speaker(close, 0.01);
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_DOUBLE_EQ(merged[0].onset, 0.0);
  EXPECT_DOUBLE_EQ(merged[0].end(), 2.0);

  const std::vector<RttmSegment> diff{seg("A", 0, 1.0), seg("B", 1.005, 2.0)};
  EXPECT_EQ(merge_same_speaker(diff, 0.01), diff);

  for (double at : {1.0, 2.0, 7.3}) {
    const std::vector<RttmSegment> exact{seg("A", 0, at), seg("A", at + 0.01, at + 1)};
    EXPECT_EQ(merge_same_speaker(exact, 0.01).size(), 2u) << at;
  }
}

TEST(Merge, OverlapsAndIdempotence) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RttmSegment> segs;
    for (int i = 0; i < 15; ++i) {
      const double s = 20.0 * rng.uniform();
      segs.push_back(seg(rng.uniform() < 0.5 ? "A" : "B", s, s + 0.01 + rng.uniform()));
    }
    const auto once = merge_same_speaker(segs, 0.01);
    EXPECT_EQ(merge_same_speaker(once, 0.01), once);
    for (std::size_t i = 1; i < once.size(); ++i) EXPECT_LE(once[i - 1].onset, once[i].onset);
  }
}

TEST(DeriveUem, Examples) {
  const std::vector<RttmSegment> overlap{seg("A", 0, 2), seg("B", 1, 3)};
  EXPECT_EQ(derive_uem(overlap), (std::vector<Interval>{{0, 3}}));
  const std::vector<RttmSegment> apart{seg("A", 2, 3), seg("A", 0, 1)};
  EXPECT_EQ(derive_uem(apart), (std::vector<Interval>{{0, 1}, {2, 3}}));
  EXPECT_TRUE(derive_uem(std::vector<RttmSegment>{}).empty());
}

TEST(ScoredRegion, SubtractsCollars) {
  const std::vector<RttmSegment> ref{seg("A", 0, 10)};
  EXPECT_EQ(scored_region(ref, {{0, 10}}, 0.25), (std::vector<Interval>{{0.25, 9.75}}));
  EXPECT_EQ(scored_region(ref, {{0, 10}}, 0.0), (std::vector<Interval>{{0, 10}}));
  const std::vector<RttmSegment> two{seg("A", 0, 4), seg("B", 4, 10)};
  EXPECT_EQ(scored_region(two, {{0, 10}}, 0.5),
            (std::vector<Interval>{{0.5, 3.5}, {4.5, 9.5}}));
}

TEST(Der, CollarFixture) {
  const std::vector<RttmSegment> ref{seg("A", 0, 10)};
  const std::vector<RttmSegment> hyp{seg("A", 0, 8), seg("B", 8, 10)};
  ScoringOptions options;
  options.uem = Uem{{"f", {{0, 10}}}};
  const DerReport r = compute_der(ref, hyp, options);
  EXPECT_NEAR(r.scored_time, 9.5, 1e-12);
  EXPECT_NEAR(r.confusion_time, 1.75, 1e-12);
  EXPECT_EQ(r.missed_time, 0.0);
  EXPECT_EQ(r.false_alarm_time, 0.0);
  EXPECT_NEAR(r.der, 0.1842, 0.0005);
  EXPECT_EQ(format_report(r).find("der=0.1842") != std::string::npos, true);
}

TEST(Der, PerfectAndPermuted) {
  const std::vector<RttmSegment> ref{seg("A", 0, 4), seg("B", 4, 7), seg("A", 7, 10)};
  for (double collar : {0.0, 0.25, 1.0}) {
    ScoringOptions o;
    o.collar = collar;
    EXPECT_EQ(compute_der(ref, ref, o).der, 0.0);
  }
  EXPECT_EQ(compute_der(std::vector<RttmSegment>{seg("A", 0, 10)},
                        std::vector<RttmSegment>{seg("B", 0, 10)})
                .der,
            0.0);
  const std::vector<RttmSegment> renamed{seg("x", 0, 4), seg("y", 4, 7), seg("x", 7, 10)};
  EXPECT_EQ(compute_der(ref, renamed).der, 0.0);
}

TEST(Der, MissedFalseAlarmAndOverlap) {
  ScoringOptions o;
  o.collar = 0.0;
  o.uem = Uem{{"f", {{0, 10}}}};
  const std::vector<RttmSegment> ref{seg("A", 0, 6), seg("B", 4, 10)};
  const std::vector<RttmSegment> hyp{seg("A", 0, 4), seg("B", 4, 8)};
  const DerReport r = compute_der(ref, hyp, o);
  EXPECT_NEAR(r.scored_time, 12.0, 1e-12);
  // [4,6] overlap: one speaker missed; [8,10]: B missed.
  EXPECT_NEAR(r.missed_time, 4.0, 1e-12);
  EXPECT_NEAR(r.false_alarm_time, 0.0, 1e-12);
  EXPECT_NEAR(r.confusion_time, 0.0, 1e-12);

  const std::vector<RttmSegment> fa_hyp{seg("A", 0, 10)};
  const std::vector<RttmSegment> short_ref{seg("A", 2, 5)};
  const DerReport fa = compute_der(short_ref, fa_hyp, o);
  EXPECT_NEAR(fa.false_alarm_time, 7.0, 1e-12);
  EXPECT_NEAR(fa.der, 7.0 / 3.0, 1e-12);
}

TEST(Der, EmptyScoredRegion) {
  const std::vector<RttmSegment> ref{seg("A", 0, 0.4)};
  EXPECT_THROW(compute_der(ref, ref), NoScoredTimeError);
  EXPECT_THROW(compute_der(std::vector<RttmSegment>{}, ref), NoScoredTimeError);
}

TEST(Der, MatchesFrameOracle) {
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<RttmSegment> ref, hyp;
    const char* names[] = {"A", "B", "C"};
    double t = 0.0;
    while (t < 12.0) {
      const double len = 0.3 + 2.0 * rng.uniform();
      ref.push_back(seg(names[rng.index(3)], t, std::min(12.0, t + len)));
      t += len + (rng.uniform() < 0.2 ? 0.5 : 0.0);
    }
    t = 0.0;
    while (t < 12.0) {
      const double len = 0.3 + 2.0 * rng.uniform();
      hyp.push_back(seg(names[rng.index(3)], t, std::min(12.0, t + len)));
      t += len;
    }
    // Snap to the millisecond grid so frame sampling is exact.
    for (auto* side : {&ref, &hyp}) {
      for (auto& s : *side) {
        const double a = std::round(s.onset * 1000) / 1000, b = std::round(s.end() * 1000) / 1000;
        s.onset = a;
        s.duration = b - a;
      }
    }
    ScoringOptions o;
    o.collar = 0.25;
    o.merge_gap = 0.0;
    o.uem = Uem{{"f", {{0, 12}}}};
    DerReport r;
    try {
      r = compute_der(ref, hyp, o);
    } catch (const NoScoredTimeError&) {
      continue;
    }
    const auto merged_ref = merge_same_speaker(ref, 0.0);
    const auto merged_hyp = merge_same_speaker(hyp, 0.0);
    const auto oracle = frame_der(merged_ref, merged_hyp, {{0, 12}}, 0.25);
    EXPECT_NEAR(r.scored_time, oracle.scored, 2e-2);
    EXPECT_NEAR(r.missed_time + r.false_alarm_time + r.confusion_time, oracle.error, 2e-2);
  }
}

TEST(Der, PermutationInvariantAndCollarMonotone) {
  const std::vector<RttmSegment> ref{seg("A", 0, 3), seg("B", 3, 5), seg("C", 5, 9)};
  const std::vector<RttmSegment> hyp{seg("1", 0, 2.5), seg("2", 2.5, 6), seg("3", 6, 9)};
  const std::vector<RttmSegment> hyp2{seg("3", 0, 2.5), seg("1", 2.5, 6), seg("2", 6, 9)};
  EXPECT_DOUBLE_EQ(compute_der(ref, hyp).der, compute_der(ref, hyp2).der);
  double last = 1e9;
  for (double c : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    ScoringOptions o;
    o.collar = c;
    const double scored = compute_der(ref, hyp, o).scored_time;
    EXPECT_LE(scored, last);
    last = scored;
  }
}

TEST(Corpus, SumsAcrossFiles) {
  const std::vector<RttmSegment> ref{seg("A", 0, 10, "f"), seg("A", 0, 10, "g")};
  const std::vector<RttmSegment> hyp{seg("A", 0, 8, "f"), seg("B", 8, 10, "f"),
                                     seg("Z", 0, 10, "g")};
  const CorpusScore s = score_corpus(ref, hyp);
  ASSERT_EQ(s.files.size(), 2u);
  EXPECT_EQ(s.files[0].file_id, "f");
  EXPECT_EQ(s.files[0].hypothesis_speakers, 2);
  EXPECT_NEAR(s.total.scored_time, 19.0, 1e-12);
  EXPECT_NEAR(s.total.der, 1.75 / 19.0, 1e-12);
  const std::string json = report_json(s, speaker_count_stats(std::vector<std::pair<int, int>>{{1, 2}, {1, 1}}));
  EXPECT_NE(json.find("\"der\""), std::string::npos);
}

TEST(SpeakerCount, Examples) {
  const std::vector<std::pair<int, int>> equal{{2, 2}, {3, 3}};
  const auto e = speaker_count_stats(equal);
  EXPECT_EQ(e.mae, 0.0);
  EXPECT_EQ(e.pct_correct, 100.0);

  const std::vector<std::pair<int, int>> mixed{{2, 2}, {2, 3}, {2, 2}, {2, 1}, {2, 2}};
  const auto m = speaker_count_stats(mixed);
  EXPECT_DOUBLE_EQ(m.mae, 0.4);
  EXPECT_DOUBLE_EQ(m.pct_correct, 60.0);
  EXPECT_DOUBLE_EQ(m.pct_over, 20.0);
  EXPECT_DOUBLE_EQ(m.pct_under, 20.0);

  const std::vector<std::pair<int, int>> over{{2, 4}};
  const auto o = speaker_count_stats(over);
  EXPECT_EQ(o.mae, 2.0);
  EXPECT_EQ(o.pct_over, 100.0);
  EXPECT_THROW(speaker_count_stats(std::vector<std::pair<int, int>>{}), EmptyInputError);
}
