#include <gtest/gtest.h>

#include "msdiar/errors.hpp"
#include "msdiar/session.hpp"
#include "oracles.hpp"
#include "streams.hpp"

using namespace msdiar;
using namespace msdiar::testing;

namespace {

ClusteringConfig make_config(std::size_t l, std::size_t u1, std::size_t u2) {
  ClusteringConfig c;
  c.fallback_lower_bound = Bound::of(l);
  c.main_upper_bound = Bound::of(u1);
  c.pre_upper_bound = Bound::of(u2);
  return c;
}

SimSpec spec_for(int speakers, std::uint64_t seed) {
  SimSpec s;
  s.num_speakers = speakers;
  s.dim = 16;
  s.total_duration_seconds = 600;
  s.rng_seed = seed;
  return s;
}

}  // namespace

TEST(Session, FirstPushWithoutTurn) {
  DiarizationSession s(ClusteringConfig{});
  EXPECT_EQ(s.push({{1.0, 0.0}, 0.0, 1.0, false}).labels, std::vector<int>{0});
  const SessionResult r = s.finalize();
  EXPECT_EQ(r.labeling.labels, std::vector<int>{0});
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].stage, Stage::SingleSpeaker);
}

TEST(Session, Errors) {
  DiarizationSession s(ClusteringConfig{});
  EXPECT_THROW(s.finalize(), EmptySessionError);
  s.push({{1.0, 0.0}, 0.0, 1.0, false});
  EXPECT_THROW(s.push({{1.0, 0.0, 0.0}, 1.0, 2.0, false}), DimensionMismatchError);
  s.ingest({{0.0, 1.0}, 1.0, 2.0, true});
  EXPECT_THROW(s.finalize(), StaleLabelingError);
  s.push({{0.0, 1.0}, 2.0, 3.0, false});
  EXPECT_NO_THROW(s.finalize());
  EXPECT_THROW(DiarizationSession(make_config(50, 600, 300)), BoundOrderingError);
}

TEST(Session, TraceFollowsRoute) {
  const ClusteringConfig config = make_config(50, 100, 300);
  const SimOutput sim = first_records(spec_for(2, 3), 130);
  DiarizationSession s(config);
  bool turn = false;
  for (std::size_t i = 0; i < sim.records.size(); ++i) {
    const CompressionCache before = s.cache();
    turn = turn || sim.records[i].turn_initiated;
    const SpeakerLabeling& l = s.push(sim.records[i]);
    EXPECT_EQ(l.size(), i + 1);
    EXPECT_EQ(s.trace().back().stage, route(i + 1, turn, config, before));
  }
  const SessionResult r = s.finalize();
  ASSERT_EQ(r.trace.size(), 130u);
  for (std::size_t i = 0; i < r.trace.size(); ++i) EXPECT_EQ(r.trace[i].step, i + 1);
  EXPECT_EQ(r.trace[48].stage, Stage::Fallback);
  EXPECT_EQ(r.trace[49].stage, Stage::Main);
  EXPECT_EQ(r.trace[100].stage, Stage::PreCluster);
}

TEST(Session, IngestMatchesPushingEverything) {
  const ClusteringConfig config = make_config(50, 100, 300);
  for (std::uint64_t seed : {1u, 2u}) {
    const SimOutput sim = first_records(spec_for(3, seed), 520);
    DiarizationSession all(config);
    for (const auto& r : sim.records) all.push(r);
    EXPECT_EQ(all.finalize().labeling, diarize_final(config, sim.records));
    EXPECT_EQ(all.cache().compressions, 2u);
  }
}

TEST(Session, StorageBoundAndBookkeeping) {
  const ClusteringConfig config = make_config(50, 100, 300);
  const SimOutput sim = first_records(spec_for(2, 8), 1200);
  DiarizationSession s(config);
  for (const auto& r : sim.records) {
    s.ingest(r);
    EXPECT_LE(s.stored_vectors(), 300u);
    EXPECT_EQ(s.size(), s.cache().covered_prefix_len + s.tail_size());
    EXPECT_LE(s.trace().back().stored_vectors, 300u);
  }
  EXPECT_EQ(s.cache().compressions, 5u);
}

TEST(Session, CompressionStageQuality) {
  // 700 inputs with L=50,U1=100,U2=300: compression active, three speakers.
  const ClusteringConfig config = make_config(50, 100, 300);
  const SimOutput sim = first_records(spec_for(3, 5), 700);
  DiarizationSession s(config);
  for (std::size_t i = 0; i + 1 < sim.records.size(); ++i) s.ingest(sim.records[i]);
  const SpeakerLabeling labeling = s.push(sim.records.back());
  EXPECT_GE(s.cache().compressions, 1u);
  EXPECT_EQ(labeling.num_speakers, 3);
  EXPECT_LT(score_labeling(sim, labeling).der, 0.05);
}

TEST(Session, DeterministicReplay) {
  const ClusteringConfig config = make_config(20, 40, 90);
  const SimOutput sim = first_records(spec_for(3, 4), 150);
  DiarizationSession a(config), b(config);
  for (const auto& r : sim.records) {
    EXPECT_EQ(a.push(r), b.push(r));
  }
  for (std::size_t i = 0; i < a.trace().size(); ++i) {
    EXPECT_EQ(a.trace()[i].cost, b.trace()[i].cost);
    EXPECT_EQ(a.trace()[i].stage, b.trace()[i].stage);
  }
}

TEST(StableLabels, AppendedIndexKeepsPrefix) {
  const SpeakerLabeling prev{{0, 1, 1, 0}, 2};
  const SpeakerLabeling cur{{0, 1, 1, 0, 1}, 2};
  const SpeakerLabeling got = stable_display_labels(prev, cur);
  EXPECT_EQ(std::vector<int>(got.labels.begin(), got.labels.begin() + 4), prev.labels);
}

TEST(StableLabels, SwapIsUndone) {
  const SpeakerLabeling prev{{0, 0, 1, 1, 2}, 3};
  const SpeakerLabeling cur{{0, 0, 1, 1, 2, 2}, 3};
  const SpeakerLabeling swapped{{1, 1, 0, 0, 2, 2}, 3};
  const SpeakerLabeling undone = stable_display_labels(prev, swapped);
  EXPECT_EQ(std::vector<int>(undone.labels.begin(), undone.labels.begin() + 5), prev.labels);
  EXPECT_EQ(stable_display_labels(prev, cur).labels, cur.labels);
}

TEST(StableLabels, NewSpeakerTakesUnusedId) {
  const SpeakerLabeling prev{{0, 0, 1}, 2};
  const SpeakerLabeling cur{{1, 1, 0, 2}, 3};
  EXPECT_EQ(stable_display_labels(prev, cur).labels, (std::vector<int>{0, 0, 1, 2}));
}

TEST(StableLabels, PartitionPreserved) {
  Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.index(30);
    std::vector<int> a(n - 1 - rng.index(n - 1)), b(n);
    for (int& x : a) x = static_cast<int>(rng.index(4));
    for (int& x : b) x = static_cast<int>(rng.index(5));
    const SpeakerLabeling prev = canonicalize_labels(a);
    const SpeakerLabeling cur = canonicalize_labels(b);
    const SpeakerLabeling got = stable_display_labels(prev, cur);
    EXPECT_TRUE(same_partition(got.labels, cur.labels));
    EXPECT_EQ(got.num_speakers, cur.num_speakers);
    for (int l : got.labels) EXPECT_LT(l, std::max(cur.num_speakers, prev.num_speakers) + cur.num_speakers);
  }
}
