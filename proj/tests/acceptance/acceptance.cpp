// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "msdiar/ahc.hpp"
#include "msdiar/costmodel.hpp"
#include "msdiar/eigensolver.hpp"
#include "msdiar/metrics.hpp"
#include "msdiar/random.hpp"
#include "msdiar/router.hpp"
#include "msdiar/session.hpp"
#include "msdiar/simgen.hpp"
#include "msdiar/spectral.hpp"
#include "oracles.hpp"
#include "streams.hpp"

using namespace msdiar;
using namespace msdiar::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ClusteringConfig make_config(Bound l, Bound u1, Bound u2) {
  ClusteringConfig c;
  c.fallback_lower_bound = l;
  c.main_upper_bound = u1;
  c.pre_upper_bound = u2;
  return c;
}

ClusteringConfig bounded_50_100_300() {
  return make_config(Bound::of(50), Bound::of(100), Bound::of(300));
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. AHC against recompute-from-scratch.
Outcome ahc_oracle() {
  Rng rng(20240101);
  const std::size_t dims[] = {3, 8, 64};
  int mismatches = 0, comparisons = 0;
  for (int set = 0; set < 500; ++set) {
    const std::size_t n = 1 + rng.index(12);
    const std::size_t d = dims[rng.index(3)];
    const RowMatrix p = random_unit_points(rng, n, d);
    const StopRule stops[] = {ThresholdStop{2.0 * rng.uniform()},
                              TargetCountStop{1 + rng.index(n)}};
    for (Linkage link : {Linkage::Average, Linkage::Complete}) {
      for (const StopRule& stop : stops) {
        ++comparisons;
        if (!(ahc_cluster(p, link, stop) == naive_ahc(p, link, stop))) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%d/%d labelings identical", comparisons - mismatches, comparisons)};
}

// 2. Eigen-gap count on noisy block affinities.
Outcome eigen_gap_blocks() {
  Rng rng(7);
  int noisy_hits = 0, exact_fail = 0, mixed_hits = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const int k = 1 + static_cast<int>(rng.index(6));
    // One block size per trial. With unequal sizes the unnormalized
    // Laplacian's largest gap can fall between two block sizes even
    // without noise; that rate is reported but not gated.
    const std::size_t size = 5 + rng.index(36);
    std::vector<int> labels, mixed;
    for (int b = 0; b < k; ++b) {
      labels.insert(labels.end(), size, b);
      mixed.insert(mixed.end(), 5 + rng.index(36), b);
    }
    {
      const auto m = static_cast<Eigen::Index>(mixed.size());
      Matrix a(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
          const bool same = mixed[static_cast<std::size_t>(i)] == mixed[static_cast<std::size_t>(j)];
          const double e = i == j ? 0.0 : 0.05 * rng.uniform();
          a(i, j) = a(j, i) = same ? 1.0 - e : e;
        }
      }
      if (eigen_gap_count(symmetric_eigen(laplacian(a), 0).values, 8) == k) ++mixed_hits;
    }
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix clean(n, n), noisy(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
        const double e = i == j ? 0.0 : 0.05 * rng.uniform();
        clean(i, j) = clean(j, i) = same ? 1.0 : 0.0;
        noisy(i, j) = noisy(j, i) = same ? 1.0 - e : e;
      }
    }
    const int max_spk = 8;
    if (eigen_gap_count(symmetric_eigen(laplacian(clean), 0).values, max_spk) != k) ++exact_fail;
    if (eigen_gap_count(symmetric_eigen(laplacian(noisy), 0).values, max_spk) == k) ++noisy_hits;
  }
  const double rate = static_cast<double>(noisy_hits) / trials;
  return {rate >= 0.95 && exact_fail == 0,
          fmt("noisy %.1f%% correct (need >= 95%%); noiseless failures %d; "
              "unequal sizes (ungated) %.1f%%",
              100 * rate, exact_fail, 100.0 * mixed_hits / trials)};
}

// 3. Route boundaries for L=50, U1=300, U2=600.
Outcome route_table() {
  const ClusteringConfig c = make_config(Bound::of(50), Bound::of(300), Bound::of(600));
  SimSpec spec;
  spec.num_speakers = 2;
  spec.dim = 8;
  // The cache state at N=601 comes from an actual session that compressed at 600.
  const SimOutput sim = first_records(spec, 600);
  DiarizationSession s(c);
  for (const auto& r : sim.records) s.ingest(r);
  const CompressionCache empty;
  const std::vector<std::pair<std::size_t, Stage>> want = {
      {1, Stage::Fallback},      {49, Stage::Fallback},       {50, Stage::Main},
      {299, Stage::Main},        {300, Stage::PreCluster},    {599, Stage::PreCluster},
      {600, Stage::CompressedPreCluster}, {601, Stage::PreCluster}};
  std::string got;
  bool ok = s.cache().compressions == 1 && s.cache().covered_prefix_len == 600;
  for (const auto& [n, stage] : want) {
    const Stage r = route(n, true, c, n <= 600 ? empty : s.cache());
    ok = ok && r == stage;
    got += fmt("%zu:%s ", n, std::string(stage_name(r)).c_str());
  }
  ok = ok && route(1, false, c, empty) == Stage::SingleSpeaker;
  return {ok, got};
}

struct LongSession {
  std::vector<std::size_t> triggers;
  bool covered_ok = true;
  bool effective_ok = true;
  std::size_t max_stored = 0;
  std::size_t max_ahc_input = 0;
};

// Shared 2000-push session for 4 and 5.
const LongSession& long_session() {
  static const LongSession result = [] {
    LongSession out;
    const ClusteringConfig c = bounded_50_100_300();
    SimSpec spec;
    spec.num_speakers = 3;
    spec.dim = 16;
    spec.rng_seed = 5;
    const SimOutput sim = first_records(spec, 2000);
    DiarizationSession s(c);
    std::size_t k = 0;
    for (const auto& r : sim.records) {
      s.push(r);
      const StepTrace& t = s.trace().back();
      const CompressionCache& cache = s.cache();
      if (cache.compressions != k) {
        k = cache.compressions;
        out.triggers.push_back(t.step);
        out.covered_ok = out.covered_ok && cache.covered_prefix_len == 300 + (k - 1) * 200;
      }
      const std::size_t eff = effective_size(t.step, cache);
      if (k > 0) {
        out.effective_ok = out.effective_ok && eff == 100 + (t.step - cache.covered_prefix_len);
      }
      out.effective_ok = out.effective_ok && eff <= 300;
      out.max_stored = std::max({out.max_stored, t.stored_vectors, s.stored_vectors()});
      out.max_ahc_input = std::max(out.max_ahc_input, t.ahc_input_size);
    }
    return out;
  }();
  return result;
}

Outcome compression_arithmetic() {
  const LongSession& ls = long_session();
  std::vector<std::size_t> want;
  for (std::size_t n = 300; n <= 2000; n += 200) want.push_back(n);
  const bool ok = ls.triggers == want && ls.covered_ok && ls.effective_ok && ls.max_ahc_input <= 300;
  return {ok, fmt("%zu compressions at 300,500,...; covered %s; N_eff %s; max AHC input %zu",
                  ls.triggers.size(), ls.covered_ok ? "exact" : "WRONG",
                  ls.effective_ok ? "exact and <= 300" : "WRONG", ls.max_ahc_input)};
}

Outcome bounded_memory() {
  const LongSession& ls = long_session();
  return {ls.max_stored <= 300, fmt("max stored vectors %zu (limit 300)", ls.max_stored)};
}

// 6. Per-step cost plateau for bounded config, growth for unbounded.
Outcome cost_plateau() {
  SimSpec spec;
  spec.num_speakers = 3;
  spec.dim = 32;
  spec.rng_seed = 6;
  const SimOutput sim = first_records(spec, 2000);
  const std::vector<std::size_t> cps{500, 1000, 2000};
  const CostReport b = sweep(bounded_50_100_300(), sim.records, cps);
  const CostReport u =
      sweep(make_config(Bound::of(50), Bound::unbounded(), Bound::unbounded()), sim.records, cps);
  auto tot = [](const CostReport& r, std::size_t i) {
    return static_cast<double>(r.rows[i].ledger.total());
  };
  const double bmax = std::max({tot(b, 0), tot(b, 1), tot(b, 2)});
  const double bmin = std::min({tot(b, 0), tot(b, 1), tot(b, 2)});
  const double growth = tot(u, 2) / tot(u, 0);
  const double gap = tot(u, 2) / tot(b, 2);
  return {bmax / bmin <= 2.0 && growth >= 10.0 && gap >= 50.0,
          fmt("bounded max/min %.3f (<= 2); unbounded 2000/500 %.1fx (>= 10); "
              "unbounded/bounded at 2000 %.1fx (>= 50)",
              bmax / bmin, growth, gap)};
}

// 7. End-to-end quality on simulated streams in every routing regime.
Outcome synthetic_quality() {
  const ClusteringConfig c = bounded_50_100_300();
  struct Regime {
    const char* name;
    std::size_t n;
  };
  const Regime regimes[] = {{"fallback", 40}, {"main", 80}, {"precluster", 220}, {"compression", 700}};
  bool ok = true;
  std::string detail;
  for (int speakers = 2; speakers <= 4; ++speakers) {
    for (const Regime& reg : regimes) {
      int good = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SimSpec spec;
        spec.num_speakers = speakers;
        spec.rng_seed = 1000 * static_cast<std::uint64_t>(speakers) + seed;
        const SimOutput sim = first_records(spec, reg.n);
        const SpeakerLabeling labeling = diarize_final(c, sim.records);
        const double der = score_labeling(sim, labeling, 0.25).der;
        if (der < 0.05 && labeling.num_speakers == sim.speakers_present) ++good;
      }
      ok = ok && good >= 18;
      detail += fmt("%dspk/%s %d/20 ", speakers, reg.name, good);
    }
  }
  return {ok, detail};
}

// 8. Collar fixture, cross-checked by a frame-sampled scorer.
Outcome der_fixture() {
  const std::vector<RttmSegment> ref = {{"f", 1, 0, 10, "A"}};
  const std::vector<RttmSegment> hyp = {{"f", 1, 0, 8, "A"}, {"f", 1, 8, 2, "B"}};
  ScoringOptions o;
  o.collar = 0.25;
  o.uem = Uem{{"f", {{0, 10}}}};
  const double der = compute_der(ref, hyp, o).der;
  const double frame = frame_der(ref, hyp, {{0, 10}}, 0.25).der();

  const std::vector<RttmSegment> ref2 = {
      {"g", 1, 0, 4, "A"}, {"g", 1, 4, 3, "B"}, {"g", 1, 7, 5, "C"}, {"g", 1, 12, 2, "A"}};
  const std::map<std::string, std::string> rename = {{"A", "s2"}, {"B", "s0"}, {"C", "s1"}};
  std::vector<RttmSegment> permuted = ref2;
  for (auto& s : permuted) s.speaker = rename.at(s.speaker);
  const double zero = compute_der(ref2, permuted, ScoringOptions{}).der;
  const bool ok = std::abs(der - 0.1842) <= 0.0005 && std::abs(frame - der) <= 0.0005 && zero == 0.0;
  return {ok, fmt("DER %.6f, frame scorer %.6f, permuted %.6g", der, frame, zero)};
}

// 9. Speaker count statistics.
Outcome count_stats() {
  const std::vector<std::pair<int, int>> pairs = {{2, 2}, {2, 3}, {2, 2}, {2, 1}, {2, 2}};
  const SpeakerCountStats s = speaker_count_stats(pairs);
  const bool ok = std::abs(s.mae - 0.4) < 1e-12 && std::abs(s.pct_correct - 60) < 1e-9 &&
                  std::abs(s.pct_over - 20) < 1e-9 && std::abs(s.pct_under - 20) < 1e-9;
  std::string line = format_count_stats(s);
  std::replace(line.begin(), line.end(), '\n', ' ');
  return {ok, line};
}

// 10. Auto-tune cost scales with the grid length.
Outcome autotune_linearity() {
  Rng rng(10);
  std::vector<int> labels;
  for (int b = 0; b < 3; ++b) labels.insert(labels.end(), 100, b);
  const RowMatrix p = blob_points(rng, labels, 16, 0.05);
  SpectralParams one, ten;
  one.autotune_grid = {70};
  ten.autotune_grid = {50, 55, 60, 65, 70, 75, 80, 85, 90, 95};
  CostLedger c1, c10, t1, t10;
  spectral_cluster(p, one, &c1);
  spectral_cluster(p, ten, &c10);
  const Matrix a = affinity_matrix(p);
  auto_tune(a, one, &t1);
  auto_tune(a, ten, &t10);
  const double full = static_cast<double>(c10.total()) / static_cast<double>(c1.total());
  const double search = static_cast<double>(t10.total()) / static_cast<double>(t1.total());
  // The grid search is what repeats; the affinity, final k-means and
  // eigenvector extraction run once and are reported only.
  return {std::abs(search / 10.0 - 1.0) <= 0.05,
          fmt("auto-tune ops ratio %.3f (10 +- 5%%); whole spectral run (ungated) %.3f", search, full)};
}

// 11. Stage bypass: unbounded config routes straight to spectral.
Outcome stage_bypass() {
  const ClusteringConfig c = make_config(Bound::of(0), Bound::unbounded(), Bound::unbounded());
  const SpectralParams params = SpectralParams::from_config(c);
  Rng rng(11);
  int equal = 0;
  for (int t = 0; t < 50; ++t) {
    SimSpec spec;
    spec.num_speakers = 1 + static_cast<int>(rng.index(4));
    spec.dim = 8 + rng.index(25);
    spec.rng_seed = 500 + static_cast<std::uint64_t>(t);
    const SimOutput sim = first_records(spec, 2 + rng.index(150));
    const RowMatrix x = stack_vectors(sim.records);
    const StepResult step = cluster_step(true, x, CompressionCache{}, c, params);
    if (step.stage == Stage::Main && step.labeling == spectral_cluster(x, params)) ++equal;
  }
  return {equal == 50, fmt("%d/50 identical", equal)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "ahc_matches_naive_oracle", 60, ahc_oracle},
      {2, "eigen_gap_on_block_affinities", 60, eigen_gap_blocks},
      {3, "route_boundary_table", 0, route_table},
      {4, "compression_arithmetic", 0, compression_arithmetic},
      {5, "bounded_vector_storage", 0, bounded_memory},
      {6, "cost_plateau_vs_growth", 600, cost_plateau},
      {7, "synthetic_end_to_end_quality", 600, synthetic_quality},
      {8, "der_collar_fixture", 0, der_fixture},
      {9, "speaker_count_stats", 0, count_stats},
      {10, "autotune_cost_linearity", 0, autotune_linearity},
      {11, "stage_bypass_equivalence", 0, stage_bypass},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o = c.run();
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over %.0fs budget]", c.budget_s);
    }
    failures += !o.pass;
    std::printf("%s %2d %-32s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
