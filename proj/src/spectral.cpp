#include "msdiar/spectral.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>
#include <numeric>

#include "msdiar/eigensolver.hpp"
#include "msdiar/random.hpp"

namespace msdiar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Spectral radius below this means the refined graph has no edges.
constexpr double kZeroLaplacian = 1e-12;

std::uint64_t u64(Eigen::Index v) { return static_cast<std::uint64_t>(v); }

std::uint64_t ceil_log2(std::uint64_t n) {
  std::uint64_t bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

}  // namespace

SpectralParams SpectralParams::from_config(const ClusteringConfig& config) {
  SpectralParams params;
  params.max_speakers = config.max_speakers;
  params.autotune_grid = config.autotune_grid;
  params.kmeans_restarts = config.kmeans_restarts;
  params.kmeans_max_iters = config.kmeans_max_iters;
  params.rng_seed = config.rng_seed;
  return params;
}

Matrix affinity_matrix(const RowMatrix& points, CostLedger* ledger) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw TooFewInputsError("affinity needs at least two embeddings");
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double value = std::clamp(0.5 * (1.0 + points.row(i).dot(points.row(j))), 0.0, 1.0);
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  const std::uint64_t pairs = u64(n) * u64(n - 1) / 2;
  ops::fma(ledger, pairs * u64(points.cols()));
  ops::add(ledger, pairs);
  ops::mul(ledger, pairs);
  ops::cmp(ledger, 2 * pairs);
  return a;
}

double percentile(std::vector<double> values, double p, CostLedger* ledger) {
  if (values.empty()) throw EmptyInputError("percentile of an empty sequence");
  std::uint64_t compared = 0;
  auto less = [&compared](double a, double b) {
    ++compared;
    return a < b;
  };
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo),
                   values.end(), less);
  const double lo_value = values[lo];
  double result = lo_value;
  if (frac > 0.0 && lo + 1 < values.size()) {
    const double hi_value =
        *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end(), less);
    result = lo_value + frac * (hi_value - lo_value);
    ops::fma(ledger, 1);
    ops::add(ledger, 1);
  }
  ops::cmp(ledger, compared);
  ops::mul(ledger, 2);
  return result;
}

Matrix refine_affinity(const Matrix& affinity, double p,
                       const std::vector<RefinementStep>& steps, CostLedger* ledger) {
  const Eigen::Index n = affinity.rows();
  if (affinity.cols() != n) throw DimensionMismatchError("affinity must be square");
  Matrix out = affinity;
  std::vector<double> row(static_cast<std::size_t>(n));
  for (RefinementStep step : steps) {
    switch (step) {
      case RefinementStep::RowThresholdPercentile:
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = out(i, j);
          const double cut = percentile(row, p, ledger);
          for (Eigen::Index j = 0; j < n; ++j) {
            if (out(i, j) < cut) {
              out(i, j) *= kSoftThresholdMultiplier;
              ops::mul(ledger, 1);
            }
          }
          ops::cmp(ledger, u64(n));
        }
        break;
      case RefinementStep::SymmetrizeMax:
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::max(out(i, j), out(j, i));
            out(i, j) = v;
            out(j, i) = v;
          }
        }
        ops::cmp(ledger, u64(n) * u64(n - 1) / 2);
        break;
      case RefinementStep::RowMaxNormalize:
        for (Eigen::Index i = 0; i < n; ++i) {
          const double peak = out.row(i).maxCoeff();
          if (peak > 0.0) out.row(i) /= peak;
        }
        ops::cmp(ledger, u64(n) * u64(n));
        ops::div(ledger, u64(n) * u64(n));
        break;
    }
  }
  return out;
}

Matrix laplacian(const Matrix& affinity, CostLedger* ledger) {
  const Eigen::Index n = affinity.rows();
  Matrix l = -affinity;
  for (Eigen::Index i = 0; i < n; ++i) l(i, i) += affinity.row(i).sum();
  ops::add(ledger, u64(n) * u64(n) + u64(n));
  return l;
}

int eigen_gap_count(const Vector& eigenvalues, int max_speakers) {
  const Eigen::Index n = eigenvalues.size();
  if (n < 2) throw TooFewEigenvaluesError("eigen-gap needs at least two eigenvalues");
  const Eigen::Index k_max = std::min<Eigen::Index>(std::max(max_speakers, 1), n - 1);
  int best_k = 1;
  double best_gap = eigenvalues(1) - eigenvalues(0);
  for (Eigen::Index k = 2; k <= k_max; ++k) {
    const double gap = eigenvalues(k) - eigenvalues(k - 1);
    if (gap > best_gap) {
      best_gap = gap;
      best_k = static_cast<int>(k);
    }
  }
  return best_k;
}

AutoTuneResult auto_tune(const Matrix& affinity, const SpectralParams& params,
                         CostLedger* ledger) {
  if (params.autotune_grid.empty()) throw EmptyGridError("autotune_grid is empty");
  const Eigen::Index n = affinity.rows();
  if (n < 2) throw TooFewInputsError("auto-tune needs at least two inputs");

  std::optional<SymmetricTridiagonalization> best_tri;
  AutoTuneResult best;
  best.ratio = kInf;
  bool have_best = false;
  for (double p : params.autotune_grid) {
    const Matrix refined = refine_affinity(affinity, p, params.refinement, ledger);
    SymmetricTridiagonalization tri(laplacian(refined, ledger), ledger);
    Vector values = tri.eigenvalues(ledger);
    const double lambda_max = values(n - 1);
    int k = eigen_gap_count(values, params.max_speakers);
    double ratio = kInf;
    if (lambda_max <= kZeroLaplacian) {
      // No edges at all: every input is its own component.
      k = static_cast<int>(std::min<Eigen::Index>(n, std::max(params.max_speakers, 1)));
    } else {
      // Numerator is the share of each row kept by the threshold, so
      // sparser graphs win when their gaps are equally clear.
      const double gap_norm = (values(k) - values(k - 1)) / lambda_max;
      if (gap_norm > 0.0) ratio = (100.0 - p) / gap_norm;
    }
    ops::add(ledger, 1);
    ops::div(ledger, 2);
    ops::cmp(ledger, 1);
    if (!have_best || ratio < best.ratio) {
      have_best = true;
      best.percentile = p;
      best.num_speakers = k;
      best.ratio = ratio;
      best.eigenvalues = std::move(values);
      best_tri.emplace(std::move(tri));
    }
  }
  best.eigenvectors = best_tri->eigenvectors(best.eigenvalues, best.num_speakers, ledger);
  return best;
}

namespace {

struct Assignment {
  std::vector<int> labels;
  std::vector<double> sq_dist;
};

void assign(const RowMatrix& points, const RowMatrix& centers, Assignment& out,
            CostLedger* ledger) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = kInf;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out.labels[static_cast<std::size_t>(i)] = best;
    out.sq_dist[static_cast<std::size_t>(i)] = best_d;
  }
  const std::uint64_t evals = u64(n) * u64(k);
  ops::add(ledger, evals * u64(points.cols()));
  ops::fma(ledger, evals * u64(points.cols()));
  ops::cmp(ledger, evals);
}

KMeansResult kmeans_once(const RowMatrix& points, int k, Rng& rng, int max_iters,
                         CostLedger* ledger) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  RowMatrix centers(k, dim);
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  // k-means++ seeding
  std::vector<double> d2(static_cast<std::size_t>(n), kInf);
  std::size_t first = rng.index(static_cast<std::uint64_t>(n));
  centers.row(0) = points.row(static_cast<Eigen::Index>(first));
  chosen[first] = 1;
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - centers.row(c - 1)).squaredNorm();
      auto& slot = d2[static_cast<std::size_t>(i)];
      slot = std::min(slot, d);
      total += slot;
    }
    ops::fma(ledger, u64(n) * u64(dim));
    ops::add(ledger, u64(n) * u64(dim) + u64(n));
    ops::cmp(ledger, u64(n));
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = static_cast<std::size_t>(n - 1);
      for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      ops::add(ledger, u64(n));
      ops::cmp(ledger, u64(n));
    } else {
      while (pick < chosen.size() && chosen[pick]) ++pick;
      if (pick == chosen.size()) pick = 0;
    }
    chosen[pick] = 1;
    centers.row(c) = points.row(static_cast<Eigen::Index>(pick));
  }

  Assignment current{std::vector<int>(static_cast<std::size_t>(n), -1),
                     std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  Assignment next = current;
  assign(points, centers, current, ledger);
  for (int iter = 0; iter < max_iters; ++iter) {
    RowMatrix sums = RowMatrix::Zero(k, dim);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int label = current.labels[static_cast<std::size_t>(i)];
      sums.row(label) += points.row(i);
      ++counts[static_cast<std::size_t>(label)];
    }
    ops::add(ledger, u64(n) * u64(dim));
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        ops::div(ledger, u64(dim));
        continue;
      }
      // Empty cluster: take over the point farthest from its center.
      std::size_t far = 0;
      for (std::size_t i = 1; i < current.sq_dist.size(); ++i) {
        if (current.sq_dist[i] > current.sq_dist[far]) far = i;
      }
      ops::cmp(ledger, u64(n));
      centers.row(c) = points.row(static_cast<Eigen::Index>(far));
      current.sq_dist[far] = 0.0;
    }
    assign(points, centers, next, ledger);
    const bool stable = next.labels == current.labels;
    ops::cmp(ledger, u64(n));
    std::swap(current, next);
    if (stable) break;
  }
  KMeansResult result;
  result.inertia = std::accumulate(current.sq_dist.begin(), current.sq_dist.end(), 0.0);
  ops::add(ledger, u64(n));
  result.labels = std::move(current.labels);
  return result;
}

}  // namespace

KMeansResult kmeans(const RowMatrix& points, int k, std::uint64_t seed, int restarts,
                    int max_iters, CostLedger* ledger) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw Error("k-means needs k >= 1");
  if (k > n) {
    throw KTooLargeError("k = " + std::to_string(k) + " exceeds " + std::to_string(n) +
                         " points");
  }
  if (k == n) {
    KMeansResult trivial;
    trivial.labels.resize(static_cast<std::size_t>(n));
    std::iota(trivial.labels.begin(), trivial.labels.end(), 0);
    return trivial;
  }
  KMeansResult best;
  best.inertia = kInf;
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    KMeansResult run = kmeans_once(points, k, rng, max_iters, ledger);
    ops::cmp(ledger, 1);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

SpeakerLabeling spectral_cluster(const RowMatrix& points, const SpectralParams& params,
                                 CostLedger* ledger) {
  if (points.rows() < 2) throw TooFewInputsError("spectral clustering needs N >= 2");
  const Matrix affinity = affinity_matrix(points, ledger);
  AutoTuneResult tuned = auto_tune(affinity, params, ledger);
  const int k = tuned.num_speakers;
  RowMatrix embedding = tuned.eigenvectors;
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  ops::fma(ledger, u64(embedding.rows()) * u64(k));
  ops::div(ledger, u64(embedding.rows()) * u64(k + 1));
  const KMeansResult km = kmeans(embedding, k, params.rng_seed, params.kmeans_restarts,
                                 params.kmeans_max_iters, ledger);
  return canonicalize_labels(km.labels);
}

std::uint64_t spectral_cost_bound(std::size_t n, std::size_t dim,
                                  const SpectralParams& params) {
  const std::uint64_t N = n;
  const std::uint64_t D = dim;
  const std::uint64_t G = params.autotune_grid.size();
  const std::uint64_t K = static_cast<std::uint64_t>(std::max(params.max_speakers, 1));
  const std::uint64_t affinity = N * N * (2 * D + 4);
  // Introselect performs at most ~2n log n comparisons; 4n(log n + 2) is a
  // safe envelope for one row including the min scan.
  const std::uint64_t row_percentile = 4 * N * (ceil_log2(N) + 2) + 8;
  const std::uint64_t refine = N * (row_percentile + 2 * N) + N * N + 2 * N * N;
  const std::uint64_t lap = N * N + N;
  const std::uint64_t grid = G * (refine + lap + eigen_cost_bound(n, 0) + 4);
  const std::uint64_t vectors = eigen_cost_bound(n, K) - eigen_cost_bound(n, 0);
  const std::uint64_t embed = N * (2 * K + K + 1);
  const std::uint64_t iters = static_cast<std::uint64_t>(std::max(params.kmeans_max_iters, 1));
  const std::uint64_t assign_cost = N * K * (3 * K + 1);
  const std::uint64_t init = K * (4 * N * K + 3 * N);
  const std::uint64_t per_iter = N * K + K * K + K * N + assign_cost + N;
  const std::uint64_t km = static_cast<std::uint64_t>(std::max(params.kmeans_restarts, 1)) *
                           (init + assign_cost + iters * per_iter + N + 1);
  return affinity + grid + vectors + embed + km;
}

}  // namespace msdiar
