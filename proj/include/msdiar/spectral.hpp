#pragma once

#include <cstdint>
#include <vector>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

enum class RefinementStep { RowThresholdPercentile, SymmetrizeMax, RowMaxNormalize };
enum class LaplacianKind { Unnormalized };

struct SpectralParams {
  int max_speakers = 8;
  std::vector<double> autotune_grid = {40, 45, 50, 55, 60, 65,
                                       70, 75, 80, 85, 90, 95};
  std::vector<RefinementStep> refinement = {RefinementStep::RowThresholdPercentile,
                                            RefinementStep::SymmetrizeMax,
                                            RefinementStep::RowMaxNormalize};
  LaplacianKind laplacian_kind = LaplacianKind::Unnormalized;
  int kmeans_restarts = 10;
  int kmeans_max_iters = 300;
  std::uint64_t rng_seed = 0;

  static SpectralParams from_config(const ClusteringConfig& config);
};

// Entries below a row's p-th percentile are scaled by this factor.
inline constexpr double kSoftThresholdMultiplier = 0.01;

// A[i][j] = (1 + <v_i, v_j>) / 2, diagonal exactly 1.
Matrix affinity_matrix(const RowMatrix& points, CostLedger* ledger = nullptr);

// p-th percentile of values with linear interpolation between order
// statistics (the numpy default).
double percentile(std::vector<double> values, double p, CostLedger* ledger = nullptr);

// Applies `steps` in order. The default sequence soft-thresholds each row
// below its p-th percentile, symmetrizes with max, then divides each row
// by its maximum.
Matrix refine_affinity(const Matrix& affinity, double p,
                       const std::vector<RefinementStep>& steps =
                           SpectralParams{}.refinement,
                       CostLedger* ledger = nullptr);

// L = D - A with D the diagonal of row sums.
Matrix laplacian(const Matrix& affinity, CostLedger* ledger = nullptr);

// argmax over k in [1, min(max_speakers, N-1)] of lambda_{k+1} - lambda_k
// (1-based, ascending). Ties resolve to the smaller k.
int eigen_gap_count(const Vector& eigenvalues, int max_speakers);

struct AutoTuneResult {
  double percentile = 0.0;
  int num_speakers = 1;
  double ratio = 0.0;
  Vector eigenvalues;   // of the selected Laplacian, ascending
  Matrix eigenvectors;  // n x num_speakers, smallest eigenvalues first
};

// Grid search over the pruning percentile. Each grid point is scored by
// r(p) = p / ((lambda_{k+1} - lambda_k) / lambda_max) at its eigen-gap
// argmax k; the smallest r wins, earlier grid points win ties.
AutoTuneResult auto_tune(const Matrix& affinity, const SpectralParams& params,
                         CostLedger* ledger = nullptr);

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

// Seeded k-means++ with Lloyd iterations; the restart with the lowest
// within-cluster sum of squares is kept.
KMeansResult kmeans(const RowMatrix& points, int k, std::uint64_t seed, int restarts,
                    int max_iters, CostLedger* ledger = nullptr);

// affinity -> auto_tune -> row-normalized spectral embedding -> k-means.
SpeakerLabeling spectral_cluster(const RowMatrix& points, const SpectralParams& params,
                                 CostLedger* ledger = nullptr);

// Worst-case op count of spectral_cluster on n points of dimension dim.
std::uint64_t spectral_cost_bound(std::size_t n, std::size_t dim,
                                  const SpectralParams& params);

}  // namespace msdiar
