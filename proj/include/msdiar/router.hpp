#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/spectral.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

enum class Stage { SingleSpeaker, Fallback, Main, PreCluster, CompressedPreCluster };

std::string_view stage_name(Stage stage);

// Cached pre-cluster centroids. Once K >= 1 there are exactly U1 centroids
// and they represent the first covered_prefix_len original inputs;
// assignment[c] lists, in ascending order, the original inputs behind
// centroid c. The index lists partition [0, covered_prefix_len).
struct CompressionCache {
  RowMatrix centroids;
  std::vector<std::vector<std::size_t>> assignment;
  std::size_t compressions = 0;  // K
  std::size_t covered_prefix_len = 0;

  std::size_t size() const { return static_cast<std::size_t>(centroids.rows()); }
  // Number of original inputs represented by each centroid.
  std::vector<double> weights() const;
};

// Number of vectors the clusterers see for a stream of N inputs.
std::size_t effective_size(std::size_t n, const CompressionCache& cache);

// Stage selection for a stream of N inputs (N counts the newest record).
//   no turn seen             -> SingleSpeaker
//   N < L                    -> Fallback
//   L <= N < U1              -> Main
//   U1 <= N, N_eff < U2      -> PreCluster
//   otherwise (N_eff == U2)  -> CompressedPreCluster
Stage route(std::size_t n, bool turn_seen, const ClusteringConfig& config,
            const CompressionCache& cache);

// Compresses the U2 effective vectors (cached centroids followed by `tail`)
// into U1 centroids with complete-linkage AHC. New centroids are means
// weighted by the number of original inputs each item represents.
// Throws SizeMismatchError unless the effective count is exactly U2.
CompressionCache compress(const RowMatrix& tail, const CompressionCache& cache,
                          const ClusteringConfig& config, CostLedger* ledger = nullptr);

// Maps labels of pre-cluster centroids back to original inputs.
// pre_cluster_membership[e] is the pre-cluster of effective item e; items
// [0, cache.size()) are cached centroids, the rest are tail inputs starting
// at original index cache.covered_prefix_len.
SpeakerLabeling expand_labels(std::span<const int> centroid_labels,
                              std::span<const int> pre_cluster_membership,
                              const CompressionCache& cache);

struct StepResult {
  Stage stage = Stage::SingleSpeaker;
  SpeakerLabeling labeling;
  std::size_t ahc_input_size = 0;       // largest AHC input this step
  std::size_t spectral_input_size = 0;  // 0 when spectral did not run
  // Set when this step compressed; the caller must adopt it and drop the
  // tail it passed in.
  std::optional<CompressionCache> compressed;
};

// One clustering step over every input seen so far: `tail` holds the
// uncompressed inputs after cache.covered_prefix_len, newest last.
StepResult cluster_step(bool turn_seen, const RowMatrix& tail,
                        const CompressionCache& cache, const ClusteringConfig& config,
                        const SpectralParams& spectral_params,
                        CostLedger* ledger = nullptr);

}  // namespace msdiar
