#pragma once

#include <cstddef>
#include <span>
#include <variant>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

enum class Linkage { Average, Complete };

// Merge while the smallest linkage distance is <= threshold.
struct ThresholdStop {
  double threshold;
};
// Merge until exactly `count` clusters remain.
struct TargetCountStop {
  std::size_t count;
};
using StopRule = std::variant<ThresholdStop, TargetCountStop>;

// D[i][j] = 1 - <v_i, v_j>, clamped to [0, 2], with an exact zero diagonal.
Matrix pairwise_cosine_distance(const RowMatrix& points, CostLedger* ledger = nullptr);

// Bottom-up clustering over cosine distances.
//
// Clusters are identified by their smallest member index. When several
// pairs share the minimum linkage distance, the lexicographically smallest
// (index, index) pair merges first. Average linkage uses the UPGMA update,
// complete linkage the maximum.
SpeakerLabeling ahc_cluster(const RowMatrix& points, Linkage linkage,
                            const StopRule& stop, CostLedger* ledger = nullptr);

// Same as ahc_cluster but starts from a precomputed distance matrix.
SpeakerLabeling ahc_cluster_distances(Matrix distances, Linkage linkage,
                                      const StopRule& stop,
                                      CostLedger* ledger = nullptr);

// One unit-norm centroid per label, in label order. With weights, each
// member contributes proportionally to its weight.
RowMatrix cluster_centroids(const RowMatrix& points, const SpeakerLabeling& labeling,
                            std::span<const double> weights = {},
                            CostLedger* ledger = nullptr);

// Worst-case op count of ahc_cluster on n points of dimension dim
// (distance matrix included). Used by the step cost bound.
std::uint64_t ahc_cost_bound(std::size_t n, std::size_t dim);

}  // namespace msdiar
