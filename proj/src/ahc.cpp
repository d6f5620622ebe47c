#include "msdiar/ahc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace msdiar {

Matrix pairwise_cosine_distance(const RowMatrix& points, CostLedger* ledger) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  Matrix dist = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double value = std::clamp(1.0 - points.row(i).dot(points.row(j)), 0.0, 2.0);
      dist(i, j) = value;
      dist(j, i) = value;
    }
  }
  const auto pairs = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n > 0 ? n - 1 : 0) / 2;
  ops::fma(ledger, pairs * static_cast<std::uint64_t>(d));
  ops::add(ledger, pairs);
  ops::cmp(ledger, 2 * pairs);
  return dist;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Linkage matrix with a cached nearest neighbour per row. Row r only looks
// at columns c > r, so the (distance, r, nn[r]) minimum over active rows is
// the lexicographically smallest minimal pair.
class Agglomerator {
 public:
  Agglomerator(Matrix distances, Linkage linkage, CostLedger* ledger)
      : dist_(std::move(distances)),
        linkage_(linkage),
        ledger_(ledger),
        n_(static_cast<std::size_t>(dist_.rows())),
        active_(n_, true),
        size_(n_, 1),
        parent_(n_),
        nn_(n_, 0),
        nn_dist_(n_, kInf),
        clusters_(n_) {
    for (std::size_t i = 0; i < n_; ++i) parent_[i] = i;
    for (std::size_t r = 0; r < n_; ++r) refresh_row(r);
  }

  std::size_t clusters() const { return clusters_; }

  // Smallest pending merge distance, or +inf when one cluster remains.
  double best(std::size_t& row) const {
    double best = kInf;
    row = n_;
    std::uint64_t scanned = 0;
    for (std::size_t r = 0; r < n_; ++r) {
      if (!active_[r]) continue;
      ++scanned;
      if (nn_dist_[r] < best) {
        best = nn_dist_[r];
        row = r;
      }
    }
    ops::cmp(ledger_, scanned);
    return best;
  }

  void merge_row(std::size_t i) {
    const std::size_t j = nn_[i];
    const double si = static_cast<double>(size_[i]);
    const double sj = static_cast<double>(size_[j]);
    std::uint64_t updated = 0;
    for (std::size_t c = 0; c < n_; ++c) {
      if (!active_[c] || c == i || c == j) continue;
      ++updated;
      double value;
      if (linkage_ == Linkage::Average) {
        value = (si * dist_(i, c) + sj * dist_(j, c)) / (si + sj);
      } else {
        value = std::max(dist_(i, c), dist_(j, c));
      }
      dist_(i, c) = value;
      dist_(c, i) = value;
    }
    if (linkage_ == Linkage::Average) {
      ops::mul(ledger_, 2 * updated);
      ops::add(ledger_, 2 * updated);
      ops::div(ledger_, updated);
    } else {
      ops::cmp(ledger_, updated);
    }
    active_[j] = false;
    parent_[j] = i;
    size_[i] += size_[j];
    --clusters_;

    refresh_row(i);
    for (std::size_t r = 0; r < i; ++r) {
      if (!active_[r]) continue;
      if (nn_[r] == i || nn_[r] == j) {
        refresh_row(r);
      } else {
        ops::cmp(ledger_, 1);
        const double value = dist_(r, i);
        if (value < nn_dist_[r] || (value == nn_dist_[r] && i < nn_[r])) {
          nn_dist_[r] = value;
          nn_[r] = i;
        }
      }
    }
    for (std::size_t r = i + 1; r < j; ++r) {
      if (active_[r] && nn_[r] == j) refresh_row(r);
    }
  }

  std::vector<int> roots() {
    std::vector<int> out(n_);
    for (std::size_t p = 0; p < n_; ++p) {
      std::size_t r = p;
      while (parent_[r] != r) r = parent_[r];
      out[p] = static_cast<int>(r);
    }
    return out;
  }

 private:
  void refresh_row(std::size_t r) {
    double best = kInf;
    std::size_t arg = n_;
    std::uint64_t scanned = 0;
    for (std::size_t c = r + 1; c < n_; ++c) {
      if (!active_[c]) continue;
      ++scanned;
      if (dist_(r, c) < best) {
        best = dist_(r, c);
        arg = c;
      }
    }
    ops::cmp(ledger_, scanned);
    nn_dist_[r] = best;
    nn_[r] = arg;
  }

  Matrix dist_;
  Linkage linkage_;
  CostLedger* ledger_;
  std::size_t n_;
  std::vector<bool> active_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> nn_;
  std::vector<double> nn_dist_;
  std::size_t clusters_;
};

}  // namespace

SpeakerLabeling ahc_cluster_distances(Matrix distances, Linkage linkage,
                                      const StopRule& stop, CostLedger* ledger) {
  const auto n = static_cast<std::size_t>(distances.rows());
  if (n == 0) throw EmptyInputError("ahc_cluster needs at least one embedding");
  if (distances.cols() != distances.rows()) {
    throw DimensionMismatchError("distance matrix must be square");
  }
  std::size_t target = 1;
  double threshold = kInf;
  if (const auto* t = std::get_if<TargetCountStop>(&stop)) {
    if (t->count < 1) throw Error("target cluster count must be at least 1");
    if (t->count > n) {
      throw TargetTooLargeError("target count " + std::to_string(t->count) +
                                " exceeds " + std::to_string(n) + " inputs");
    }
    target = t->count;
  } else {
    threshold = std::get<ThresholdStop>(stop).threshold;
  }

  Agglomerator agg(std::move(distances), linkage, ledger);
  while (agg.clusters() > target) {
    std::size_t row;
    const double d = agg.best(row);
    ops::cmp(ledger, 1);
    if (d > threshold) break;
    agg.merge_row(row);
  }
  const auto roots = agg.roots();
  return canonicalize_labels(roots);
}

SpeakerLabeling ahc_cluster(const RowMatrix& points, Linkage linkage,
                            const StopRule& stop, CostLedger* ledger) {
  if (points.rows() == 0) throw EmptyInputError("ahc_cluster needs at least one embedding");
  return ahc_cluster_distances(pairwise_cosine_distance(points, ledger), linkage, stop,
                               ledger);
}

RowMatrix cluster_centroids(const RowMatrix& points, const SpeakerLabeling& labeling,
                            std::span<const double> weights, CostLedger* ledger) {
  if (labeling.labels.size() != static_cast<std::size_t>(points.rows())) {
    throw SizeMismatchError("labeling does not cover every point");
  }
  if (!weights.empty() && weights.size() != labeling.labels.size()) {
    throw SizeMismatchError("one weight per point is required");
  }
  const Eigen::Index dim = points.cols();
  RowMatrix sums = RowMatrix::Zero(labeling.num_speakers, dim);
  std::vector<double> mass(static_cast<std::size_t>(labeling.num_speakers), 0.0);
  for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
    const int label = labeling.labels[i];
    if (label < 0 || label >= labeling.num_speakers) {
      throw SizeMismatchError("label out of range");
    }
    const double w = weights.empty() ? 1.0 : weights[i];
    sums.row(label) += w * points.row(static_cast<Eigen::Index>(i));
    mass[static_cast<std::size_t>(label)] += w;
  }
  const auto n = static_cast<std::uint64_t>(labeling.labels.size());
  ops::fma(ledger, n * static_cast<std::uint64_t>(dim));
  for (Eigen::Index c = 0; c < sums.rows(); ++c) {
    if (mass[static_cast<std::size_t>(c)] <= 0.0) {
      throw EmptyClusterError("cluster " + std::to_string(c) + " has no members");
    }
    const double norm = sums.row(c).norm();
    if (!(norm > 0.0)) throw NumericalError("centroid of cluster " + std::to_string(c) +
                                            " has zero norm");
    sums.row(c) /= norm;
  }
  const auto k = static_cast<std::uint64_t>(sums.rows());
  ops::fma(ledger, k * static_cast<std::uint64_t>(dim));
  ops::div(ledger, k * static_cast<std::uint64_t>(dim + 1));
  return sums;
}

std::uint64_t ahc_cost_bound(std::size_t n, std::size_t dim) {
  const std::uint64_t N = n;
  const std::uint64_t D = dim;
  const std::uint64_t distance = N * N * (2 * D + 3);
  const std::uint64_t init = N * N;
  // Per merge: global scan, linkage update, worst case every row refreshed.
  const std::uint64_t per_merge = N + 1 + 5 * N + N * N + N;
  return distance + init + N * per_merge + N;
}

}  // namespace msdiar
