#include "msdiar/router.hpp"

#include <algorithm>

#include "msdiar/ahc.hpp"

namespace msdiar {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::SingleSpeaker: return "SingleSpeaker";
    case Stage::Fallback: return "Fallback";
    case Stage::Main: return "Main";
    case Stage::PreCluster: return "PreCluster";
    case Stage::CompressedPreCluster: return "CompressedPreCluster";
  }
  return "Unknown";
}

std::vector<double> CompressionCache::weights() const {
  std::vector<double> out;
  out.reserve(assignment.size());
  for (const auto& members : assignment) out.push_back(static_cast<double>(members.size()));
  return out;
}

std::size_t effective_size(std::size_t n, const CompressionCache& cache) {
  if (cache.compressions == 0) return n;
  return cache.size() + (n - cache.covered_prefix_len);
}

Stage route(std::size_t n, bool turn_seen, const ClusteringConfig& config,
            const CompressionCache& cache) {
  if (!turn_seen) return Stage::SingleSpeaker;
  if (config.fallback_lower_bound.above(n)) return Stage::Fallback;
  if (config.main_upper_bound.above(n)) return Stage::Main;
  if (config.pre_upper_bound.above(effective_size(n, cache))) return Stage::PreCluster;
  return Stage::CompressedPreCluster;
}

namespace {

RowMatrix effective_matrix(const CompressionCache& cache, const RowMatrix& tail) {
  const Eigen::Index cached = cache.centroids.rows();
  const Eigen::Index dim = cached > 0 ? cache.centroids.cols() : tail.cols();
  if (cached > 0 && tail.rows() > 0 && tail.cols() != dim) {
    throw DimensionMismatchError("tail dimension differs from cached centroids");
  }
  RowMatrix out(cached + tail.rows(), dim);
  if (cached > 0) out.topRows(cached) = cache.centroids;
  if (tail.rows() > 0) out.bottomRows(tail.rows()) = tail;
  return out;
}

std::vector<double> effective_weights(const CompressionCache& cache, Eigen::Index tail_rows) {
  std::vector<double> w = cache.weights();
  w.resize(w.size() + static_cast<std::size_t>(tail_rows), 1.0);
  return w;
}

std::vector<int> identity_labels(std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<int>(i);
  return out;
}

}  // namespace

CompressionCache compress(const RowMatrix& tail, const CompressionCache& cache,
                          const ClusteringConfig& config, CostLedger* ledger) {
  if (!config.main_upper_bound.finite() || !config.pre_upper_bound.finite()) {
    throw SizeMismatchError("compression needs finite U1 and U2");
  }
  const std::size_t u1 = config.main_upper_bound.value();
  const std::size_t u2 = config.pre_upper_bound.value();
  const std::size_t cached = cache.size();
  const auto tail_rows = static_cast<std::size_t>(tail.rows());
  if (cached + tail_rows != u2) {
    throw SizeMismatchError("compression expects " + std::to_string(u2) +
                            " effective inputs, got " + std::to_string(cached + tail_rows));
  }
  const RowMatrix effective = effective_matrix(cache, tail);
  const std::vector<double> weights = effective_weights(cache, tail.rows());
  const SpeakerLabeling pre =
      ahc_cluster(effective, Linkage::Complete, TargetCountStop{u1}, ledger);

  CompressionCache next;
  next.centroids = cluster_centroids(effective, pre, weights, ledger);
  next.assignment.resize(static_cast<std::size_t>(pre.num_speakers));
  for (std::size_t e = 0; e < pre.labels.size(); ++e) {
    auto& members = next.assignment[static_cast<std::size_t>(pre.labels[e])];
    if (e < cached) {
      members.insert(members.end(), cache.assignment[e].begin(), cache.assignment[e].end());
    } else {
      members.push_back(cache.covered_prefix_len + (e - cached));
    }
  }
  for (auto& members : next.assignment) std::sort(members.begin(), members.end());
  next.compressions = cache.compressions + 1;
  next.covered_prefix_len = cache.covered_prefix_len + tail_rows;
  return next;
}

SpeakerLabeling expand_labels(std::span<const int> centroid_labels,
                              std::span<const int> pre_cluster_membership,
                              const CompressionCache& cache) {
  const std::size_t cached = cache.size();
  if (pre_cluster_membership.size() < cached) {
    throw IncompleteMappingError("membership does not cover the cached centroids");
  }
  const std::size_t tail = pre_cluster_membership.size() - cached;
  const std::size_t total = cache.covered_prefix_len + tail;
  if (total == 0) throw EmptyInputError("nothing to expand");
  std::vector<int> labels(total, -1);
  auto label_of = [&](std::size_t e) {
    const int pre = pre_cluster_membership[e];
    if (pre < 0 || static_cast<std::size_t>(pre) >= centroid_labels.size()) {
      throw IncompleteMappingError("effective item " + std::to_string(e) +
                                   " has no pre-cluster label");
    }
    return centroid_labels[static_cast<std::size_t>(pre)];
  };
  for (std::size_t e = 0; e < cached; ++e) {
    const int label = label_of(e);
    for (std::size_t original : cache.assignment[e]) {
      if (original >= cache.covered_prefix_len) {
        throw IncompleteMappingError("cache maps outside its covered prefix");
      }
      labels[original] = label;
    }
  }
  for (std::size_t t = 0; t < tail; ++t) {
    labels[cache.covered_prefix_len + t] = label_of(cached + t);
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (labels[i] < 0) {
      throw IncompleteMappingError("original input " + std::to_string(i) + " is unmapped");
    }
  }
  return canonicalize_labels(labels);
}

StepResult cluster_step(bool turn_seen, const RowMatrix& tail,
                        const CompressionCache& cache, const ClusteringConfig& config,
                        const SpectralParams& spectral_params, CostLedger* ledger) {
  const std::size_t n = cache.covered_prefix_len + static_cast<std::size_t>(tail.rows());
  if (n == 0) throw EmptyInputError("cluster_step needs at least one input");

  StepResult result;
  result.stage = route(n, turn_seen, config, cache);
  if (result.stage == Stage::SingleSpeaker || n == 1) {
    result.labeling.labels.assign(n, 0);
    result.labeling.num_speakers = 1;
    return result;
  }

  if (result.stage == Stage::Fallback || result.stage == Stage::Main) {
    const RowMatrix effective = effective_matrix(cache, tail);
    const auto size = static_cast<std::size_t>(effective.rows());
    SpeakerLabeling labels;
    if (result.stage == Stage::Fallback) {
      result.ahc_input_size = size;
      labels = ahc_cluster(effective, Linkage::Average,
                           ThresholdStop{config.fallback_threshold}, ledger);
    } else {
      result.spectral_input_size = size;
      labels = spectral_cluster(effective, spectral_params, ledger);
    }
    result.labeling = expand_labels(labels.labels, identity_labels(size), cache);
    return result;
  }

  const CompressionCache* active = &cache;
  RowMatrix remaining = tail;
  if (result.stage == Stage::CompressedPreCluster) {
    result.compressed = compress(tail, cache, config, ledger);
    result.ahc_input_size = static_cast<std::size_t>(tail.rows()) + cache.size();
    active = &*result.compressed;
    remaining.resize(0, tail.cols());
  }

  const std::size_t u1 = config.main_upper_bound.value();
  const RowMatrix effective = effective_matrix(*active, remaining);
  const std::vector<double> weights = effective_weights(*active, remaining.rows());
  const auto size = static_cast<std::size_t>(effective.rows());
  SpeakerLabeling pre;
  if (size > u1) {
    pre = ahc_cluster(effective, Linkage::Complete, TargetCountStop{u1}, ledger);
  } else {
    pre = canonicalize_labels(identity_labels(size));
  }
  result.ahc_input_size = std::max(result.ahc_input_size, size);
  const RowMatrix centroids = cluster_centroids(effective, pre, weights, ledger);
  std::vector<int> centroid_labels(static_cast<std::size_t>(centroids.rows()), 0);
  if (centroids.rows() >= 2) {
    result.spectral_input_size = static_cast<std::size_t>(centroids.rows());
    centroid_labels = spectral_cluster(centroids, spectral_params, ledger).labels;
  }
  result.labeling = expand_labels(centroid_labels, pre.labels, *active);
  return result;
}

}  // namespace msdiar
