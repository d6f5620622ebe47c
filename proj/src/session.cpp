#include "msdiar/session.hpp"

#include <algorithm>
#include <set>

#include "msdiar/assignment.hpp"

namespace msdiar {

DiarizationSession::DiarizationSession(ClusteringConfig config)
    : DiarizationSession(config, SpectralParams::from_config(config)) {}

DiarizationSession::DiarizationSession(ClusteringConfig config, SpectralParams spectral)
    : config_(validate_config(std::move(config))), spectral_(std::move(spectral)) {}

void DiarizationSession::append(const EmbeddingRecord& record) {
  EmbeddingRecord normalized = normalize_record(record);
  if (n_ == 0) {
    dim_ = normalized.vector.size();
  } else if (normalized.vector.size() != dim_) {
    throw DimensionMismatchError("record dimension " +
                                 std::to_string(normalized.vector.size()) +
                                 " differs from session dimension " + std::to_string(dim_));
  }
  turn_seen_ = turn_seen_ || normalized.turn_initiated;
  tail_.push_back(std::move(normalized.vector));
  ++n_;
}

RowMatrix DiarizationSession::tail_matrix() const {
  RowMatrix out(static_cast<Eigen::Index>(tail_.size()), static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < tail_.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(tail_[i].data(), static_cast<Eigen::Index>(dim_));
  }
  return out;
}

const SpeakerLabeling& DiarizationSession::push(const EmbeddingRecord& record,
                                                CostLedger* ledger) {
  append(record);
  StepTrace entry;
  entry.stored_vectors = stored_vectors();

  StepResult result = cluster_step(turn_seen_, tail_matrix(), cache_, config_, spectral_,
                                   &entry.cost);
  if (result.compressed) {
    cache_ = std::move(*result.compressed);
    tail_.clear();
  }
  last_labeling_ = std::move(result.labeling);
  stale_ = false;

  entry.step = n_;
  entry.stage = result.stage;
  entry.num_speakers = last_labeling_.num_speakers;
  entry.ahc_input_size = result.ahc_input_size;
  entry.spectral_input_size = result.spectral_input_size;
  entry.compressions = cache_.compressions;
  entry.covered_prefix_len = cache_.covered_prefix_len;
  if (ledger) *ledger += entry.cost;
  trace_.push_back(entry);
  return last_labeling_;
}

void DiarizationSession::ingest(const EmbeddingRecord& record, CostLedger* ledger) {
  append(record);
  StepTrace entry;
  entry.stored_vectors = stored_vectors();
  entry.clustered = false;
  entry.stage = route(n_, turn_seen_, config_, cache_);
  if (entry.stage == Stage::CompressedPreCluster) {
    entry.ahc_input_size = stored_vectors();
    cache_ = compress(tail_matrix(), cache_, config_, &entry.cost);
    tail_.clear();
  }
  stale_ = true;
  entry.step = n_;
  entry.compressions = cache_.compressions;
  entry.covered_prefix_len = cache_.covered_prefix_len;
  if (ledger) *ledger += entry.cost;
  trace_.push_back(entry);
}

SessionResult DiarizationSession::finalize() const {
  if (n_ == 0) throw EmptySessionError("no records were pushed");
  if (stale_) {
    throw StaleLabelingError("records were ingested after the last clustering step");
  }
  return SessionResult{last_labeling_, trace_};
}

SpeakerLabeling stable_display_labels(const SpeakerLabeling& previous,
                                      const SpeakerLabeling& current) {
  if (current.labels.empty()) return current;
  const std::size_t shared = std::min(previous.labels.size(), current.labels.size());
  // Display labels need not be contiguous, so size by the largest label.
  auto label_span = [](const std::vector<int>& labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  };
  const int kc = label_span(current.labels);
  const int kp = label_span(previous.labels);
  std::vector<int> rename(static_cast<std::size_t>(kc), -1);
  if (shared > 0 && kp > 0) {
    Matrix overlap = Matrix::Zero(kc, kp);
    for (std::size_t i = 0; i < shared; ++i) {
      overlap(current.labels[i], previous.labels[i]) += 1.0;
    }
    const std::vector<int> match = max_weight_assignment(overlap);
    for (int c = 0; c < kc; ++c) {
      const int p = match[static_cast<std::size_t>(c)];
      if (p >= 0 && overlap(c, p) > 0.0) rename[static_cast<std::size_t>(c)] = p;
    }
  }
  std::set<int> used;
  for (int r : rename) {
    if (r >= 0) used.insert(r);
  }
  int next_free = 0;
  SpeakerLabeling out;
  out.num_speakers = current.num_speakers;
  out.labels.reserve(current.labels.size());
  for (int label : current.labels) {
    int& target = rename[static_cast<std::size_t>(label)];
    if (target < 0) {
      while (used.count(next_free)) ++next_free;
      target = next_free;
      used.insert(target);
    }
    out.labels.push_back(target);
  }
  return out;
}

}  // namespace msdiar
