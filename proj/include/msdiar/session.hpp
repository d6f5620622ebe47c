#pragma once

#include <cstddef>
#include <vector>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/router.hpp"
#include "msdiar/spectral.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

struct StepTrace {
  std::size_t step = 0;  // N after this step
  Stage stage = Stage::SingleSpeaker;
  bool clustered = true;  // false for ingest()
  int num_speakers = 0;
  CostLedger cost;
  std::size_t ahc_input_size = 0;
  std::size_t spectral_input_size = 0;
  std::size_t stored_vectors = 0;  // peak storage, measured before any compression
  std::size_t compressions = 0;
  std::size_t covered_prefix_len = 0;
};

struct SessionResult {
  SpeakerLabeling labeling;
  std::vector<StepTrace> trace;
};

// Streaming driver. Every push re-clusters the whole effective sequence
// and returns a fresh labeling of all N inputs; labels of earlier inputs
// may change between pushes. Not thread-safe; distinct sessions are
// independent.
class DiarizationSession {
 public:
  explicit DiarizationSession(ClusteringConfig config);
  DiarizationSession(ClusteringConfig config, SpectralParams spectral);

  // Appends a record (renormalized), compresses if triggered, runs a
  // clustering step. When `ledger` is non-null the step's operations are
  // added to it as well as to the trace.
  const SpeakerLabeling& push(const EmbeddingRecord& record, CostLedger* ledger = nullptr);

  // Bookkeeping half of push: appends and compresses when triggered but
  // skips clustering. The final labeling of a stream does not depend on
  // intermediate clustering, so ingest(...) followed by push(last) yields
  // the same labeling as pushing every record.
  void ingest(const EmbeddingRecord& record, CostLedger* ledger = nullptr);

  // Throws EmptySessionError before the first push, StaleLabelingError if
  // records were ingested after the last push.
  SessionResult finalize() const;

  std::size_t size() const { return n_; }
  bool turn_seen() const { return turn_seen_; }
  std::size_t dimension() const { return dim_; }
  std::size_t stored_vectors() const { return cache_.size() + tail_.size(); }
  const CompressionCache& cache() const { return cache_; }
  std::size_t tail_size() const { return tail_.size(); }
  const SpeakerLabeling& last_labeling() const { return last_labeling_; }
  const std::vector<StepTrace>& trace() const { return trace_; }
  const ClusteringConfig& config() const { return config_; }
  const SpectralParams& spectral_params() const { return spectral_; }

 private:
  void append(const EmbeddingRecord& record);
  RowMatrix tail_matrix() const;

  ClusteringConfig config_;
  SpectralParams spectral_;
  CompressionCache cache_;
  std::vector<std::vector<double>> tail_;
  std::size_t dim_ = 0;
  std::size_t n_ = 0;
  bool turn_seen_ = false;
  bool stale_ = false;
  SpeakerLabeling last_labeling_;
  std::vector<StepTrace> trace_;
};

// Renames `current` to agree as much as possible with `previous` on the
// shared prefix (maximum-overlap one-to-one matching). The partition is
// unchanged; labels absent from the matching take the smallest unused ids.
SpeakerLabeling stable_display_labels(const SpeakerLabeling& previous,
                                      const SpeakerLabeling& current);

}  // namespace msdiar
