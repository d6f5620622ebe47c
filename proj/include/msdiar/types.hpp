#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msdiar/errors.hpp"

namespace msdiar {

// Points are stored one per row.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A stage-size bound that may be disabled ("infinity").
class Bound {
 public:
  constexpr Bound() = default;
  static constexpr Bound unbounded() { return Bound(); }
  static constexpr Bound of(std::size_t n) { return Bound(n); }

  constexpr bool finite() const { return finite_; }
  // Throws std::logic_error when unbounded.
  std::size_t value() const;

  // True iff n < bound. Always true for an unbounded bound.
  constexpr bool above(std::size_t n) const { return !finite_ || n < value_; }

  std::string to_string() const;
  // Accepts a non-negative integer or "inf"/"infinity" (case-insensitive).
  static Bound parse(const std::string& text);

  friend constexpr bool operator==(const Bound& a, const Bound& b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  // Finite values order naturally; unbounded compares greater than any
  // finite value and equal to itself.
  friend constexpr bool operator<(const Bound& a, const Bound& b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(const Bound& a, const Bound& b) {
    return a < b || a == b;
  }

 private:
  constexpr explicit Bound(std::size_t n) : finite_(true), value_(n) {}
  bool finite_ = false;
  std::size_t value_ = 0;
};

struct EmbeddingRecord {
  std::vector<double> vector;
  double start_time = 0.0;
  double end_time = 0.0;
  bool turn_initiated = false;
};

inline constexpr double kMaxSegmentSeconds = 6.0;

// Renormalizes the vector to unit L2 norm and checks the time span.
// Throws InvalidRecordError for a (near) zero vector, an empty or
// inverted span, or a span longer than max_segment_seconds.
EmbeddingRecord normalize_record(EmbeddingRecord record,
                                 double max_segment_seconds = kMaxSegmentSeconds);

struct ClusteringConfig {
  Bound fallback_lower_bound = Bound::of(50);
  Bound main_upper_bound = Bound::of(300);
  Bound pre_upper_bound = Bound::of(600);
  double fallback_threshold = 0.5;
  int max_speakers = 8;
  std::vector<double> autotune_grid = {40, 45, 50, 55, 60, 65,
                                       70, 75, 80, 85, 90, 95};
  int kmeans_restarts = 10;
  int kmeans_max_iters = 300;
  std::uint64_t rng_seed = 0;
};

// Returns the config unchanged when every invariant holds.
//   0 <= L <= U1 < U2, except that U1 = U2 = inf is allowed jointly.
// Throws BoundOrderingError, EmptyGridError or InvalidConfigError.
ClusteringConfig validate_config(ClusteringConfig config);

// Flat "key = value" text, one field per line, '#' starts a comment.
// Unknown keys and unparsable values raise InvalidConfigError naming the
// offending line. The result is validated.
ClusteringConfig parse_config(const std::string& text);
std::string write_config(const ClusteringConfig& config);

struct SpeakerLabeling {
  std::vector<int> labels;
  int num_speakers = 0;

  std::size_t size() const { return labels.size(); }
  friend bool operator==(const SpeakerLabeling&, const SpeakerLabeling&) = default;
};

// Renumbers labels by first appearance.
SpeakerLabeling canonicalize_labels(std::span<const int> raw);

// True iff a and b induce the same partition of indices.
bool same_partition(std::span<const int> a, std::span<const int> b);

// Stacks record vectors into a row matrix; all records must share a
// dimension.
RowMatrix stack_vectors(std::span<const EmbeddingRecord> records);

}  // namespace msdiar
