#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msdiar/cost_ledger.hpp"
#include "msdiar/session.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

// One push with a fresh ledger. The labeling is the one an uninstrumented
// push would produce.
std::pair<SpeakerLabeling, CostLedger> instrumented_step(DiarizationSession& session,
                                                         const EmbeddingRecord& record);

struct CostRow {
  std::size_t n = 0;
  CostLedger ledger;
};

struct CostReport {
  std::vector<CostRow> rows;  // strictly increasing n
  ClusteringConfig config;
  std::string notes;
};

inline constexpr const char* kCostCsvHeader =
    "N,total_ops,adds,muls,divs,comparisons,eig_sweep_ops";

// Streams `records` through a session and measures the clustering step at
// each checkpoint N (1-based record count). Steps between checkpoints are
// ingested without clustering, which leaves the cache, and therefore every
// checkpoint's cost, unchanged.
// Throws InvalidConfigError when checkpoints are empty, not strictly
// increasing, zero, or beyond the stream.
CostReport sweep(const ClusteringConfig& config, std::span<const EmbeddingRecord> records,
                 std::span<const std::size_t> checkpoints);

std::string to_csv(const CostReport& report);

// Upper bound on the ledger total of any single step for a config with
// finite U2, given the embedding dimension. Throws InvalidConfigError
// when U2 is unbounded.
std::uint64_t step_cost_bound(const ClusteringConfig& config, std::size_t dim);

// "100,500,2000" -> {100, 500, 2000}; validates ordering.
std::vector<std::size_t> parse_checkpoints(const std::string& text);

}  // namespace msdiar
