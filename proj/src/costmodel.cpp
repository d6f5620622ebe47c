#include "msdiar/costmodel.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "msdiar/ahc.hpp"
#include "msdiar/errors.hpp"
#include "msdiar/spectral.hpp"

namespace msdiar {

std::pair<SpeakerLabeling, CostLedger> instrumented_step(DiarizationSession& session,
                                                         const EmbeddingRecord& record) {
  CostLedger ledger;
  SpeakerLabeling labeling = session.push(record, &ledger);
  return {std::move(labeling), ledger};
}

namespace {

void check_checkpoints(std::span<const std::size_t> checkpoints, std::size_t limit) {
  if (checkpoints.empty()) throw InvalidConfigError("checkpoints: at least one is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0) throw InvalidConfigError("checkpoints: values must be positive");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw InvalidConfigError("checkpoints: values must be strictly increasing");
    }
  }
  if (checkpoints.back() > limit) {
    throw InvalidConfigError("checkpoints: " + std::to_string(checkpoints.back()) +
                             " exceeds stream length " + std::to_string(limit));
  }
}

}  // namespace

CostReport sweep(const ClusteringConfig& config, std::span<const EmbeddingRecord> records,
                 std::span<const std::size_t> checkpoints) {
  check_checkpoints(checkpoints, records.size());
  CostReport report;
  report.config = validate_config(config);
  report.notes =
      "per-step cost bounded by O(U1^w) + O(U2^2), 2.37 <= w <= 3; "
      "w of this eigensolver is 3";

  DiarizationSession session(report.config);
  std::size_t next = 0;
  for (std::size_t i = 0; i < checkpoints.back(); ++i) {
    if (i + 1 == checkpoints[next]) {
      auto [labeling, ledger] = instrumented_step(session, records[i]);
      report.rows.push_back({i + 1, ledger});
      ++next;
    } else {
      session.ingest(records[i]);
    }
  }
  return report;
}

std::string to_csv(const CostReport& report) {
  std::ostringstream out;
  out << kCostCsvHeader << '\n';
  for (const CostRow& row : report.rows) {
    const CostLedger& c = row.ledger;
    out << row.n << ',' << c.total() << ',' << c.adds << ',' << c.muls << ',' << c.divs << ','
        << c.comparisons << ',' << c.eig_sweep_ops << '\n';
  }
  return out.str();
}

std::uint64_t step_cost_bound(const ClusteringConfig& config, std::size_t dim) {
  const ClusteringConfig cfg = validate_config(config);
  if (!cfg.pre_upper_bound.finite()) {
    throw InvalidConfigError("cost bound requires a finite pre_upper_bound");
  }
  const SpectralParams params = SpectralParams::from_config(cfg);
  const std::size_t L = cfg.fallback_lower_bound.value();
  const std::size_t U1 = cfg.main_upper_bound.value();
  const std::size_t U2 = cfg.pre_upper_bound.value();
  const std::uint64_t D = dim;
  auto centroids = [&](std::uint64_t n, std::uint64_t k) {
    return 2 * n * D + 2 * k * D + k * (D + 1);
  };
  const std::uint64_t fallback = ahc_cost_bound(L, dim);
  const std::uint64_t main = spectral_cost_bound(U1, dim, params);
  const std::uint64_t pre = ahc_cost_bound(U2, dim) + centroids(U2, U1) + main;
  const std::uint64_t compressed = pre + ahc_cost_bound(U1, dim) + centroids(U1, U1);
  return std::max({fallback, main, pre, compressed});
}

std::vector<std::size_t> parse_checkpoints(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw InvalidConfigError("checkpoints: empty entry");
    item = item.substr(first, last - first + 1);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw InvalidConfigError("checkpoints: '" + item + "' is not a non-negative integer");
    }
    out.push_back(value);
  }
  check_checkpoints(out, static_cast<std::size_t>(-1));
  return out;
}

}  // namespace msdiar
