#include "msdiar/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace msdiar {

std::size_t Bound::value() const {
  if (!finite_) throw std::logic_error("Bound::value() on an unbounded bound");
  return value_;
}

std::string Bound::to_string() const {
  return finite_ ? std::to_string(value_) : std::string("inf");
}

Bound Bound::parse(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity" || lower == "unbounded") {
    return Bound::unbounded();
  }
  std::size_t n = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw InvalidConfigError("not a bound: '" + text + "'");
  }
  return Bound::of(n);
}

EmbeddingRecord normalize_record(EmbeddingRecord record,
                                 double max_segment_seconds) {
  double sq = 0.0;
  for (double v : record.vector) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm >= 1e-9)) {
    throw InvalidRecordError("embedding norm below 1e-9");
  }
  for (double& v : record.vector) v /= norm;
  if (!(record.end_time > record.start_time)) {
    throw InvalidRecordError("end time must exceed start time");
  }
  if (record.end_time - record.start_time > max_segment_seconds + 1e-9) {
    throw InvalidRecordError("segment longer than the maximum segment length");
  }
  return record;
}

ClusteringConfig validate_config(ClusteringConfig config) {
  const Bound& lower = config.fallback_lower_bound;
  const Bound& main = config.main_upper_bound;
  const Bound& pre = config.pre_upper_bound;
  const bool both_unbounded = !main.finite() && !pre.finite();
  if (!(lower <= main)) {
    throw BoundOrderingError("fallback_lower_bound must not exceed main_upper_bound");
  }
  if (!(main < pre) && !both_unbounded) {
    throw BoundOrderingError("main_upper_bound must be below pre_upper_bound");
  }
  if (main.finite() && main.value() == 0) {
    throw BoundOrderingError("main_upper_bound must be positive");
  }
  if (config.autotune_grid.empty()) {
    throw EmptyGridError("autotune_grid is empty");
  }
  for (std::size_t i = 0; i < config.autotune_grid.size(); ++i) {
    const double p = config.autotune_grid[i];
    if (!(p > 0.0 && p < 100.0)) {
      throw InvalidConfigError("autotune_grid entries must lie in (0, 100)");
    }
    if (i > 0 && !(p > config.autotune_grid[i - 1])) {
      throw InvalidConfigError("autotune_grid must be strictly increasing");
    }
  }
  if (!(config.fallback_threshold >= 0.0 && config.fallback_threshold <= 2.0)) {
    throw InvalidConfigError("fallback_threshold must lie in [0, 2]");
  }
  if (config.max_speakers < 1) {
    throw InvalidConfigError("max_speakers must be positive");
  }
  if (config.kmeans_restarts < 1) {
    throw InvalidConfigError("kmeans_restarts must be positive");
  }
  if (config.kmeans_max_iters < 1) {
    throw InvalidConfigError("kmeans_max_iters must be positive");
  }
  return config;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw InvalidConfigError("config line " + std::to_string(line) + ": bad value for '" +
                             key + "': '" + text + "'");
  }
  return value;
}

}  // namespace

ClusteringConfig parse_config(const std::string& text) {
  ClusteringConfig config;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto sep = line.find_first_of("=:");
    if (sep == std::string::npos) {
      throw InvalidConfigError("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, sep));
    const std::string value = trim(line.substr(sep + 1));
    auto bound = [&]() {
      try {
        return Bound::parse(value);
      } catch (const InvalidConfigError&) {
        throw InvalidConfigError("config line " + std::to_string(line_no) +
                                 ": bad value for '" + key + "': '" + value + "'");
      }
    };
    if (key == "fallback_lower_bound") {
      config.fallback_lower_bound = bound();
    } else if (key == "main_upper_bound") {
      config.main_upper_bound = bound();
    } else if (key == "pre_upper_bound") {
      config.pre_upper_bound = bound();
    } else if (key == "fallback_threshold") {
      config.fallback_threshold = parse_number<double>(value, line_no, key);
    } else if (key == "max_speakers") {
      config.max_speakers = parse_number<int>(value, line_no, key);
    } else if (key == "autotune_grid") {
      config.autotune_grid.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        config.autotune_grid.push_back(parse_number<double>(item, line_no, key));
      }
    } else if (key == "kmeans_restarts") {
      config.kmeans_restarts = parse_number<int>(value, line_no, key);
    } else if (key == "kmeans_max_iters") {
      config.kmeans_max_iters = parse_number<int>(value, line_no, key);
    } else if (key == "rng_seed") {
      config.rng_seed = parse_number<std::uint64_t>(value, line_no, key);
    } else {
      throw InvalidConfigError("config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
  }
  return validate_config(config);
}

std::string write_config(const ClusteringConfig& config) {
  std::ostringstream out;
  out << "fallback_lower_bound = " << config.fallback_lower_bound.to_string() << '\n'
      << "main_upper_bound = " << config.main_upper_bound.to_string() << '\n'
      << "pre_upper_bound = " << config.pre_upper_bound.to_string() << '\n'
      << "fallback_threshold = " << config.fallback_threshold << '\n'
      << "max_speakers = " << config.max_speakers << '\n'
      << "autotune_grid = ";
  for (std::size_t i = 0; i < config.autotune_grid.size(); ++i) {
    out << (i ? "," : "") << config.autotune_grid[i];
  }
  out << '\n'
      << "kmeans_restarts = " << config.kmeans_restarts << '\n'
      << "kmeans_max_iters = " << config.kmeans_max_iters << '\n'
      << "rng_seed = " << config.rng_seed << '\n';
  return out.str();
}

SpeakerLabeling canonicalize_labels(std::span<const int> raw) {
  if (raw.empty()) throw EmptyInputError("cannot canonicalize an empty labeling");
  SpeakerLabeling out;
  out.labels.reserve(raw.size());
  std::unordered_map<int, int> rename;
  for (int label : raw) {
    auto [it, inserted] = rename.try_emplace(label, static_cast<int>(rename.size()));
    out.labels.push_back(it->second);
  }
  out.num_speakers = static_cast<int>(rename.size());
  return out;
}

bool same_partition(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return canonicalize_labels(a).labels == canonicalize_labels(b).labels;
}

RowMatrix stack_vectors(std::span<const EmbeddingRecord> records) {
  if (records.empty()) return RowMatrix(0, 0);
  const std::size_t dim = records.front().vector.size();
  RowMatrix out(static_cast<Eigen::Index>(records.size()),
                static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].vector.size() != dim) {
      throw DimensionMismatchError("record " + std::to_string(i) + " has dimension " +
                                   std::to_string(records[i].vector.size()) +
                                   ", expected " + std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records[i].vector[j];
    }
  }
  return out;
}

}  // namespace msdiar
