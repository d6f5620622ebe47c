#include "msdiar/simgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "msdiar/errors.hpp"
#include "msdiar/random.hpp"

namespace msdiar {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::size_t kPlacementAttempts = 200000;

double simpson_sin_power(double upper, double power) {
  constexpr int kIntervals = 4000;
  const double h = upper / kIntervals;
  double sum = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::pow(std::sin(i * h), power);
  }
  return sum * h / 3.0;
}

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  do {
    sq = 0.0;
    for (double& x : v) {
      x = rng.normal();
      sq += x * x;
    }
  } while (sq < 1e-12);
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::vector<double>> place_speakers(const SimSpec& spec) {
  const double min_angle = spec.min_inter_speaker_angle_deg * kDegToRad;
  const auto k = static_cast<std::size_t>(spec.num_speakers);
  // Caps of radius min_angle/2 around the directions must be disjoint.
  if (k > 1 && static_cast<double>(k) * spherical_cap_fraction(spec.dim, 0.5 * min_angle) > 1.0) {
    throw InfeasibleAngleError(std::to_string(k) + " directions cannot be " +
                               std::to_string(spec.min_inter_speaker_angle_deg) +
                               " degrees apart in dimension " + std::to_string(spec.dim));
  }
  const double max_cos = std::cos(min_angle);
  Rng rng(mix_seed(spec.rng_seed, 1));
  std::vector<std::vector<double>> dirs;
  std::size_t attempts = 0;
  while (dirs.size() < k) {
    if (++attempts > kPlacementAttempts) {
      throw InfeasibleAngleError("could not place " + std::to_string(k) +
                                 " speaker directions with the requested separation");
    }
    std::vector<double> cand = random_unit(rng, spec.dim);
    bool ok = true;
    for (const auto& d : dirs) {
      if (dot(cand, d) > max_cos) {
        ok = false;
        break;
      }
    }
    if (ok) dirs.push_back(std::move(cand));
  }
  return dirs;
}

double draw_turn_length(Rng& rng, const SimSpec& spec) {
  // Shifted exponential with the requested mean, truncated to the maximum.
  const double scale = spec.turn_mean_seconds - spec.turn_min_seconds;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    const double len = spec.turn_min_seconds - scale * std::log(u);
    if (len <= spec.turn_max_seconds) return len;
  }
  return spec.turn_max_seconds;
}

std::vector<double> noisy(Rng& rng, const std::vector<double>& dir, double sigma) {
  std::vector<double> noise(dir.size());
  for (double& x : noise) x = sigma * rng.normal();
  const double along = dot(noise, dir);
  std::vector<double> out(dir.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    out[i] = dir[i] + noise[i] - along * dir[i];
    sq += out[i] * out[i];
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : out) x *= inv;
  return out;
}

}  // namespace

double spherical_cap_fraction(std::size_t dim, double radius) {
  if (dim < 2) throw InvalidConfigError("dim must be at least 2");
  radius = std::clamp(radius, 0.0, std::numbers::pi);
  const double power = static_cast<double>(dim) - 2.0;
  if (dim == 2) return radius / std::numbers::pi;
  return simpson_sin_power(radius, power) / simpson_sin_power(std::numbers::pi, power);
}

void validate_sim_spec(const SimSpec& s) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidConfigError(field + ": " + why);
  };
  if (s.num_speakers < 1) fail("num_speakers", "must be at least 1");
  if (s.dim < 2) fail("dim", "must be at least 2");
  if (!(s.intra_speaker_angle_deg >= 0.0 && s.intra_speaker_angle_deg < 90.0)) {
    fail("intra_speaker_angle_deg", "must lie in [0, 90)");
  }
  if (!(s.min_inter_speaker_angle_deg >= 0.0 && s.min_inter_speaker_angle_deg <= 180.0)) {
    fail("min_inter_speaker_angle_deg", "must lie in [0, 180]");
  }
  if (!(s.turn_min_seconds > 0.0)) fail("turn_min_seconds", "must be positive");
  if (!(s.turn_mean_seconds > s.turn_min_seconds)) {
    fail("turn_mean_seconds", "must exceed turn_min_seconds");
  }
  if (!(s.turn_max_seconds >= s.turn_mean_seconds)) {
    fail("turn_max_seconds", "must be at least turn_mean_seconds");
  }
  if (!(s.total_duration_seconds > 0.0)) fail("total_duration_seconds", "must be positive");
}

SimOutput generate(const SimSpec& spec, const std::string& file_id) {
  validate_sim_spec(spec);
  const auto dirs = place_speakers(spec);
  Rng turns(mix_seed(spec.rng_seed, 2));
  Rng noise(mix_seed(spec.rng_seed, 3));
  const double sigma = std::tan(spec.intra_speaker_angle_deg * kDegToRad) /
                       std::sqrt(static_cast<double>(spec.dim) - 1.0);
  const auto k = static_cast<std::uint64_t>(spec.num_speakers);

  SimOutput out;
  std::set<int> present;
  double t = 0.0;
  int speaker = static_cast<int>(turns.index(k));
  bool first_turn = true;
  while (t < spec.total_duration_seconds - 1e-9) {
    double len = k == 1 ? spec.total_duration_seconds - t : draw_turn_length(turns, spec);
    const double end = std::min(t + len, spec.total_duration_seconds);
    present.insert(speaker);
    out.reference.push_back({file_id, 1, t, end - t, "spk" + std::to_string(speaker)});

    const auto pieces = static_cast<std::size_t>(
        std::max(1.0, std::ceil((end - t) / kMaxSegmentSeconds - 1e-9)));
    for (std::size_t p = 0; p < pieces; ++p) {
      EmbeddingRecord rec;
      rec.start_time = t + kMaxSegmentSeconds * static_cast<double>(p);
      rec.end_time = p + 1 == pieces ? end : t + kMaxSegmentSeconds * static_cast<double>(p + 1);
      rec.turn_initiated = p == 0 && !first_turn;
      rec.vector = noisy(noise, dirs[static_cast<std::size_t>(speaker)], sigma);
      out.records.push_back(std::move(rec));
      out.labels.push_back(speaker);
    }
    first_turn = false;
    t = end;
    if (k > 1) {
      // Uniform over the other speakers.
      int next = static_cast<int>(turns.index(k - 1));
      if (next >= speaker) ++next;
      speaker = next;
    }
  }
  out.speakers_present = static_cast<int>(present.size());
  return out;
}

namespace {

template <typename T>
T parse_number(const std::string& text, std::size_t line, const std::string& key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfigError("line " + std::to_string(line) + ": bad value '" + text +
                             "' for " + key);
  }
  return value;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

SimSpec parse_sim_spec(const std::string& text) {
  SimSpec spec;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string body = trim(raw.substr(0, raw.find('#')));
    if (body.empty()) continue;
    const auto sep = body.find_first_of("=:");
    if (sep == std::string::npos) {
      throw InvalidConfigError("line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, sep));
    const std::string value = trim(body.substr(sep + 1));
    if (key == "num_speakers") spec.num_speakers = parse_number<int>(value, line, key);
    else if (key == "dim") spec.dim = parse_number<std::size_t>(value, line, key);
    else if (key == "intra_speaker_angle_deg")
      spec.intra_speaker_angle_deg = parse_number<double>(value, line, key);
    else if (key == "min_inter_speaker_angle_deg")
      spec.min_inter_speaker_angle_deg = parse_number<double>(value, line, key);
    else if (key == "turn_mean_seconds") spec.turn_mean_seconds = parse_number<double>(value, line, key);
    else if (key == "turn_min_seconds") spec.turn_min_seconds = parse_number<double>(value, line, key);
    else if (key == "turn_max_seconds") spec.turn_max_seconds = parse_number<double>(value, line, key);
    else if (key == "total_duration_seconds")
      spec.total_duration_seconds = parse_number<double>(value, line, key);
    else if (key == "rng_seed") spec.rng_seed = parse_number<std::uint64_t>(value, line, key);
    else throw InvalidConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  validate_sim_spec(spec);
  return spec;
}

std::string write_sim_spec(const SimSpec& s) {
  std::ostringstream out;
  out.precision(17);
  out << "num_speakers = " << s.num_speakers << '\n'
      << "dim = " << s.dim << '\n'
      << "intra_speaker_angle_deg = " << s.intra_speaker_angle_deg << '\n'
      << "min_inter_speaker_angle_deg = " << s.min_inter_speaker_angle_deg << '\n'
      << "turn_mean_seconds = " << s.turn_mean_seconds << '\n'
      << "turn_min_seconds = " << s.turn_min_seconds << '\n'
      << "turn_max_seconds = " << s.turn_max_seconds << '\n'
      << "total_duration_seconds = " << s.total_duration_seconds << '\n'
      << "rng_seed = " << s.rng_seed << '\n';
  return out.str();
}

}  // namespace msdiar
