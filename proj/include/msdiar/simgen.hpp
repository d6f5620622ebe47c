#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdiar/metrics.hpp"
#include "msdiar/types.hpp"

namespace msdiar {

struct SimSpec {
  int num_speakers = 2;
  std::size_t dim = 32;
  double intra_speaker_angle_deg = 5.0;
  double min_inter_speaker_angle_deg = 60.0;
  double turn_mean_seconds = 5.0;
  double turn_min_seconds = 1.0;
  double turn_max_seconds = 20.0;
  double total_duration_seconds = 600.0;
  std::uint64_t rng_seed = 0;
};

struct SimOutput {
  std::vector<EmbeddingRecord> records;
  std::vector<int> labels;              // true speaker index per record
  std::vector<RttmSegment> reference;   // one segment per turn
  int speakers_present = 0;             // distinct speakers that got a turn
};

// Throws InvalidConfigError for out-of-range fields.
void validate_sim_spec(const SimSpec& spec);

// Deterministic given the SimSpec. Throws InfeasibleAngleError when the speaker
// directions cannot be placed with the requested pairwise separation.
SimOutput generate(const SimSpec& spec, const std::string& file_id = "synth");

// Fraction of the unit sphere in R^dim covered by a cap of the given
// angular radius (radians).
double spherical_cap_fraction(std::size_t dim, double radius);

// "key = value" lines using the SimSpec field names; '#' comments.
SimSpec parse_sim_spec(const std::string& text);
std::string write_sim_spec(const SimSpec& spec);

}  // namespace msdiar
