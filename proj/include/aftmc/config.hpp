#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aftmc/estimator.hpp"
#include "aftmc/geometry.hpp"
#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace aftmc {

/// Target given in the polar form used throughout the experiment setup.
/// Velocity is radial, positive away from the transceiver.
struct TargetSpec {
  double range_m = 0.0;
  double speed_mps = 0.0;
  double angle_deg = 0.0;
};

struct SweepSpec {
  std::string parameter = "none";  ///< one of none, c1, c2, snr
  std::vector<double> values;
};

/**
 * Full experiment description. Default-constructed values reproduce the
 * standard setup: 60 GHz carrier, 64 subcarriers at 15 kHz spacing, 16-sample
 * prefix, 16x16 arrays, two radial targets at (50 m, 50 m/s, 30 deg) and
 * (100 m, 100 m/s, 50 deg), 16-QAM, 300 trials, c1 sweep {0, 0.03, 0.08}.
 */
struct ExperimentConfig {
  WaveformParams waveform = default_waveform();
  ArrayParams array;

  Vec2 q_bs{0.0, 0.0};
  /// asin(mean of target-angle sines): the ULA array factor is uniform in
  /// sin(theta), so this split illuminates both default targets equally.
  /// The plain 40 deg midpoint leaves the 50 deg target 19 dB weaker,
  /// right next to an array-factor null.
  double beam_direction_deg = 39.27345020734954;
  std::vector<TargetSpec> targets{{50.0, 50.0, 30.0}, {100.0, 100.0, 50.0}};
  bool beta_random_phase = true;   ///< fresh unit-modulus reflection phase per trial
  Complex beta_fixed{1.0, 0.0};    ///< used when beta_random_phase is false

  MusicConfig music;
  DdSearchConfig ddsearch = default_ddsearch();

  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 300;
  std::uint64_t master_seed = 20260817ULL;
  SweepSpec sweep{"c1", {0.0, 0.03, 0.08}};
  std::string output_dir = "out";
  int threads = 0;  ///< 0 = hardware concurrency

  static WaveformParams default_waveform() {
    WaveformParams wf;
    wf.c1 = 0.03;
    return wf;
  }
  static DdSearchConfig default_ddsearch() {
    DdSearchConfig dd;
    dd.nu_max_hz = 45000.0;  // covers the default scene's largest Doppler
    return dd;
  }
  static ExperimentConfig defaults() { return {}; }

  /// Physical scene with beta_fixed on every target (per-trial phases are
  /// the harness's job).
  Scene scene() const;

  void validate() const;  ///< throws std::invalid_argument
};

/// Parse/serialize the canonical JSON schema (see README). Unknown keys are
/// rejected so typos fail loudly.
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

/// Load from file; throws std::runtime_error naming the path on any failure.
ExperimentConfig load_config(const std::string& path);

}  // namespace aftmc
