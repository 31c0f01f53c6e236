#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aftmc/config.hpp"
#include "aftmc/geometry.hpp"
#include "aftmc/types.hpp"

namespace aftmc {

struct TrialRecord {
  bool failed = false;
  std::string note;  ///< failure reason when failed
  /// Indexed by true target; populated only when the trial succeeded.
  std::vector<double> position_error_m;
  std::vector<double> theta_error_rad;
  std::vector<double> tau_error_s;
  std::vector<double> nu_error_hz;
  std::vector<PathParams> estimates;  ///< estimator output, sorted by angle
};

struct SweepRow {
  double snr_db = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double rmse_position_m = 0.0;
  std::vector<double> rmse_per_target_m;
  double rmse_theta_deg = 0.0;
  double rmse_tau_s = 0.0;
  double rmse_nu_hz = 0.0;
  double crlb_rms_position_m = 0.0;
  int trials_used = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

/// Trial seed derived from the sweep-point values, not their enumeration
/// order, so reordering grids never changes any row.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, double c1, double c2,
                                double snr_db, std::uint64_t trial_index);

/// Reference symbol vector and noise variance shared by every trial of one
/// sweep point (and by its CRLB, so bound and trials see the same noise).
struct PointReference {
  CVector x_ref;
  double sigma2 = 0.0;
  double crlb_rms_position_m = 0.0;
};
PointReference point_reference(const ExperimentConfig& cfg,
                               const WaveformParams& wf, double snr_db);

/// One Monte Carlo trial at fixed noise level: draw symbols and reflection
/// phases, synthesize, estimate, and score against the true targets with
/// greedy nearest-angle assignment. Never throws on estimation trouble;
/// failures come back flagged.
TrialRecord run_trial(const ExperimentConfig& cfg, const WaveformParams& wf,
                      double sigma2, std::uint64_t trial_seed);

/// RMSE aggregation over trial records (failed ones excluded but counted).
SweepRow aggregate_trials(const std::vector<TrialRecord>& records,
                          double snr_db, double c1, double c2,
                          double crlb_rms_position_m, int num_targets);

/// Full sweep: every (sweep value, SNR) point, `trials` seeded trials each,
/// optional thread-parallel execution with order-independent reduction.
SweepResult run_sweep(const ExperimentConfig& cfg);

std::string sweep_to_csv(const SweepResult& result);
void write_sweep_outputs(const ExperimentConfig& cfg, const SweepResult& result,
                         const std::string& dir);

}  // namespace aftmc
