#pragma once

#include <utility>
#include <vector>

#include "aftmc/geometry.hpp"
#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace aftmc {

struct MusicConfig {
  int K = 4;              ///< number of overlapping subarrays for smoothing
  double grid_deg = 0.1;  ///< angle grid resolution [deg] over [-90, 90]
  bool fb_averaging = false;  ///< forward-backward averaging of the smoothed covariance
  void validate(int n_r) const;
};

struct DdSearchConfig {
  int tau_oversample = 4;  ///< coarse delay grid density, T/(M * tau_oversample)
  int nu_oversample = 4;   ///< coarse Doppler grid density, 1/(T * nu_oversample)
  double nu_max_hz = 0.0;  ///< Doppler window half-width; <= 0 means 2/T
  int outer_iterations = 3;    ///< interference-cancellation rounds
  double refine_tol = 1e-6;    ///< relative step-size stop for local refinement
  int refine_max_steps = 40;
  void validate() const;
  double nu_max(const WaveformParams& wf) const {
    return nu_max_hz > 0.0 ? nu_max_hz : 2.0 / wf.T;
  }
};

struct MusicSpectrum {
  RVector angles;  ///< grid [rad], -pi/2 .. pi/2 inclusive
  RVector values;  ///< pseudospectrum, real positive
};

struct PeakPick {
  std::vector<double> angles;  ///< refined peak angles [rad], sorted ascending
  bool degenerate = false;     ///< true when fewer peaks than requested exist
};

struct EstimationResult {
  std::vector<PathParams> paths;  ///< per-target estimates, sorted by angle
  MusicSpectrum spectrum;
  double residual_energy = 0.0;  ///< ||Y - model||_F^2 after the final round
  bool degenerate = false;
};

/// Spatially smoothed covariance: mean over K overlapping subarrays of the
/// per-subarray sample covariance (1/M) Y_k^H Y_k. Output is
/// (N_r - K + 1) x (N_r - K + 1) Hermitian PSD.
CMatrix spatial_smooth_covariance(const CMatrix& Y, int K);

/// MUSIC pseudospectrum over the angle grid from the smoothed covariance.
/// `num_sources` rows of the eigenbasis span the signal subspace.
MusicSpectrum music_spectrum(const CMatrix& R_ss, const MusicConfig& cfg,
                             const ArrayParams& array, int num_sources);

/// Highest `count` strict local maxima, parabolically refined. Plateaus
/// resolve to their leftmost sample; endpoints are not peaks.
PeakPick pick_peaks(const RVector& angles, const RVector& values, int count);

/// Matched-energy objective |D(theta,tau,nu)^H y|^2 / ||D||^2 for one path
/// signature D = b(theta) (x) (H(tau, nu) x). Reference implementation;
/// the search uses an algebraically identical factored form.
double aml_objective(double tau, double nu, double theta, const CVector& y,
                     const CVector& x, const WaveformParams& wf,
                     const ArrayParams& array);

/// Coarse grid search plus parabolic refinement of the matched-energy
/// objective at a fixed angle estimate. Refinement steps follow the
/// chirp-aligned delay/Doppler coordinates, where the objective separates.
std::pair<double, double> estimate_delay_doppler(double theta, const CVector& y,
                                                 const CVector& x,
                                                 const DdSearchConfig& cfg,
                                                 const WaveformParams& wf,
                                                 const ArrayParams& array);

/// Concentrated gain estimate h = D^H y / ||D||^2 at the given parameters.
Complex estimate_gain(double theta, double tau, double nu, const CVector& y,
                      const CVector& x, const WaveformParams& wf,
                      const ArrayParams& array);

/**
 * Full multi-target estimation: smoothed MUSIC for angles, then per-target
 * delay/Doppler/gain by matched-energy search with iterative interference
 * cancellation, targets revisited strongest-first for a fixed number of
 * rounds. Degenerate peak picking is propagated, with the available targets
 * estimated anyway.
 */
EstimationResult estimate_all(const CMatrix& Y, const CVector& x,
                              int num_targets, const MusicConfig& music_cfg,
                              const DdSearchConfig& dd_cfg,
                              const WaveformParams& wf,
                              const ArrayParams& array);

}  // namespace aftmc
