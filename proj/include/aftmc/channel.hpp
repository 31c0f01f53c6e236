#pragma once

#include <cstdint>
#include <vector>

#include "aftmc/geometry.hpp"
#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace aftmc {

/// Diagonal factors a round-trip delay contributes after prefix removal:
/// a chirp-domain ramp c, a subcarrier ramp d, and the scalar offset gamma.
struct DelayOperators {
  CVector c_diag;  ///< time-index ramp exp(-j 4 pi M c1 tau n / T)
  CVector d_diag;  ///< subcarrier ramp exp(-j 2 pi m tau / T)
  Complex gamma;   ///< residual chirp offset exp(+j 2 pi c1 M^2 tau^2 / T^2)
};

/// Requires 0 <= tau < T_cpp; outside that window the prefix no longer
/// absorbs the delay and the model breaks.
DelayOperators delay_operators(double tau, const WaveformParams& wf);

/// Doppler phase ramp diagonal, entries exp(+j 2 pi nu n T / M).
CVector doppler_diag(double nu, const WaveformParams& wf);

/// Full M x M per-path subcarrier coupling matrix (unitary; gain excluded).
CMatrix subcarrier_channel(double tau, double nu, const WaveformParams& wf);

/// Same linear map applied to one symbol without forming the matrix.
/// Accepts any finite tau >= 0 so search objectives can probe beyond T_cpp.
CVector apply_subcarrier_channel(const CVector& x, double tau, double nu,
                                 const WaveformParams& wf);

struct ReceivedSignal {
  CMatrix Y;  ///< demodulated symbols, M x N_r
  CMatrix R;  ///< time-domain samples after prefix removal, M x N_r
};

/**
 * Received echo of one transmit symbol from explicit path parameters,
 * assembled with the factored per-path operators. Noise (variance sigma2
 * per complex sample) is added in the time domain before demodulation;
 * sigma2 = 0 yields the exact noiseless signal.
 */
ReceivedSignal synthesize_matrix_model(const CVector& x,
                                       const std::vector<PathParams>& paths,
                                       const WaveformParams& wf,
                                       const ArrayParams& array, double sigma2,
                                       std::uint64_t noise_seed);

/**
 * Reference synthesizer: evaluates the continuous-time echo
 * sum_i alpha_i b_r(theta_i) s_cpp(t - tau_i) exp(j 2 pi nu_i t) directly at
 * the sample instants, never touching the factored operators. Same noise
 * stream as synthesize_matrix_model for a given seed.
 */
ReceivedSignal synthesize_oracle(const CVector& x, const Scene& scene,
                                 const ArrayParams& array,
                                 const WaveformParams& wf, double sigma2,
                                 std::uint64_t noise_seed);

/// Per-sample noise variance that realizes `snr_db` against the mean
/// per-sample power of the noiseless demodulated signal.
double snr_to_sigma2(double snr_db, const CMatrix& noiseless_Y);

}  // namespace aftmc
