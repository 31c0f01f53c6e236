#pragma once

#include <cstdint>
#include <vector>

#include "aftmc/types.hpp"

namespace aftmc {

/**
 * Multicarrier waveform built on the discrete affine Fourier transform.
 *
 * The transform is A = Lambda_c2 * F * Lambda_c1 with
 * Lambda_c[m] = exp(-j 2 pi c m^2) and F the unitary M-point DFT.
 * c1 = c2 = 0 collapses A to F, i.e. plain OFDM.
 */
struct WaveformParams {
  int M = 64;          ///< subcarriers per symbol
  double c1 = 0.0;     ///< pre-chirp rate
  double c2 = 0.0;     ///< post-chirp rate
  double T = 1.0 / 15000.0;  ///< symbol duration [s] (1/subcarrier spacing)
  int L = 16;          ///< chirp-periodic prefix length in samples, 0 <= L < M
  int qam_order = 16;  ///< QAM constellation size, one of {4, 16, 64}

  double subcarrier_spacing() const { return 1.0 / T; }
  double sample_period() const { return T / M; }
  double cpp_duration() const { return L * T / M; }

  /// Throws std::invalid_argument on out-of-range members.
  void validate() const;
};

/// Unitary M-point DFT matrix, F[m][n] = exp(-j 2 pi m n / M) / sqrt(M).
CMatrix unitary_dft(int M);

/// Forward transform matrix A = Lambda_c2 * F * Lambda_c1 (unitary).
CMatrix daft_matrix(const WaveformParams& wf);

/// Time-domain symbol s = A^H x from frequency/chirp-domain symbols x.
CVector modulate(const CVector& x, const WaveformParams& wf);

/// Prepend the chirp-periodic prefix; returns length M + L.
/// The prefix replays the symbol tail with the chirp-continuity phase,
/// so the continuous-time waveform stays smooth across the symbol start.
CVector add_cpp(const CVector& s, const WaveformParams& wf);

/**
 * Continuous-time baseband waveform value at time t in [-T_cpp, T].
 *
 * For t in [0, T] this is the chirped subcarrier sum whose samples at
 * t = n T / M reproduce modulate(). For t in [-T_cpp, 0) it is the
 * chirp-periodic extension matching add_cpp() at sample instants.
 * Throws std::invalid_argument outside the supported interval.
 */
Complex continuous_signal(const CVector& x, const WaveformParams& wf, double t);

/// Inverse transform y = A r, applied to a vector or per column of a matrix.
CVector demodulate(const CVector& r, const WaveformParams& wf);
CMatrix demodulate(const CMatrix& R, const WaveformParams& wf);

/// Gray-free square-QAM alphabet with unit mean symbol energy.
std::vector<Complex> qam_alphabet(int order);

/// `count` i.i.d. uniform draws from qam_alphabet(order), reproducible by seed.
CVector qam_symbols(int order, int count, std::uint64_t seed);

}  // namespace aftmc
