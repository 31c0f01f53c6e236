#pragma once

#include <vector>

#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace aftmc {

/// Colocated monostatic transceiver: two ULAs sharing a phase center.
/// Angles are measured from the array boresight (+y axis), positive toward +x.
struct ArrayParams {
  int N_t = 16;
  int N_r = 16;
  double d = 0.0;      ///< element spacing [m]; values <= 0 mean half wavelength
  double f_c = 60e9;   ///< carrier frequency [Hz]
  double p = 1.0;      ///< transmit power budget, ||f_T||^2 = p

  double wavelength() const { return kSpeedOfLight / f_c; }
  double spacing() const { return d > 0.0 ? d : 0.5 * wavelength(); }
  void validate() const;
};

struct Target {
  Vec2 q{0.0, 0.0};        ///< position [m]
  Vec2 v{0.0, 0.0};        ///< velocity [m/s]
  Complex beta{1.0, 0.0};  ///< reflection coefficient
};

/// Per-path channel parameters, everything the received signal depends on.
struct PathParams {
  Complex h{0.0, 0.0};  ///< composite gain (reflection * beamforming * chirp offset)
  double theta = 0.0;   ///< angle of arrival/departure [rad]
  double tau = 0.0;     ///< round-trip delay [s]
  double nu = 0.0;      ///< Doppler shift [Hz], receding targets positive
};

struct Scene {
  Vec2 q_bs{0.0, 0.0};
  std::vector<Target> targets;
  double beam_direction = 0.0;  ///< transmit steering angle [rad]
};

/// Receive steering vector, entries exp(-j 2 pi (d/lambda) k sin(theta)).
CVector steering_rx(double theta, const ArrayParams& array);
/// Transmit steering vector, same phase profile over N_t elements.
CVector steering_tx(double theta, const ArrayParams& array);

/// Transmit beamformer f_T = sqrt(p / N_t) a_tx(theta_tilde), ||f_T||^2 = p.
CVector beamformer(const ArrayParams& array, double theta_tilde);

/// Doppler shift of a monostatic echo: (2 f_c / c) * (v . u), u unit vector
/// from the transceiver toward the target.
double doppler_shift(const Vec2& v, const Vec2& q, const Vec2& q_bs, double f_c);

/// Map a physical target to its path parameters under the given beamformer.
PathParams target_to_path(const Target& target, const Scene& scene,
                          const ArrayParams& array, const WaveformParams& wf);

/// Invert (angle, delay) back to a position on the q_bs-centered circle.
Vec2 path_to_position(double theta, double tau, const Vec2& q_bs);

}  // namespace aftmc
