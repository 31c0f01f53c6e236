#include "aftmc/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace aftmc {

void ArrayParams::validate() const {
  if (N_t < 1 || N_r < 1)
    throw std::invalid_argument("ArrayParams: N_t and N_r must be >= 1");
  if (f_c <= 0.0) throw std::invalid_argument("ArrayParams: f_c must be positive");
  if (p <= 0.0) throw std::invalid_argument("ArrayParams: p must be positive");
}

namespace {

CVector steering(double theta, double spacing_over_lambda, int n) {
  CVector a(n);
  const double step = -2.0 * kPi * spacing_over_lambda * std::sin(theta);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, step * k);
  return a;
}

}  // namespace

CVector steering_rx(double theta, const ArrayParams& array) {
  array.validate();
  return steering(theta, array.spacing() / array.wavelength(), array.N_r);
}

CVector steering_tx(double theta, const ArrayParams& array) {
  array.validate();
  return steering(theta, array.spacing() / array.wavelength(), array.N_t);
}

CVector beamformer(const ArrayParams& array, double theta_tilde) {
  CVector a = steering_tx(theta_tilde, array);
  return std::sqrt(array.p / array.N_t) * a;
}

double doppler_shift(const Vec2& v, const Vec2& q, const Vec2& q_bs, double f_c) {
  Vec2 delta = q - q_bs;
  double range = delta.norm();
  if (range <= 0.0)
    throw std::invalid_argument("doppler_shift: target coincides with transceiver");
  return 2.0 * f_c / kSpeedOfLight * v.dot(delta / range);
}

PathParams target_to_path(const Target& target, const Scene& scene,
                          const ArrayParams& array, const WaveformParams& wf) {
  wf.validate();
  Vec2 delta = target.q - scene.q_bs;
  double range = delta.norm();
  if (range <= 0.0)
    throw std::invalid_argument("target_to_path: target coincides with transceiver");

  PathParams p;
  p.theta = std::atan2(delta.x(), delta.y());
  p.tau = 2.0 * range / kSpeedOfLight;
  p.nu = doppler_shift(target.v, target.q, scene.q_bs, array.f_c);

  Complex alpha = target.beta *
                  steering_tx(p.theta, array).dot(beamformer(array, scene.beam_direction));
  double gamma_cycles = wf.c1 * static_cast<double>(wf.M) * wf.M *
                        (p.tau / wf.T) * (p.tau / wf.T);
  p.h = alpha * std::polar(1.0, 2.0 * kPi * gamma_cycles);
  return p;
}

Vec2 path_to_position(double theta, double tau, const Vec2& q_bs) {
  if (tau < 0.0) throw std::invalid_argument("path_to_position: tau must be >= 0");
  double range = kSpeedOfLight * tau / 2.0;
  return q_bs + range * Vec2(std::sin(theta), std::cos(theta));
}

}  // namespace aftmc
