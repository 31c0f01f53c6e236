#include "aftmc/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "aftmc/detail.hpp"
#include "aftmc/rng.hpp"

namespace aftmc {

DelayOperators delay_operators(double tau, const WaveformParams& wf) {
  wf.validate();
  if (!(tau >= 0.0) || tau >= wf.cpp_duration())
    throw std::invalid_argument("delay_operators: tau must lie in [0, T_cpp)");

  DelayOperators ops;
  ops.c_diag.resize(wf.M);
  ops.d_diag.resize(wf.M);
  const double c_step = 2.0 * wf.M * wf.c1 * tau / wf.T;
  const double d_step = tau / wf.T;
  for (int n = 0; n < wf.M; ++n) {
    ops.c_diag(n) = std::polar(1.0, -2.0 * kPi * c_step * n);
    ops.d_diag(n) = std::polar(1.0, -2.0 * kPi * d_step * n);
  }
  double gamma_cycles =
      wf.c1 * static_cast<double>(wf.M) * wf.M * (tau / wf.T) * (tau / wf.T);
  ops.gamma = std::polar(1.0, 2.0 * kPi * gamma_cycles);
  return ops;
}

CVector doppler_diag(double nu, const WaveformParams& wf) {
  wf.validate();
  CVector d(wf.M);
  const double step = nu * wf.T / wf.M;
  for (int n = 0; n < wf.M; ++n) d(n) = std::polar(1.0, 2.0 * kPi * step * n);
  return d;
}

namespace {

// Core of the per-path map: Delta(nu) o c(tau) o F^H (d(tau) o Lambda_c2^H x).
// tau is deliberately unchecked here; callers own the domain contract.
CVector delayed_core(const CVector& x, double tau, double nu,
                     const WaveformParams& wf) {
  const int M = wf.M;
  CVector u = detail::chirp_diag(M, wf.c2).conjugate().cwiseProduct(x);
  const double d_step = tau / wf.T;
  for (int m = 0; m < M; ++m) u(m) *= std::polar(1.0, -2.0 * kPi * d_step * m);
  CVector w = detail::dft(M).adjoint() * u;
  const double ramp = nu * wf.T / M - 2.0 * M * wf.c1 * tau / wf.T;
  for (int n = 0; n < M; ++n) w(n) *= std::polar(1.0, 2.0 * kPi * ramp * n);
  return w;
}

// Time-domain echo of one path (prefix removed): Lambda_c1^H delayed_core.
CVector path_time_signal(const CVector& x, double tau, double nu,
                         const WaveformParams& wf) {
  CVector w = delayed_core(x, tau, nu, wf);
  return detail::chirp_diag(wf.M, wf.c1).conjugate().cwiseProduct(w);
}

}  // namespace

CMatrix subcarrier_channel(double tau, double nu, const WaveformParams& wf) {
  DelayOperators ops = delay_operators(tau, wf);
  CVector dop = doppler_diag(nu, wf);
  const CMatrix& F = detail::dft(wf.M);
  CVector l2 = detail::chirp_diag(wf.M, wf.c2);
  CMatrix H = l2.asDiagonal() * F * dop.cwiseProduct(ops.c_diag).asDiagonal() *
              F.adjoint() * ops.d_diag.asDiagonal() * l2.conjugate().asDiagonal();
  return H;
}

CVector apply_subcarrier_channel(const CVector& x, double tau, double nu,
                                 const WaveformParams& wf) {
  wf.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("apply_subcarrier_channel: x must have length M");
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument(
        "apply_subcarrier_channel: tau must be finite and >= 0");
  CVector w = delayed_core(x, tau, nu, wf);
  CVector v = detail::dft(wf.M) * w;
  return detail::chirp_diag(wf.M, wf.c2).cwiseProduct(v);
}

ReceivedSignal synthesize_matrix_model(const CVector& x,
                                       const std::vector<PathParams>& paths,
                                       const WaveformParams& wf,
                                       const ArrayParams& array, double sigma2,
                                       std::uint64_t noise_seed) {
  wf.validate();
  array.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("synthesize_matrix_model: x must have length M");
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("synthesize_matrix_model: sigma2 must be >= 0");

  CMatrix R = CMatrix::Zero(wf.M, array.N_r);
  for (const PathParams& p : paths) {
    if (!(p.tau >= 0.0) || p.tau >= wf.cpp_duration())
      throw std::invalid_argument(
          "synthesize_matrix_model: path tau outside [0, T_cpp)");
    CVector t = path_time_signal(x, p.tau, p.nu, wf);
    CVector b = steering_rx(p.theta, array);
    R.noalias() += (p.h * t) * b.transpose();
  }
  if (sigma2 > 0.0) {
    CMatrix W(wf.M, array.N_r);
    fill_complex_gaussian(W, sigma2, noise_seed);
    R += W;
  }
  ReceivedSignal out;
  out.Y = demodulate(R, wf);
  out.R = std::move(R);
  return out;
}

ReceivedSignal synthesize_oracle(const CVector& x, const Scene& scene,
                                 const ArrayParams& array,
                                 const WaveformParams& wf, double sigma2,
                                 std::uint64_t noise_seed) {
  wf.validate();
  array.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("synthesize_oracle: x must have length M");
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("synthesize_oracle: sigma2 must be >= 0");

  CVector f_t = beamformer(array, scene.beam_direction);
  CMatrix R = CMatrix::Zero(wf.M, array.N_r);
  for (const Target& target : scene.targets) {
    Vec2 delta = target.q - scene.q_bs;
    double range = delta.norm();
    if (range <= 0.0)
      throw std::invalid_argument(
          "synthesize_oracle: target coincides with transceiver");
    double theta = std::atan2(delta.x(), delta.y());
    double tau = 2.0 * range / kSpeedOfLight;
    if (tau >= wf.cpp_duration())
      throw std::invalid_argument("synthesize_oracle: target beyond prefix range");
    double nu = doppler_shift(target.v, target.q, scene.q_bs, array.f_c);
    Complex alpha = target.beta * steering_tx(theta, array).dot(f_t);
    CVector b = steering_rx(theta, array);

    for (int n = 0; n < wf.M; ++n) {
      double t = n * wf.sample_period();
      Complex echo = alpha * continuous_signal(x, wf, t - tau) *
                     std::polar(1.0, 2.0 * kPi * nu * t);
      R.row(n) += echo * b.transpose();
    }
  }
  if (sigma2 > 0.0) {
    CMatrix W(wf.M, array.N_r);
    fill_complex_gaussian(W, sigma2, noise_seed);
    R += W;
  }
  ReceivedSignal out;
  out.Y = demodulate(R, wf);
  out.R = std::move(R);
  return out;
}

double snr_to_sigma2(double snr_db, const CMatrix& noiseless_Y) {
  if (noiseless_Y.size() == 0)
    throw std::invalid_argument("snr_to_sigma2: empty signal");
  double mean_power = noiseless_Y.squaredNorm() / noiseless_Y.size();
  if (mean_power <= 0.0)
    throw std::invalid_argument("snr_to_sigma2: signal has zero power");
  return mean_power / std::pow(10.0, snr_db / 10.0);
}

}  // namespace aftmc
