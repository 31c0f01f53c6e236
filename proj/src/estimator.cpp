#include "aftmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aftmc/channel.hpp"
#include "aftmc/detail.hpp"

namespace aftmc {

void MusicConfig::validate(int n_r) const {
  if (K < 1 || K > n_r)
    throw std::invalid_argument("MusicConfig: K must lie in [1, N_r]");
  if (n_r - K + 1 < 2)
    throw std::invalid_argument("MusicConfig: subarray must keep >= 2 elements");
  if (grid_deg <= 0.0 || grid_deg > 90.0)
    throw std::invalid_argument("MusicConfig: grid_deg out of range");
}

void DdSearchConfig::validate() const {
  if (tau_oversample < 1 || nu_oversample < 1)
    throw std::invalid_argument("DdSearchConfig: oversampling factors must be >= 1");
  if (outer_iterations < 1)
    throw std::invalid_argument("DdSearchConfig: outer_iterations must be >= 1");
  if (refine_tol <= 0.0 || refine_tol >= 1.0)
    throw std::invalid_argument("DdSearchConfig: refine_tol must lie in (0, 1)");
  if (refine_max_steps < 1)
    throw std::invalid_argument("DdSearchConfig: refine_max_steps must be >= 1");
}

CMatrix spatial_smooth_covariance(const CMatrix& Y, int K) {
  const int n_r = static_cast<int>(Y.cols());
  const int m = static_cast<int>(Y.rows());
  if (m < 1 || n_r < 1)
    throw std::invalid_argument("spatial_smooth_covariance: empty input");
  if (K < 1 || K > n_r)
    throw std::invalid_argument("spatial_smooth_covariance: K must lie in [1, N_r]");
  const int l_sub = n_r - K + 1;

  CMatrix R = CMatrix::Zero(l_sub, l_sub);
  for (int k = 0; k < K; ++k) {
    auto Yk = Y.middleCols(k, l_sub);
    R.noalias() += Yk.adjoint() * Yk;
  }
  R /= static_cast<double>(K) * m;
  return 0.5 * (R + R.adjoint()).eval();
}

namespace {

CVector subarray_steering(double theta, const ArrayParams& array, int n) {
  CVector a(n);
  const double step =
      -2.0 * kPi * array.spacing() / array.wavelength() * std::sin(theta);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, step * k);
  return a;
}

}  // namespace

MusicSpectrum music_spectrum(const CMatrix& R_ss, const MusicConfig& cfg,
                             const ArrayParams& array, int num_sources) {
  array.validate();
  if (R_ss.rows() != R_ss.cols() || R_ss.rows() < 2)
    throw std::invalid_argument("music_spectrum: covariance must be square, >= 2x2");
  const int l_sub = static_cast<int>(R_ss.rows());
  if (num_sources < 1 || num_sources >= l_sub)
    throw std::invalid_argument(
        "music_spectrum: num_sources must lie in [1, subarray size)");
  if (cfg.grid_deg <= 0.0 || cfg.grid_deg > 90.0)
    throw std::invalid_argument("music_spectrum: grid_deg out of range");

  CMatrix R = R_ss;
  if (cfg.fb_averaging) {
    CMatrix Rb = R.conjugate().colwise().reverse().rowwise().reverse();
    R = 0.5 * (R + Rb);
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("music_spectrum: eigendecomposition failed");
  CMatrix U_n = eig.eigenvectors().leftCols(l_sub - num_sources);

  const int count = static_cast<int>(std::lround(180.0 / cfg.grid_deg)) + 1;
  MusicSpectrum spec;
  spec.angles.resize(count);
  spec.values.resize(count);
  for (int i = 0; i < count; ++i) {
    double theta = deg2rad(-90.0 + i * cfg.grid_deg);
    spec.angles(i) = theta;
    CVector probe = subarray_steering(theta, array, l_sub).conjugate();
    double denom = (U_n.adjoint() * probe).squaredNorm();
    spec.values(i) = 1.0 / std::max(denom, 1e-300);
  }
  return spec;
}

PeakPick pick_peaks(const RVector& angles, const RVector& values, int count) {
  if (angles.size() != values.size() || angles.size() < 3)
    throw std::invalid_argument("pick_peaks: need matching grids with >= 3 points");
  if (count < 1) throw std::invalid_argument("pick_peaks: count must be >= 1");

  std::vector<std::pair<double, int>> maxima;
  for (int i = 1; i + 1 < angles.size(); ++i) {
    if (values(i - 1) < values(i) && values(i) >= values(i + 1))
      maxima.emplace_back(values(i), i);
  }
  std::sort(maxima.begin(), maxima.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  PeakPick out;
  out.degenerate = static_cast<int>(maxima.size()) < count;
  const int take = std::min<int>(count, static_cast<int>(maxima.size()));
  for (int j = 0; j < take; ++j) {
    int i = maxima[j].second;
    double step = angles(i) - angles(i - 1);
    double denom = values(i - 1) - 2.0 * values(i) + values(i + 1);
    double delta = 0.0;
    if (std::isfinite(denom) && std::abs(denom) > 0.0) {
      delta = 0.5 * (values(i - 1) - values(i + 1)) / denom;
      if (!std::isfinite(delta) || std::abs(delta) > 1.0) delta = 0.0;
    }
    out.angles.push_back(angles(i) + delta * step);
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double aml_objective(double tau, double nu, double theta, const CVector& y,
                     const CVector& x, const WaveformParams& wf,
                     const ArrayParams& array) {
  wf.validate();
  array.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("aml_objective: x must have length M");
  if (y.size() != static_cast<Eigen::Index>(wf.M) * array.N_r)
    throw std::invalid_argument("aml_objective: y must have length M * N_r");

  CVector hx = apply_subcarrier_channel(x, tau, nu, wf);
  CVector b = steering_rx(theta, array);
  CVector d(static_cast<Eigen::Index>(wf.M) * array.N_r);
  for (int r = 0; r < array.N_r; ++r) d.segment(r * wf.M, wf.M) = b(r) * hx;
  double denom = d.squaredNorm();
  if (denom <= 0.0)
    throw std::invalid_argument("aml_objective: zero signature (x must be nonzero)");
  return std::norm(d.dot(y)) / denom;
}

namespace {

/// Factored matched-energy objective for a fixed angle. Algebraically equal
/// to aml_objective: the Kronecker structure collapses the antenna sum into
/// z = Y conj(b), and the unitary outer chirp/DFT move onto z once.
class DdObjective {
 public:
  DdObjective(double theta, const CVector& y, const CVector& x,
              const WaveformParams& wf, const ArrayParams& array)
      : wf_(wf), m_(wf.M) {
    Eigen::Map<const CMatrix> Ym(y.data(), wf.M, array.N_r);
    CVector b = steering_rx(theta, array);
    CVector z = Ym * b.conjugate();
    const CMatrix& F = detail::dft(m_);
    CVector l2 = detail::chirp_diag(m_, wf.c2);
    g_ = F.adjoint() * l2.conjugate().cwiseProduct(z).eval();
    lam2x_ = l2.conjugate().cwiseProduct(x);
    denom_ = static_cast<double>(array.N_r) * x.squaredNorm();
    w_.resize(m_);
    prod_.resize(m_);
  }

  bool valid() const { return denom_ > 0.0; }

  // conj(w_n(tau)) g_n with w(tau) = F^H (d(tau) o Lambda_c2^H x), cached by tau.
  void prepare_tau(double tau) {
    CVector u = lam2x_;
    const double d_step = tau / wf_.T;
    for (int m = 0; m < m_; ++m) u(m) *= std::polar(1.0, -2.0 * kPi * d_step * m);
    w_.noalias() = detail::dft(m_).adjoint() * u;
    const double c_step = 2.0 * m_ * wf_.c1 * tau / wf_.T;
    for (int n = 0; n < m_; ++n) {
      prod_(n) = std::conj(w_(n) * std::polar(1.0, -2.0 * kPi * c_step * n)) * g_(n);
    }
  }

  // |sum_n prod_n exp(-j 2 pi nu T n / M)|^2 / ||D||^2 at the prepared tau.
  double eval_nu(double nu) const {
    const double step = -2.0 * kPi * nu * wf_.T / m_;
    const Complex rot = std::polar(1.0, step);
    Complex phase(1.0, 0.0);
    Complex acc(0.0, 0.0);
    for (int n = 0; n < m_; ++n) {
      acc += prod_(n) * phase;
      phase *= rot;
    }
    return std::norm(acc) / denom_;
  }

  double eval(double tau, double nu) {
    prepare_tau(tau);
    return eval_nu(nu);
  }

 private:
  const WaveformParams& wf_;
  int m_;
  CVector g_, lam2x_, w_, prod_;
  double denom_ = 0.0;
};

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// One safeguarded parabolic move along a coordinate; returns the new point.
template <typename F>
double parabolic_step(F&& f, double t, double step, double lo, double hi,
                      double& best_val) {
  double tl = clamp(t - step, lo, hi);
  double tr = clamp(t + step, lo, hi);
  double vl = f(tl), vc = best_val, vr = f(tr);
  double denom = vl - 2.0 * vc + vr;
  double cand = t;
  if (std::isfinite(denom) && denom < 0.0) {
    double delta = 0.5 * (vl - vr) / denom;
    cand = clamp(t + delta * step, tl, tr);
  }
  double vcand = (cand == t) ? vc : f(cand);
  double best_t = t;
  if (vl > best_val) { best_val = vl; best_t = tl; }
  if (vr > best_val) { best_val = vr; best_t = tr; }
  if (vcand > best_val) { best_val = vcand; best_t = cand; }
  return best_t;
}

}  // namespace

std::pair<double, double> estimate_delay_doppler(double theta, const CVector& y,
                                                 const CVector& x,
                                                 const DdSearchConfig& cfg,
                                                 const WaveformParams& wf,
                                                 const ArrayParams& array) {
  wf.validate();
  array.validate();
  cfg.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("estimate_delay_doppler: x must have length M");
  if (y.size() != static_cast<Eigen::Index>(wf.M) * array.N_r)
    throw std::invalid_argument("estimate_delay_doppler: y must have length M * N_r");
  if (wf.L < 1)
    throw std::invalid_argument("estimate_delay_doppler: waveform has no prefix window");

  DdObjective obj(theta, y, x, wf, array);
  if (!obj.valid())
    throw std::invalid_argument("estimate_delay_doppler: x must be nonzero");

  const double tau_hi = wf.cpp_duration();
  const double tau_step = wf.T / (static_cast<double>(wf.M) * cfg.tau_oversample);
  const int n_tau = wf.L * cfg.tau_oversample;

  const double nu_max = cfg.nu_max(wf);
  const double nu_step = 1.0 / (wf.T * cfg.nu_oversample);
  const int n_nu = 2 * static_cast<int>(std::floor(nu_max / nu_step)) + 1;
  const double nu_lo = -std::floor(nu_max / nu_step) * nu_step;

  double best = -1.0, best_tau = 0.0, best_nu = 0.0;
  for (int it = 0; it < n_tau; ++it) {
    obj.prepare_tau(it * tau_step);
    for (int in = 0; in < n_nu; ++in) {
      double nu = nu_lo + in * nu_step;
      double v = obj.eval_nu(nu);
      if (v > best) {
        best = v;
        best_tau = it * tau_step;
        best_nu = nu;
      }
    }
  }

  // Refinement runs in chirp-aligned coordinates (tau, mu) with
  // nu = mu + slope * tau. The pre-chirp couples delay into the time ramp at
  // exactly this slope, so plain coordinate steps zigzag along a diagonal
  // ridge; in the rotated frame the two line searches are nearly separable.
  const double slope = 2.0 * wf.M * wf.M * wf.c1 / (wf.T * wf.T);
  const double tau_max = std::nexttoward(tau_hi, 0.0);
  const double mu_lo = -nu_max - std::max(slope, 0.0) * tau_max;
  const double mu_hi = nu_max - std::min(slope, 0.0) * tau_max;
  double dt = tau_step, dn = nu_step;
  double t = best_tau, mu = best_nu - slope * best_tau;
  for (int step = 0; step < cfg.refine_max_steps; ++step) {
    t = parabolic_step([&](double tt) { return obj.eval(tt, mu + slope * tt); },
                       t, dt, 0.0, tau_max, best);
    mu = parabolic_step([&](double mm) { return obj.eval(t, mm + slope * t); },
                        mu, dn, mu_lo, mu_hi, best);
    dt *= 0.5;
    dn *= 0.5;
    if (dt < cfg.refine_tol * tau_step && dn < cfg.refine_tol * nu_step) break;
  }
  return {t, clamp(mu + slope * t, -nu_max, nu_max)};
}

Complex estimate_gain(double theta, double tau, double nu, const CVector& y,
                      const CVector& x, const WaveformParams& wf,
                      const ArrayParams& array) {
  wf.validate();
  array.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("estimate_gain: x must have length M");
  if (y.size() != static_cast<Eigen::Index>(wf.M) * array.N_r)
    throw std::invalid_argument("estimate_gain: y must have length M * N_r");

  CVector hx = apply_subcarrier_channel(x, tau, nu, wf);
  CVector b = steering_rx(theta, array);
  Eigen::Map<const CMatrix> Ym(y.data(), wf.M, array.N_r);
  CVector z = Ym * b.conjugate();
  double denom = static_cast<double>(array.N_r) * hx.squaredNorm();
  if (denom <= 0.0)
    throw std::invalid_argument("estimate_gain: zero signature (x must be nonzero)");
  return hx.dot(z) / denom;
}

EstimationResult estimate_all(const CMatrix& Y, const CVector& x,
                              int num_targets, const MusicConfig& music_cfg,
                              const DdSearchConfig& dd_cfg,
                              const WaveformParams& wf,
                              const ArrayParams& array) {
  wf.validate();
  array.validate();
  dd_cfg.validate();
  music_cfg.validate(array.N_r);
  if (Y.rows() != wf.M || Y.cols() != array.N_r)
    throw std::invalid_argument("estimate_all: Y must be M x N_r");
  if (x.size() != wf.M)
    throw std::invalid_argument("estimate_all: x must have length M");
  if (num_targets < 1)
    throw std::invalid_argument("estimate_all: num_targets must be >= 1");

  EstimationResult result;
  CMatrix R_ss = spatial_smooth_covariance(Y, music_cfg.K);
  result.spectrum = music_spectrum(R_ss, music_cfg, array, num_targets);
  PeakPick peaks =
      pick_peaks(result.spectrum.angles, result.spectrum.values, num_targets);
  result.degenerate = peaks.degenerate;

  const int found = static_cast<int>(peaks.angles.size());
  result.paths.resize(found);
  std::vector<CVector> steer(found), model_time(found);
  for (int i = 0; i < found; ++i) {
    result.paths[i].theta = peaks.angles[i];
    steer[i] = steering_rx(peaks.angles[i], array);
  }

  // Strongest first: beamformed energy ranks how much each angle captures.
  std::vector<int> order(found);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> energy(found);
  for (int i = 0; i < found; ++i)
    energy[i] = (Y * steer[i].conjugate()).squaredNorm();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (energy[a] != energy[b]) return energy[a] > energy[b];
    return a < b;
  });

  if (found > 0) {
    for (int round = 0; round < dd_cfg.outer_iterations; ++round) {
      for (int idx : order) {
        CMatrix Yi = Y;
        for (int j = 0; j < found; ++j) {
          if (j == idx || model_time[j].size() == 0) continue;
          Yi.noalias() -=
              (result.paths[j].h * model_time[j]) * steer[j].transpose();
        }
        Eigen::Map<const CVector> yi(Yi.data(), Yi.size());
        auto [tau, nu] = estimate_delay_doppler(result.paths[idx].theta, yi, x,
                                                dd_cfg, wf, array);
        result.paths[idx].tau = tau;
        result.paths[idx].nu = nu;
        result.paths[idx].h = estimate_gain(result.paths[idx].theta, tau, nu,
                                            yi, x, wf, array);
        model_time[idx] = apply_subcarrier_channel(x, tau, nu, wf);
      }
    }
  }

  CMatrix residual = Y;
  for (int j = 0; j < found; ++j) {
    if (model_time[j].size() == 0) continue;
    residual.noalias() -=
        (result.paths[j].h * model_time[j]) * steer[j].transpose();
  }
  result.residual_energy = residual.squaredNorm();

  std::sort(result.paths.begin(), result.paths.end(),
            [](const PathParams& a, const PathParams& b) { return a.theta < b.theta; });
  return result;
}

}  // namespace aftmc
