#include "aftmc/crlb.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aftmc/channel.hpp"
#include "aftmc/detail.hpp"

namespace aftmc {

double FimReport::rms_position_bound() const {
  if (!observable || crlb.rows() == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(crlb.trace() / (crlb.rows() / 2));
}

double FimReport::target_bound(int i) const {
  if (!observable || 2 * i + 1 >= crlb.rows())
    return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(crlb.block(2 * i, 2 * i, 2, 2).trace());
}

namespace {

struct PathSignature {
  CVector d;        // b (x) (H x)
  CVector d_theta;  // derivative wrt angle
  CVector d_tau;    // derivative wrt delay
  CVector d_nu;     // derivative wrt Doppler
};

// Signature column and its three derivatives for one path, assembled from
// the factored channel map so no M x M matrix is ever formed.
PathSignature path_signature(const PathParams& p, const CVector& x,
                             const WaveformParams& wf, const ArrayParams& array) {
  const int M = wf.M;
  const int n_r = array.N_r;
  const CMatrix& F = detail::dft(M);
  CVector l2 = detail::chirp_diag(M, wf.c2);

  // Frequency-side pieces: u = d(tau) o Lambda_c2^H x and its tau derivative.
  CVector u(M), u_tau(M);
  const double d_step = p.tau / wf.T;
  for (int m = 0; m < M; ++m) {
    Complex base = std::conj(l2(m)) * x(m);
    Complex dm = std::polar(1.0, -2.0 * kPi * d_step * m);
    u(m) = base * dm;
    u_tau(m) = u(m) * Complex(0.0, -2.0 * kPi * m / wf.T);
  }
  CVector w = F.adjoint() * u;
  CVector w_tau = F.adjoint() * u_tau;

  // Time-side ramp r(n) = Delta(nu) o c(tau) and partial derivatives.
  CVector core(M), core_tau(M), core_nu(M);
  const double ramp = p.nu * wf.T / M - 2.0 * M * wf.c1 * p.tau / wf.T;
  for (int n = 0; n < M; ++n) {
    Complex r = std::polar(1.0, 2.0 * kPi * ramp * n);
    Complex c_tau = Complex(0.0, -4.0 * kPi * M * wf.c1 * n / wf.T);
    Complex d_nu = Complex(0.0, 2.0 * kPi * n * wf.T / M);
    core(n) = r * w(n);
    core_tau(n) = r * (w_tau(n) + c_tau * w(n));
    core_nu(n) = d_nu * r * w(n);
  }
  CVector hx = l2.cwiseProduct(F * core);
  CVector hx_tau = l2.cwiseProduct(F * core_tau);
  CVector hx_nu = l2.cwiseProduct(F * core_nu);

  CVector b = steering_rx(p.theta, array);
  CVector b_theta(n_r);
  const double phase_slope =
      -2.0 * kPi * array.spacing() / array.wavelength() * std::cos(p.theta);
  for (int k = 0; k < n_r; ++k) b_theta(k) = Complex(0.0, phase_slope * k) * b(k);

  PathSignature sig;
  sig.d.resize(static_cast<Eigen::Index>(M) * n_r);
  sig.d_theta.resize(sig.d.size());
  sig.d_tau.resize(sig.d.size());
  sig.d_nu.resize(sig.d.size());
  for (int r = 0; r < n_r; ++r) {
    sig.d.segment(r * M, M) = b(r) * hx;
    sig.d_theta.segment(r * M, M) = b_theta(r) * hx;
    sig.d_tau.segment(r * M, M) = b(r) * hx_tau;
    sig.d_nu.segment(r * M, M) = b(r) * hx_nu;
  }
  return sig;
}

void validate_paths(const std::vector<PathParams>& paths, const CVector& x,
                    const WaveformParams& wf, const char* who) {
  wf.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument(std::string(who) + ": x must have length M");
  if (paths.empty())
    throw std::invalid_argument(std::string(who) + ": needs at least one path");
}

}  // namespace

CMatrix signature_matrix(const std::vector<PathParams>& paths, const CVector& x,
                         const WaveformParams& wf, const ArrayParams& array) {
  validate_paths(paths, x, wf, "signature_matrix");
  array.validate();
  const int p = static_cast<int>(paths.size());
  CMatrix D(static_cast<Eigen::Index>(wf.M) * array.N_r, p);
  for (int i = 0; i < p; ++i)
    D.col(i) = path_signature(paths[i], x, wf, array).d;
  return D;
}

CMatrix signature_jacobian(const std::vector<PathParams>& paths, const CVector& x,
                           const WaveformParams& wf, const ArrayParams& array) {
  validate_paths(paths, x, wf, "signature_jacobian");
  array.validate();
  const int p = static_cast<int>(paths.size());
  CMatrix E(static_cast<Eigen::Index>(wf.M) * array.N_r, 3 * p);
  for (int i = 0; i < p; ++i) {
    PathSignature sig = path_signature(paths[i], x, wf, array);
    E.col(i) = sig.d_theta;
    E.col(p + i) = sig.d_tau;
    E.col(2 * p + i) = sig.d_nu;
  }
  return E;
}

RMatrix fim_channel(const CMatrix& E, const CMatrix& D, const CVector& h,
                    double sigma2) {
  const int p = static_cast<int>(D.cols());
  if (p < 1 || E.cols() != 3 * p || E.rows() != D.rows() || h.size() != p)
    throw std::invalid_argument("fim_channel: inconsistent dimensions");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("fim_channel: sigma2 must be positive");

  CMatrix gram = D.adjoint() * D;
  Eigen::FullPivLU<CMatrix> lu(gram);
  if (lu.rank() < p)
    throw std::invalid_argument(
        "fim_channel: signature matrix is rank deficient (coincident paths)");

  CMatrix EhD = E.adjoint() * D;                    // 3P x P
  CMatrix G = E.adjoint() * E - EhD * lu.solve(EhD.adjoint());

  CVector h_tiled(3 * p);
  h_tiled << h, h, h;
  CMatrix weighted =
      G.cwiseProduct((h_tiled.conjugate() * h_tiled.transpose()));
  return (2.0 / sigma2) * weighted.real();
}

RMatrix position_jacobian(const Scene& scene, const ArrayParams& array,
                          bool zero_doppler_block) {
  array.validate();
  const int p = static_cast<int>(scene.targets.size());
  if (p < 1)
    throw std::invalid_argument("position_jacobian: scene has no targets");

  RMatrix T = RMatrix::Zero(2 * p, 3 * p);
  for (int i = 0; i < p; ++i) {
    Vec2 delta = scene.targets[i].q - scene.q_bs;
    double range = delta.norm();
    if (range <= 0.0)
      throw std::invalid_argument("position_jacobian: target at transceiver");
    Vec2 u = delta / range;
    Vec2 u_perp(u.y(), -u.x());

    Vec2 dtheta = u_perp / range;
    Vec2 dtau = (2.0 / kSpeedOfLight) * u;
    Vec2 dnu = zero_doppler_block
                   ? Vec2(0.0, 0.0)
                   : Vec2((2.0 * array.f_c / kSpeedOfLight) *
                          scene.targets[i].v.dot(u_perp) / range * u_perp);
    for (int a = 0; a < 2; ++a) {
      T(2 * i + a, i) = dtheta(a);
      T(2 * i + a, p + i) = dtau(a);
      T(2 * i + a, 2 * p + i) = dnu(a);
    }
  }
  return T;
}

FimReport crlb_position(const Scene& scene, const CVector& x,
                        const WaveformParams& wf, const ArrayParams& array,
                        double sigma2, bool zero_doppler_block) {
  wf.validate();
  array.validate();
  const int p = static_cast<int>(scene.targets.size());
  if (p < 1)
    throw std::invalid_argument("crlb_position: scene has no targets");

  std::vector<PathParams> paths;
  paths.reserve(p);
  CVector h(p);
  for (int i = 0; i < p; ++i) {
    paths.push_back(target_to_path(scene.targets[i], scene, array, wf));
    h(i) = paths.back().h;
  }

  FimReport rep;
  CMatrix D = signature_matrix(paths, x, wf, array);
  CMatrix E = signature_jacobian(paths, x, wf, array);
  rep.J_rho = fim_channel(E, D, h, sigma2);
  rep.T_jac = position_jacobian(scene, array, zero_doppler_block);
  rep.J_eta = rep.T_jac * rep.J_rho * rep.T_jac.transpose();
  rep.J_eta = 0.5 * (rep.J_eta + rep.J_eta.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(rep.J_eta);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("crlb_position: eigendecomposition failed");
  double lmax = eig.eigenvalues().maxCoeff();
  double lmin = eig.eigenvalues().minCoeff();
  rep.observable = lmax > 0.0 && lmin > 1e-12 * lmax;
  if (rep.observable) {
    rep.crlb = eig.eigenvectors() *
               eig.eigenvalues().cwiseInverse().asDiagonal() *
               eig.eigenvectors().transpose();
  } else {
    rep.crlb = RMatrix::Constant(2 * p, 2 * p,
                                 std::numeric_limits<double>::quiet_NaN());
  }
  return rep;
}

C2SearchResult optimize_c2(const Scene& scene, const CVector& x,
                           const WaveformParams& wf, const ArrayParams& array,
                           double sigma2, int budget) {
  if (budget < 8)
    throw std::invalid_argument("optimize_c2: budget must be >= 8");

  C2SearchResult res;
  double best_c2 = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  auto objective = [&](double c2) {
    WaveformParams w = wf;
    w.c2 = c2;
    ++res.evaluations;
    FimReport rep = crlb_position(scene, x, w, array, sigma2);
    double v = rep.observable ? rep.trace_crlb()
                              : std::numeric_limits<double>::infinity();
    if (v < best_val || (v == best_val && c2 < best_c2)) {
      best_val = v;
      best_c2 = c2;
    }
    return v;
  };

  // Coarse uniform grid over the unit period, always including c2 = 0.
  const int max_grid = 2 * wf.M * wf.M;
  const int n_grid = std::min(std::max(budget * 3 / 4, 2), max_grid);
  res.baseline_trace = objective(0.0);
  for (int k = 1; k < n_grid; ++k)
    objective(static_cast<double>(k) / n_grid);
  double grid_best = best_c2;

  // Golden-section polish inside the winning cell's neighborhood; every
  // probe competes through the best tracking above, so the budget is exact.
  const double cell = 1.0 / n_grid;
  double a = std::max(0.0, grid_best - cell);
  double b = std::min(1.0 - 1e-12, grid_best + cell);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = res.evaluations < budget
                  ? objective(c)
                  : std::numeric_limits<double>::infinity();
  double fd = res.evaluations < budget
                  ? objective(d)
                  : std::numeric_limits<double>::infinity();
  while (res.evaluations < budget && (b - a) > 1e-9 * cell) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }

  res.c2 = best_c2;
  res.trace_crlb = best_val;
  return res;
}

}  // namespace aftmc
