#pragma once

#include <vector>

#include "aftmc/geometry.hpp"
#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace aftmc {

/// Fisher information and position error bound for one scene.
/// Channel parameter order is theta block, tau block, nu block; position
/// order is (x_1, y_1, ..., x_P, y_P).
struct FimReport {
  RMatrix J_rho;   ///< 3P x 3P channel-parameter information
  RMatrix J_eta;   ///< 2P x 2P position information
  RMatrix crlb;    ///< 2P x 2P position covariance bound (valid when observable)
  RMatrix T_jac;   ///< 2P x 3P chain-rule map, J_eta = T J_rho T^T
  bool observable = false;  ///< false when J_eta is numerically singular

  double trace_crlb() const { return crlb.trace(); }
  /// Bound comparable to an RMSE averaged over trials and targets.
  double rms_position_bound() const;
  /// Per-target position RMSE bound, sqrt of the 2x2 diagonal block trace.
  double target_bound(int i) const;
};

/// Stacked per-target signatures D, column i = b(theta_i) (x) (H_i x),
/// size (M N_r) x P. vec(noiseless Y) = D h.
CMatrix signature_matrix(const std::vector<PathParams>& paths, const CVector& x,
                         const WaveformParams& wf, const ArrayParams& array);

/// Derivatives of the signature columns, (M N_r) x 3P, columns ordered
/// [d/dtheta_1..P, d/dtau_1..P, d/dnu_1..P].
CMatrix signature_jacobian(const std::vector<PathParams>& paths, const CVector& x,
                           const WaveformParams& wf, const ArrayParams& array);

/// Fisher information of the channel parameters with the complex gains
/// treated as nuisance: (2/sigma2) Re{(E^H P_D_perp E) o (h* h^T tiled)}.
/// Throws std::invalid_argument when D is rank deficient (coincident paths).
RMatrix fim_channel(const CMatrix& E, const CMatrix& D, const CVector& h,
                    double sigma2);

/// Chain-rule map from positions to channel parameters, 2P x 3P.
/// `zero_doppler_block` drops position information carried by Doppler,
/// for scenes where velocity is treated as unknown.
RMatrix position_jacobian(const Scene& scene, const ArrayParams& array,
                          bool zero_doppler_block = false);

/// Full pipeline: paths from the scene, channel FIM, position bound.
FimReport crlb_position(const Scene& scene, const CVector& x,
                        const WaveformParams& wf, const ArrayParams& array,
                        double sigma2, bool zero_doppler_block = false);

struct C2SearchResult {
  double c2 = 0.0;
  double trace_crlb = 0.0;      ///< objective at the returned c2
  double baseline_trace = 0.0;  ///< objective at c2 = 0
  int evaluations = 0;
};

/**
 * Deterministic budgeted minimization of trace(position CRLB) over the
 * post-chirp rate c2 in [0, 1): a uniform coarse grid (always containing
 * c2 = 0, so the result never loses to the baseline) followed by a
 * golden-section polish around the best cell. `budget` caps objective
 * evaluations; must be >= 8.
 */
C2SearchResult optimize_c2(const Scene& scene, const CVector& x,
                           const WaveformParams& wf, const ArrayParams& array,
                           double sigma2, int budget);

}  // namespace aftmc
