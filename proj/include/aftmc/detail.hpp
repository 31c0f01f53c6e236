#pragma once

#include "aftmc/types.hpp"

namespace aftmc::detail {

/// Cached unitary DFT matrix; reference stays valid for the process lifetime.
const CMatrix& dft(int M);

/// Chirp diagonal entries exp(-j 2 pi c m^2), m = 0..M-1.
CVector chirp_diag(int M, double c);

}  // namespace aftmc::detail
