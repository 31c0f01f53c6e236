#pragma once

#include <random>

#include "aftmc/types.hpp"

namespace testutil {

using aftmc::CMatrix;
using aftmc::Complex;
using aftmc::CVector;

inline CVector random_cvector(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(d(gen), d(gen));
  return v;
}

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

template <typename A, typename B>
double rel_frobenius(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace testutil
