#include "aftmc/waveform.hpp"

#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

#include "aftmc/detail.hpp"
#include "aftmc/rng.hpp"

namespace aftmc {

namespace detail {

const CMatrix& dft(int M) {
  static std::mutex mu;
  static std::map<int, CMatrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(M);
  if (it != cache.end()) return it->second;
  CMatrix F(M, M);
  const double s = 1.0 / std::sqrt(static_cast<double>(M));
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < M; ++n)
      F(m, n) = std::polar(s, -2.0 * kPi * (static_cast<double>(m) * n / M));
  return cache.emplace(M, std::move(F)).first->second;
}

CVector chirp_diag(int M, double c) {
  CVector d(M);
  for (int m = 0; m < M; ++m)
    d(m) = std::polar(1.0, -2.0 * kPi * c * static_cast<double>(m) * m);
  return d;
}

}  // namespace detail

void WaveformParams::validate() const {
  if (M < 2) throw std::invalid_argument("WaveformParams: M must be >= 2");
  if (T <= 0.0) throw std::invalid_argument("WaveformParams: T must be positive");
  if (L < 0 || L >= M)
    throw std::invalid_argument("WaveformParams: L must satisfy 0 <= L < M");
  if (qam_order != 4 && qam_order != 16 && qam_order != 64)
    throw std::invalid_argument("WaveformParams: qam_order must be 4, 16 or 64");
}

CMatrix unitary_dft(int M) {
  if (M < 1) throw std::invalid_argument("unitary_dft: M must be >= 1");
  return detail::dft(M);
}

CMatrix daft_matrix(const WaveformParams& wf) {
  wf.validate();
  CVector l1 = detail::chirp_diag(wf.M, wf.c1);
  CVector l2 = detail::chirp_diag(wf.M, wf.c2);
  return l2.asDiagonal() * detail::dft(wf.M) * l1.asDiagonal();
}

CVector modulate(const CVector& x, const WaveformParams& wf) {
  wf.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("modulate: x must have length M");
  CVector u = detail::chirp_diag(wf.M, wf.c2).conjugate().cwiseProduct(x);
  CVector v = detail::dft(wf.M).adjoint() * u;
  return detail::chirp_diag(wf.M, wf.c1).conjugate().cwiseProduct(v);
}

CVector add_cpp(const CVector& s, const WaveformParams& wf) {
  wf.validate();
  if (s.size() != wf.M)
    throw std::invalid_argument("add_cpp: s must have length M");
  const int M = wf.M, L = wf.L;
  CVector out(M + L);
  for (int k = 0; k < L; ++k) {
    double cycles = wf.c1 * (static_cast<double>(M) * M +
                             2.0 * M * (static_cast<double>(k) - L));
    out(k) = s(M - L + k) * std::polar(1.0, -2.0 * kPi * cycles);
  }
  out.tail(M) = s;
  return out;
}

Complex continuous_signal(const CVector& x, const WaveformParams& wf, double t) {
  wf.validate();
  if (x.size() != wf.M)
    throw std::invalid_argument("continuous_signal: x must have length M");
  if (t < -wf.cpp_duration() || t > wf.T)
    throw std::invalid_argument("continuous_signal: t outside [-T_cpp, T]");

  Complex prefix_phase(1.0, 0.0);
  if (t < 0.0) {
    double cycles =
        wf.c1 * static_cast<double>(wf.M) * wf.M * (1.0 + 2.0 * t / wf.T);
    prefix_phase = std::polar(1.0, -2.0 * kPi * cycles);
    t += wf.T;
  }

  const double frac = t / wf.T;
  const double quad = wf.c1 * static_cast<double>(wf.M) * wf.M * frac * frac;
  Complex acc(0.0, 0.0);
  for (int m = 0; m < wf.M; ++m) {
    double cycles = quad + m * frac + wf.c2 * static_cast<double>(m) * m;
    acc += x(m) * std::polar(1.0, 2.0 * kPi * cycles);
  }
  return prefix_phase * acc / std::sqrt(static_cast<double>(wf.M));
}

CVector demodulate(const CVector& r, const WaveformParams& wf) {
  wf.validate();
  if (r.size() != wf.M)
    throw std::invalid_argument("demodulate: r must have length M");
  CVector u = detail::chirp_diag(wf.M, wf.c1).cwiseProduct(r);
  CVector v = detail::dft(wf.M) * u;
  return detail::chirp_diag(wf.M, wf.c2).cwiseProduct(v);
}

CMatrix demodulate(const CMatrix& R, const WaveformParams& wf) {
  wf.validate();
  if (R.rows() != wf.M)
    throw std::invalid_argument("demodulate: R must have M rows");
  CVector l1 = detail::chirp_diag(wf.M, wf.c1);
  CVector l2 = detail::chirp_diag(wf.M, wf.c2);
  return l2.asDiagonal() * (detail::dft(wf.M) * (l1.asDiagonal() * R));
}

std::vector<Complex> qam_alphabet(int order) {
  if (order != 4 && order != 16 && order != 64)
    throw std::invalid_argument("qam_alphabet: order must be 4, 16 or 64");
  const int k = (order == 4) ? 2 : (order == 16 ? 4 : 8);
  const double norm = std::sqrt(2.0 * (static_cast<double>(k) * k - 1.0) / 3.0);
  std::vector<Complex> a;
  a.reserve(order);
  for (int i = 0; i < k; ++i)
    for (int q = 0; q < k; ++q)
      a.emplace_back((2.0 * i - (k - 1)) / norm, (2.0 * q - (k - 1)) / norm);
  return a;
}

CVector qam_symbols(int order, int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("qam_symbols: count must be >= 0");
  auto alphabet = qam_alphabet(order);
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> pick(0, order - 1);
  CVector x(count);
  for (int i = 0; i < count; ++i) x(i) = alphabet[pick(gen)];
  return x;
}

}  // namespace aftmc
