#include <doctest.h>

#include <complex>
#include <random>
#include <set>

#include "aftmc/rng.hpp"
#include "aftmc/waveform.hpp"
#include "helpers.hpp"

using namespace aftmc;
using testutil::max_abs_diff;
using testutil::random_cvector;

namespace {

WaveformParams make_wf(int M, double c1, double c2, int L = 0) {
  WaveformParams wf;
  wf.M = M;
  wf.c1 = c1;
  wf.c2 = c2;
  wf.L = L;
  return wf;
}

// Straight double-loop evaluation of the chirped subcarrier sum; the
// reference the factored transform must reproduce.
CVector brute_force_time_symbol(const CVector& x, const WaveformParams& wf) {
  CVector s = CVector::Zero(wf.M);
  for (int n = 0; n < wf.M; ++n) {
    for (int m = 0; m < wf.M; ++m) {
      double cycles = wf.c1 * static_cast<double>(n) * n +
                      static_cast<double>(m) * n / wf.M +
                      wf.c2 * static_cast<double>(m) * m;
      s(n) += x(m) * std::polar(1.0, 2.0 * kPi * cycles);
    }
    s(n) /= std::sqrt(static_cast<double>(wf.M));
  }
  return s;
}

}  // namespace

TEST_CASE("transform reduces to the plain DFT at zero chirp rates") {
  const int M = 4;
  CMatrix expected(M, M);
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < M; ++n)
      expected(m, n) = std::polar(0.5, -2.0 * kPi * m * n / static_cast<double>(M));
  CHECK(max_abs_diff(daft_matrix(make_wf(M, 0.0, 0.0)), expected) < 1e-12);
}

TEST_CASE("transform is unitary for random chirp rates") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> rate(-0.5, 0.5);
  for (int M : {4, 16, 64}) {
    CMatrix eye = CMatrix::Identity(M, M);
    for (int k = 0; k < 20; ++k) {
      CMatrix A = daft_matrix(make_wf(M, rate(gen), rate(gen)));
      CHECK(max_abs_diff(A.adjoint() * A, eye) < 1e-12);
    }
  }
}

TEST_CASE("transform columns keep unit norm at nonzero chirp") {
  CMatrix A = daft_matrix(make_wf(64, 0.03, 0.0));
  for (int j = 0; j < 64; ++j)
    CHECK(A.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("modulating an impulse spreads energy evenly") {
  CVector x = CVector::Zero(4);
  x(0) = 1.0;
  CVector s = modulate(x, make_wf(4, 0.0, 0.0));
  for (int n = 0; n < 4; ++n) {
    CHECK(s(n).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(s(n).imag()) < 1e-12);
  }
}

TEST_CASE("factored transform matches the brute-force subcarrier sum") {
  WaveformParams wf = make_wf(64, 0.03, 7.3e-4);
  CVector x = qam_symbols(16, 64, 1234);
  CHECK(max_abs_diff(modulate(x, wf), brute_force_time_symbol(x, wf)) < 1e-12);
}

TEST_CASE("modulate/demodulate roundtrip recovers the symbols") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> rate(-0.5, 0.5);
  for (int k = 0; k < 50; ++k) {
    WaveformParams wf = make_wf(64, rate(gen), rate(gen));
    CVector x = qam_symbols(16, 64, 100 + k);
    CHECK(max_abs_diff(demodulate(modulate(x, wf), wf), x) < 1e-12);
  }
}

TEST_CASE("matrix demodulate applies the transform per column") {
  WaveformParams wf = make_wf(16, 0.11, 0.02);
  CMatrix R(16, 3);
  for (int c = 0; c < 3; ++c) R.col(c) = random_cvector(16, 50 + c);
  CMatrix Y = demodulate(R, wf);
  for (int c = 0; c < 3; ++c)
    CHECK(max_abs_diff(Y.col(c).eval(), demodulate(R.col(c).eval(), wf)) < 1e-13);
}

TEST_CASE("prefix is a phase-corrected copy of the symbol tail") {
  WaveformParams wf = make_wf(64, 0.03, 2.4e-4, 16);
  CVector x = qam_symbols(16, 64, 99);
  CVector s = modulate(x, wf);
  CVector sp = add_cpp(s, wf);
  REQUIRE(sp.size() == 80);
  CHECK(max_abs_diff(sp.tail(64), s) == 0.0);
  for (int k = 0; k < wf.L; ++k)
    CHECK(std::abs(sp(k)) == doctest::Approx(std::abs(s(64 - 16 + k))).epsilon(1e-12));
}

TEST_CASE("zero pre-chirp prefix reduces to a cyclic copy") {
  WaveformParams wf = make_wf(32, 0.0, 0.15, 8);
  CVector s = random_cvector(32, 5);
  CVector sp = add_cpp(s, wf);
  CHECK(max_abs_diff(sp.head(8), s.tail(8)) == 0.0);
}

TEST_CASE("continuous waveform hits the modulated samples exactly") {
  WaveformParams wf = make_wf(64, 0.03, 5.0e-4, 16);
  CVector x = qam_symbols(16, 64, 321);
  CVector s = modulate(x, wf);
  for (int n = 0; n < wf.M; ++n) {
    Complex v = continuous_signal(x, wf, n * wf.sample_period());
    CHECK(std::abs(v - s(n)) < 1e-12);
  }
}

TEST_CASE("prefix samples extend the continuous waveform") {
  WaveformParams wf = make_wf(64, 0.03, 5.0e-4, 16);
  CVector x = qam_symbols(16, 64, 4321);
  CVector sp = add_cpp(modulate(x, wf), wf);
  for (int k = 0; k < wf.L; ++k) {
    double t = (k - wf.L) * wf.sample_period();
    CHECK(std::abs(continuous_signal(x, wf, t) - sp(k)) < 1e-10);
  }
}

TEST_CASE("single subcarrier keeps a constant envelope") {
  WaveformParams wf = make_wf(64, 0.08, 0.0, 16);
  CVector x = CVector::Zero(64);
  x(0) = 1.0;
  for (double t : {-1.0e-5, -3.7e-6, 0.0, 1.3e-5, 6.6e-5}) {
    CHECK(std::abs(continuous_signal(x, wf, t)) ==
          doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  }
}

TEST_CASE("demodulation preserves white-noise statistics") {
  WaveformParams wf = make_wf(64, 0.03, 1.0e-3);
  const int cols = 1600;  // ~1e5 complex samples
  const double sigma2 = 3.7;
  CMatrix W(64, cols);
  fill_complex_gaussian(W, sigma2, 2024);
  CMatrix Y = demodulate(W, wf);
  double var_in = W.squaredNorm() / W.size();
  double var_out = Y.squaredNorm() / Y.size();
  CHECK(var_out == doctest::Approx(var_in).epsilon(1e-12));
  CHECK(var_out == doctest::Approx(sigma2).epsilon(0.02));
}

TEST_CASE("qam alphabets are normalized and complete") {
  for (int order : {4, 16, 64}) {
    auto a = qam_alphabet(order);
    REQUIRE(static_cast<int>(a.size()) == order);
    double energy = 0.0;
    std::set<std::pair<double, double>> uniq;
    for (Complex c : a) {
      energy += std::norm(c);
      uniq.insert({c.real(), c.imag()});
    }
    CHECK(energy / order == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(uniq.size() == a.size());
  }
  auto qpsk = qam_alphabet(4);
  for (Complex c : qpsk) {
    CHECK(std::abs(c.real()) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(c.imag()) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("qam draws are reproducible and stay in the alphabet") {
  CVector a = qam_symbols(16, 256, 777);
  CVector b = qam_symbols(16, 256, 777);
  CHECK(max_abs_diff(a, b) == 0.0);
  auto alphabet = qam_alphabet(16);
  for (int i = 0; i < a.size(); ++i) {
    double best = 1e9;
    for (Complex c : alphabet) best = std::min(best, std::abs(a(i) - c));
    CHECK(best < 1e-15);
  }
  CHECK(max_abs_diff(qam_symbols(16, 256, 778), a) > 0.0);
}

TEST_CASE("waveform parameter validation rejects bad values") {
  CHECK_THROWS_AS(make_wf(1, 0.0, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_wf(8, 0.0, 0.0, 8).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_wf(8, 0.0, 0.0, -1).validate(), std::invalid_argument);
  WaveformParams bad_T = make_wf(8, 0.0, 0.0);
  bad_T.T = 0.0;
  CHECK_THROWS_AS(bad_T.validate(), std::invalid_argument);
  WaveformParams bad_q = make_wf(8, 0.0, 0.0);
  bad_q.qam_order = 8;
  CHECK_THROWS_AS(bad_q.validate(), std::invalid_argument);

  WaveformParams wf = make_wf(8, 0.0, 0.0, 2);
  CVector x = CVector::Ones(8);
  CHECK_THROWS_AS(continuous_signal(x, wf, wf.T * 1.01), std::invalid_argument);
  CHECK_THROWS_AS(continuous_signal(x, wf, -wf.cpp_duration() * 1.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(modulate(CVector::Ones(7), wf), std::invalid_argument);
  CHECK_THROWS_AS(qam_alphabet(32), std::invalid_argument);
}
