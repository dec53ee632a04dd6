#include <catch2/catch.hpp>

#include <atomic>
#include <vector>

#include "smm/errors.hpp"
#include "smm/fourier.hpp"
#include "smm/numerics.hpp"

using namespace smm;

TEST_CASE("frac and distance to integers") {
  CHECK(frac(1.25) == Approx(0.25));
  CHECK(frac(-0.25) == Approx(0.75));
  CHECK(dist_to_int(0.9) == Approx(0.1));
  CHECK(frac(-1e-300) < 1.0);
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum<double> s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("linear fit recovers a line") {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = linear_fit(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r2 == Approx(1.0));
}

TEST_CASE("golden section and bisection") {
  auto m = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, 0, 1, 1e-10);
  CHECK(m == Approx(0.3).margin(1e-8));
  auto r = bisect_root([](double t) { return t * t - 2; }, 0, 2, 1e-14);
  CHECK(r == Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(bisect_root([](double t) { return t * t + 1; }, 0, 1, 1e-6), InvalidArgument);
}

TEST_CASE("parallel_for visits each index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("fft round trip and shift interpolation") {
  const int N = 32;
  std::vector<Complex> v(N);
  for (int k = 0; k < N; ++k) v[k] = std::exp(std::cos(kTwoPi * k / N));
  auto w = v;
  fft_nd(w, 1, N, false);
  fft_nd(w, 1, N, true);
  for (int k = 0; k < N; ++k) CHECK(std::abs(w[k] - v[k]) < 1e-14);

  const double a = 0.3819660112501051;
  auto s = shift_interpolate(v, 1, N, {a});
  for (int k = 0; k < N; ++k) {
    CHECK(std::abs(s[k] - std::exp(std::cos(kTwoPi * (double(k) / N + a)))) < 1e-12);
  }
}

TEST_CASE("two-dimensional fft matches direct sum") {
  const int N = 4;
  std::vector<Complex> v(N * N);
  for (int i = 0; i < N * N; ++i) v[i] = Complex(i % 3, i % 5);
  auto f = v;
  fft_nd(f, 2, N, false);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      Complex acc = 0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) acc += v[i * N + j] * std::polar(1.0, -kTwoPi * (a * i + b * j) / N);
      CHECK(std::abs(acc - f[a * N + b]) < 1e-12);
    }
}
