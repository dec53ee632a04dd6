#include <catch2/catch.hpp>

#include <cmath>

#include "smm/ergodic.hpp"
#include "smm/errors.hpp"

using namespace smm;

namespace {
const ContinuedFraction& golden() {
  static const ContinuedFraction cf = cf_expand(AlphaDescriptor::golden(), 60);
  return cf;
}
}  // namespace

TEST_CASE("single mode closed form at N = 34") {
  auto f = AnalyticObservable::single_mode(1);
  const double a = golden().value();
  auto d = birkhoff_deviation(f, golden(), 0.0, BigInt(34));
  const double expect = std::fabs(std::sin(kPi * 34 * a) / std::sin(kPi * a));
  CHECK(std::abs(d.formula) == Approx(expect).epsilon(1e-10));
  CHECK(std::abs(d.direct) == Approx(expect).epsilon(1e-10));
  CHECK(std::abs(d.formula) < 0.05);
}

TEST_CASE("trivial sums") {
  auto c = AnalyticObservable::constant(2.5);
  for (long N : {1L, 7L, 1000L}) {
    auto d = birkhoff_deviation(c, golden(), 0.3, BigInt(N));
    CHECK(d.formula == 0.0);
    CHECK(d.direct == 0.0);
  }
  auto f = AnalyticObservable::standard();
  const Complex x(0.37, 0.2);
  auto d1 = birkhoff_deviation(f, golden(), x, BigInt(1));
  CHECK(std::abs(d1.formula - (f(x) - f.mean())) < 1e-13);
  CHECK(std::abs(d1.direct - (f(x) - f.mean())) < 1e-13);
  CHECK_THROWS_AS(birkhoff_deviation(f, golden(), Complex(0, 0.9), BigInt(3)), InvalidArgument);
}

TEST_CASE("dual path agreement and cocycle identity") {
  auto f = AnalyticObservable::exp_modes(100, 0.5, 0.5 / kTwoPi);
  for (long N : {10L, 377L, 5000L, 100000L}) {
    auto d = birkhoff_deviation(f, golden(), Complex(0.1, 0.01), BigInt(N));
    CHECK_FALSE(d.small_divisor);
    CHECK(d.disagreement < 1e-9);
  }
  const long N = 1234, M = 777;
  const Complex x(0.2, 0.0);
  const Complex lhs = birkhoff_direct(f, golden(), x, N + M);
  const Complex shifted = x + golden().frac_times(BigInt(N));
  const Complex rhs = birkhoff_direct(f, golden(), x, N) + birkhoff_direct(f, golden(), shifted, M);
  CHECK(std::abs(lhs - rhs) < 1e-10);
}

TEST_CASE("strip control mode by mode") {
  for (int j : {-3, 1, 2}) {
    auto f = AnalyticObservable::single_mode(j);
    for (long N : {5L, 89L}) {
      const double s = 0.3;
      const double on = std::abs(birkhoff_deviation(f, golden(), Complex(0.1, s), BigInt(N)).formula);
      const double off = std::abs(birkhoff_deviation(f, golden(), Complex(0.1, 0.0), BigInt(N)).formula);
      CHECK(on <= off * std::exp(kTwoPi * std::abs(j) * s) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Birkhoff deviations decay along q_n, and a linear sequence does not") {
  auto f = AnalyticObservable::exp_modes(40, 1.0, 1.0 / kTwoPi);
  auto rep = verify_lemma_le(f, golden(), qn_sequence(golden(), 15));
  CHECK(rep.pass);
  CHECK(rep.tail_sup < 1e-2);
  CHECK(rep.small_divisor_constant > 0.0);
  std::vector<BigInt> ks;
  for (long k = 1; k <= 15; ++k) ks.emplace_back(k);
  CHECK_FALSE(verify_lemma_le(f, golden(), ks).pass);

  // single-mode bound on the strip
  auto one = AnalyticObservable::single_mode(1);
  auto r1 = verify_lemma_le(one, golden(), qn_sequence(golden(), 10));
  const double a = golden().value();
  for (const auto& row : r1.rows) {
    const double q = static_cast<double>(row.N);
    const double bound = std::fabs(std::sin(kPi * q * a) / std::sin(kPi * a));
    CHECK(row.sup_real == Approx(bound).epsilon(1e-9));
    CHECK(row.sup_strip <= bound * std::exp(kTwoPi * 0.5) * (1 + 1e-9));
  }
}

TEST_CASE("Birkhoff deviations along the Liouville sequence t_m") {
  auto cf = cf_expand(alpha_with_beta(1.0), 8);
  auto tm = tm_sequence(cf, 1.0, 1.0, 1000);
  auto rep = verify_lemma_le1(AnalyticObservable::standard(), cf, tm);
  CHECK(rep.tm_decreasing);
  CHECK(rep.generic_not_decaying);
  CHECK(rep.series_bounded);
  CHECK(rep.pass);

  auto c = verify_lemma_le1(AnalyticObservable::constant(1.0), cf, tm);
  for (const auto& row : c.rows) {
    CHECK(row.sup_tm == 0.0);
    CHECK(row.sup_tm_strip == 0.0);
  }
}
