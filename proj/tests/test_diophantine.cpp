#include <catch2/catch.hpp>

#include <cmath>

#include "smm/diophantine.hpp"
#include "smm/errors.hpp"

using namespace smm;

TEST_CASE("golden and silver expansions") {
  auto g = cf_expand(AlphaDescriptor::golden(), 10);
  const long fib[] = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  for (int n = 1; n <= 10; ++n) {
    CHECK(g.a[n] == 1);
    CHECK(g.q[n] == fib[n - 1]);
  }
  auto s = cf_expand(AlphaDescriptor::silver(), 6);
  const long pell[] = {2, 5, 12, 29, 70, 169};
  for (int n = 1; n <= 6; ++n) {
    CHECK(s.a[n] == 2);
    CHECK(s.q[n] == pell[n - 1]);
  }
  CHECK(g.value() == Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
  CHECK(s.value() == Approx(std::sqrt(2.0) - 1).epsilon(1e-15));
}

TEST_CASE("rational and imprecise inputs terminate") {
  CHECK_THROWS_AS(cf_expand(AlphaDescriptor::decimal("0.3"), 6), RationalTermination);
  // leading zeros must not switch the integer parse to octal
  CHECK(AlphaDescriptor::decimal("0.618").rational == BigRational(309, 500));
  CHECK(AlphaDescriptor::decimal("0.0900").rational == BigRational(9, 100));
  CHECK(AlphaDescriptor::decimal(".5").rational == BigRational(1, 2));
  CHECK(AlphaDescriptor::parse("quotients:010,2").quotients.front() == 10);
  CHECK_THROWS_AS(AlphaDescriptor::parse("quotients:0x10"), InvalidArgument);
  auto ok = cf_expand(AlphaDescriptor::decimal("0.3"), 2);  // 0.3 = [0; 3, 3]
  CHECK(ok.a[1] == 3);
  CHECK(ok.a[2] == 3);
  CHECK_THROWS_AS(cf_expand(AlphaDescriptor::from_double(0.6180339887498949), 60), PrecisionExhausted);
  auto d = cf_expand(AlphaDescriptor::from_double(0.6180339887498949), 20);
  for (int n = 1; n <= 20; ++n) CHECK(d.a[n] == 1);
  CHECK_THROWS_AS(cf_expand(AlphaDescriptor::parse("quotients:1,2,3"), 4), RationalTermination);
  auto per = cf_expand(AlphaDescriptor::parse("quotients:3,1,..."), 12);
  CHECK(per.a[1] == 3);
  CHECK(per.a[12] == 1);
}

TEST_CASE("descriptor parsing") {
  CHECK(AlphaDescriptor::parse("golden").to_string() == "golden");
  CHECK(AlphaDescriptor::parse("silver").to_string() == "silver");
  CHECK(AlphaDescriptor::parse("beta:1.0").kind == AlphaDescriptor::Kind::Beta);
  CHECK(AlphaDescriptor::parse("beta:2:seed=1,2").to_string() == "beta:2:seed=1,2");
  CHECK(AlphaDescriptor::parse("0.25").kind == AlphaDescriptor::Kind::Decimal);
  CHECK_THROWS_AS(AlphaDescriptor::parse("pi"), InvalidArgument);
  CHECK_THROWS_AS(AlphaDescriptor::parse("beta:x"), InvalidArgument);
}

TEST_CASE("exact identities to depth 20 and beyond") {
  for (const auto& desc : {AlphaDescriptor::golden(), AlphaDescriptor::silver(), alpha_with_beta(1.0)}) {
    auto cf = cf_expand(desc, 24);
    CHECK(determinant_identity_holds(cf));
    CHECK(gdc2_sandwich_holds(cf));
  }
}

TEST_CASE("best approximation") {
  auto g = cf_expand(AlphaDescriptor::golden(), 30);
  CHECK(best_approx_check(g, 1000));
  CHECK(best_approx_check(cf_expand(AlphaDescriptor::silver(), 20), 500));
  CHECK(g.dist_times(g.q[12]) == Approx(static_cast<double>(g.delta[12])).epsilon(1e-12));
  CHECK_THROWS_AS(best_approx_check(cf_expand(AlphaDescriptor::golden(), 5), 100), InvalidArgument);
}

TEST_CASE("Diophantine window") {
  auto g = cf_expand(AlphaDescriptor::golden(), 40);
  CHECK(diophantine_check(g, 0.2, 1.2, 10000).violations.empty());
  auto b = cf_expand(alpha_with_beta(1.0), 8);
  auto rep = diophantine_check(b, 0.2, 1.2, 10000);
  CHECK_FALSE(rep.violations.empty());
  bool at_q = false;
  for (const auto& v : rep.violations) at_q = at_q || BigInt(v.k[0]) == b.q[6];
  CHECK(at_q);
  auto multi = diophantine_check({0.6180339887498949, 0.4142135623730951}, 0.01, 2.5, 30);
  for (const auto& v : multi.violations) CHECK((v.k[0] != 0 || v.k[1] != 0));
}

TEST_CASE("beta estimates") {
  CHECK(beta_estimate(cf_expand(AlphaDescriptor::golden(), 30)).beta_estimate < 0.05);
  CHECK(beta_estimate(cf_expand(AlphaDescriptor::silver(), 30)).beta_estimate < 0.05);
  for (double beta : {0.5, 1.0, 2.0}) {
    auto est = beta_estimate(cf_expand(alpha_with_beta(beta), 8)).beta_estimate;
    CHECK(std::fabs(est - beta) < 0.1 * beta);
  }
  CHECK_THROWS_AS(beta_estimate(cf_expand(AlphaDescriptor::golden(), 4)), InvalidArgument);
}

TEST_CASE("beta construction") {
  // explicit seed: no padding, tower growth
  auto a = cf_expand(alpha_with_beta(1.0, {1}, false), 4);
  CHECK(a.q[1] == 1);
  CHECK(a.q[2] == 3);
  CHECK(a.q[3] == 19);
  CHECK_THROWS_AS(cf_expand(alpha_with_beta(1.0, {1}, false), 5), OverflowBudget);
  auto small = cf_expand(alpha_with_beta(0.01, {1}, false), 6);
  for (int n = 1; n <= 6; ++n) CHECK(small.a[n] == 1);
  auto lo = cf_expand(alpha_with_beta(0.5, {1}, false), 4);
  auto hi = cf_expand(alpha_with_beta(1.0, {1}, false), 4);
  for (int n = 1; n <= 4; ++n) CHECK(hi.q[n] >= lo.q[n]);
  CHECK(hi.q[4] > lo.q[4]);
}

TEST_CASE("t_m sequence") {
  auto cf = cf_expand(alpha_with_beta(1.0), 8);
  auto tm = tm_sequence(cf, 1.0, 1.0, 2000);
  CHECK(tm.rho_bar == Approx(1.0 / 30));
  CHECK_FALSE(tm.n_k.empty());
  CHECK(tm.total_terms() <= 2000);
  CHECK(tm_bounds_hold(cf, tm));
  for (std::size_t k = 0; k < tm.n_k.size(); ++k) CHECK(tm.term(k, 1) == tm.q_nk[k]);
  CHECK_THROWS_AS(tm_sequence(cf_expand(AlphaDescriptor::golden(), 20), 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(tm_sequence(cf_expand(AlphaDescriptor::golden(), 20), 1.0, 1.0), NoQualifyingIndex);
}

TEST_CASE("cf json") {
  nlohmann::json j = cf_expand(AlphaDescriptor::golden(), 5);
  CHECK(j["alpha_desc"] == "golden");
  CHECK(j["q"].back() == "8");
  CHECK(j["a"].size() == 5);
}
