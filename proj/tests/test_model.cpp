#include <catch2/catch.hpp>

#include <boost/multiprecision/mpfr.hpp>
#include <cmath>

#include "smm/errors.hpp"
#include "smm/model.hpp"
#include "smm/numerics.hpp"

using namespace smm;
using mp = boost::multiprecision::mpfr_float_100;

namespace {
const double kGolden = 0.6180339887498949;
}

TEST_CASE("parameter invariants") {
  CHECK_THROWS_AS(ModelParams(0.0, {0.3}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1.0, {}, 0.0), InvalidArgument);
  ModelParams p(1.0, {1.3, -0.25}, 2.1);
  CHECK(p.alpha()[0] == Approx(0.3));
  CHECK(p.alpha()[1] == Approx(0.75));
  CHECK(p.theta() == Approx(0.1));
  CHECK(p.d() == 2);
  CHECK(p.c_d() == 6.0);
}

TEST_CASE("potential values") {
  CHECK(potential(ModelParams(1.0, {0.3}, 0.0), {0}) == 0.0);
  CHECK(potential(ModelParams(2.0, {0.25}, 0.0), {1}) == Approx(2.0).epsilon(1e-15));

  // arbitrary-precision tan of the same phase
  ModelParams p(1.0, {kGolden}, 0.1);
  mp a = mp(kGolden) * 3 + mp(0.1);
  a -= floor(a);
  mp pi = boost::math::constants::pi<mp>();
  const double oracle = static_cast<double>(tan(pi * a));
  CHECK(potential(p, {3}) == Approx(oracle).epsilon(1e-13));
}

TEST_CASE("potential pole raises PhaseSingularity") {
  CHECK_THROWS_AS(potential(ModelParams(1.0, {0.25}, 0.25), {1}), PhaseSingularity);
  CHECK_THROWS_AS(potential(ModelParams(1.0, {0.3}, 0.5), {0}), PhaseSingularity);
}

TEST_CASE("theta condition window scan") {
  auto r1 = check_theta_condition(ModelParams(1.0, {0.25}, 0.25), 1);
  CHECK(r1.min_distance == 0.0);
  CHECK(r1.worst_site == IVec{1});
  auto r2 = check_theta_condition(ModelParams(1.0, {0.5}, 0.0), 2);
  CHECK(r2.min_distance == 0.0);
  CHECK(std::labs(r2.worst_site[0]) == 1);

  ModelParams g(1.0, {kGolden}, 0.0);
  auto r3 = check_theta_condition(g, 100);
  CHECK(r3.min_distance > 0.0);
  // independent exhaustive scan over the 201 sites
  double best = 0.5;
  for (long n = -100; n <= 100; ++n) best = std::min(best, std::fabs(frac(kGolden * n) - 0.5));
  CHECK(r3.min_distance == Approx(best).margin(1e-13));

  double prev = 0.5;
  for (long R = 0; R <= 40; R += 5) {
    auto r = check_theta_condition(g, R);
    CHECK(r.min_distance <= prev);
    CHECK(r.min_distance >= 0.0);
    prev = r.min_distance;
  }
}

TEST_CASE("shift_phase") {
  CHECK(shift_phase(ModelParams(1.0, {0.3}, 0.1), {1}).theta() == Approx(0.4));
  CHECK(shift_phase(ModelParams(1.0, {0.3}, 0.9), {1}).theta() == Approx(0.2));
  CHECK(shift_phase(ModelParams(1.0, {kGolden}, 0.0), {13}).theta() == Approx(0.0344418).margin(1e-7));
}

TEST_CASE("covariance and parity identities") {
  ModelParams p(1.3, {kGolden, 0.4142135623730951}, 0.17);
  for (const auto& j : cube_sites(2, 3)) {
    auto q = shift_phase(p, j);
    for (const auto& n : cube_sites(2, 5)) {
      IVec nj{n[0] + j[0], n[1] + j[1]};
      const double a = potential(q, n), b = potential(p, nj);
      CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(b)));
    }
  }
  ModelParams neg(-1.3, {kGolden, 0.4142135623730951}, 0.17);
  ModelParams mirrored(-1.3, {-kGolden, -0.4142135623730951}, -0.17);
  for (const auto& n : cube_sites(2, 6)) {
    CHECK(potential(neg, n) == -potential(p, n));
    const double a = potential(mirrored, n), b = potential(p, n);
    CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(b)));
  }
}

TEST_CASE("json round trip") {
  ModelParams p(0.7, {kGolden}, 0.2, Geometry::HalfSpace);
  nlohmann::json j = p;
  CHECK(j["geometry"] == "half");
  CHECK(j["d"] == 1);
  auto q = model_params_from_json(j);
  CHECK(q.lambda() == p.lambda());
  CHECK(q.alpha() == p.alpha());
  CHECK(q.theta() == p.theta());
  CHECK(q.geometry() == Geometry::HalfSpace);
  j["geometry"] = "diagonal";
  CHECK_THROWS_AS(model_params_from_json(j), InvalidArgument);
}

TEST_CASE("lattice site norm") {
  LatticeSite s{{-2, 3}, -4};
  CHECK(s.norm() == 9);
  CHECK(l1_ball_sites(1, 100).size() == 201);
  CHECK(cube_sites(2, 1).size() == 9);
}
