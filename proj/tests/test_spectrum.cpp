#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "smm/errors.hpp"
#include "smm/spectrum.hpp"

using namespace smm;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST_CASE("free box spectrum stays in the band") {
  ModelParams p(1.0, {kGolden}, 0.1);
  for (auto g : {Geometry::FullSpace, Geometry::HalfSpace}) {
    auto op = build_finite(p.with_geometry(g), 10, 0.0);
    auto ev = all_eigenvalues(op);
    CHECK(ev.minCoeff() > -4.0);
    CHECK(ev.maxCoeff() < 4.0);
    CHECK(eig_window(op, 4.2, 8.0).empty());
  }
}

TEST_CASE("small box entries by hand") {
  ModelParams p(1.0, {kGolden}, 0.0);
  auto op = build_finite(p, 2);
  REQUIRE(op.dim() == 25);
  Eigen::MatrixXd H(op.matrix);
  CHECK((H - H.transpose()).norm() == 0.0);
  for (long n = -2; n <= 2; ++n) {
    const long r = op.row({n}, 0);
    CHECK(H(r, r) == Approx(std::tan(kPi * kGolden * n - kPi * std::floor(kGolden * n + 0.5))).epsilon(1e-12));
    CHECK(H(op.row({n}, 1), op.row({n}, 1)) == 0.0);
    if (n < 2) CHECK(H(r, op.row({n + 1}, 0)) == 1.0);
    CHECK(H(r, op.row({n}, 1)) == 1.0);
    CHECK(H(r, op.row({n}, -1)) == 1.0);
  }
  CHECK(H(op.row({0}, 2), op.row({0}, -2)) == 0.0);
  // each row: up to 4 neighbours, diagonal only on the surface
  CHECK(op.matrix.nonZeros() == 4 + 2 * (5 * 4) + 2 * (5 * 4));  // v(0) = tan 0 = 0 is dropped
}

TEST_CASE("half-space box is the x >= 0 restriction") {
  ModelParams p(1.5, {kGolden}, 0.3);
  auto full = build_finite(p, 6);
  auto half = build_finite(p.with_geometry(Geometry::HalfSpace), 6);
  REQUIRE(half.dim() == 13 * 7);
  Eigen::MatrixXd F(full.matrix), Hh(half.matrix);
  for (long r = 0; r < half.dim(); ++r)
    for (long c = 0; c < half.dim(); ++c) {
      const Site a = half.site(r), b = half.site(c);
      CHECK(Hh(r, c) == F(full.row(a.n, a.x), full.row(b.n, b.x)));
    }
}

TEST_CASE("tan pole inside the box") {
  // theta = 1/2 puts the pole at n = 0
  ModelParams p(1.0, {kGolden}, 0.5);
  CHECK_THROWS_AS(build_finite(p, 3), PhaseSingularity);
}

TEST_CASE("Schur complement solver matches dense diagonalisation") {
  for (auto g : {Geometry::FullSpace, Geometry::HalfSpace}) {
    ModelParams p(1.0, {kGolden}, 0.2, g);
    auto op = build_finite(p, 12);
    for (auto [lo, hi] : {std::pair{4.2, 12.0}, std::pair{-12.0, -4.2}}) {
      auto a = eig_window(op, lo, hi);
      auto b = eig_window_dense(op, lo, hi);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::fabs(a[i].E - b[i].E) < 1e-10);
        CHECK(std::fabs(std::fabs(a[i].psi.dot(b[i].psi)) - 1.0) < 1e-10);
      }
    }
  }
  ModelParams p2(2.0, {kGolden, std::sqrt(2.0) - 1.0}, 0.1);
  auto op2 = build_finite(p2, 4);
  auto a = eig_window(op2, 6.2, 20.0);
  auto b = eig_window_dense(op2, 6.2, 20.0);
  REQUIRE(a.size() == b.size());
  REQUIRE(!a.empty());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a[i].E - b[i].E) < 1e-10);
}

TEST_CASE("eigen window rejects the band margin") {
  ModelParams p(1.0, {kGolden}, 0.0);
  auto op = build_finite(p, 5);
  CHECK_THROWS_AS(eig_window(op, 4.1, 8.0), InvalidArgument);
  CHECK_THROWS_AS(eig_window(op, -8.0, -4.0), InvalidArgument);
}

TEST_CASE("eigenfunctions are surface localised and decay") {
  ModelParams p(1.0, {kGolden}, 0.0);
  auto op = build_finite(p, 40);
  auto ev = eig_window(op, 4.2, 8.0);
  REQUIRE(!ev.empty());
  for (const auto& e : ev) {
    CHECK(e.decay.slope < -0.1);
    CHECK(e.surface_mass > 0.5);
    CHECK(e.center_x == 0);
  }
}

TEST_CASE("predictions relabel under theta -> theta + alpha") {
  // no frac(k alpha) with |k| <= 8 falls in the zeta_0 range on this window
  CHECK(predict_eigenvalues(1.0, kGolden, 0.0, -8, 8, 4.2, 9.0).values.empty());
  auto a = predict_eigenvalues(1.0, kGolden, 0.0, -20, 20, 4.2, 9.0);
  auto b = predict_eigenvalues(1.0, kGolden, kGolden, -20, 20, 4.2, 9.0);
  CHECK(a.monotone);
  std::size_t shared = 0;
  for (const auto& x : a.values) {
    CHECK(x.quantization_residual < 1e-10);
    CHECK(x.side == Side::Above);
    for (const auto& y : b.values)
      if (y.k == x.k - 1) {
        CHECK(std::fabs(y.E - x.E) < 1e-9);
        ++shared;
      }
  }
  CHECK(shared > 0);
}

TEST_CASE("prediction count stabilises as the window grows") {
  auto a = predict_eigenvalues(1.0, kGolden, 0.0, -30, 30, 4.2, 300.0, 1e-10, Geometry::FullSpace, 2048, 1500);
  auto b = predict_eigenvalues(1.0, kGolden, 0.0, -30, 30, 4.2, 600.0, 1e-10, Geometry::FullSpace, 2048, 3000);
  CHECK(a.values.size() == b.values.size());
}

TEST_CASE("density scan is non-increasing") {
  auto rows = spectral_density_scan(1.0, kGolden, 0.0, 6.283, 200);
  REQUIRE(rows.size() == 200);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].min_distance <= rows[i - 1].min_distance);
  CHECK(rows.back().min_distance < rows.front().min_distance);
  auto one = spectral_density_scan(1.0, kGolden, 0.0, 6.283, 1);
  REQUIRE(one.size() == 1);
  CHECK(std::labs(one[0].best_k) <= 1);
}

TEST_CASE("resolvent identity on a small box") {
  ModelParams p(1.0, {kGolden}, 0.0);
  CHECK(resolvent_check(p, 16, {5.0, -1.0}, 6).max_rel_error < 1e-5);
  CHECK(resolvent_check(p.with_geometry(Geometry::HalfSpace), 16, {5.0, -1.0}, 6).max_rel_error < 1e-5);
  CHECK(resolvent_check(p, 16, {5.0, -1.0}, 6, true).max_rel_error < 1e-6);
  CHECK_THROWS_AS(resolvent_check(p, 16, {5.0, -1.0}, 9), InvalidArgument);
  CHECK_THROWS_AS(resolvent_check(p, 16, {5.0, 1.0}, 6), InvalidArgument);
}

TEST_CASE("reduced equation hits agree with predictions") {
  ModelParams p(1.0, {kGolden}, 0.0);
  auto hits = reduced_equation_solve(p, 4.2, 8.0, 20);
  auto pred = predict_eigenvalues(1.0, kGolden, 0.0, -20, 20, 4.2, 8.0);
  REQUIRE(!hits.empty());
  for (const auto& h : hits) {
    double best = 1.0;
    for (const auto& x : pred.values) best = std::min(best, std::fabs(x.E - h.E));
    CHECK(best < 1e-6);
    CHECK(h.sigma_min < 1e-8);
  }
}

TEST_CASE("cover sums") {
  auto cf = cf_expand(alpha_with_beta(1.0), 8);
  auto c1 = cover_sum(cf, 1.0, 1.0 / 30.0, 1.0);
  REQUIRE(!c1.n_k.empty());
  for (std::size_t k = 0; k < c1.n_k.size(); ++k)
    CHECK(c1.log_per_k[k] == Approx(std::log(2.0) - c1.q_nk[k] / 60.0).epsilon(1e-12));
  auto c01 = cover_sum(cf, 1.0, 1.0 / 30.0, 0.1);
  CHECK(c01.expected_slope == Approx(-0.1 / 60.0));
  CHECK_THROWS_AS(cover_sum(cf, 1.0, 1.0 / 30.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(cover_sum(cf, 1.0, 1.0 / 30.0, 1.5), InvalidArgument);
}

TEST_CASE("triplet export") {
  ModelParams p(1.0, {kGolden}, 0.1);
  auto op = build_finite(p, 2);
  std::ostringstream os;
  nlohmann::json h;
  write_triplets(op, os, h);
  CHECK(h["dim"] == 25);
  std::istringstream is(os.str());
  long r, c, lines = 0;
  double v;
  while (is >> r >> c >> v) {
    CHECK(r <= c);
    CHECK(op.matrix.coeff(r, c) == Approx(v).epsilon(1e-11));
    ++lines;
  }
  CHECK(lines == h["entries_upper"].get<long>());
}
