// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntwistor/generators.hpp"
#include "test_support.hpp"

using namespace ntw;
using ntw::testing::max_form;
using ntw::testing::max_mat;

namespace {

const std::vector<Point> kPts2 = Box::unit(2).sample(60, 606);
const std::vector<Point> kPts3 = Box::unit(3).sample(60, 607);

}  // namespace

TEST_CASE("build_flat_omega") {
  // D11 = D31 = 0, f = x1: only the +-df/2 blocks remain; flat
  MatrixForm z(1, 1, 2, 1);
  FlatConnection conn = build_flat_omega(z, z, Expr::coord(1), kPts2);
  CHECK(flatness_residual(conn.omega, kPts2) == 0.0);
  CHECK(entry1(conn.omega, 2, 1).eval_dir({0.0, 0.0}, 1) == doctest::Approx(0.5));
  CHECK(entry1(conn.omega, 1, 2).eval_dir({0.0, 0.0}, 1) == doctest::Approx(-0.5));
  CHECK(entry1(conn.omega, 1, 4).eval_dir({0.0, 0.0}, 1) == doctest::Approx(0.5));

  // a broken symmetry is rejected
  MatrixForm bad(1, 1, 2, 1);
  bad.at(0, 0) = Form::dx(2, 1);  // tD31 = D31 still holds for 1x1; break D11 instead
  CHECK_THROWS_AS(build_flat_omega(bad, z, Expr::coord(1), kPts2), std::invalid_argument);

  MatrixForm bad31(2, 2, 2, 1);
  bad31.at(0, 1) = Form::dx(2, 1);  // not symmetric
  MatrixForm z2(2, 2, 2, 1);
  CHECK_THROWS_AS(build_flat_omega(z2, bad31, Expr::coord(1), kPts2), std::invalid_argument);
}

TEST_CASE("symmetric potential family") {
  FlatFamilySpec spec;
  spec.variant = FlatFamilySpec::Variant::SymmetricPotential;
  spec.m = 2;
  spec.phi = Expr::coord(1);
  spec.c0 = (Eigen::MatrixXd(2, 2) << 1, 2, 2, 0).finished();
  spec.f = Expr::coord(2);
  FlatConnection conn = family_omega(spec, kPts2);
  CHECK(conn.n == 2);
  CHECK(flatness_residual(conn.omega, kPts2) <= 1e-9);

  // factorization with alpha = df, eps = mu = +
  FactorizationReport fr = factorization_check(conn.omega, conn.n, +1, +1, kPts2);
  CHECK(fr.ok);
  Form df(2, 1);
  df.set_coeff({2}, Expr::constant(1.0));
  CHECK(max_form(fr.alpha - df, kPts2) <= 1e-12);

  Eigen::MatrixXd skew = (Eigen::MatrixXd(2, 2) << 0, 1, -1, 0).finished();
  FlatFamilySpec badspec = spec;
  badspec.c0 = skew;
  CHECK_THROWS_AS(family_omega(badspec, kPts2), std::invalid_argument);
}

TEST_CASE("tridiagonal family") {
  FlatFamilySpec spec;
  spec.variant = FlatFamilySpec::Variant::Tridiagonal;
  spec.n = 3;
  spec.m = 3;
  spec.f1 = Expr::coord(1);
  spec.f2 = Expr::coord(2);
  spec.f = Expr::coord(3);
  FlatConnection conn = family_omega(spec, kPts3);
  CHECK(flatness_residual(conn.omega, kPts3) <= 1e-9);

  // D31 ^ D31 = 0
  MatrixForm x31(3, 3, 3, 0);
  for (int i = 0; i < 3; ++i) {
    x31.at(i, i) = Form::scalar(3, spec.f1);
    if (i + 1 < 3) {
      x31.at(i, i + 1) = Form::scalar(3, spec.f2);
      x31.at(i + 1, i) = Form::scalar(3, spec.f2);
    }
  }
  MatrixForm d31 = ext_d(x31);
  CHECK(max_mat(mwedge(d31, d31), kPts3) <= 1e-10);
}

TEST_CASE("skew potential family") {
  FlatFamilySpec spec;
  spec.variant = FlatFamilySpec::Variant::SkewPotential;
  spec.m = 2;
  spec.psi = Expr::sin(Expr::coord(1));
  spec.c0 = (Eigen::MatrixXd(2, 2) << 0, 1, -1, 0).finished();
  spec.f = Expr::coord(2);
  FlatConnection conn = family_omega(spec, kPts2);
  CHECK(flatness_residual(conn.omega, kPts2) <= 1e-9);
  CHECK(factorization_check(conn.omega, 2, +1, +1, kPts2).ok);
}

TEST_CASE("quaternion blocks family") {
  FlatFamilySpec spec;
  spec.variant = FlatFamilySpec::Variant::QuaternionBlocks;
  spec.p = 1;
  spec.m = 3;
  spec.qa1 = Expr::coord(1);
  spec.qb1 = Expr::coord(2);
  spec.qa2 = Expr::coord(1) * Expr::coord(2);
  spec.qb2 = Expr();
  spec.f = Expr::coord(3);
  FlatConnection conn = family_omega(spec, kPts3);
  CHECK(conn.n == 4);
  CHECK(flatness_residual(conn.omega, kPts3) <= 1e-9);
  CHECK(square_norm(conn.omega, 4, +1, kPts3) <= 1e-9);
}

TEST_CASE("frame integration") {
  Box box = Box::unit(2);
  Point base = {0.0, 0.0};
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Identity(4, 4);
  std::vector<Point> targets = box.sample(8, 55);

  // omega = 0: frame stays put
  MatrixForm z(1, 1, 2, 1);
  FlatConnection zero_conn = build_flat_omega(z, z, Expr(), kPts2);
  auto fi0 = frame_integrate(zero_conn, base, e0, targets, box, 5);
  for (const auto& f : fi0.frames) CHECK((f - e0).cwiseAbs().maxCoeff() <= 1e-12);

  // single generator: the exponential fast path agrees with the integrator
  FlatFamilySpec spec;
  spec.variant = FlatFamilySpec::Variant::SymmetricPotential;
  spec.m = 2;
  spec.phi = Expr::coord(1) * Expr::coord(2);
  spec.c0 = (Eigen::MatrixXd(1, 1) << 1.0).finished();
  spec.f = Expr();
  FlatConnection conn = family_omega(spec, kPts2);
  auto fi = frame_integrate(conn, base, e0, targets, box, 5);
  CHECK(fi.fast_path);
  CHECK(fi.cross_residual <= 1e-7);
  CHECK(fi.ortho_residual <= 1e-7);
  CHECK(fi.loop_residual <= 1e-6);

  // generic tridiagonal spec conserves the metric pairing
  FlatFamilySpec tri;
  tri.variant = FlatFamilySpec::Variant::Tridiagonal;
  tri.n = 2;
  tri.m = 2;
  tri.f1 = Expr::sin(Expr::coord(1));
  tri.f2 = Expr::coord(2);
  tri.f = Expr::coord(1);
  FlatConnection tconn = family_omega(tri, kPts2);
  Eigen::MatrixXd e08 = Eigen::MatrixXd::Identity(8, 8);
  auto fit = frame_integrate(tconn, base, e08, targets, box, 56);
  CHECK(fit.ortho_residual <= 1e-7);

  // a non-flat connection is rejected
  MatrixForm curved(4, 4, 2, 1);
  entry1(curved, 2, 1) = Form::dx(2, 1).scaled(Expr::coord(2));
  entry1(curved, 1, 2) = -entry1(curved, 2, 1);
  FlatConnection fake{curved, MatrixForm(1, 1, 2, 0), false, Expr(), 1};
  CHECK_THROWS_AS(frame_integrate(fake, base, e0, targets, box, 5), std::invalid_argument);
}

TEST_CASE("single-side completion") {
  // omega32 = dx1/2 with f = 0, g = x1 closes the system exactly
  Form half_dx1 = Form::dx(2, 1).scaled(0.5);
  auto res = single_eps_omega(Expr(), Expr::coord(1), Form(2, 1), Form(2, 1), half_dx1,
                              +1, +1, 2, kPts2);
  CHECK(res.system_residual <= 1e-12);
  CHECK(flatness_residual(res.omega, kPts2) <= 1e-12);
  CHECK(entry1(res.omega, 4, 1).eval_dir({0, 0}, 1) == doctest::Approx(0.5));
  CHECK(fully_lightlike_check(res.omega, +1, kPts2).ok);

  // all-zero inputs: omega^4_1 = eps dx1, still flat
  auto res2 = single_eps_omega(Expr(), Expr::coord(1), Form(2, 1), Form(2, 1), Form(2, 1),
                               +1, +1, 2, kPts2);
  CHECK(res2.system_residual <= 1e-12);
  CHECK(entry1(res2.omega, 4, 1).eval_dir({0, 0}, 1) == doctest::Approx(1.0));
  CHECK(flatness_residual(res2.omega, kPts2) <= 1e-12);

  // dg = 0 is rejected
  CHECK_THROWS_AS(single_eps_omega(Expr(), Expr::constant(1.0), Form(2, 1), Form(2, 1),
                                   Form(2, 1), +1, +1, 2, kPts2),
                  std::invalid_argument);
}

TEST_CASE("pair connections") {
  // trivial pair
  PairSpec trivial;
  trivial.fp = trivial.fm = Expr();
  trivial.gp = trivial.gm = Expr::coord(1);
  trivial.branch = 'A';
  trivial.mu = +1;
  trivial.m = 2;
  MatrixForm tw = pair_omega(trivial, kPts2);
  CHECK(max_form(entry1(tw, 3, 2) - Form::dx(2, 1), kPts2) == 0.0);
  CHECK(max_form(entry1(tw, 4, 3) - Form::dx(2, 1), kPts2) == 0.0);
  CHECK(max_form(entry1(tw, 2, 1), kPts2) == 0.0);
  CHECK(max_form(entry1(tw, 4, 1), kPts2) == 0.0);
  CHECK(flatness_residual(tw, kPts2) == 0.0);
  CHECK(fully_lightlike_check(tw, +1, kPts2).ok);
  CHECK(fully_lightlike_check(tw, -1, kPts2).ok);
  CHECK(branch_classify(tw, +1, kPts2) == BranchClass::Both);

  // generic branch A
  PairSpec a;
  a.fp = Expr::coord(1);
  a.fm = Expr();
  a.gp = Expr::coord(2);
  a.gm = Expr::coord(1) + Expr::coord(2);
  a.branch = 'A';
  a.mu = +1;
  a.m = 2;
  MatrixForm wa = pair_omega(a, kPts2);
  CHECK(flatness_residual(wa, kPts2) <= 1e-9);
  auto flr = fully_lightlike_check(wa, +1, kPts2);
  REQUIRE(flr.ok);
  Form alpha_plus = Form::dx(2, 2).scaled(Expr::exp(Expr::coord(1)));
  CHECK(max_form(flr.alpha - alpha_plus, kPts2) <= 1e-9);
  CHECK(branch_classify(wa, +1, kPts2) == BranchClass::A);

  // same functions, branch B with mu = -
  PairSpec b = a;
  b.branch = 'B';
  b.mu = -1;
  MatrixForm wb = pair_omega(b, kPts2);
  CHECK(flatness_residual(wb, kPts2) <= 1e-9);
  CHECK(branch_classify(wb, -1, kPts2) == BranchClass::B);
  CHECK(fully_lightlike_check(wb, +1, kPts2).ok);
  CHECK(fully_lightlike_check(wb, -1, kPts2).ok);

  // dg = 0 rejected
  PairSpec bad = a;
  bad.gm = Expr::constant(2.0);
  CHECK_THROWS_AS(pair_omega(bad, kPts2), std::invalid_argument);
}

TEST_CASE("pair side expectations match the lightlike analysis") {
  Rng rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    PairSpec spec;
    spec.fp = Expr::constant(rng.uniform(-0.8, 0.8)) * Expr::coord(1);
    spec.fm = Expr::constant(rng.uniform(-0.8, 0.8)) * Expr::coord(2);
    spec.m = 2;
    spec.branch = trial % 2 == 0 ? 'A' : 'B';
    spec.mu = rng.uniform() < 0.5 ? +1 : -1;
    spec.gp = Expr::coord(1) + Expr::constant(0.2) * Expr::sin(Expr::coord(2));
    spec.gm = Expr::coord(2) + Expr::constant(rng.uniform(-0.5, 0.5)) * Expr::coord(1);
    MatrixForm w = pair_omega(spec, kPts2);
    CHECK(flatness_residual(w, kPts2) <= 1e-9);
    for (int eps : {+1, -1}) {
      auto side = pair_expected_side(spec, eps);
      auto rep = fully_lightlike_check(w, eps, kPts2);
      REQUIRE(rep.ok);
      CHECK(rep.mu == side.mu);
      CHECK(max_form(rep.alpha - side.alpha, kPts2) <= 1e-9);
      CHECK(square_norm(w, 1, eps, kPts2) <= 1e-9);
    }
    // the flat family derivation step d(omega^4_2 - eps omega^3_1) = 0
    CHECK(horizontality_residual(w, +1, kPts2) <= 1e-9);
    CHECK(horizontality_residual(w, -1, kPts2) <= 1e-9);
  }
}

TEST_CASE("corollary: tangent bundle of E^4_2 via m = 4") {
  std::vector<Point> pts4 = Box::unit(4).sample(40, 1234);
  PairSpec spec;
  spec.fp = Expr::coord(3);
  spec.fm = Expr::coord(4);
  spec.gp = Expr::coord(1);
  spec.gm = Expr::coord(2);
  spec.branch = 'A';
  spec.mu = +1;
  spec.m = 4;
  MatrixForm w = pair_omega(spec, pts4);
  CHECK(flatness_residual(w, pts4) <= 1e-9);
  for (int eps : {+1, -1}) {
    auto rep = fully_lightlike_check(w, eps, pts4);
    REQUIRE(rep.ok);
    MatrixForm gens = standard_walker_generators(1, eps, eps * rep.mu, 4);
    CHECK(walker_residual(w, gens, 1, pts4) <= 1e-8);
  }
}
