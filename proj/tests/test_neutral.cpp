// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntwistor/neutral.hpp"

using namespace ntw;

namespace {

Eigen::MatrixXd rotation(int n, double angle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  if (n >= 2) {
    r(0, 0) = std::cos(angle);
    r(0, 1) = -std::sin(angle);
    r(1, 0) = std::sin(angle);
    r(1, 1) = std::cos(angle);
  }
  return r;
}

Eigen::MatrixXd block_diag_xyxy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  int n = static_cast<int>(x.rows());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  set_block(a, n, 1, 1, x);
  set_block(a, n, 2, 2, y);
  set_block(a, n, 3, 3, x);
  set_block(a, n, 4, 4, y);
  return a;
}

GroupParams c_params(double c, double cp, int eps = +1, double t = 0.0) {
  GroupParams p;
  p.c = c;
  p.cprime = cp;
  p.eps = eps;
  p.t = t;
  return p;
}

}  // namespace

TEST_CASE("lambda matrix display, square, rank") {
  Eigen::MatrixXd l1 = lambda_matrix(1);
  Eigen::MatrixXd want(4, 4);
  want << 0, -1, 0, 1,
          1,  0, 1, 0,
          0,  1, 0, -1,
          1,  0, 1, 0;
  CHECK((l1 - want).cwiseAbs().maxCoeff() == 0.0);

  for (int n = 1; n <= 4; ++n) {
    Eigen::MatrixXd l = lambda_matrix(n);
    CHECK((l * l).cwiseAbs().maxCoeff() == 0.0);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(l);
    CHECK(lu.rank() == 2 * n);
  }
}

TEST_CASE("so membership") {
  for (int n : {1, 2}) {
    CHECK(so_member(Eigen::MatrixXd::Identity(4 * n, 4 * n), n));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4 * n, 4 * n);
    bad(0, 0) = 2.0;
    bad(1, 1) = 0.5;
    CHECK_FALSE(so_member(bad, n));
    Rng rng(n);
    CHECK(so_member(sample_group_random(GroupKind::G2, n, rng), n));
  }
}

TEST_CASE("cross is an exact involution and fixes the identity") {
  CHECK((cross(Eigen::MatrixXd::Identity(8, 8), 2) -
         Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + rng.uniform_int(2);
    Eigen::MatrixXd a(4 * n, 4 * n);
    for (int i = 0; i < 4 * n; ++i)
      for (int j = 0; j < 4 * n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    CHECK((cross(cross(a, n), n) - a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cross block table on the B example") {
  GroupParams p;
  p.b2 = 1.0;  // (b1,b2,b3,b4) = (0,1,0,0)
  Eigen::MatrixXd b = sample_group(GroupKind::B, p, 1);
  Eigen::MatrixXd bx = cross(b, 1);
  // per the block table: entries of B^x follow the signed permutation of B's blocks
  CHECK(bx(0, 0) == b(1, 1));
  CHECK(bx(0, 1) == -b(1, 0));
  CHECK(bx(1, 0) == -b(0, 1));
  CHECK(bx(2, 3) == -b(3, 2));
  CHECK(preserves_w(bx, 1));
}

TEST_CASE("preserves_w block criterion and xi-action agree") {
  CHECK(preserves_w(Eigen::MatrixXd::Identity(4, 4), 1));

  for (int n : {1, 2}) {
    Eigen::MatrixXd x = rotation(n, 0.7), y = rotation(n, -0.3);
    CHECK(preserves_w(block_diag_xyxy(x, y), n));
  }

  // generic element moves xi_1 out of W
  Eigen::MatrixXd a = so_random(1, 17);
  CHECK_FALSE(preserves_w(a, 1));
  CHECK(w_action_residual(a, 1) > 1e-6);

  // the two membership routes agree on members and non-members
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + rng.uniform_int(2);
    Eigen::MatrixXd member = so_random_w_preserving(n, rng);
    CHECK(preserves_w(member, n, 1e-8));
    CHECK(w_action_residual(member, n) <= 1e-8);
    Eigen::MatrixXd random = so_random(n, rng.next_u64());
    CHECK(preserves_w(random, n, 1e-8) == (w_action_residual(random, n) <= 1e-8));
  }
}

TEST_CASE("p_matrices examples") {
  auto [pi, pxi] = p_matrices(Eigen::MatrixXd::Identity(4, 4), 1);
  CHECK((pi - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pxi - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  GroupParams p;
  p.b2 = 1.0;
  Eigen::MatrixXd b = sample_group(GroupKind::B, p, 1);
  auto [pb, pxb] = p_matrices(b, 1);
  Eigen::MatrixXd want(2, 2);
  want << 0, -1, 1, 0;
  CHECK((pb - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(pb.determinant() == doctest::Approx(1.0));

  // n = 2 block-diagonal with X != Y: P != P^x but det P = 1
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2), y = rotation(2, M_PI / 2.0);
  Eigen::MatrixXd a = block_diag_xyxy(x, y);
  REQUIRE(preserves_w(a, 2));
  auto [pa, pxa] = p_matrices(a, 2);
  CHECK((pa - pxa).cwiseAbs().maxCoeff() > 0.5);
  CHECK(pa.determinant() == doctest::Approx(1.0));
}

TEST_CASE("p matrices represent the action on W") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + rng.uniform_int(2);
    Eigen::MatrixXd a = so_random_w_preserving(n, rng);
    Eigen::MatrixXd xi = standard_xi(n);
    auto [p, px] = p_matrices(a, n);
    CHECK((a * xi - xi * p).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((cross(a, n) * xi - xi * px).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("commutation with Lambda_n characterizes P = P^x") {
  CHECK(prop22_commute(Eigen::MatrixXd::Identity(4, 4), 1));

  Rng rng(37);
  for (int n : {1, 2}) {
    Eigen::MatrixXd h = sample_group_random(GroupKind::H, n, rng);
    CHECK(prop22_commute(h, n, 1e-8));
  }

  Eigen::MatrixXd a = block_diag_xyxy(rotation(2, 0.4), rotation(2, -0.9));
  CHECK_FALSE(prop22_commute(a, 2, 1e-8));
  auto [p, px] = p_matrices(a, 2);
  CHECK((p - px).cwiseAbs().maxCoeff() > 1e-3);

  // both directions on sampled members
  for (int trial = 0; trial < 60; ++trial) {
    int n = 1 + rng.uniform_int(2);
    Eigen::MatrixXd m = so_random_w_preserving(n, rng);
    auto [pm, pxm] = p_matrices(m, n);
    bool equal = (pm - pxm).cwiseAbs().maxCoeff() <= 1e-8;
    CHECK(prop22_commute(m, n, 1e-8) == equal);
  }
}

TEST_CASE("prop23 determinant identities") {
  auto rep = prop23_verify(Eigen::MatrixXd::Identity(8, 8), 2);
  CHECK(rep.det_p == doctest::Approx(1.0));
  CHECK(rep.det_px == doctest::Approx(1.0));

  // C with c = c' = 1: P = P^x, det P = 1
  Eigen::MatrixXd c_eq = sample_group(GroupKind::C, c_params(1.0, 1.0), 1);
  CHECK(so_member(c_eq, 1, 1e-12));
  auto rep_eq = prop23_verify(c_eq, 1);
  CHECK(rep_eq.p_px_gap <= 1e-12);
  CHECK(rep_eq.det_p_minus_1 <= 1e-12);

  // C with c = 1, c' = 2: det P det P^x = 1 but P != P^x
  Eigen::MatrixXd c_neq = sample_group(GroupKind::C, c_params(1.0, 2.0), 1);
  CHECK(so_member(c_neq, 1, 1e-12));
  auto rep_neq = prop23_verify(c_neq, 1);
  CHECK(rep_neq.product_residual <= 1e-12);
  CHECK(rep_neq.p_px_gap > 0.1);

  CHECK_THROWS_AS(prop23_verify(so_random(1, 3), 1), std::invalid_argument);
}

TEST_CASE("group samples satisfy the defining identities") {
  // G2 with cosh/sinh blocks
  GroupParams g2;
  g2.m1 = std::cosh(0.8) * Eigen::MatrixXd::Identity(2, 2);
  g2.m2 = std::sinh(0.8) * Eigen::MatrixXd::Identity(2, 2);
  CHECK(so_member(sample_group(GroupKind::G2, g2, 2), 2, 1e-12));

  // H with X = 0, Y skew
  GroupParams h;
  h.m1 = Eigen::MatrixXd::Zero(2, 2);
  h.m2 = (Eigen::MatrixXd(2, 2) << 0, 1, -1, 0).finished();
  CHECK(so_member(sample_group(GroupKind::H, h, 2), 2, 1e-12));

  // B with (cosh s, 0, sinh s, 0)
  GroupParams b;
  b.b1 = std::cosh(0.6);
  b.b3 = std::sinh(0.6);
  CHECK(so_member(sample_group(GroupKind::B, b, 1), 1, 1e-12));

  // constraint violations are rejected
  GroupParams bad;
  bad.b1 = 2.0;
  CHECK_THROWS_AS(sample_group(GroupKind::B, bad, 1), std::invalid_argument);
  GroupParams badh;
  badh.m1 = Eigen::MatrixXd::Identity(2, 2);
  badh.m2 = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(sample_group(GroupKind::H, badh, 2), std::invalid_argument);
}

TEST_CASE("so_random is deterministic and lands in the group") {
  Eigen::MatrixXd a = so_random(2, 42), b = so_random(2, 42);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(so_member(a, 2, 1e-9));
  CHECK((matrix_exp(Eigen::MatrixXd::Zero(4, 4)) -
         Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closure: members and short products satisfy the invariants") {
  const GroupKind kinds[] = {GroupKind::G1, GroupKind::G2, GroupKind::G3,
                             GroupKind::H, GroupKind::B, GroupKind::C};
  Rng rng(101);
  for (int n : {1, 2}) {
    for (int trial = 0; trial < 100; ++trial) {
      GroupKind k = kinds[rng.uniform_int(n == 1 ? 6 : 4)];  // B, C are n = 1 families
      Eigen::MatrixXd a = sample_group_random(k, n, rng);
      int extra = rng.uniform_int(3);
      for (int e = 0; e < extra; ++e) {
        GroupKind k2 = kinds[rng.uniform_int(n == 1 ? 6 : 4)];
        a = a * sample_group_random(k2, n, rng);
      }
      CHECK(so_member_residual(a, n) <= 1e-8);
      CHECK(preserves_w_residual(a, n) <= 1e-8);
      auto rep = prop23_verify(a, n, 1e-8);
      CHECK(rep.p_px_gap <= 1e-8);
      CHECK(rep.det_p_minus_1 <= 1e-8);
    }
  }
}

TEST_CASE("prop23(a) on perturbation-projected W-preserving elements") {
  Rng rng(211);
  for (int n : {1, 2}) {
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd a = so_random_w_preserving(n, rng);
      CHECK(so_member_residual(a, n) <= 1e-8);
      auto rep = prop23_verify(a, n, 1e-8);
      CHECK(rep.product_residual <= 1e-8);
    }
  }
}

TEST_CASE("preserves_w transfers across cross") {
  Rng rng(307);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + rng.uniform_int(2);
    Eigen::MatrixXd member = so_random_w_preserving(n, rng);
    CHECK(preserves_w(cross(member, n), n, 1e-8));
    Eigen::MatrixXd non = so_random(n, rng.next_u64());
    CHECK(preserves_w(non, n, 1e-8) == preserves_w(cross(non, n), n, 1e-8));
  }
}
