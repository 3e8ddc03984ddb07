// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ntwistor/structures.hpp"

using namespace ntw;

namespace {

const Point kOrigin = {0.0, 0.0};
const std::vector<Point> kPts = {{0.0, 0.0}};

int matrix_rank(const Eigen::MatrixXd& a) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("isotropic completion of the standard span") {
  for (int n : {1, 2}) {
    Eigen::MatrixXd xi = standard_xi(n);
    Eigen::MatrixXd xip = complete_isotropic_basis(xi, n);
    Eigen::MatrixXd g = neutral_gram(n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    d.block(n, n, n, n) *= -1.0;
    CHECK((xi.transpose() * g * xip - d).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((xip.transpose() * g * xip).cwiseAbs().maxCoeff() <= 1e-12);

    // the standard span completes to xi'_i = (e_i + e_{2n+i}) / 2
    for (int i = 0; i < n; ++i) {
      CHECK(xip(i, i) == doctest::Approx(0.5));
      CHECK(xip(2 * n + i, i) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("isotropic completion of permuted and rescaled spans") {
  Rng rng(13);
  for (int n : {1, 2}) {
    Eigen::MatrixXd g = neutral_gram(n);
    for (int trial = 0; trial < 20; ++trial) {
      // mix the standard span by an invertible 2n x 2n matrix (same subspace)
      Eigen::MatrixXd mix(2 * n, 2 * n);
      do {
        for (int i = 0; i < 2 * n; ++i)
          for (int j = 0; j < 2 * n; ++j) mix(i, j) = rng.uniform(-1.0, 1.0);
      } while (std::fabs(mix.determinant()) < 0.2);
      Eigen::MatrixXd xi = standard_xi(n) * mix;
      Eigen::MatrixXd xip = complete_isotropic_basis(xi, n);
      Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2 * n, 2 * n);
      d.block(n, n, n, n) *= -1.0;
      CHECK((xi.transpose() * g * xip - d).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK((xip.transpose() * g * xip).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("completion rejects bad spans") {
  Eigen::MatrixXd xi = standard_xi(1);
  xi.col(0) = Eigen::VectorXd::Unit(4, 0);  // space-like vector
  CHECK_THROWS_AS(complete_isotropic_basis(xi, 1), std::invalid_argument);

  Eigen::MatrixXd degenerate = standard_xi(1);
  degenerate.col(1) = 2.0 * degenerate.col(0);
  CHECK_THROWS_AS(complete_isotropic_basis(degenerate, 1), std::invalid_argument);
}

TEST_CASE("frame from isotropic pair") {
  for (int n : {1, 2}) {
    Eigen::MatrixXd xi = standard_xi(n);
    Eigen::MatrixXd xip = complete_isotropic_basis(xi, n);
    Eigen::MatrixXd e = frame_from_isotropic(xi, xip, n);
    Eigen::MatrixXd g = neutral_gram(n);
    CHECK((e - Eigen::MatrixXd::Identity(4 * n, 4 * n)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((e.transpose() * g * e - g).cwiseAbs().maxCoeff() <= 1e-12);

    // N built on the frame maps xi'_i to xi_{n+i}
    FrameField frame = FrameField::constant(e, n, 2);
    NilpotentStructure nst = nilpotent_from_frame(frame, +1);
    Eigen::MatrixXd nv = nst.eval(kOrigin);
    for (int i = 0; i < n; ++i)
      CHECK((nv * xip.col(i) - xi.col(n + i)).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS_AS(frame_from_isotropic(xi, xi, n), std::invalid_argument);
  }
}

TEST_CASE("nilpotent structure invariants") {
  // identity frame, eps = +, n = 1 gives Lambda_1 itself
  NilpotentStructure std_n = nilpotent_from_frame(FrameField::standard(1, 2), +1);
  CHECK((std_n.eval(kOrigin) - lambda_matrix(1)).cwiseAbs().maxCoeff() == 0.0);

  // eps = - differs exactly by the sign conjugation through I'_{4n,-}
  NilpotentStructure neg = nilpotent_from_frame(FrameField::standard(1, 2), -1);
  Eigen::MatrixXd ip = i_prime(1, -1);
  CHECK((neg.eval(kOrigin) - ip * lambda_matrix(1) * ip).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(7);
  for (int n : {1, 2}) {
    Eigen::MatrixXd g = neutral_gram(n);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd e = so_random(n, rng.next_u64());
      int eps = rng.uniform() < 0.5 ? +1 : -1;
      NilpotentStructure nst = nilpotent_from_frame(FrameField::constant(e, n, 2), eps);
      Eigen::MatrixXd nv = nst.eval(kOrigin);
      CHECK((nv * nv).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(matrix_rank(nv) == 2 * n);

      // image columns pairwise isotropic; h(phi, N phi) = 0
      Eigen::MatrixXd xi = nst.xi_columns().eval(kOrigin);
      CHECK((xi.transpose() * g * xi).cwiseAbs().maxCoeff() <= 1e-10);
      for (int probe = 0; probe < 20; ++probe) {
        Eigen::VectorXd phi(4 * n);
        for (int i = 0; i < 4 * n; ++i) phi(i) = rng.uniform(-1.0, 1.0);
        CHECK(std::fabs(phi.dot(g * (nv * phi))) <= 1e-10);
      }

      // admissibility: N e I' = e I' Lambda
      Eigen::MatrixXd ipn = i_prime(n, eps);
      CHECK((nv * e * ipn - e * ipn * lambda_matrix(n)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("paracomplex structure invariants") {
  ParacomplexStructure std_j = paracomplex_from_frame(FrameField::standard(1, 2), +1);
  Eigen::MatrixXd jv = std_j.eval(kOrigin);
  // J e1 = e3, J e2 = -e4, J e3 = e1, J e4 = -e2
  Eigen::MatrixXd want(4, 4);
  want << 0, 0, 1, 0,
          0, 0, 0, -1,
          1, 0, 0, 0,
          0, -1, 0, 0;
  CHECK((jv - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK((jv * jv - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(11);
  for (int n : {1, 2}) {
    Eigen::MatrixXd g = neutral_gram(n);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4 * n, 4 * n);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd e = so_random(n, rng.next_u64());
      int eps = rng.uniform() < 0.5 ? +1 : -1;
      ParacomplexStructure par = paracomplex_from_frame(FrameField::constant(e, n, 2), eps);
      Eigen::MatrixXd j = par.eval(kOrigin);
      CHECK((j * j - id).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((j.transpose() * g * j + g).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("lambda2 basis norms and gram matrix") {
  // hhat(Omega_{+,2}, Omega_{+,2}) = -1 by expanding on e1^e3, e4^e2
  CHECK(hhat(omega_basis(+1, 2), omega_basis(+1, 2)) == doctest::Approx(-1.0));
  CHECK(hhat(omega_basis(+1, 1), omega_basis(+1, 1)) == doctest::Approx(1.0));
  CHECK(hhat(omega_basis(-1, 3), omega_basis(-1, 3)) == doctest::Approx(-1.0));

  auto basis = lambda2_basis();
  double want[6] = {1, -1, -1, 1, -1, -1};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double expect = a == b ? want[a] : 0.0;
      CHECK(hhat(basis[static_cast<std::size_t>(a)], basis[static_cast<std::size_t>(b)]) ==
            doctest::Approx(expect));
    }

  // the canonical light-like section
  Bivector omega0 = omega_basis(-1, 1) + omega_basis(+1, 3);
  CHECK(std::fabs(hhat(omega0, omega0)) <= 1e-15);
  CHECK(side_violation(omega0, +1) <= 1e-15);
  CHECK(side_violation(omega0, -1) > 0.5);
}

TEST_CASE("bridge between light-like sections and nilpotent structures") {
  NilpotentStructure n1 = bivector_to_nilpotent(canonical_lightlike(+1),
                                                FrameField::standard(1, 2), +1);
  CHECK((n1.eval(kOrigin) - lambda_matrix(1)).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd e = so_random(1, rng.next_u64());
    int eps = rng.uniform() < 0.5 ? +1 : -1;
    FrameField frame = FrameField::constant(e, 1, 2);
    NilpotentStructure nst = bivector_to_nilpotent(canonical_lightlike(eps), frame, eps);
    Bivector back = nilpotent_to_bivector(nst);
    CHECK((back - canonical_lightlike(eps)).cwiseAbs().maxCoeff() <= 1e-10);

    // frame-component representation matches the background wedge of xi/sqrt2
    Eigen::MatrixXd xi = nst.xi_columns().eval(kOrigin);
    Bivector bg_direct = Bivector::Zero();
    const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (int c = 0; c < 6; ++c)
      bg_direct(c) = (xi(pairs[c][0], 0) * xi(pairs[c][1], 1) -
                      xi(pairs[c][1], 0) * xi(pairs[c][0], 1)) / std::sqrt(2.0);
    Bivector bg_from_frame = bivector_to_background(e, back);
    CHECK((bg_direct - bg_from_frame).cwiseAbs().maxCoeff() <= 1e-10);
  }

  // a time-like section must be rejected
  CHECK_THROWS_AS(bivector_to_nilpotent(omega_basis(+1, 2), FrameField::standard(1, 2), +1),
                  std::invalid_argument);
  // wrong side
  CHECK_THROWS_AS(bivector_to_nilpotent(canonical_lightlike(-1), FrameField::standard(1, 2), +1),
                  std::invalid_argument);
}

TEST_CASE("induced 2n-vector and its invariance") {
  // identity frame, eps = +: sqrt2 Omega_0 in background components
  NilpotentStructure nst = nilpotent_from_frame(FrameField::standard(1, 2), +1);
  Eigen::VectorXd v = induced_2nvector(nst, kOrigin);
  Bivector want = std::sqrt(2.0) * bivector_to_background(Eigen::MatrixXd::Identity(4, 4),
                                                          canonical_lightlike(+1));
  CHECK((v - want).cwiseAbs().maxCoeff() <= 1e-12);

  Rng rng(29);
  for (int n : {1, 2}) {
    for (int trial = 0; trial < 40; ++trial) {
      Eigen::MatrixXd e = so_random(n, rng.next_u64());
      NilpotentStructure a = nilpotent_from_frame(FrameField::constant(e, n, 2), +1);

      // an admissible change: product of up to three G/H samples
      const GroupKind kinds[] = {GroupKind::G1, GroupKind::G2, GroupKind::G3, GroupKind::H};
      Eigen::MatrixXd change = sample_group_random(kinds[rng.uniform_int(4)], n, rng);
      int extra = rng.uniform_int(3);
      for (int x = 0; x < extra; ++x)
        change = change * sample_group_random(kinds[rng.uniform_int(4)], n, rng);
      NilpotentStructure b = nilpotent_from_frame(FrameField::constant(e * change, n, 2), +1);
      CHECK((induced_2nvector(a, kOrigin) - induced_2nvector(b, kOrigin)).cwiseAbs().maxCoeff()
            <= 1e-8);
    }
  }

  // non-admissible change (X != Y block diagonal) generally changes the vector
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd y(2, 2);
  y << 0, -1, 1, 0;
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(8, 8);
  bad.block(0, 0, 2, 2) = x;
  bad.block(2, 2, 2, 2) = y;
  bad.block(4, 4, 2, 2) = x;
  bad.block(6, 6, 2, 2) = y;
  NilpotentStructure base = nilpotent_from_frame(FrameField::standard(2, 2), +1);
  NilpotentStructure moved = nilpotent_from_frame(FrameField::constant(bad, 2, 2), +1);
  CHECK((induced_2nvector(base, kOrigin) - induced_2nvector(moved, kOrigin))
            .cwiseAbs().maxCoeff() > 0.5);
}
