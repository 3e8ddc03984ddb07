// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "ntwistor/sampling.hpp"

namespace ntw {

/// Gram matrix diag(I_2n, -I_2n) of the neutral metric on R^4n.
Eigen::MatrixXd neutral_gram(int n);

/// The nilpotent model matrix Lambda_n (4n x 4n).
Eigen::MatrixXd lambda_matrix(int n);

/// n x n block of a 4n x 4n matrix; i, j are 1-based block indices in 1..4.
Eigen::MatrixXd block_of(const Eigen::MatrixXd& a, int n, int i, int j);
void set_block(Eigen::MatrixXd& a, int n, int i, int j, const Eigen::MatrixXd& value);

/// Columns xi_1..xi_2n spanning the fixed light-like 2n-plane W:
/// xi_i = e_i - e_{2n+i} (i <= n), xi_{n+i} = e_{n+i} + e_{3n+i}.
Eigen::MatrixXd standard_xi(int n);

/// Membership in SO(2n, 2n): |tA G A - G| <= tol and |det A - 1| <= tol.
bool so_member(const Eigen::MatrixXd& a, int n, double tol = 1e-9);
double so_member_residual(const Eigen::MatrixXd& a, int n);

/// The block-permuted companion A^x (an exact involution).
Eigen::MatrixXd cross(const Eigen::MatrixXd& a, int n);

/// Block criterion (b) for A to induce an endomorphism of W.
bool preserves_w(const Eigen::MatrixXd& a, int n, double tol = 1e-9);
double preserves_w_residual(const Eigen::MatrixXd& a, int n);

/// Residual of A xi_j against the span of W (least-squares projection),
/// the endomorphism statement equivalent to the block criterion.
double w_action_residual(const Eigen::MatrixXd& a, int n);

/// Representation matrices (P, P^x) of the induced endomorphisms on W
/// with respect to xi_1..xi_2n.  Requires preserves_w.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> p_matrices(const Eigen::MatrixXd& a, int n);

/// Commutation with Lambda_n.
bool prop22_commute(const Eigen::MatrixXd& a, int n, double tol = 1e-9);
double commute_residual(const Eigen::MatrixXd& a, int n);

struct Prop23Report {
  double det_p = 0.0;
  double det_px = 0.0;
  double product_residual = 0.0;   // |det P * det P^x - 1|
  double p_px_gap = 0.0;           // max|P - P^x|
  double det_p_minus_1 = 0.0;      // meaningful when p_px_gap <= tol
};

/// Determinant identities of the induced endomorphisms (requires preserves_w).
Prop23Report prop23_verify(const Eigen::MatrixXd& a, int n, double tol = 1e-9);

enum class GroupKind { G1, G2, G3, H, B, C };

GroupKind group_kind_from_string(const std::string& s);
std::string to_string(GroupKind k);

/// Explicit family parameters.  Fields are used per kind:
///   G1: a11, a21 (n x n);  G2: a11, a31;  G3: a11, a41;
///   H:  x (symmetric), y (x^2 = y + ty);
///   B:  b1..b4 with b1^2+b2^2-b3^2-b4^2 = 1 (n = 1);
///   C:  c, cprime, eps (+-1), t (n = 1).  When c*cprime != 0 the values of
///       eps and t are overridden per the K != 0 clause.
struct GroupParams {
  Eigen::MatrixXd m1, m2;
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  double c = 0, cprime = 0, t = 0;
  int eps = +1;
};

/// Build a family member after validating the defining constraints.
Eigen::MatrixXd sample_group(GroupKind kind, const GroupParams& params, int n,
                             double tol = 1e-9);

/// Draw random parameters for a family and build the member.  C draws use
/// c = cprime so the sample satisfies P = P^x.
Eigen::MatrixXd sample_group_random(GroupKind kind, int n, Rng& rng);

/// Matrix exponential by scaling and squaring with a Taylor tail below 1e-16.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x);

/// exp(X) for a random X in the Lie algebra so(2n, 2n), entries O(0.5).
Eigen::MatrixXd so_random(int n, std::uint64_t seed);

/// Random element of the stabilizer of W in SO(2n,2n): a random algebra
/// element is orthogonally projected onto the stabilizer subalgebra
/// (perturbation-projection), then exponentiated.
Eigen::MatrixXd so_random_w_preserving(int n, Rng& rng);

}  // namespace ntw
