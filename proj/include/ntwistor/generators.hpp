// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ntwistor/connection.hpp"

namespace ntw {

/// A flat metric connection form, optionally with the matrix potential x
/// satisfying omega = dx (all the explicit families are exact).
struct FlatConnection {
  MatrixForm omega;      // 4n x 4n degree 1
  MatrixForm potential;  // 4n x 4n degree 0, valid iff has_potential
  bool has_potential = false;
  Expr f;                // alpha = df in the factorization
  int n = 1;
};

/// Assemble the block pattern
///   [ D11   -df/2  D31    df/2 ]
///   [ df/2   D11   df/2   D31  ]
///   [ D31    df/2  D11   -df/2 ]
///   [ df/2   D31   df/2   D11  ]
/// after validating tD11 = -D11, tD31 = D31 and the structure equations
/// dD11 = D11^D11 + D31^D31, dD31 = D31^D11 + D11^D31 on the samples.
FlatConnection build_flat_omega(const MatrixForm& d11, const MatrixForm& d31, const Expr& f,
                                const std::vector<Point>& pts, double tol = 1e-9);

struct FlatFamilySpec {
  enum class Variant { SymmetricPotential, Tridiagonal, SkewPotential, QuaternionBlocks };
  Variant variant = Variant::SymmetricPotential;
  int n = 1;
  int m = 2;
  Expr f;                 // the df entry, alpha = df
  Expr phi;               // SymmetricPotential: D31 = dphi C0
  Expr psi;               // SkewPotential:      D11 = dpsi C0
  Eigen::MatrixXd c0;     // constant symmetric / skew matrix
  Expr f1, f2;            // Tridiagonal entries
  int p = 1;              // QuaternionBlocks: n = 4p
  Expr qa1, qb1, qa2, qb2;
};

/// Build one of the explicit flat families; the wedge-vanishing identities
/// of the tridiagonal and quaternion families are asserted internally.
FlatConnection family_omega(const FlatFamilySpec& spec, const std::vector<Point>& pts,
                            double tol = 1e-9);

struct FrameIntegration {
  std::vector<Eigen::MatrixXd> frames;  // one per target point
  bool fast_path = false;               // e = e0 exp(-x(base)) exp(x(p)) used
  double ortho_residual = 0.0;          // max |tE G E - G| over targets
  double loop_residual = 0.0;           // rectangle-loop closure error
  double cross_residual = 0.0;          // exp route vs integrator, when available
};

/// Parallel-transport the initial frame e0 from `base` to each target along
/// axis-ordered paths (classical RK4, step <= max_step).  When the potential
/// is available and commutes with omega, the closed exponential form is used
/// for the returned frames and cross-validated against the integrator.
FrameIntegration frame_integrate(const FlatConnection& conn, const Point& base,
                                 const Eigen::MatrixXd& e0, const std::vector<Point>& targets,
                                 const Box& loop_box, std::uint64_t seed, double max_step = 1e-2,
                                 double tol = 1e-9);

struct SingleEpsResult {
  MatrixForm omega;
  double system_residual;  // misfit of the three structure equations
};

/// Complete omega from (omega21, omega31, omega32) and the data (f, g, mu, eps)
/// of the single-section classification; reports how well the inputs satisfy
/// the integrability system (zero residual implies flatness).
SingleEpsResult single_eps_omega(const Expr& f, const Expr& g, const Form& w21, const Form& w31,
                                 const Form& w32, int mu, int eps, int m,
                                 const std::vector<Point>& pts, double tol = 1e-9);

struct PairSpec {
  Expr fp, fm;  // f^+, f^-
  Expr gp, gm;  // g^+, g^- with dg^{+-} nowhere zero on the box
  char branch = 'A';
  int mu = +1;
  int m = 2;
};

/// The closed-form connection whose lifted sections on both sides have fully
/// light-like covariant derivatives.
MatrixForm pair_omega(const PairSpec& spec, const std::vector<Point>& pts, double tol = 1e-9);

/// Side data predicted for a pair connection: the lightlike sign of side eps
/// and the 1-form e^{mu_eps f^eps} dg^eps.
struct PairSideExpectation {
  int mu;
  Form alpha;
};
PairSideExpectation pair_expected_side(const PairSpec& spec, int eps);

enum class BranchClass { A, B, Both, Neither };
std::string to_string(BranchClass c);

/// Which of the two defining relation sets holds:
/// A: omega^4_1 = mu omega^2_1 and omega^4_3 = mu omega^3_2;
/// B: omega^3_2 = mu omega^2_1 and omega^4_3 = mu omega^4_1.
BranchClass branch_classify(const MatrixForm& omega, int mu, const std::vector<Point>& pts,
                            double tol = 1e-9);

}  // namespace ntw
