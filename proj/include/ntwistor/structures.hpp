// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>

#include "ntwistor/forms.hpp"
#include "ntwistor/neutral.hpp"

namespace ntw {

/// diag(I_n, I_n, I_n, I_{n,eps}) with I_{n,eps} = diag(eps, 1, ..., 1).
Eigen::MatrixXd i_prime(int n, int eps);

/// Pseudo-orthonormal frame e_1..e_4n over R^m, columns in a fixed
/// background trivialization.  First 2n columns space-like.
class FrameField {
 public:
  FrameField(MatrixForm e, int n);
  static FrameField constant(const Eigen::MatrixXd& e, int n, int dim);
  static FrameField standard(int n, int dim);

  const MatrixForm& mat() const { return e_; }
  int n() const { return n_; }
  int dim() const { return e_.dim(); }

  Eigen::MatrixXd eval(const Point& p) const { return e_.eval(p); }
  /// max |tE G E - G| over the samples
  double orthonormality_residual(const std::vector<Point>& pts) const;
  /// det E > 0 at every sample
  bool oriented(const std::vector<Point>& pts) const;
  /// G tE G, the inverse of a pseudo-orthonormal frame
  MatrixForm inverse() const;

 private:
  MatrixForm e_;
  int n_;
};

/// Completion of a light-like span: given the 2n columns of xi (pairwise
/// h-isotropic, independent), returns xi' with h(xi_i, xi'_i) = 1 (i <= n),
/// h(xi_{n+i}, xi'_{n+i}) = -1, all other pairings zero and the xi' span
/// isotropic.  Deterministic (least-squares pivot against G xi).
Eigen::MatrixXd complete_isotropic_basis(const Eigen::MatrixXd& xi, int n, double tol = 1e-9);

/// Pseudo-orthonormal frame assembled from the paired bases:
/// e_i = xi'_i + xi_i/2, e_{n+i} = -xi'_{n+i} + xi_{n+i}/2,
/// e_{2n+i} = xi'_i - xi_i/2, e_{3n+i} = xi'_{n+i} + xi_{n+i}/2.
Eigen::MatrixXd frame_from_isotropic(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& xi_prime,
                                     int n, double tol = 1e-9);

/// eps-nilpotent structure presented by an admissible frame.
struct NilpotentStructure {
  FrameField frame;
  int eps;  // +1 or -1

  /// N in the background trivialization: E I' Lambda_n I' G tE G.
  MatrixForm matrix() const;
  Eigen::MatrixXd eval(const Point& p) const;
  /// Columns xi_1..xi_2n of the distribution pi_N (background components).
  MatrixForm xi_columns() const;
};

/// eps-paracomplex structure presented by an admissible frame.
struct ParacomplexStructure {
  FrameField frame;
  int eps;

  MatrixForm matrix() const;
  Eigen::MatrixXd eval(const Point& p) const;
};

NilpotentStructure nilpotent_from_frame(const FrameField& e, int eps);
ParacomplexStructure paracomplex_from_frame(const FrameField& e, int eps);

/// Canonical endomorphism matrices in an admissible frame (background = frame).
Eigen::MatrixXd nilpotent_model(int n, int eps);            // I' Lambda_n I'
Eigen::MatrixXd paracomplex_model(int n, int eps);          // I' K I'
/// Model of the nilpotent structure related to J by (e, mu): S_mu I' Lambda I' S_mu.
Eigen::MatrixXd nilpotent_model_related(int n, int eps, int mu);

// --- rank-6 bivector algebra for n = 1 -------------------------------------

/// Components over the ordered frame basis e1^e2, e1^e3, e1^e4, e2^e3,
/// e2^e4, e3^e4.
using Bivector = Eigen::Matrix<double, 6, 1>;

/// Induced metric on Lambda^2 in the ordered basis: diag(1,-1,-1,-1,-1,1).
Eigen::Matrix<double, 6, 6> hhat_gram();
double hhat(const Bivector& a, const Bivector& b);

/// Omega_{sign,k} of the splitting basis (constants in any frame).
Bivector omega_basis(int sign, int k);

/// All six, ordered (-,1),(+,2),(+,3),(+,1),(-,2),(-,3): the first triple
/// frames Lambda^2_+, the second Lambda^2_-.
std::array<Bivector, 6> lambda2_basis();

/// Component of b along the complementary side of Lambda^2_eps (should be 0
/// for a section on side eps).
double side_violation(const Bivector& b, int eps);

/// b expressed in the background Lambda^2 basis given the frame value at a point.
Bivector bivector_to_background(const Eigen::MatrixXd& frame_value, const Bivector& b);

/// Light-like canonical section Omega_0 = Omega_{-eps,1} + eps Omega_{eps,3}.
Bivector canonical_lightlike(int eps);

/// Bridge (n = 1): the canonical light-like section in frame e corresponds to
/// the eps-nilpotent structure with admissible frame e.  Errors when omega0
/// is not light-like, on the wrong side, or not the canonical section.
NilpotentStructure bivector_to_nilpotent(const Bivector& omega0, const FrameField& e, int eps,
                                         double tol = 1e-9);
/// Inverse: (1/sqrt2) xi_1 ^ xi_2 in frame components.
Bivector nilpotent_to_bivector(const NilpotentStructure& n);

/// Wedge xi_1 ^ ... ^ xi_2n of the distribution generators in the background
/// basis; components are the 2n x 2n minors in lexicographic row-set order.
Eigen::VectorXd induced_2nvector(const NilpotentStructure& n, const Point& p);

}  // namespace ntw
