// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ntwistor/structures.hpp"

namespace ntw {

/// 1-based entry access for connection-form index formulas.
inline const Form& entry1(const MatrixForm& m, int i, int j) { return m.at(i - 1, j - 1); }
inline Form& entry1(MatrixForm& m, int i, int j) { return m.at(i - 1, j - 1); }

/// Metric-compatibility residual: omega^i_j = -omega^j_i on same-type index
/// pairs, +omega^j_i on mixed pairs.
double compatibility_residual(const MatrixForm& omega, int n, const std::vector<Point>& pts);

/// Fill a compatible 4 x 4 connection form from its strictly-lower entries.
MatrixForm compatible_from_lower_n1(const Form& w21, const Form& w31, const Form& w32,
                                    const Form& w41, const Form& w42, const Form& w43, int m);

/// dK + omega K - K omega: the components of the covariant derivative of an
/// endomorphism field K expressed in the frame of omega.
MatrixForm endo_cov_deriv(const MatrixForm& omega, const MatrixForm& k);

/// alpha (x) K with a 1-form alpha.
MatrixForm tensor_1form(const Form& alpha, const MatrixForm& k);

struct FactorizationReport {
  bool ok = false;
  int eps = +1;
  int mu = +1;
  Form alpha;                  // extracted from the diagonal equations
  double compat_residual = 0;  // Eq-compatibility of omega
  double eq_residual = 0;      // the factorization condition system
  double tensor_residual = 0;  // nabla J - alpha (x) N
  std::string failure;
};

/// Checks the condition system on omega equivalent to
/// nabla J = alpha (x) N with N related to J by (e, mu), extracts alpha
/// and reports the direct tensor residual.
FactorizationReport factorization_check(const MatrixForm& omega, int n, int eps, int mu,
                                        const std::vector<Point>& pts, double tol = 1e-9);

/// The connection induced on Lambda^2 in the ordered pair basis (n = 1 only).
MatrixForm induced_lambda2_connection(const MatrixForm& omega);

/// Covariant derivative of a constant-component bivector section: six 1-forms.
std::array<Form, 6> bivector_cov_deriv(const MatrixForm& omega, const Bivector& comps);

struct FullyLightlikeReport {
  bool ok = false;
  int mu = +1;
  Form alpha;
  Bivector omega0 = Bivector::Zero();
  double lightlike_residual = 0;  // max |hhat(B,B)| / max(1, |B|^2)
  double min_norm = 0;            // min over points of the largest derivative component
  double mu_residual = 0;         // Eq. (32+41) misfit for the detected mu
  std::string failure;            // nonempty iff not ok ("vanishing", "mixed mu", ...)
};

/// Is the covariant derivative of Omega_{eps,2} fully light-like?
FullyLightlikeReport fully_lightlike_check(const MatrixForm& omega, int eps,
                                           const std::vector<Point>& pts, double tol = 1e-9);

/// Residual of d(omega^4_2 - eps omega^3_1) over the samples.
double horizontality_residual(const MatrixForm& omega, int eps, const std::vector<Point>& pts);

struct GaugeResult {
  MatrixForm omega_new;     // connection form of the boosted frame
  MatrixForm frame_change;  // the boost in the (e2, e4) plane
  double input_residual;    // |omega^4_2 - eps omega^3_1 + df|
  double output_residual;   // |omega'^4_2 - eps omega'^3_1|
};

/// Boost e2, e4 by cosh f / sinh f so that the lifted light-like section
/// becomes horizontal; requires omega^4_2 - eps omega^3_1 = -df.
GaugeResult gauge_horizontal(const MatrixForm& omega, int eps, const Expr& f,
                             const std::vector<Point>& pts, double tol = 1e-9);

/// max |h(nabla_k xi_i, xi_j)| over samples, directions and generator pairs;
/// generators is a 4n x 2n degree-0 matrix of components in the frame of omega.
double walker_residual(const MatrixForm& omega, const MatrixForm& generators, int n,
                       const std::vector<Point>& pts);

bool walker_check(const MatrixForm& omega, const MatrixForm& generators, int n,
                  const std::vector<Point>& pts, double tol = 1e-8);

/// Standard distribution generators: xi_i = e_i - mu e_{2n+i},
/// xi_{n+i} = e_{n+i} + mu eps^{delta_i1} e_{3n+i}.
MatrixForm standard_walker_generators(int n, int eps, int mu, int dim);

/// The same quantity through the closed index formulas of the Walker theorem
/// (independent route used to cross-check walker_residual).
double walker_closed_residual(const MatrixForm& omega, int n, int eps, int mu,
                              const std::vector<Point>& pts);

struct WalkerParacomplexResult {
  MatrixForm omega_new;      // connection form in the modified frame
  MatrixForm frame_change;   // the modification matrix M(h)
  Form alpha;                // omega'^3_2 + omega'^4_1 of the new frame
  double walker_residual;    // precondition misfit of the input
  double closed_form_residual;  // alpha against the displayed closed form
  double min_alpha;          // smallest per-point sup of |alpha|
};

/// Frame modification turning a Walker distribution into a paracomplex
/// structure with nowhere-zero factor (eps = +): the caller supplies the
/// modification function hfn and a sample box on which the resulting alpha
/// must not vanish.
WalkerParacomplexResult walker_to_paracomplex(const MatrixForm& omega, const Expr& hfn,
                                              const Box& box, int validation_samples,
                                              std::uint64_t seed, double tol = 1e-9);

/// Square norm of nabla J summed over base coordinate directions; returns the
/// largest |value| over the samples.
double square_norm(const MatrixForm& omega, int n, int eps, const std::vector<Point>& pts);
/// Value at a single point.
double square_norm_at(const MatrixForm& omega, int n, int eps, const Point& p);
/// Independent triple-sum route through the 2-form Omega*(X,Y) = h(X, JY).
double square_norm_oracle_at(const MatrixForm& omega, int n, int eps, const Point& p);

}  // namespace ntw
