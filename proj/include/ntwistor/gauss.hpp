// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ntwistor/connection.hpp"
#include "ntwistor/generators.hpp"

namespace ntw {

using Vec3E = std::array<Expr, 3>;  // symbolic vector in E^3_1, metric (+,+,-)
using Vec5E = std::array<Expr, 5>;  // symbolic vector in E^5_2, metric (+,+,+,-,-)

Expr dot3(const Vec3E& a, const Vec3E& b);
Expr dot5(const Vec5E& a, const Vec5E& b);
double dot5_num(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Lightcone embedding of E^3_1 into E^5_2:
/// p -> ((<p,p>-1)/2, p, (<p,p>+1)/2); the image is null with x5 = x1 + 1.
Eigen::Matrix<double, 5, 1> lightcone_embed(const Eigen::Vector3d& p);
Vec5E lightcone_embed_sym(const Vec3E& p);

/// Curve in E^3_1 given by three expressions of x1.
struct NullCurve {
  Vec3E comp;
  /// max |<c'(t), c'(t)>| over sample parameters.
  double null_residual(double lo, double hi, int samples, std::uint64_t seed) const;
};

/// Time-like minimal surface iota(u, v) = A(u+v) + B(u-v) with its derived
/// symbolic data; coordinates are (x1, x2) = (u, v).
struct TimelikeMinimalSurface {
  Vec3E iota;
  Vec3E normal;    // oriented unit normal in E^3_1
  Expr e2lambda;   // <iota_u, iota_u>
  Expr lambda;
  Expr ell, em;    // second fundamental coefficients l, m
  Expr km;         // Gauss curvature (m^2 - l^2) e^{-4 lambda}
  Box box;
  /// +1: l^2 > m^2 (K^M < 0, the displayed frame); -1: the mirrored frame.
  int curvature_sign = 0;
};

/// Build the surface and validate the null and time-like conditions on the box.
TimelikeMinimalSurface surface_from_null_curves(const NullCurve& a, const NullCurve& b,
                                                const Box& box, int samples, std::uint64_t seed,
                                                double tol = 1e-8);

struct SurfaceDiagnostics {
  double conformality_residual = 0;  // <iu,iv> and <iu,iu>+<iv,iv>
  double minimality_residual = 0;    // iota_uu - iota_vv
  double normal_residual = 0;        // <n,n>-1, <n,iu>, <n,iv>
  double gauss_equation_residual = 0;  // km against -<gamma_u,gamma_u> e^{-2lambda}
  double min_discriminant = 0;       // min |l^2 - m^2| over mask samples
  std::vector<Point> mask_samples;   // samples with l^2 != m^2 and e^{2lambda} > 0
};

/// Evaluate the surface invariants and build the mask sample set; sets
/// curvature_sign on the surface (throws if the sign is mixed).
SurfaceDiagnostics surface_diagnostics(TimelikeMinimalSurface& s, int samples, std::uint64_t seed,
                                       double tol = 1e-8);

/// Conformal Gauss map data: the lifted unit normal and the lightcone lift.
struct SphereMap {
  Vec5E f;         // F = (<n,p>, n, <n,p>)
  Vec5E f_u, f_v;
  Vec5E iota_hat;
};

SphereMap conformal_gauss(const TimelikeMinimalSurface& s);

/// The light-like normal with <nu, iota_hat> = -1, solved numerically from
/// its defining conditions at a point (unique).
Eigen::VectorXd solve_nu(const SphereMap& map, const Point& p);

struct ShapeOpsReport {
  double a_iota_residual = 0;   // numeric vs closed form
  double a_iota_trace = 0;      // trace of the closed-form matrix
  double a_nu_max = 0;          // finite-difference shape operator of nu
  double nu_direction_residual = 0;  // constancy of nu across samples
};

ShapeOpsReport shape_ops(const SphereMap& map, const TimelikeMinimalSurface& s,
                         const std::vector<Point>& mask, double fd_step = 1e-5);

struct GaussFrame {
  std::array<Vec5E, 4> e;   // frame e1..e4 of the pull-back bundle
  MatrixForm omega;         // connection form, exact-partial route
  Expr ltil, mtil;          // l~, m~
  Form coframe1, coframe3;  // e^1, e^3 on the surface
  Eigen::VectorXd nu;       // the constant light-like normal
  int curvature_sign = 0;
  double gram_residual = 0;        // pseudo-orthonormality of the frame
  double closed_form_residual = 0; // omega against the displayed closed form
};

/// Assemble the adapted frame and its connection form two ways: exact
/// symbolic partials with pointwise projection, and the displayed closed
/// form; both must agree on the mask.  For K^M > 0 the mirrored frame
/// (e1, e3) = (-F_v, -F_u)/c is used, which keeps the closed form verbatim.
GaussFrame gauss_frame_and_omega(const SphereMap& map, const TimelikeMinimalSurface& s,
                                 const std::vector<Point>& mask, double tol = 1e-5);

struct LiftStage {
  std::string name;
  double residual = 0;
  bool ok = false;
};

struct VerifyLiftsReport {
  bool ok = false;
  std::vector<LiftStage> stages;
};

/// Theorem-level verification on the mask: both lifts fully light-like with
/// mu = +, alpha = -(eps l~ + m~)(e^1 + eps e^3), the paracomplex factorization
/// and the Walker property of the associated distributions, branch A.
VerifyLiftsReport verify_lifts(const GaussFrame& frame, const std::vector<Point>& mask,
                               double tol = 1e-5);

}  // namespace ntw
