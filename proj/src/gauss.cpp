// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace ntw {

namespace {

const double kSqrt2 = std::sqrt(2.0);

Expr sqrt_expr(const Expr& e) { return Expr::exp(Expr::constant(0.5) * Expr::log(e)); }

Vec3E dpartial(const Vec3E& v, int k) {
  return {v[0].partial(k), v[1].partial(k), v[2].partial(k)};
}

Vec5E dpartial5(const Vec5E& v, int k) {
  return {v[0].partial(k), v[1].partial(k), v[2].partial(k), v[3].partial(k), v[4].partial(k)};
}

Eigen::VectorXd eval5(const Vec5E& v, const Point& p) {
  Eigen::VectorXd out(5);
  for (int i = 0; i < 5; ++i) out(i) = v[static_cast<std::size_t>(i)].eval(p);
  return out;
}

Vec5E scale5(const Vec5E& v, const Expr& s) {
  return {v[0] * s, v[1] * s, v[2] * s, v[3] * s, v[4] * s};
}

Vec5E add5(const Vec5E& a, const Vec5E& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4]};
}

Vec5E sub5(const Vec5E& a, const Vec5E& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]};
}

}  // namespace

Expr dot3(const Vec3E& a, const Vec3E& b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

Expr dot5(const Vec5E& a, const Vec5E& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3] - a[4] * b[4];
}

double dot5_num(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2) - a(3) * b(3) - a(4) * b(4);
}

Eigen::Matrix<double, 5, 1> lightcone_embed(const Eigen::Vector3d& p) {
  double pp = p(0) * p(0) + p(1) * p(1) - p(2) * p(2);
  Eigen::Matrix<double, 5, 1> x;
  x << (pp - 1.0) / 2.0, p(0), p(1), p(2), (pp + 1.0) / 2.0;
  return x;
}

Vec5E lightcone_embed_sym(const Vec3E& p) {
  Expr pp = dot3(p, p);
  Expr half = Expr::constant(0.5);
  return {(pp - Expr::constant(1.0)) * half, p[0], p[1], p[2],
          (pp + Expr::constant(1.0)) * half};
}

double NullCurve::null_residual(double lo, double hi, int samples, std::uint64_t seed) const {
  Vec3E d = {comp[0].partial(1), comp[1].partial(1), comp[2].partial(1)};
  Expr sq = dot3(d, d);
  Rng rng(seed);
  double r = 0.0;
  for (int i = 0; i < samples; ++i) {
    Point p = {rng.uniform(lo, hi)};
    r = std::max(r, std::fabs(sq.eval(p)));
  }
  return r;
}

TimelikeMinimalSurface surface_from_null_curves(const NullCurve& a, const NullCurve& b,
                                                const Box& box, int samples, std::uint64_t seed,
                                                double tol) {
  if (box.dim() != 2) throw std::invalid_argument("surface box must be two-dimensional");
  double alo = box.lo[0] + box.lo[1], ahi = box.hi[0] + box.hi[1];
  double blo = box.lo[0] - box.hi[1], bhi = box.hi[0] - box.lo[1];
  if (a.null_residual(alo, ahi, samples, seed) > tol)
    throw std::invalid_argument("first curve is not null on the parameter range");
  if (b.null_residual(blo, bhi, samples, seed ^ 1) > tol)
    throw std::invalid_argument("second curve is not null on the parameter range");

  Expr u_plus_v = Expr::coord(1) + Expr::coord(2);
  Expr u_minus_v = Expr::coord(1) - Expr::coord(2);
  TimelikeMinimalSurface s;
  s.box = box;
  for (int i = 0; i < 3; ++i) {
    std::size_t k = static_cast<std::size_t>(i);
    s.iota[k] = a.comp[k].substitute({u_plus_v}) + b.comp[k].substitute({u_minus_v});
  }

  Vec3E iu = dpartial(s.iota, 1), iv = dpartial(s.iota, 2);
  s.e2lambda = dot3(iu, iu);
  std::vector<Point> pts = box.sample(samples, seed ^ 2);
  for (const Point& p : pts)
    if (s.e2lambda.eval(p) <= tol)
      throw std::invalid_argument("<A'(u+v), B'(u-v)> <= 0: surface not time-like on the box");
  s.lambda = Expr::constant(0.5) * Expr::log(s.e2lambda);

  // oriented unit normal: G3 (iota_u x iota_v) normalized
  Vec3E w = {iu[1] * iv[2] - iu[2] * iv[1],
             iu[2] * iv[0] - iu[0] * iv[2],
             iu[0] * iv[1] - iu[1] * iv[0]};
  w[2] = -w[2];  // lower the last index: metric (+,+,-)
  Expr wnorm = sqrt_expr(dot3(w, w));
  for (auto& c : w) c = c / wnorm;
  s.normal = w;

  Vec3E iuu = dpartial(iu, 1), iuv = dpartial(iu, 2);
  s.ell = dot3(iuu, s.normal);
  s.em = dot3(iuv, s.normal);
  s.km = (s.em * s.em - s.ell * s.ell) / (s.e2lambda * s.e2lambda);
  return s;
}

SurfaceDiagnostics surface_diagnostics(TimelikeMinimalSurface& s, int samples, std::uint64_t seed,
                                       double tol) {
  SurfaceDiagnostics d;
  Vec3E iu = dpartial(s.iota, 1), iv = dpartial(s.iota, 2);
  Vec3E iuu = dpartial(iu, 1), ivv = dpartial(iv, 2);
  Expr conf1 = dot3(iu, iv);
  Expr conf2 = dot3(iu, iu) + dot3(iv, iv);
  Expr nn = dot3(s.normal, s.normal) - Expr::constant(1.0);
  Expr nu_ = dot3(s.normal, iu), nv_ = dot3(s.normal, iv);

  // gamma_u from the symbolic normal; the Gauss-equation route must agree with
  // the induced-metric route K = -<gamma_u, gamma_u> e^{-2 lambda}
  Vec3E gu = dpartial(s.normal, 1);
  Expr km_alt = -dot3(gu, gu) / s.e2lambda;

  Expr disc = s.ell * s.ell - s.em * s.em;

  std::vector<Point> pts = s.box.sample(samples, seed);
  int sign = 0;
  double min_disc = std::numeric_limits<double>::infinity();
  for (const Point& p : pts) {
    d.conformality_residual = std::max({d.conformality_residual, std::fabs(conf1.eval(p)),
                                        std::fabs(conf2.eval(p))});
    for (const auto& c : [&] {
           Vec3E m;
           for (std::size_t k = 0; k < 3; ++k) m[k] = iuu[k] - ivv[k];
           return m;
         }())
      d.minimality_residual = std::max(d.minimality_residual, std::fabs(c.eval(p)));
    d.normal_residual = std::max({d.normal_residual, std::fabs(nn.eval(p)),
                                  std::fabs(nu_.eval(p)), std::fabs(nv_.eval(p))});
    d.gauss_equation_residual =
        std::max(d.gauss_equation_residual, std::fabs(s.km.eval(p) - km_alt.eval(p)));

    double dv = disc.eval(p);
    if (std::fabs(dv) > 1e-6 && s.e2lambda.eval(p) > 1e-6) {
      int ps = dv > 0 ? +1 : -1;
      if (sign == 0) sign = ps;
      if (sign != ps)
        throw std::invalid_argument("l^2 - m^2 changes sign on the box; shrink the box");
      min_disc = std::min(min_disc, std::fabs(dv));
      d.mask_samples.push_back(p);
    }
  }
  if (d.mask_samples.empty()) throw std::invalid_argument("mask is empty on the box");
  (void)tol;
  d.min_discriminant = std::isfinite(min_disc) ? min_disc : 0.0;
  s.curvature_sign = sign;
  return d;
}

SphereMap conformal_gauss(const TimelikeMinimalSurface& s) {
  Expr np = dot3(s.normal, s.iota);
  SphereMap map;
  map.f = {np, s.normal[0], s.normal[1], s.normal[2], np};
  map.f_u = dpartial5(map.f, 1);
  map.f_v = dpartial5(map.f, 2);
  map.iota_hat = lightcone_embed_sym(s.iota);
  return map;
}

Eigen::VectorXd solve_nu(const SphereMap& map, const Point& p) {
  Eigen::VectorXd f = eval5(map.f, p), fu = eval5(map.f_u, p), fv = eval5(map.f_v, p);
  Eigen::VectorXd ih = eval5(map.iota_hat, p);
  Eigen::VectorXd g5(5);
  g5 << 1, 1, 1, -1, -1;

  Eigen::MatrixXd rows(3, 5);
  rows.row(0) = (f.array() * g5.array()).matrix().transpose();
  rows.row(1) = (fu.array() * g5.array()).matrix().transpose();
  rows.row(2) = (fv.array() * g5.array()).matrix().transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() != 2) throw std::runtime_error("normal space is not two-dimensional at sample");
  Eigen::VectorXd w1 = ker.col(0), w2 = ker.col(1);

  double q11 = dot5_num(w1, w1), q12 = dot5_num(w1, w2), q22 = dot5_num(w2, w2);
  // null directions x w1 + y w2 of the signature-(1,1) normal plane
  double x1, y1, x2, y2;
  if (std::fabs(q11) > 1e-12) {
    double disc = std::sqrt(std::max(0.0, q12 * q12 - q11 * q22));
    x1 = (-q12 + disc) / q11; y1 = 1.0;
    x2 = (-q12 - disc) / q11; y2 = 1.0;
  } else {
    x1 = 1.0; y1 = 0.0;
    x2 = -q22 / (2.0 * q12); y2 = 1.0;
  }
  Eigen::VectorXd d1 = x1 * w1 + y1 * w2, d2 = x2 * w1 + y2 * w2;
  double p1 = dot5_num(d1, ih), p2 = dot5_num(d2, ih);
  // one direction is iota_hat itself (pairing ~ 0); nu lies along the other
  Eigen::VectorXd d = std::fabs(p1) > std::fabs(p2) ? d1 : d2;
  double pairing = std::fabs(p1) > std::fabs(p2) ? p1 : p2;
  if (std::fabs(pairing) < 1e-12) throw std::runtime_error("degenerate normal pairing at sample");
  return -d / pairing;
}

namespace {

/// coefficients of the tangential projection of w onto span(F_u, F_v)
Eigen::Vector2d tangential_coeffs(const Eigen::VectorXd& w, const Eigen::VectorXd& fu,
                                  const Eigen::VectorXd& fv) {
  Eigen::Matrix2d gram;
  gram << dot5_num(fu, fu), dot5_num(fu, fv), dot5_num(fv, fu), dot5_num(fv, fv);
  Eigen::Vector2d rhs(dot5_num(w, fu), dot5_num(w, fv));
  return gram.fullPivLu().solve(rhs);
}

}  // namespace

ShapeOpsReport shape_ops(const SphereMap& map, const TimelikeMinimalSurface& s,
                         const std::vector<Point>& mask, double fd_step) {
  ShapeOpsReport rep;
  Vec5E dih_u = dpartial5(map.iota_hat, 1), dih_v = dpartial5(map.iota_hat, 2);

  Eigen::VectorXd nu0;
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    const Point& p = mask[idx];
    Eigen::VectorXd fu = eval5(map.f_u, p), fv = eval5(map.f_v, p);
    double e2l = s.e2lambda.eval(p), l = s.ell.eval(p), m = s.em.eval(p);
    double factor = e2l / (l * l - m * m);

    // A_iota columns, numeric vs closed form
    Eigen::Matrix2d a_mat;
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd dih = eval5(k == 0 ? dih_u : dih_v, p);
      Eigen::Vector2d co = tangential_coeffs(dih, fu, fv);
      a_mat.col(k) = -co;
      Eigen::VectorXd a_num = -(co(0) * fu + co(1) * fv);
      Eigen::VectorXd a_cf =
          k == 0 ? Eigen::VectorXd(factor * (l * fu - m * fv))
                 : Eigen::VectorXd(factor * (m * fu - l * fv));
      rep.a_iota_residual = std::max(rep.a_iota_residual, (a_num - a_cf).cwiseAbs().maxCoeff());
    }
    // zero mean curvature relative to iota_hat: the numeric matrix is trace-free
    rep.a_iota_trace = std::max(rep.a_iota_trace, std::fabs(a_mat.trace()));

    Eigen::VectorXd nu = solve_nu(map, p);
    Eigen::VectorXd nu_dir = nu / nu.norm();
    if (idx == 0) nu0 = nu_dir;
    rep.nu_direction_residual =
        std::max(rep.nu_direction_residual, (nu_dir - nu0).cwiseAbs().maxCoeff());

    // finite-difference shape operator of nu
    for (int k = 0; k < 2; ++k) {
      Point pp = p, pm = p;
      pp[static_cast<std::size_t>(k)] += fd_step;
      pm[static_cast<std::size_t>(k)] -= fd_step;
      Eigen::VectorXd dnu = (solve_nu(map, pp) - solve_nu(map, pm)) / (2.0 * fd_step);
      Eigen::Vector2d co = tangential_coeffs(dnu, fu, fv);
      Eigen::VectorXd a_nu = -(co(0) * fu + co(1) * fv);
      rep.a_nu_max = std::max(rep.a_nu_max, a_nu.cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

GaussFrame gauss_frame_and_omega(const SphereMap& map, const TimelikeMinimalSurface& s,
                                 const std::vector<Point>& mask, double tol) {
  if (s.curvature_sign == 0)
    throw std::invalid_argument("run surface_diagnostics first (curvature sign unset)");
  GaussFrame out;
  out.curvature_sign = s.curvature_sign;

  // nu is solved numerically and must be a constant vector (Prop 5.1 route)
  Eigen::VectorXd nu = solve_nu(map, mask.front());
  for (const Point& p : mask) {
    Eigen::VectorXd nu_p = solve_nu(map, p);
    if ((nu_p - nu).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("solved nu is not constant on the mask");
  }
  out.nu = nu;

  Expr disc = s.ell * s.ell - s.em * s.em;
  const int sign = s.curvature_sign;
  Expr cfun = sqrt_expr(sign > 0 ? disc : -disc) * Expr::exp(-s.lambda);

  Vec5E e1, e3;
  if (sign > 0) {
    e1 = scale5(map.f_u, Expr::constant(1.0) / cfun);
    e3 = scale5(map.f_v, Expr::constant(1.0) / cfun);
    out.coframe1 = Form::one_form(2, {cfun, Expr()});
    out.coframe3 = Form::one_form(2, {Expr(), cfun});
  } else {
    e1 = scale5(map.f_v, Expr::constant(-1.0) / cfun);
    e3 = scale5(map.f_u, Expr::constant(-1.0) / cfun);
    out.coframe1 = Form::one_form(2, {Expr(), -cfun});
    out.coframe3 = Form::one_form(2, {-cfun, Expr()});
  }

  Vec5E nu_sym;
  for (int i = 0; i < 5; ++i) nu_sym[static_cast<std::size_t>(i)] = Expr::constant(nu(i));
  Expr inv_sqrt2 = Expr::constant(1.0 / kSqrt2);
  Vec5E e2 = scale5(sub5(nu_sym, map.iota_hat), inv_sqrt2);
  Vec5E e4 = scale5(add5(nu_sym, map.iota_hat), inv_sqrt2);
  out.e = {e1, e2, e3, e4};

  // Gram residual of the frame
  const double expected[4] = {1.0, 1.0, -1.0, -1.0};
  for (const Point& p : mask) {
    Eigen::MatrixXd em(5, 4);
    for (int j = 0; j < 4; ++j) em.col(j) = eval5(out.e[static_cast<std::size_t>(j)], p);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double v = dot5_num(em.col(i), em.col(j));
        double want = i == j ? expected[i] : 0.0;
        out.gram_residual = std::max(out.gram_residual, std::fabs(v - want));
      }
  }

  // omega^i_j = eps_i <nabla e_j, e_i>; tangency to S^4_2 makes the ambient
  // derivative usable directly since <de_j, e_i> already kills the F component
  MatrixForm omega(4, 4, 2, 1);
  for (int j = 0; j < 4; ++j) {
    Vec5E du = dpartial5(out.e[static_cast<std::size_t>(j)], 1);
    Vec5E dv = dpartial5(out.e[static_cast<std::size_t>(j)], 2);
    for (int i = 0; i < 4; ++i) {
      Expr cu = dot5(du, out.e[static_cast<std::size_t>(i)]);
      Expr cv = dot5(dv, out.e[static_cast<std::size_t>(i)]);
      Expr sgn = Expr::constant(expected[i]);
      omega.at(i, j) = Form::one_form(2, {sgn * cu, sgn * cv});
    }
  }
  out.omega = omega;

  // displayed closed form
  Expr denom = Expr::constant(kSqrt2) * disc;
  out.ltil = s.ell * s.e2lambda / denom;
  out.mtil = s.em * s.e2lambda / denom;
  Form cf_21 = -(out.coframe1.scaled(out.ltil) + out.coframe3.scaled(out.mtil));
  Form cf_32 = -(out.coframe1.scaled(out.mtil) + out.coframe3.scaled(out.ltil));

  auto res = [&](const Form& f) {
    double r = 0.0;
    for (const Point& p : mask) r = std::max(r, f.max_abs_coeff(p));
    return r;
  };
  out.closed_form_residual = std::max(
      {res(entry1(omega, 2, 1) - cf_21), res(entry1(omega, 4, 1) - cf_21),
       res(entry1(omega, 3, 2) - cf_32), res(entry1(omega, 4, 3) - cf_32)});
  if (out.gram_residual > tol)
    throw std::invalid_argument("gauss frame is not pseudo-orthonormal on the mask");
  return out;
}

VerifyLiftsReport verify_lifts(const GaussFrame& frame, const std::vector<Point>& mask,
                               double tol) {
  VerifyLiftsReport rep;
  auto stage = [&](const std::string& name, double residual) {
    rep.stages.push_back({name, residual, residual <= tol});
  };

  stage("omega-closed-form", frame.closed_form_residual);

  for (int eps : {+1, -1}) {
    std::string side = eps > 0 ? "+" : "-";
    FullyLightlikeReport flr = fully_lightlike_check(frame.omega, eps, mask, tol);
    rep.stages.push_back({"fully-lightlike " + side, flr.ok ? flr.lightlike_residual : 1.0, flr.ok});
    if (!flr.ok) continue;
    rep.stages.push_back({"mu=+ " + side, std::fabs(static_cast<double>(flr.mu - 1)), flr.mu == +1});

    // alpha = -(eps l~ + m~)(e^1 + eps e^3)
    Expr coeff = -(Expr::constant(eps) * frame.ltil + frame.mtil);
    Form expected =
        (frame.coframe1 + frame.coframe3.scaled(static_cast<double>(eps))).scaled(coeff);
    double ar = 0.0;
    for (const Point& p : mask)
      ar = std::max(ar, (flr.alpha - expected).max_abs_coeff(p));
    stage("alpha-closed-form " + side, ar);

    // N of the lift identity is related to J by (e, eps mu)
    FactorizationReport fr = factorization_check(frame.omega, 1, eps, eps * flr.mu, mask, tol);
    stage("nablaJ-factorization " + side, std::max(fr.eq_residual, fr.tensor_residual));

    MatrixForm gens = standard_walker_generators(1, eps, eps * flr.mu, 2);
    stage("walker " + side, walker_residual(frame.omega, gens, 1, mask));
  }

  BranchClass cls = branch_classify(frame.omega, +1, mask, tol);
  rep.stages.push_back({"branch-A", cls == BranchClass::A || cls == BranchClass::Both ? 0.0 : 1.0,
                        cls == BranchClass::A || cls == BranchClass::Both});

  rep.ok = true;
  for (const auto& st : rep.stages) rep.ok = rep.ok && st.ok;
  return rep;
}

}  // namespace ntw
