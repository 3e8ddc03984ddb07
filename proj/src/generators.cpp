// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ntw {

namespace {

double max_form_at(const Form& f, const std::vector<Point>& pts) {
  double r = 0.0;
  for (const Point& p : pts) r = std::max(r, f.max_abs_coeff(p));
  return r;
}

double max_mat_at(const MatrixForm& m, const std::vector<Point>& pts) {
  double r = 0.0;
  for (const Point& p : pts) r = std::max(r, m.max_abs_coeff(p));
  return r;
}

Form gradient_form(const Expr& f, int m) {
  Form df(m, 1);
  for (int k = 1; k <= m; ++k) df.set_coeff({k}, f.partial(k));
  return df;
}

/// Blocks (1,1),(2,2),(3,3),(4,4) := M.
MatrixForm diag_pattern(const MatrixForm& m4) {
  int n = m4.rows(), dim = m4.dim();
  MatrixForm r(4 * n, 4 * n, dim, m4.degree());
  for (int b = 0; b < 4; ++b)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.at(b * n + i, b * n + j) = m4.at(i, j);
  return r;
}

/// Blocks (1,3),(2,4),(3,1),(4,2) := M.
MatrixForm cross_pattern(const MatrixForm& m4) {
  int n = m4.rows(), dim = m4.dim();
  MatrixForm r(4 * n, 4 * n, dim, m4.degree());
  const int pos[4][2] = {{0, 2}, {1, 3}, {2, 0}, {3, 1}};
  for (const auto& bp : pos)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.at(bp[0] * n + i, bp[1] * n + j) = m4.at(i, j);
  return r;
}

}  // namespace

FlatConnection build_flat_omega(const MatrixForm& d11, const MatrixForm& d31, const Expr& f,
                                const std::vector<Point>& pts, double tol) {
  if (d11.rows() != d11.cols() || d31.rows() != d31.cols() || d11.rows() != d31.rows())
    throw std::invalid_argument("D blocks must be square of equal size");
  if (d11.degree() != 1 || d31.degree() != 1)
    throw std::invalid_argument("D blocks must be matrices of 1-forms");
  const int n = d11.rows(), m = d11.dim();

  if (max_mat_at(d11 + d11.transpose(), pts) > tol)
    throw std::invalid_argument("build_flat_omega: tD11 != -D11");
  if (max_mat_at(d31 - d31.transpose(), pts) > tol)
    throw std::invalid_argument("build_flat_omega: tD31 != D31");
  MatrixForm eq1 = ext_d(d11) - mwedge(d11, d11) - mwedge(d31, d31);
  MatrixForm eq2 = ext_d(d31) - mwedge(d31, d11) - mwedge(d11, d31);
  double dd = std::max(max_mat_at(eq1, pts), max_mat_at(eq2, pts));
  if (dd > tol) throw std::invalid_argument("build_flat_omega: structure equations violated");

  Form df = gradient_form(f, m);
  MatrixForm omega = diag_pattern(d11) + cross_pattern(d31);
  Eigen::MatrixXd lam = lambda_matrix(n);
  for (int i = 0; i < 4 * n; ++i)
    for (int j = 0; j < 4 * n; ++j)
      if (lam(i, j) != 0.0) omega.at(i, j) = omega.at(i, j) + df.scaled(0.5 * lam(i, j));

  FlatConnection out{omega, MatrixForm(1, 1, m, 0), false, f, n};
  return out;
}

FlatConnection family_omega(const FlatFamilySpec& spec, const std::vector<Point>& pts, double tol) {
  const int m = spec.m;
  int n = spec.n;
  MatrixForm x11(1, 1, m, 0), x31(1, 1, m, 0);

  auto from_scalar_matrix = [&](const Expr& s, const Eigen::MatrixXd& c0, int sz) {
    MatrixForm x(sz, sz, m, 0);
    for (int i = 0; i < sz; ++i)
      for (int j = 0; j < sz; ++j)
        if (c0(i, j) != 0.0) x.at(i, j) = Form::scalar(m, Expr::constant(c0(i, j)) * s);
    return x;
  };

  switch (spec.variant) {
    case FlatFamilySpec::Variant::SymmetricPotential: {
      if ((spec.c0 - spec.c0.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("SymmetricPotential: C0 must be symmetric");
      n = static_cast<int>(spec.c0.rows());
      x11 = MatrixForm::zero(n, n, m, 0);
      x31 = from_scalar_matrix(spec.phi, spec.c0, n);
      break;
    }
    case FlatFamilySpec::Variant::SkewPotential: {
      if ((spec.c0 + spec.c0.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("SkewPotential: C0 must be skew");
      n = static_cast<int>(spec.c0.rows());
      x31 = MatrixForm::zero(n, n, m, 0);
      x11 = from_scalar_matrix(spec.psi, spec.c0, n);
      break;
    }
    case FlatFamilySpec::Variant::Tridiagonal: {
      x11 = MatrixForm::zero(n, n, m, 0);
      x31 = MatrixForm::zero(n, n, m, 0);
      for (int i = 0; i < n; ++i) {
        x31.at(i, i) = Form::scalar(m, spec.f1);
        if (i + 1 < n) {
          x31.at(i, i + 1) = Form::scalar(m, spec.f2);
          x31.at(i + 1, i) = Form::scalar(m, spec.f2);
        }
      }
      break;
    }
    case FlatFamilySpec::Variant::QuaternionBlocks: {
      n = 4 * spec.p;
      x31 = MatrixForm::zero(n, n, m, 0);
      x11 = MatrixForm::zero(n, n, m, 0);
      auto c_block = [&](const Expr& a, const Expr& b) {
        MatrixForm c(4, 4, m, 0);
        c.at(0, 1) = Form::scalar(m, -a); c.at(1, 0) = Form::scalar(m, a);
        c.at(2, 3) = Form::scalar(m, -a); c.at(3, 2) = Form::scalar(m, a);
        c.at(0, 3) = Form::scalar(m, -b); c.at(1, 2) = Form::scalar(m, b);
        c.at(2, 1) = Form::scalar(m, -b); c.at(3, 0) = Form::scalar(m, b);
        return c;
      };
      MatrixForm c1 = c_block(spec.qa1, spec.qb1), c2 = c_block(spec.qa2, spec.qb2);
      for (int bi = 0; bi < spec.p; ++bi) {
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            x11.at(4 * bi + i, 4 * bi + j) = c1.at(i, j);
            if (bi + 1 < spec.p) {
              x11.at(4 * bi + i, 4 * (bi + 1) + j) = c2.at(i, j);
              x11.at(4 * (bi + 1) + i, 4 * bi + j) = c2.at(i, j);
            }
          }
      }
      // the defining wedge identities of this family
      MatrixForm dc1 = ext_d(c1), dc2 = ext_d(c2);
      if (max_mat_at(mwedge(dc1, dc1), pts) > tol || max_mat_at(mwedge(dc2, dc2), pts) > tol)
        throw std::invalid_argument("QuaternionBlocks: C_i ^ C_i != 0");
      if (max_mat_at(mwedge(dc1, dc2) + mwedge(dc2, dc1), pts) > tol)
        throw std::invalid_argument("QuaternionBlocks: C_1 ^ C_2 + C_2 ^ C_1 != 0");
      break;
    }
  }

  MatrixForm d11m = ext_d(x11), d31m = ext_d(x31);
  if (spec.variant == FlatFamilySpec::Variant::Tridiagonal &&
      max_mat_at(mwedge(d31m, d31m), pts) > tol)
    throw std::invalid_argument("Tridiagonal: D31 ^ D31 != 0");

  FlatConnection conn = build_flat_omega(d11m, d31m, spec.f, pts, tol);

  // potential x with omega = dx: the D patterns plus (f/2) Lambda_n
  MatrixForm x = diag_pattern(x11) + cross_pattern(x31);
  Eigen::MatrixXd lam = lambda_matrix(n);
  Expr half_f = Expr::constant(0.5) * spec.f;
  for (int i = 0; i < 4 * n; ++i)
    for (int j = 0; j < 4 * n; ++j)
      if (lam(i, j) != 0.0)
        x.at(i, j) = x.at(i, j) + Form::scalar(m, Expr::constant(lam(i, j)) * half_f);
  conn.potential = x;
  conn.has_potential = true;
  return conn;
}

namespace {

Eigen::MatrixXd rk4_along_axis(const MatrixForm& omega, Eigen::MatrixXd e, Point p, int axis,
                               double to, double max_step) {
  double from = p[static_cast<std::size_t>(axis - 1)];
  double len = to - from;
  if (len == 0.0) return e;
  int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(len) / max_step)));
  double h = len / steps;
  auto deriv = [&](const Eigen::MatrixXd& ee, double t) {
    Point q = p;
    q[static_cast<std::size_t>(axis - 1)] = t;
    return Eigen::MatrixXd(ee * omega.eval_dir(q, axis));
  };
  double t = from;
  for (int s = 0; s < steps; ++s) {
    Eigen::MatrixXd k1 = deriv(e, t);
    Eigen::MatrixXd k2 = deriv(e + 0.5 * h * k1, t + 0.5 * h);
    Eigen::MatrixXd k3 = deriv(e + 0.5 * h * k2, t + 0.5 * h);
    Eigen::MatrixXd k4 = deriv(e + h * k3, t + h);
    e += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return e;
}

Eigen::MatrixXd transport_axis_ordered(const MatrixForm& omega, const Eigen::MatrixXd& e0,
                                       const Point& base, const Point& target, double max_step) {
  Eigen::MatrixXd e = e0;
  Point cur = base;
  for (int k = 1; k <= static_cast<int>(base.size()); ++k) {
    e = rk4_along_axis(omega, e, cur, k, target[static_cast<std::size_t>(k - 1)], max_step);
    cur[static_cast<std::size_t>(k - 1)] = target[static_cast<std::size_t>(k - 1)];
  }
  return e;
}

}  // namespace

FrameIntegration frame_integrate(const FlatConnection& conn, const Point& base,
                                 const Eigen::MatrixXd& e0, const std::vector<Point>& targets,
                                 const Box& loop_box, std::uint64_t seed, double max_step,
                                 double tol) {
  const int n = conn.n;
  const MatrixForm& omega = conn.omega;
  Eigen::MatrixXd g = neutral_gram(n);

  std::vector<Point> flat_pts = loop_box.sample(50, seed ^ 0x9e3779b9ULL);
  flat_pts.push_back(base);
  if (flatness_residual(omega, flat_pts) > std::max(tol, 1e-8))
    throw std::invalid_argument("frame_integrate: connection is not flat");
  if ((e0.transpose() * g * e0 - g).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("frame_integrate: initial frame not pseudo-orthonormal");

  FrameIntegration out;
  bool exp_ok = false;
  Eigen::MatrixXd base_adjust;
  if (conn.has_potential) {
    auto pc = potential_commutes(conn.potential, omega, flat_pts, 1e-10);
    exp_ok = pc.precondition_ok && pc.commutes;
  }
  if (exp_ok) base_adjust = matrix_exp(-conn.potential.eval(base));

  out.fast_path = exp_ok;
  for (const Point& t : targets) {
    Eigen::MatrixXd integ = transport_axis_ordered(omega, e0, base, t, max_step);
    Eigen::MatrixXd frame = integ;
    if (exp_ok) {
      Eigen::MatrixXd closed = e0 * base_adjust * matrix_exp(conn.potential.eval(t));
      out.cross_residual = std::max(out.cross_residual, (closed - integ).cwiseAbs().maxCoeff());
      frame = closed;
    }
    out.ortho_residual =
        std::max(out.ortho_residual, (frame.transpose() * g * frame - g).cwiseAbs().maxCoeff());
    out.frames.push_back(frame);
  }

  // path-independence: ten random rectangle loops
  Rng rng(seed);
  const int m = omega.dim();
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4 * n, 4 * n);
  for (int loop = 0; loop < 10 && m >= 2; ++loop) {
    Point a(loop_box.lo.size()), b(loop_box.lo.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      double u = rng.uniform(loop_box.lo[k], loop_box.hi[k]);
      double v = rng.uniform(loop_box.lo[k], loop_box.hi[k]);
      a[k] = std::min(u, v);
      b[k] = std::max(u, v);
    }
    int k1 = 1 + rng.uniform_int(m), k2 = 1 + rng.uniform_int(m);
    while (k2 == k1) k2 = 1 + rng.uniform_int(m);
    Point p = a;
    Eigen::MatrixXd e = id;
    auto leg = [&](int axis, double to) {
      e = rk4_along_axis(omega, e, p, axis, to, max_step);
      p[static_cast<std::size_t>(axis - 1)] = to;
    };
    leg(k1, b[static_cast<std::size_t>(k1 - 1)]);
    leg(k2, b[static_cast<std::size_t>(k2 - 1)]);
    leg(k1, a[static_cast<std::size_t>(k1 - 1)]);
    leg(k2, a[static_cast<std::size_t>(k2 - 1)]);
    out.loop_residual = std::max(out.loop_residual, (e - id).cwiseAbs().maxCoeff());
  }
  return out;
}

namespace {

void require_dg_nonzero(const Expr& gfun, int m, const std::vector<Point>& pts, double tol) {
  Form dg = gradient_form(gfun, m);
  for (const Point& p : pts) {
    double mx = 0.0;
    for (int k = 1; k <= m; ++k) mx = std::max(mx, std::fabs(dg.eval_dir(p, k)));
    if (mx <= tol) throw std::invalid_argument("dg vanishes at a sample point");
  }
}

}  // namespace

SingleEpsResult single_eps_omega(const Expr& f, const Expr& g, const Form& w21, const Form& w31,
                                 const Form& w32, int mu, int eps, int m,
                                 const std::vector<Point>& pts, double tol) {
  require_dg_nonzero(g, m, pts, tol);
  const double e = static_cast<double>(eps), u = static_cast<double>(mu);

  Expr ef = Expr::exp(Expr::constant(u) * f);
  Form df = gradient_form(f, m), dg = gradient_form(g, m);
  Form egdg = dg.scaled(ef);

  Form w41 = egdg.scaled(e) - w32.scaled(e);
  Form w42 = w31.scaled(e) - df;
  Form w43 = egdg.scaled(u) - w21.scaled(e);
  MatrixForm omega = compatible_from_lower_n1(w21, w31, w32, w41, w42, w43, m);

  Form r1 = ext_d(w21) - wedge(w31, w32).scaled(2.0) + wedge(w31, dg).scaled(ef) -
            wedge(w32, df).scaled(e) - wedge(df, dg).scaled(Expr::constant(e) * ef);
  Form r2 = ext_d(w31) - wedge(w21, w32).scaled(2.0) + wedge(w21, dg).scaled(ef) -
            wedge(w32, dg).scaled(Expr::constant(e * u) * ef);
  Form r3 = ext_d(w32) + wedge(w21, w31).scaled(2.0) - wedge(w21, df).scaled(e) +
            wedge(w31, dg).scaled(Expr::constant(e * u) * ef) -
            wedge(df, dg).scaled(Expr::constant(u) * ef);

  double res = std::max({max_form_at(r1, pts), max_form_at(r2, pts), max_form_at(r3, pts)});
  return SingleEpsResult{omega, res};
}

MatrixForm pair_omega(const PairSpec& spec, const std::vector<Point>& pts, double tol) {
  const int m = spec.m;
  if (spec.branch != 'A' && spec.branch != 'B') throw std::invalid_argument("branch must be A or B");
  require_dg_nonzero(spec.gp, m, pts, tol);
  require_dg_nonzero(spec.gm, m, pts, tol);

  const double u = static_cast<double>(spec.mu);
  Form dfp = gradient_form(spec.fp, m), dfm = gradient_form(spec.fm, m);
  Form ep = gradient_form(spec.gp, m).scaled(Expr::exp(Expr::constant(u) * spec.fp));
  double mexp = spec.branch == 'A' ? u : -u;
  Form em = gradient_form(spec.gm, m).scaled(Expr::exp(Expr::constant(mexp) * spec.fm));

  Form w31 = (dfp - dfm).scaled(0.5);
  Form w42 = (dfp + dfm).scaled(-0.5);

  Form sum = (ep + em).scaled(0.5), diff = (ep - em).scaled(0.5);
  Form w21, w32, w41, w43;
  if (spec.branch == 'A') {
    w21 = diff.scaled(u);
    w32 = sum;
    w41 = diff;
    w43 = sum.scaled(u);
  } else {
    w21 = sum.scaled(u);
    w32 = sum;
    w41 = diff;
    w43 = diff.scaled(u);
  }
  return compatible_from_lower_n1(w21, w31, w32, w41, w42, w43, m);
}

PairSideExpectation pair_expected_side(const PairSpec& spec, int eps) {
  const int m = spec.m;
  if (eps == +1) {
    Form a = gradient_form(spec.gp, m).scaled(Expr::exp(Expr::constant(spec.mu) * spec.fp));
    return {spec.mu, a};
  }
  int mu_minus = spec.branch == 'A' ? spec.mu : -spec.mu;
  Form a = gradient_form(spec.gm, m).scaled(Expr::exp(Expr::constant(mu_minus) * spec.fm));
  return {mu_minus, a};
}

std::string to_string(BranchClass c) {
  switch (c) {
    case BranchClass::A: return "A";
    case BranchClass::B: return "B";
    case BranchClass::Both: return "both";
    case BranchClass::Neither: return "neither";
  }
  return "?";
}

BranchClass branch_classify(const MatrixForm& omega, int mu, const std::vector<Point>& pts,
                            double tol) {
  const double u = static_cast<double>(mu);
  double res_a = std::max(
      max_form_at(entry1(omega, 4, 1) - entry1(omega, 2, 1).scaled(u), pts),
      max_form_at(entry1(omega, 4, 3) - entry1(omega, 3, 2).scaled(u), pts));
  double res_b = std::max(
      max_form_at(entry1(omega, 3, 2) - entry1(omega, 2, 1).scaled(u), pts),
      max_form_at(entry1(omega, 4, 3) - entry1(omega, 4, 1).scaled(u), pts));
  bool a = res_a <= tol, b = res_b <= tol;
  if (a && b) return BranchClass::Both;
  if (a) return BranchClass::A;
  if (b) return BranchClass::B;
  return BranchClass::Neither;
}

}  // namespace ntw
