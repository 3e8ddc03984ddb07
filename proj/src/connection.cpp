// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/connection.hpp"

#include <cmath>
#include <stdexcept>

namespace ntw {

namespace {

double max_form_at(const Form& f, const std::vector<Point>& pts) {
  double r = 0.0;
  for (const Point& p : pts) r = std::max(r, f.max_abs_coeff(p));
  return r;
}

int eps_pow(int eps, int i /*1-based*/) { return i == 1 ? eps : 1; }

}  // namespace

double compatibility_residual(const MatrixForm& omega, int n, const std::vector<Point>& pts) {
  if (omega.rows() != 4 * n || omega.cols() != 4 * n)
    throw std::invalid_argument("connection form must be 4n x 4n");
  double r = 0.0;
  for (int i = 1; i <= 4 * n; ++i)
    for (int j = i; j <= 4 * n; ++j) {
      bool same_type = (i <= 2 * n) == (j <= 2 * n);
      Form lhs = entry1(omega, i, j);
      Form rel = same_type ? (lhs + entry1(omega, j, i)) : (lhs - entry1(omega, j, i));
      r = std::max(r, max_form_at(rel, pts));
    }
  return r;
}

MatrixForm compatible_from_lower_n1(const Form& w21, const Form& w31, const Form& w32,
                                    const Form& w41, const Form& w42, const Form& w43, int m) {
  MatrixForm w(4, 4, m, 1);
  entry1(w, 2, 1) = w21;  entry1(w, 1, 2) = -w21;
  entry1(w, 3, 1) = w31;  entry1(w, 1, 3) = w31;
  entry1(w, 3, 2) = w32;  entry1(w, 2, 3) = w32;
  entry1(w, 4, 1) = w41;  entry1(w, 1, 4) = w41;
  entry1(w, 4, 2) = w42;  entry1(w, 2, 4) = w42;
  entry1(w, 4, 3) = w43;  entry1(w, 3, 4) = -w43;
  return w;
}

MatrixForm endo_cov_deriv(const MatrixForm& omega, const MatrixForm& k) {
  if (omega.rows() != k.rows() || omega.cols() != k.cols() || omega.dim() != k.dim())
    throw std::invalid_argument("endo_cov_deriv: shape mismatch");
  return ext_d(k) + mwedge(omega, k) - mwedge(k, omega);
}

MatrixForm tensor_1form(const Form& alpha, const MatrixForm& k) {
  MatrixForm r(k.rows(), k.cols(), k.dim(), alpha.degree() + k.degree());
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j) r.at(i, j) = wedge(alpha, k.at(i, j));
  return r;
}

FactorizationReport factorization_check(const MatrixForm& omega, int n, int eps, int mu,
                                        const std::vector<Point>& pts, double tol) {
  FactorizationReport rep;
  rep.eps = eps;
  rep.mu = mu;
  rep.compat_residual = compatibility_residual(omega, n, pts);
  if (rep.compat_residual > tol) {
    rep.failure = "metric compatibility violated";
    return rep;
  }

  const double dmu = static_cast<double>(mu);
  rep.alpha = entry1(omega, n + 1, 2 * n + 1) +
              entry1(omega, 3 * n + 1, 1).scaled(static_cast<double>(eps));

  double eq = 0.0;
  for (int i = 1; i <= n; ++i) {
    double ei = static_cast<double>(eps_pow(eps, i));
    for (int j = 1; j <= n; ++j) {
      double ej = static_cast<double>(eps_pow(eps, j));
      Form x1 = (entry1(omega, n + i, j) + entry1(omega, 3 * n + i, 2 * n + j).scaled(ei)).scaled(dmu);
      Form x2 = entry1(omega, n + i, 2 * n + j) + entry1(omega, 3 * n + i, j).scaled(ei);
      eq = std::max(eq, max_form_at(x1 - x2, pts));
      Form expected = (i == j) ? rep.alpha : Form(omega.dim(), 1);
      eq = std::max(eq, max_form_at(x2 - expected, pts));

      eq = std::max(eq, max_form_at(entry1(omega, i, j) - entry1(omega, 2 * n + i, 2 * n + j), pts));
      eq = std::max(eq, max_form_at(entry1(omega, i, 2 * n + j) - entry1(omega, 2 * n + i, j), pts));

      eq = std::max(eq, max_form_at(
          entry1(omega, n + i, n + j) - entry1(omega, 3 * n + i, 3 * n + j).scaled(ei * ej), pts));
      eq = std::max(eq, max_form_at(
          entry1(omega, n + i, 3 * n + j) - entry1(omega, 3 * n + i, n + j).scaled(ei * ej), pts));
    }
  }
  if (n == 1) {
    // redundant route through the n = 1 lightlike relation
    double e = static_cast<double>(eps);
    Form rel = (entry1(omega, 3, 2) + entry1(omega, 4, 1).scaled(e)) -
               (entry1(omega, 4, 3) + entry1(omega, 2, 1).scaled(e)).scaled(dmu);
    eq = std::max(eq, max_form_at(rel, pts));
  }
  rep.eq_residual = eq;

  MatrixForm j_mat = MatrixForm::from_matrix(paracomplex_model(n, eps), omega.dim());
  MatrixForm n_mat = MatrixForm::from_matrix(nilpotent_model_related(n, eps, mu), omega.dim());
  MatrixForm diff = endo_cov_deriv(omega, j_mat) - tensor_1form(rep.alpha, n_mat);
  double tr = 0.0;
  for (const Point& p : pts) tr = std::max(tr, diff.max_abs_coeff(p));
  rep.tensor_residual = tr;

  rep.ok = rep.eq_residual <= tol && rep.tensor_residual <= tol;
  if (!rep.ok && rep.failure.empty()) rep.failure = "factorization condition system violated";
  return rep;
}

namespace {

constexpr int kPairs[6][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};

int ordered_pair(int a, int b, double* sign) {
  *sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);
  for (int c = 0; c < 6; ++c)
    if (kPairs[c][0] == a && kPairs[c][1] == b) return c;
  return -1;  // a == b
}

}  // namespace

MatrixForm induced_lambda2_connection(const MatrixForm& omega) {
  if (omega.rows() != 4) throw std::invalid_argument("lambda2 connection is n = 1 only");
  MatrixForm w(6, 6, omega.dim(), 1);
  for (int a = 0; a < 6; ++a) {
    int i = kPairs[a][0], j = kPairs[a][1];
    for (int k = 1; k <= 4; ++k) {
      double sign;
      if (k != j) {  // omega^k_i e_k ^ e_j
        int c = ordered_pair(k, j, &sign);
        if (c >= 0) w.at(c, a) = w.at(c, a) + entry1(omega, k, i).scaled(sign);
      }
      if (k != i) {  // omega^k_j e_i ^ e_k
        int c = ordered_pair(i, k, &sign);
        if (c >= 0) w.at(c, a) = w.at(c, a) + entry1(omega, k, j).scaled(sign);
      }
    }
  }
  return w;
}

std::array<Form, 6> bivector_cov_deriv(const MatrixForm& omega, const Bivector& comps) {
  MatrixForm w = induced_lambda2_connection(omega);
  std::array<Form, 6> out{Form(omega.dim(), 1), Form(omega.dim(), 1), Form(omega.dim(), 1),
                          Form(omega.dim(), 1), Form(omega.dim(), 1), Form(omega.dim(), 1)};
  for (int c = 0; c < 6; ++c) {
    Form acc(omega.dim(), 1);
    for (int a = 0; a < 6; ++a)
      if (comps(a) != 0.0) acc = acc + w.at(c, a).scaled(comps(a));
    out[static_cast<std::size_t>(c)] = acc;
  }
  return out;
}

FullyLightlikeReport fully_lightlike_check(const MatrixForm& omega, int eps,
                                           const std::vector<Point>& pts, double tol) {
  FullyLightlikeReport rep;
  Bivector section = omega_basis(eps, 2);
  std::array<Form, 6> deriv = bivector_cov_deriv(omega, section);

  const double e = static_cast<double>(eps);
  Form lhs = entry1(omega, 3, 2) + entry1(omega, 4, 1).scaled(e);   // omega^3_2 + eps omega^4_1
  Form rhs = entry1(omega, 4, 3) + entry1(omega, 2, 1).scaled(e);   // omega^4_3 + eps omega^2_1

  bool plus_ok = true, minus_ok = true;
  double plus_res = 0.0, minus_res = 0.0;
  bool any_decisive = false, pointwise_ok = true;
  double ll = 0.0, min_norm = std::numeric_limits<double>::infinity();

  const int m = omega.dim();
  for (const Point& p : pts) {
    double point_norm = 0.0;
    for (int k = 1; k <= m; ++k) {
      Bivector b;
      for (int c = 0; c < 6; ++c) b(c) = deriv[static_cast<std::size_t>(c)].eval_dir(p, k);
      double norm2 = b.squaredNorm();
      point_norm = std::max(point_norm, b.cwiseAbs().maxCoeff());
      ll = std::max(ll, std::fabs(hhat(b, b)) / std::max(1.0, norm2));

      double lv = lhs.eval_dir(p, k), rv = rhs.eval_dir(p, k);
      if (std::max(std::fabs(lv), std::fabs(rv)) > 10.0 * tol) {
        any_decisive = true;
        double scale = std::max(1.0, std::max(std::fabs(lv), std::fabs(rv)));
        bool pok = std::fabs(lv - rv) <= tol * scale;
        bool mok = std::fabs(lv + rv) <= tol * scale;
        plus_res = std::max(plus_res, std::fabs(lv - rv));
        minus_res = std::max(minus_res, std::fabs(lv + rv));
        if (!pok) plus_ok = false;
        if (!mok) minus_ok = false;
        if (!pok && !mok) pointwise_ok = false;
      }
    }
    min_norm = std::min(min_norm, point_norm);
  }

  rep.lightlike_residual = ll;
  rep.min_norm = std::isfinite(min_norm) ? min_norm : 0.0;
  rep.alpha = lhs;

  if (rep.min_norm <= tol) {
    rep.failure = "derivative vanishes at a sample point";
    return rep;
  }
  if (ll > tol) {
    rep.failure = "directional derivative is not light-like";
    return rep;
  }
  if (!any_decisive) {
    // light-like with no decisive direction cannot happen together with
    // min_norm > tol; keep mu = + by convention if it does numerically
    rep.mu = +1;
  } else if (plus_ok && minus_ok) {
    rep.mu = +1;
    rep.mu_residual = std::min(plus_res, minus_res);
  } else if (plus_ok) {
    rep.mu = +1;
    rep.mu_residual = plus_res;
  } else if (minus_ok) {
    rep.mu = -1;
    rep.mu_residual = minus_res;
  } else {
    rep.failure = pointwise_ok ? "mixed mu across the sample set"
                               : "lightlike relation fails for both signs";
    return rep;
  }

  rep.omega0 = omega_basis(-eps, 1) + static_cast<double>(rep.mu) * omega_basis(eps, 3);
  rep.ok = true;
  return rep;
}

double horizontality_residual(const MatrixForm& omega, int eps, const std::vector<Point>& pts) {
  Form comb = entry1(omega, 4, 2) - entry1(omega, 3, 1).scaled(static_cast<double>(eps));
  return max_form_at(ext_d(comb), pts);
}

GaugeResult gauge_horizontal(const MatrixForm& omega, int eps, const Expr& f,
                             const std::vector<Point>& pts, double tol) {
  const int m = omega.dim();
  Form comb = entry1(omega, 4, 2) - entry1(omega, 3, 1).scaled(static_cast<double>(eps));
  Form df(m, 1);
  for (int k = 1; k <= m; ++k) df.set_coeff({k}, f.partial(k));
  double in_res = max_form_at(comb + df, pts);
  if (in_res > tol)
    throw std::invalid_argument("gauge_horizontal: f is not a potential of eps omega^3_1 - omega^4_2");

  auto boost = [&](const Expr& ff) {
    MatrixForm b = MatrixForm::identity(4, m);
    b.at(1, 1) = Form::scalar(m, Expr::cosh(ff));
    b.at(3, 1) = Form::scalar(m, Expr::sinh(ff));
    b.at(1, 3) = Form::scalar(m, Expr::sinh(ff));
    b.at(3, 3) = Form::scalar(m, Expr::cosh(ff));
    return b;
  };
  MatrixForm b = boost(f), binv = boost(-f);
  MatrixForm omega_new = mmul(binv, mwedge(omega, b)) + mmul(binv, ext_d(b));

  GaugeResult res{omega_new, b, in_res, 0.0};
  Form comb_new = entry1(omega_new, 4, 2) - entry1(omega_new, 3, 1).scaled(static_cast<double>(eps));
  res.output_residual = max_form_at(comb_new, pts);
  return res;
}

MatrixForm standard_walker_generators(int n, int eps, int mu, int dim) {
  MatrixForm gens(4 * n, 2 * n, dim, 0);
  auto one = [&](double v) { return Form::scalar(dim, Expr::constant(v)); };
  for (int i = 0; i < n; ++i) {
    gens.at(i, i) = one(1.0);
    gens.at(2 * n + i, i) = one(-static_cast<double>(mu));
    gens.at(n + i, n + i) = one(1.0);
    double s = static_cast<double>(mu) * (i == 0 ? static_cast<double>(eps) : 1.0);
    gens.at(3 * n + i, n + i) = one(s);
  }
  return gens;
}

double walker_residual(const MatrixForm& omega, const MatrixForm& generators, int n,
                       const std::vector<Point>& pts) {
  if (generators.rows() != 4 * n || generators.cols() != 2 * n)
    throw std::invalid_argument("walker generators must be 4n x 2n");
  MatrixForm cov = ext_d(generators) + mwedge(omega, generators);
  Eigen::MatrixXd g = neutral_gram(n);
  double r = 0.0;
  for (const Point& p : pts) {
    Eigen::MatrixXd x = generators.eval(p);
    for (int k = 1; k <= omega.dim(); ++k) {
      Eigen::MatrixXd c = cov.eval_dir(p, k);
      r = std::max(r, (x.transpose() * g * c).cwiseAbs().maxCoeff());
    }
  }
  return r;
}

bool walker_check(const MatrixForm& omega, const MatrixForm& generators, int n,
                  const std::vector<Point>& pts, double tol) {
  return walker_residual(omega, generators, n, pts) <= tol;
}

double walker_closed_residual(const MatrixForm& omega, int n, int eps, int mu,
                              const std::vector<Point>& pts) {
  const double dmu = static_cast<double>(mu);
  double r = 0.0;
  auto acc = [&](const Form& f) { r = std::max(r, max_form_at(f, pts)); };
  for (int i = 1; i <= n; ++i) {
    double ei = static_cast<double>(eps_pow(eps, i));
    for (int j = 1; j <= n; ++j) {
      double ej = static_cast<double>(eps_pow(eps, j));
      acc(entry1(omega, j, i) - entry1(omega, j, 2 * n + i).scaled(dmu) +
          entry1(omega, 2 * n + j, i).scaled(dmu) - entry1(omega, 2 * n + j, 2 * n + i));
      acc(entry1(omega, n + j, i) - entry1(omega, n + j, 2 * n + i).scaled(dmu) -
          entry1(omega, 3 * n + j, i).scaled(dmu * ej) +
          entry1(omega, 3 * n + j, 2 * n + i).scaled(ej));
      acc(entry1(omega, n + j, n + i) + entry1(omega, n + j, 3 * n + i).scaled(dmu * ei) -
          entry1(omega, 3 * n + j, n + i).scaled(dmu * ej) -
          entry1(omega, 3 * n + j, 3 * n + i).scaled(ei * ej));
    }
  }
  return r;
}

WalkerParacomplexResult walker_to_paracomplex(const MatrixForm& omega, const Expr& hfn,
                                              const Box& box, int validation_samples,
                                              std::uint64_t seed, double tol) {
  if (omega.rows() != 4) throw std::invalid_argument("walker_to_paracomplex is n = 1 only");
  const int m = omega.dim();
  std::vector<Point> pts = box.sample(validation_samples, seed);

  Form walker_rel = (entry1(omega, 3, 2) + entry1(omega, 4, 1)) -
                    (entry1(omega, 4, 3) + entry1(omega, 2, 1));
  double wres = max_form_at(walker_rel, pts);
  if (wres > tol)
    throw std::invalid_argument("walker_to_paracomplex: Walker condition fails on the box");

  Expr h = hfn;
  Expr h2 = h * h;
  Expr half = Expr::constant(0.5);
  auto sc = [&](const Expr& e) { return Form::scalar(m, e); };

  MatrixForm mod = MatrixForm::identity(4, m);
  mod.at(1, 1) = sc((h2 + Expr::constant(2.0)) * half);
  mod.at(2, 1) = sc(h);
  mod.at(3, 1) = sc(h2 * half);
  mod.at(1, 2) = sc(h);
  mod.at(2, 2) = sc(Expr::constant(1.0));
  mod.at(3, 2) = sc(h);
  mod.at(1, 3) = sc(-(h2 * half));
  mod.at(2, 3) = sc(-h);
  mod.at(3, 3) = sc(-((h2 - Expr::constant(2.0)) * half));

  // pseudo-orthonormal frame change, so M^-1 = G tM G
  MatrixForm g = MatrixForm::from_matrix(neutral_gram(1), m);
  MatrixForm minv = mmul(mmul(g, mod.transpose()), g);
  MatrixForm omega_new = mmul(minv, mwedge(omega, mod)) + mmul(minv, ext_d(mod));

  Form alpha = entry1(omega_new, 3, 2) + entry1(omega_new, 4, 1);

  // displayed closed form of the new combination
  Form dh(m, 1);
  for (int k = 1; k <= m; ++k) dh.set_coeff({k}, h.partial(k));
  Form closed = dh -
      (entry1(omega, 3, 2) + entry1(omega, 4, 1)).scaled((h2 - Expr::constant(2.0)) * half) +
      (entry1(omega, 4, 3) + entry1(omega, 2, 1)).scaled(h2 * half) +
      (entry1(omega, 4, 2) - entry1(omega, 3, 1)).scaled(h);

  WalkerParacomplexResult res{omega_new, mod, alpha, wres, 0.0, 0.0};
  res.closed_form_residual = max_form_at(alpha - closed, pts);

  double min_alpha = std::numeric_limits<double>::infinity();
  for (const Point& p : pts) {
    double pa = 0.0;
    for (int k = 1; k <= m; ++k) pa = std::max(pa, std::fabs(alpha.eval_dir(p, k)));
    min_alpha = std::min(min_alpha, pa);
  }
  res.min_alpha = min_alpha;
  if (!(min_alpha > tol))
    throw std::invalid_argument("walker_to_paracomplex: alpha vanishes on the box; choose another hfn");
  return res;
}

namespace {

std::vector<Eigen::MatrixXd> cov_deriv_j_dirs(const MatrixForm& omega, int n, int eps,
                                              const Point& p) {
  Eigen::MatrixXd j = paracomplex_model(n, eps);
  std::vector<Eigen::MatrixXd> out;
  for (int k = 1; k <= omega.dim(); ++k) {
    Eigen::MatrixXd w = omega.eval_dir(p, k);
    out.push_back(w * j - j * w);
  }
  return out;
}

}  // namespace

double square_norm_at(const MatrixForm& omega, int n, int eps, const Point& p) {
  Eigen::MatrixXd g = neutral_gram(n);
  double total = 0.0;
  for (const Eigen::MatrixXd& c : cov_deriv_j_dirs(omega, n, eps, p))
    total += (g * c.transpose() * g * c).trace();
  return total;
}

double square_norm_oracle_at(const MatrixForm& omega, int n, int eps, const Point& p) {
  Eigen::MatrixXd g = neutral_gram(n);
  double total = 0.0;
  for (const Eigen::MatrixXd& c : cov_deriv_j_dirs(omega, n, eps, p)) {
    // (nabla Omega*)(e_j, e_k) = -h((nabla J) e_j, e_k)
    Eigen::MatrixXd gc = g * c;
    for (int j = 0; j < 4 * n; ++j)
      for (int k = 0; k < 4 * n; ++k) total += g(j, j) * g(k, k) * gc(k, j) * gc(k, j);
  }
  return total;
}

double square_norm(const MatrixForm& omega, int n, int eps, const std::vector<Point>& pts) {
  double r = 0.0;
  for (const Point& p : pts) r = std::max(r, std::fabs(square_norm_at(omega, n, eps, p)));
  return r;
}

}  // namespace ntw
