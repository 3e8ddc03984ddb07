// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/neutral.hpp"

#include <cmath>
#include <stdexcept>

namespace ntw {

Eigen::MatrixXd neutral_gram(int n) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4 * n, 4 * n);
  g.block(2 * n, 2 * n, 2 * n, 2 * n) *= -1.0;
  return g;
}

Eigen::MatrixXd block_of(const Eigen::MatrixXd& a, int n, int i, int j) {
  return a.block((i - 1) * n, (j - 1) * n, n, n);
}

void set_block(Eigen::MatrixXd& a, int n, int i, int j, const Eigen::MatrixXd& value) {
  a.block((i - 1) * n, (j - 1) * n, n, n) = value;
}

Eigen::MatrixXd lambda_matrix(int n) {
  if (n < 1) throw std::invalid_argument("lambda_matrix: n >= 1");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  set_block(l, n, 1, 2, -id);
  set_block(l, n, 1, 4, id);
  set_block(l, n, 2, 1, id);
  set_block(l, n, 2, 3, id);
  set_block(l, n, 3, 2, id);
  set_block(l, n, 3, 4, -id);
  set_block(l, n, 4, 1, id);
  set_block(l, n, 4, 3, id);
  return l;
}

Eigen::MatrixXd standard_xi(int n) {
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(4 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    xi(i, i) = 1.0;
    xi(2 * n + i, i) = -1.0;          // xi_i = e_i - e_{2n+i}
    xi(n + i, n + i) = 1.0;
    xi(3 * n + i, n + i) = 1.0;       // xi_{n+i} = e_{n+i} + e_{3n+i}
  }
  return xi;
}

double so_member_residual(const Eigen::MatrixXd& a, int n) {
  Eigen::MatrixXd g = neutral_gram(n);
  double metric = (a.transpose() * g * a - g).cwiseAbs().maxCoeff();
  double det = std::fabs(a.determinant() - 1.0);
  return std::max(metric, det);
}

bool so_member(const Eigen::MatrixXd& a, int n, double tol) {
  return so_member_residual(a, n) <= tol;
}

Eigen::MatrixXd cross(const Eigen::MatrixXd& a, int n) {
  if (a.rows() != 4 * n || a.cols() != 4 * n) throw std::invalid_argument("cross: bad shape");
  auto blk = [&](int i, int j) { return block_of(a, n, i, j); };
  Eigen::MatrixXd r(4 * n, 4 * n);
  set_block(r, n, 1, 1, blk(2, 2));  set_block(r, n, 1, 2, -blk(2, 1));
  set_block(r, n, 1, 3, blk(4, 2));  set_block(r, n, 1, 4, blk(4, 1));
  set_block(r, n, 2, 1, -blk(1, 2)); set_block(r, n, 2, 2, blk(1, 1));
  set_block(r, n, 2, 3, blk(3, 2));  set_block(r, n, 2, 4, blk(3, 1));
  set_block(r, n, 3, 1, blk(2, 4));  set_block(r, n, 3, 2, blk(2, 3));
  set_block(r, n, 3, 3, blk(4, 4));  set_block(r, n, 3, 4, -blk(4, 3));
  set_block(r, n, 4, 1, blk(1, 4));  set_block(r, n, 4, 2, blk(1, 3));
  set_block(r, n, 4, 3, -blk(3, 4)); set_block(r, n, 4, 4, blk(3, 3));
  return r;
}

double preserves_w_residual(const Eigen::MatrixXd& a, int n) {
  double r = 0.0;
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      double sj = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^j
      double si = (i % 2 == 0) ? 1.0 : -1.0;  // (-1)^i
      Eigen::MatrixXd lhs = block_of(a, n, i, j) + sj * block_of(a, n, i, j + 2);
      Eigen::MatrixXd rhs = si * (block_of(a, n, i + 2, j) + sj * block_of(a, n, i + 2, j + 2));
      r = std::max(r, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return r;
}

bool preserves_w(const Eigen::MatrixXd& a, int n, double tol) {
  return preserves_w_residual(a, n) <= tol;
}

double w_action_residual(const Eigen::MatrixXd& a, int n) {
  Eigen::MatrixXd xi = standard_xi(n);
  Eigen::MatrixXd proj = xi * (xi.transpose() * xi).ldlt().solve(xi.transpose());
  Eigen::MatrixXd img = a * xi;
  return (img - proj * img).cwiseAbs().maxCoeff();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> p_matrices(const Eigen::MatrixXd& a, int n) {
  auto p_of = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd p(2 * n, 2 * n);
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) {
        double sj = (j % 2 == 0) ? 1.0 : -1.0;
        p.block((i - 1) * n, (j - 1) * n, n, n) =
            block_of(m, n, i, j) + sj * block_of(m, n, i, j + 2);
      }
    return p;
  };
  return {p_of(a), p_of(cross(a, n))};
}

double commute_residual(const Eigen::MatrixXd& a, int n) {
  Eigen::MatrixXd l = lambda_matrix(n);
  return (a * l - l * a).cwiseAbs().maxCoeff();
}

bool prop22_commute(const Eigen::MatrixXd& a, int n, double tol) {
  return commute_residual(a, n) <= tol;
}

Prop23Report prop23_verify(const Eigen::MatrixXd& a, int n, double tol) {
  if (!preserves_w(a, n, std::max(tol, 1e-6)))
    throw std::invalid_argument("prop23_verify: A does not preserve W");
  auto [p, px] = p_matrices(a, n);
  Prop23Report rep;
  rep.det_p = p.determinant();
  rep.det_px = px.determinant();
  rep.product_residual = std::fabs(rep.det_p * rep.det_px - 1.0);
  rep.p_px_gap = (p - px).cwiseAbs().maxCoeff();
  rep.det_p_minus_1 = std::fabs(rep.det_p - 1.0);
  return rep;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x) {
  double norm = x.cwiseAbs().maxCoeff() * static_cast<double>(x.rows());
  int squarings = 0;
  while (norm > 0.5 && squarings < 60) {
    norm /= 2.0;
    ++squarings;
  }
  Eigen::MatrixXd y = x / std::pow(2.0, squarings);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(x.rows(), x.cols());
  Eigen::MatrixXd term = acc;
  for (int k = 1; k <= 40; ++k) {
    term = (term * y) / static_cast<double>(k);
    acc += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) acc = acc * acc;
  return acc;
}

Eigen::MatrixXd so_random(int n, std::uint64_t seed) {
  Rng rng(seed);
  int dim = 4 * n;
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-0.5, 0.5);
  Eigen::MatrixXd g = neutral_gram(n);
  Eigen::MatrixXd x = 0.5 * (m - g * m.transpose() * g);  // tXG + GX = 0
  return matrix_exp(x);
}

namespace {

// Basis of the Lie algebra so(2n,2n): X = [[A,B],[tB,D]] with A, D skew.
std::vector<Eigen::MatrixXd> so_algebra_basis(int n) {
  int h = 2 * n, dim = 4 * n;
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
      x(i, j) = 1.0; x(j, i) = -1.0;
      basis.push_back(x);
      x.setZero();
      x(h + i, h + j) = 1.0; x(h + j, h + i) = -1.0;
      basis.push_back(x);
    }
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(dim, dim);
      x(i, h + j) = 1.0; x(h + j, i) = 1.0;
      basis.push_back(x);
    }
  return basis;
}

}  // namespace

Eigen::MatrixXd so_random_w_preserving(int n, Rng& rng) {
  const auto basis = so_algebra_basis(n);
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd xi = standard_xi(n);
  Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(4 * n, 4 * n) -
      xi * (xi.transpose() * xi).ldlt().solve(xi.transpose());

  // constraint matrix: column per basis element, rows are the out-of-W
  // components of X xi_j
  Eigen::MatrixXd c(4 * n * 2 * n, d);
  for (int b = 0; b < d; ++b) {
    Eigen::MatrixXd out = proj * (basis[static_cast<std::size_t>(b)] * xi);
    c.col(b) = Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd kernel = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, kernel.cols());

  Eigen::VectorXd coeffs(d);
  for (int i = 0; i < d; ++i) coeffs(i) = rng.uniform(-0.5, 0.5);
  Eigen::VectorXd projected = q * (q.transpose() * coeffs);

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  for (int b = 0; b < d; ++b) x += projected(b) * basis[static_cast<std::size_t>(b)];
  return matrix_exp(x);
}

GroupKind group_kind_from_string(const std::string& s) {
  if (s == "G1") return GroupKind::G1;
  if (s == "G2") return GroupKind::G2;
  if (s == "G3") return GroupKind::G3;
  if (s == "H") return GroupKind::H;
  if (s == "B") return GroupKind::B;
  if (s == "C") return GroupKind::C;
  throw std::invalid_argument("unknown group kind: " + s);
}

std::string to_string(GroupKind k) {
  switch (k) {
    case GroupKind::G1: return "G1";
    case GroupKind::G2: return "G2";
    case GroupKind::G3: return "G3";
    case GroupKind::H: return "H";
    case GroupKind::B: return "B";
    case GroupKind::C: return "C";
  }
  return "?";
}

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::MatrixXd build_g1(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a21, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  set_block(a, n, 1, 1, a11); set_block(a, n, 1, 2, -a21);
  set_block(a, n, 2, 1, a21); set_block(a, n, 2, 2, a11);
  set_block(a, n, 3, 3, a11); set_block(a, n, 3, 4, a21);
  set_block(a, n, 4, 3, -a21); set_block(a, n, 4, 4, a11);
  return a;
}

Eigen::MatrixXd build_g2(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a31, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  set_block(a, n, 1, 1, a11); set_block(a, n, 1, 3, a31);
  set_block(a, n, 2, 2, a11); set_block(a, n, 2, 4, a31);
  set_block(a, n, 3, 1, a31); set_block(a, n, 3, 3, a11);
  set_block(a, n, 4, 2, a31); set_block(a, n, 4, 4, a11);
  return a;
}

Eigen::MatrixXd build_g3(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a41, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  set_block(a, n, 1, 1, a11); set_block(a, n, 1, 4, a41);
  set_block(a, n, 2, 2, a11); set_block(a, n, 2, 3, -a41);
  set_block(a, n, 3, 2, -a41); set_block(a, n, 3, 3, a11);
  set_block(a, n, 4, 1, a41); set_block(a, n, 4, 4, a11);
  return a;
}

Eigen::MatrixXd build_h(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int n) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  set_block(a, n, 1, 1, id);
  set_block(a, n, 2, 2, id + y); set_block(a, n, 2, 3, x); set_block(a, n, 2, 4, -y);
  set_block(a, n, 3, 2, x);      set_block(a, n, 3, 3, id); set_block(a, n, 3, 4, -x);
  set_block(a, n, 4, 2, y);      set_block(a, n, 4, 3, x); set_block(a, n, 4, 4, id - y);
  return a;
}

Eigen::MatrixXd build_b(double b1, double b2, double b3, double b4) {
  Eigen::MatrixXd a(4, 4);
  a << b1, -b2,  b3,  b4,
       b2,  b1, -b4,  b3,
       b3, -b4,  b1,  b2,
       b4,  b3, -b2,  b1;
  return a;
}

Eigen::MatrixXd build_c(double c, double cp, int eps, double t) {
  double k = c * cp / 2.0;
  double e = static_cast<double>(eps);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  a(1, 1) = e * std::cosh(t) + k; a(1, 2) = c;  a(1, 3) = e * std::sinh(t) - k;
  a(2, 1) = cp;                   a(2, 2) = 1;  a(2, 3) = -cp;
  a(3, 1) = e * std::sinh(t) + k; a(3, 2) = c;  a(3, 3) = e * std::cosh(t) - k;
  return a;
}

}  // namespace

Eigen::MatrixXd sample_group(GroupKind kind, const GroupParams& params, int n, double tol) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  switch (kind) {
    case GroupKind::G1: {
      const auto& p = params.m1;
      const auto& q = params.m2;
      require(p.rows() == n && p.cols() == n && q.rows() == n && q.cols() == n, "G1: blocks must be n x n");
      require((p.transpose() * p + q.transpose() * q - id).cwiseAbs().maxCoeff() <= tol,
              "G1: tA11 A11 + tA21 A21 != I");
      require((p.transpose() * q - q.transpose() * p).cwiseAbs().maxCoeff() <= tol,
              "G1: tA11 A21 - tA21 A11 != 0");
      return build_g1(p, q, n);
    }
    case GroupKind::G2:
    case GroupKind::G3: {
      const auto& p = params.m1;
      const auto& q = params.m2;
      require(p.rows() == n && p.cols() == n && q.rows() == n && q.cols() == n, "G2/G3: blocks must be n x n");
      require((p.transpose() * p - q.transpose() * q - id).cwiseAbs().maxCoeff() <= tol,
              "G2/G3: tA11 A11 - tAk1 Ak1 != I");
      require((p.transpose() * q - q.transpose() * p).cwiseAbs().maxCoeff() <= tol,
              "G2/G3: tA11 Ak1 - tAk1 A11 != 0");
      return kind == GroupKind::G2 ? build_g2(p, q, n) : build_g3(p, q, n);
    }
    case GroupKind::H: {
      const auto& x = params.m1;
      const auto& y = params.m2;
      require(x.rows() == n && x.cols() == n && y.rows() == n && y.cols() == n, "H: blocks must be n x n");
      require((x - x.transpose()).cwiseAbs().maxCoeff() <= tol, "H: X not symmetric");
      require((x * x - y - y.transpose()).cwiseAbs().maxCoeff() <= tol, "H: X^2 != Y + tY");
      return build_h(x, y, n);
    }
    case GroupKind::B: {
      require(n == 1, "B family is defined for n = 1");
      double c = params.b1 * params.b1 + params.b2 * params.b2 -
                 params.b3 * params.b3 - params.b4 * params.b4;
      require(std::fabs(c - 1.0) <= tol, "B: b1^2+b2^2-b3^2-b4^2 != 1");
      return build_b(params.b1, params.b2, params.b3, params.b4);
    }
    case GroupKind::C: {
      require(n == 1, "C family is defined for n = 1");
      double k = params.c * params.cprime / 2.0;
      int eps = params.eps;
      double t = params.t;
      if (k != 0.0) {  // the K != 0 clause pins eps and t
        eps = k > 0 ? +1 : -1;
        t = std::log(std::fabs(params.c / params.cprime));
      }
      require(eps == 1 || eps == -1, "C: eps must be +-1");
      return build_c(params.c, params.cprime, eps, t);
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXd sample_group_random(GroupKind kind, int n, Rng& rng) {
  auto skew = [&](int sz) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(sz, sz);
    for (int i = 0; i < sz; ++i)
      for (int j = i + 1; j < sz; ++j) {
        s(i, j) = rng.uniform(-0.5, 0.5);
        s(j, i) = -s(i, j);
      }
    return s;
  };
  auto symm = [&](int sz) {
    Eigen::MatrixXd s(sz, sz);
    for (int i = 0; i < sz; ++i)
      for (int j = i; j < sz; ++j) s(i, j) = s(j, i) = rng.uniform(-0.5, 0.5);
    return s;
  };

  GroupParams params;
  switch (kind) {
    case GroupKind::G1: {
      Eigen::MatrixXd s = skew(n), t = symm(n);
      Eigen::MatrixXd x(2 * n, 2 * n);
      x << s, -t, t, s;
      Eigen::MatrixXd w = matrix_exp(x);
      params.m1 = w.block(0, 0, n, n);
      params.m2 = w.block(n, 0, n, n);
      break;
    }
    case GroupKind::G2:
    case GroupKind::G3: {
      Eigen::MatrixXd s = skew(n), t = symm(n);
      Eigen::MatrixXd x(2 * n, 2 * n);
      x << s, t, t, s;
      Eigen::MatrixXd w = matrix_exp(x);
      params.m1 = w.block(0, 0, n, n);
      params.m2 = w.block(n, 0, n, n);
      break;
    }
    case GroupKind::H: {
      params.m1 = symm(n);
      params.m2 = 0.5 * params.m1 * params.m1 + skew(n);
      break;
    }
    case GroupKind::B: {
      double r = rng.uniform(-1.0, 1.0), th = rng.uniform(0.0, 6.283185307179586);
      double ph = rng.uniform(0.0, 6.283185307179586);
      params.b1 = std::cosh(r) * std::cos(th);
      params.b2 = std::cosh(r) * std::sin(th);
      params.b3 = std::sinh(r) * std::cos(ph);
      params.b4 = std::sinh(r) * std::sin(ph);
      break;
    }
    case GroupKind::C: {
      // draw within the P = P^x slice (c = c'); half the draws use the
      // K = 0 boost family with free eps, t
      if (rng.uniform() < 0.5) {
        params.c = params.cprime = rng.uniform(-1.0, 1.0);
      } else {
        params.c = params.cprime = 0.0;
        params.eps = rng.uniform() < 0.5 ? +1 : -1;
        params.t = rng.uniform(-1.0, 1.0);
      }
      break;
    }
  }
  return sample_group(kind, params, n, 1e-8);
}

}  // namespace ntw
