// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/structures.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ntw {

Eigen::MatrixXd i_prime(int n, int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +-1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4 * n, 4 * n);
  m(3 * n, 3 * n) = static_cast<double>(eps);  // first entry of the fourth block
  return m;
}

FrameField::FrameField(MatrixForm e, int n) : e_(std::move(e)), n_(n) {
  if (e_.rows() != 4 * n || e_.cols() != 4 * n || e_.degree() != 0)
    throw std::invalid_argument("frame field must be a 4n x 4n degree-0 matrix");
}

FrameField FrameField::constant(const Eigen::MatrixXd& e, int n, int dim) {
  return FrameField(MatrixForm::from_matrix(e, dim), n);
}

FrameField FrameField::standard(int n, int dim) {
  return FrameField(MatrixForm::identity(4 * n, dim), n);
}

double FrameField::orthonormality_residual(const std::vector<Point>& pts) const {
  Eigen::MatrixXd g = neutral_gram(n_);
  double r = 0.0;
  for (const Point& p : pts) {
    Eigen::MatrixXd e = eval(p);
    r = std::max(r, (e.transpose() * g * e - g).cwiseAbs().maxCoeff());
  }
  return r;
}

bool FrameField::oriented(const std::vector<Point>& pts) const {
  for (const Point& p : pts)
    if (eval(p).determinant() <= 0.0) return false;
  return true;
}

MatrixForm FrameField::inverse() const {
  MatrixForm g = MatrixForm::from_matrix(neutral_gram(n_), dim());
  return mmul(mmul(g, e_.transpose()), g);
}

Eigen::MatrixXd complete_isotropic_basis(const Eigen::MatrixXd& xi, int n, double tol) {
  if (xi.rows() != 4 * n || xi.cols() != 2 * n)
    throw std::invalid_argument("isotropic span must be 4n x 2n");
  Eigen::MatrixXd g = neutral_gram(n);
  Eigen::MatrixXd pairings = xi.transpose() * g * xi;
  if (pairings.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("span is not light-like");
  Eigen::MatrixXd gram = xi.transpose() * xi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.eigenvalues().minCoeff() < tol) throw std::invalid_argument("span is degenerate");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);

  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  d.block(n, n, n, n) *= -1.0;

  // y0 solves tXi G y0 = D; the correction y0 + xi*s kills t(y') G y'
  Eigen::MatrixXd y0 = g * xi * ldlt.solve(d);
  Eigen::MatrixXd q = y0.transpose() * g * y0;
  Eigen::MatrixXd s = -0.5 * d * q;
  return y0 + xi * s;
}

Eigen::MatrixXd frame_from_isotropic(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& xi_prime,
                                     int n, double tol) {
  Eigen::MatrixXd g = neutral_gram(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  d.block(n, n, n, n) *= -1.0;
  if ((xi.transpose() * g * xi).cwiseAbs().maxCoeff() > tol ||
      (xi_prime.transpose() * g * xi_prime).cwiseAbs().maxCoeff() > tol ||
      (xi.transpose() * g * xi_prime - d).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("pairing conditions violated");

  Eigen::MatrixXd e(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    e.col(i) = xi_prime.col(i) + 0.5 * xi.col(i);
    e.col(n + i) = -xi_prime.col(n + i) + 0.5 * xi.col(n + i);
    e.col(2 * n + i) = xi_prime.col(i) - 0.5 * xi.col(i);
    e.col(3 * n + i) = xi_prime.col(n + i) + 0.5 * xi.col(n + i);
  }
  return e;
}

Eigen::MatrixXd nilpotent_model(int n, int eps) {
  Eigen::MatrixXd ip = i_prime(n, eps);
  return ip * lambda_matrix(n) * ip;
}

Eigen::MatrixXd paracomplex_model(int n, int eps) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  set_block(k, n, 1, 3, id);
  set_block(k, n, 2, 4, -id);
  set_block(k, n, 3, 1, id);
  set_block(k, n, 4, 2, -id);
  Eigen::MatrixXd ip = i_prime(n, eps);
  return ip * k * ip;
}

Eigen::MatrixXd nilpotent_model_related(int n, int eps, int mu) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4 * n, 4 * n);
  s.block(2 * n, 2 * n, 2 * n, 2 * n) *= static_cast<double>(mu);
  return s * nilpotent_model(n, eps) * s;
}

namespace {

MatrixForm conjugate_model(const FrameField& e, const Eigen::MatrixXd& model) {
  MatrixForm m = MatrixForm::from_matrix(model, e.dim());
  return mmul(mmul(e.mat(), m), e.inverse());
}

}  // namespace

MatrixForm NilpotentStructure::matrix() const {
  return conjugate_model(frame, nilpotent_model(frame.n(), eps));
}

Eigen::MatrixXd NilpotentStructure::eval(const Point& p) const {
  Eigen::MatrixXd e = frame.eval(p);
  Eigen::MatrixXd g = neutral_gram(frame.n());
  return e * nilpotent_model(frame.n(), eps) * g * e.transpose() * g;
}

MatrixForm NilpotentStructure::xi_columns() const {
  int n = frame.n();
  MatrixForm xi(4 * n, 2 * n, frame.dim(), 0);
  const MatrixForm& e = frame.mat();
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < 4 * n; ++r) {
      xi.at(r, i) = e.at(r, i) - e.at(r, 2 * n + i);
      Form last = e.at(r, 3 * n + i);
      if (i == 0 && eps < 0) last = -last;
      xi.at(r, n + i) = e.at(r, n + i) + last;
    }
  }
  return xi;
}

MatrixForm ParacomplexStructure::matrix() const {
  return conjugate_model(frame, paracomplex_model(frame.n(), eps));
}

Eigen::MatrixXd ParacomplexStructure::eval(const Point& p) const {
  Eigen::MatrixXd e = frame.eval(p);
  Eigen::MatrixXd g = neutral_gram(frame.n());
  return e * paracomplex_model(frame.n(), eps) * g * e.transpose() * g;
}

NilpotentStructure nilpotent_from_frame(const FrameField& e, int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +-1");
  return NilpotentStructure{e, eps};
}

ParacomplexStructure paracomplex_from_frame(const FrameField& e, int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +-1");
  return ParacomplexStructure{e, eps};
}

// --- bivectors (n = 1) ------------------------------------------------------

namespace {

// ordered index pairs of the Lambda^2 basis
constexpr int kPairs[6][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};

int pair_index(int i, int j) {
  for (int a = 0; a < 6; ++a)
    if (kPairs[a][0] == i && kPairs[a][1] == j) return a;
  throw std::logic_error("bad pair");
}

}  // namespace

Eigen::Matrix<double, 6, 6> hhat_gram() {
  Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Zero();
  double eps_i[5] = {0, 1, 1, -1, -1};  // 1-based signature (+,+,-,-)
  for (int a = 0; a < 6; ++a) g(a, a) = eps_i[kPairs[a][0]] * eps_i[kPairs[a][1]];
  return g;
}

double hhat(const Bivector& a, const Bivector& b) {
  static const Eigen::Matrix<double, 6, 6> g = hhat_gram();
  return a.dot(g * b);
}

Bivector omega_basis(int sign, int k) {
  const double r = 1.0 / std::sqrt(2.0);
  Bivector b = Bivector::Zero();
  double s = static_cast<double>(sign);
  switch (k) {
    case 1:  // (e1^e2 +- e3^e4)/sqrt2
      b(pair_index(1, 2)) = r;
      b(pair_index(3, 4)) = s * r;
      break;
    case 2:  // (e1^e3 +- e4^e2)/sqrt2
      b(pair_index(1, 3)) = r;
      b(pair_index(2, 4)) = -s * r;
      break;
    case 3:  // (e1^e4 +- e2^e3)/sqrt2
      b(pair_index(1, 4)) = r;
      b(pair_index(2, 3)) = s * r;
      break;
    default:
      throw std::invalid_argument("omega_basis: k in 1..3");
  }
  return b;
}

std::array<Bivector, 6> lambda2_basis() {
  return {omega_basis(-1, 1), omega_basis(+1, 2), omega_basis(+1, 3),
          omega_basis(+1, 1), omega_basis(-1, 2), omega_basis(-1, 3)};
}

double side_violation(const Bivector& b, int eps) {
  // complementary triple: Omega_{-eps,1}, Omega_{eps',2}, Omega_{eps',3} with eps' = -eps
  Bivector c1 = omega_basis(eps, 1), c2 = omega_basis(-eps, 2), c3 = omega_basis(-eps, 3);
  double v = 0.0;
  v = std::max(v, std::fabs(hhat(b, c1)));   // c1 space-like: component = +hhat
  v = std::max(v, std::fabs(hhat(b, c2)));   // time-like: component = -hhat; magnitude is what matters
  v = std::max(v, std::fabs(hhat(b, c3)));
  return v;
}

Bivector bivector_to_background(const Eigen::MatrixXd& frame_value, const Bivector& b) {
  Bivector out = Bivector::Zero();
  for (int a = 0; a < 6; ++a) {
    if (b(a) == 0.0) continue;
    Eigen::VectorXd u = frame_value.col(kPairs[a][0] - 1);
    Eigen::VectorXd v = frame_value.col(kPairs[a][1] - 1);
    for (int c = 0; c < 6; ++c) {
      int i = kPairs[c][0] - 1, j = kPairs[c][1] - 1;
      out(c) += b(a) * (u(i) * v(j) - u(j) * v(i));
    }
  }
  return out;
}

Bivector canonical_lightlike(int eps) {
  return omega_basis(-eps, 1) + static_cast<double>(eps) * omega_basis(eps, 3);
}

NilpotentStructure bivector_to_nilpotent(const Bivector& omega0, const FrameField& e, int eps,
                                         double tol) {
  if (e.n() != 1) throw std::invalid_argument("bivector bridge is n = 1 only");
  if (std::fabs(hhat(omega0, omega0)) > tol)
    throw std::invalid_argument("section is not light-like");
  if (side_violation(omega0, eps) > tol)
    throw std::invalid_argument("section is not on side eps");
  if ((omega0 - canonical_lightlike(eps)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("section is not canonical in this frame");
  return nilpotent_from_frame(e, eps);
}

Bivector nilpotent_to_bivector(const NilpotentStructure& n) {
  if (n.frame.n() != 1) throw std::invalid_argument("bivector bridge is n = 1 only");
  // (1/sqrt2) (e1 - e3) ^ (e2 + eps e4) in frame components
  const double r = 1.0 / std::sqrt(2.0);
  double eps = static_cast<double>(n.eps);
  Bivector b = Bivector::Zero();
  b(pair_index(1, 2)) = r;
  b(pair_index(1, 4)) = r * eps;
  b(pair_index(2, 3)) = r;
  b(pair_index(3, 4)) = -r * eps;
  return b;
}

Eigen::VectorXd induced_2nvector(const NilpotentStructure& nst, const Point& p) {
  int n = nst.frame.n();
  Eigen::MatrixXd xi = nst.xi_columns().eval(p);

  // all 2n x 2n minors over lexicographically ordered row subsets
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == 2 * n) {
      subsets.push_back(cur);
      return;
    }
    for (int r = start; r < 4 * n; ++r) {
      cur.push_back(r);
      rec(r + 1);
      cur.pop_back();
    }
  };
  rec(0);

  Eigen::VectorXd out(static_cast<int>(subsets.size()));
  Eigen::MatrixXd minor(2 * n, 2 * n);
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (int r = 0; r < 2 * n; ++r) minor.row(r) = xi.row(subsets[s][static_cast<std::size_t>(r)]);
    out(static_cast<int>(s)) = minor.determinant();
  }
  return out;
}

}  // namespace ntw
