// SPDX-License-Identifier: Apache-2.0
#include "ntwistor/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ntw {

namespace {

void check_key(const FormKey& key, int dim, int degree) {
  if (static_cast<int>(key.size()) != degree) throw std::invalid_argument("form key size != degree");
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] < 1 || key[i] > dim) throw std::invalid_argument("form key index out of range");
    if (i > 0 && key[i] <= key[i - 1]) throw std::invalid_argument("form key not strictly increasing");
  }
}

/// Merge two strictly increasing tuples; returns 0 if they collide, else the
/// permutation sign of the shuffle.
int merge_keys(const FormKey& a, const FormKey& b, FormKey& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] hops over the remaining entries of a
      if ((a.size() - i) % 2 == 1) sign = -sign;
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return sign;
}

}  // namespace

Form::Form(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0) throw std::invalid_argument("bad form shape");
}

Form Form::scalar(int dim, const Expr& e) {
  Form f(dim, 0);
  f.set_coeff({}, e);
  return f;
}

Form Form::dx(int dim, int k) {
  Form f(dim, 1);
  f.set_coeff({k}, Expr::constant(1.0));
  return f;
}

Form Form::one_form(int dim, std::vector<Expr> coeffs) {
  if (static_cast<int>(coeffs.size()) != dim)
    throw std::invalid_argument("one_form: coefficient count != dim");
  Form f(dim, 1);
  for (int k = 1; k <= dim; ++k) f.set_coeff({k}, coeffs[static_cast<std::size_t>(k - 1)]);
  return f;
}

Expr Form::coeff(const FormKey& key) const {
  auto it = coeffs_.find(key);
  return it == coeffs_.end() ? Expr() : it->second;
}

void Form::set_coeff(const FormKey& key, const Expr& e) {
  check_key(key, dim_, degree_);
  if (e.max_coord() > dim_) throw std::invalid_argument("coefficient references coordinate beyond dim");
  if (e.is_zero()) coeffs_.erase(key);
  else coeffs_[key] = e;
}

Expr Form::as_scalar() const {
  if (degree_ != 0) throw std::logic_error("as_scalar on form of positive degree");
  return coeff({});
}

Form Form::operator+(const Form& o) const {
  if (dim_ != o.dim_ || degree_ != o.degree_) throw std::invalid_argument("form shape mismatch");
  Form r = *this;
  for (const auto& [key, e] : o.coeffs_) r.set_coeff(key, r.coeff(key) + e);
  return r;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

Form Form::operator-() const {
  Form r(dim_, degree_);
  for (const auto& [key, e] : coeffs_) r.set_coeff(key, -e);
  return r;
}

Form Form::scaled(const Expr& s) const {
  Form r(dim_, degree_);
  for (const auto& [key, e] : coeffs_) r.set_coeff(key, s * e);
  return r;
}

double Form::eval_coeff(const FormKey& key, const Point& p) const {
  auto it = coeffs_.find(key);
  return it == coeffs_.end() ? 0.0 : it->second.eval(p);
}

double Form::max_abs_coeff(const Point& p) const {
  double m = 0.0;
  for (const auto& [key, e] : coeffs_) m = std::max(m, std::fabs(e.eval(p)));
  return m;
}

double Form::eval_dir(const Point& p, int k) const {
  if (degree_ != 1) throw std::logic_error("eval_dir on form of degree != 1");
  return eval_coeff({k}, p);
}

Form wedge(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: ambient dimension mismatch");
  Form r(a.dim(), a.degree() + b.degree());
  if (r.degree() > a.dim()) return r;  // identically zero
  FormKey merged;
  for (const auto& [ka, ea] : a.coeffs()) {
    for (const auto& [kb, eb] : b.coeffs()) {
      int sign = merge_keys(ka, kb, merged);
      if (sign == 0) continue;
      Expr term = ea * eb;
      if (sign < 0) term = -term;
      r.set_coeff(merged, r.coeff(merged) + term);
    }
  }
  return r;
}

Form ext_d(const Form& f) {
  Form r(f.dim(), f.degree() + 1);
  if (r.degree() > f.dim()) return r;
  for (const auto& [key, e] : f.coeffs()) {
    for (int k = 1; k <= f.dim(); ++k) {
      if (std::find(key.begin(), key.end(), k) != key.end()) continue;
      Expr de = e.partial(k);
      if (de.is_zero()) continue;
      FormKey nk;
      int sign = merge_keys(FormKey{k}, key, nk);
      Expr term = sign < 0 ? -de : de;
      r.set_coeff(nk, r.coeff(nk) + term);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

MatrixForm::MatrixForm(int rows, int cols, int dim, int degree)
    : rows_(rows), cols_(cols), dim_(dim), degree_(degree),
      entries_(static_cast<std::size_t>(rows * cols), Form(dim, degree)) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("bad matrix shape");
}

MatrixForm MatrixForm::zero(int rows, int cols, int dim, int degree) {
  return MatrixForm(rows, cols, dim, degree);
}

MatrixForm MatrixForm::identity(int size, int dim) {
  MatrixForm r(size, size, dim, 0);
  for (int i = 0; i < size; ++i) r.at(i, i) = Form::scalar(dim, Expr::constant(1.0));
  return r;
}

MatrixForm MatrixForm::from_matrix(const Eigen::MatrixXd& a, int dim) {
  MatrixForm r(static_cast<int>(a.rows()), static_cast<int>(a.cols()), dim, 0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) r.at(i, j) = Form::scalar(dim, Expr::constant(a(i, j)));
  return r;
}

Form& MatrixForm::at(int i, int j) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("matrix form index");
  return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

const Form& MatrixForm::at(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("matrix form index");
  return entries_[static_cast<std::size_t>(i * cols_ + j)];
}

MatrixForm MatrixForm::operator+(const MatrixForm& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix form shape mismatch");
  MatrixForm r = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(i, j) = r.at(i, j) + o.at(i, j);
  return r;
}

MatrixForm MatrixForm::operator-(const MatrixForm& o) const { return *this + (-o); }

MatrixForm MatrixForm::operator-() const {
  MatrixForm r = *this;
  for (auto& e : r.entries_) e = -e;
  return r;
}

MatrixForm MatrixForm::scaled(const Expr& s) const {
  MatrixForm r = *this;
  for (auto& e : r.entries_) e = e.scaled(s);
  return r;
}

MatrixForm MatrixForm::transpose() const {
  MatrixForm r(cols_, rows_, dim_, degree_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

Eigen::MatrixXd MatrixForm::eval(const Point& p) const {
  if (degree_ != 0) throw std::logic_error("eval on matrix form of positive degree");
  Eigen::MatrixXd r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = at(i, j).coeff({}).eval(p);
  return r;
}

Eigen::MatrixXd MatrixForm::eval_dir(const Point& p, int k) const {
  if (degree_ != 1) throw std::logic_error("eval_dir on matrix form of degree != 1");
  Eigen::MatrixXd r(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(i, j) = at(i, j).eval_dir(p, k);
  return r;
}

double MatrixForm::max_abs_coeff(const Point& p) const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, e.max_abs_coeff(p));
  return m;
}

MatrixForm mwedge(const MatrixForm& a, const MatrixForm& b) {
  if (a.cols() != b.rows() || a.dim() != b.dim())
    throw std::invalid_argument("mwedge: dimension mismatch");
  MatrixForm r(a.rows(), b.cols(), a.dim(), a.degree() + b.degree());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < b.cols(); ++k) {
      Form acc(a.dim(), r.degree());
      for (int j = 0; j < a.cols(); ++j) acc = acc + wedge(a.at(i, j), b.at(j, k));
      r.at(i, k) = acc;
    }
  return r;
}

MatrixForm ext_d(const MatrixForm& a) {
  MatrixForm r(a.rows(), a.cols(), a.dim(), a.degree() + 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r.at(i, j) = ext_d(a.at(i, j));
  return r;
}

MatrixForm mmul(const MatrixForm& a, const MatrixForm& b) {
  if (a.degree() != 0 && b.degree() != 0)
    throw std::invalid_argument("mmul requires one degree-0 factor");
  return mwedge(a, b);  // wedge with a degree-0 factor is plain multiplication
}

double flatness_residual(const MatrixForm& omega, const std::vector<Point>& points) {
  if (omega.rows() != omega.cols()) throw std::invalid_argument("flatness_residual: omega not square");
  MatrixForm curv = ext_d(omega) + mwedge(omega, omega);
  double r = 0.0;
  for (const Point& p : points) r = std::max(r, curv.max_abs_coeff(p));
  return r;
}

PotentialCommuteResult potential_commutes(const MatrixForm& x, const MatrixForm& omega,
                                          const std::vector<Point>& points, double tol) {
  if (x.degree() != 0 || omega.degree() != 1) throw std::invalid_argument("potential_commutes shapes");
  MatrixForm diff = ext_d(x) - omega;
  PotentialCommuteResult res{true, true, 0.0, 0.0};
  for (const Point& p : points) {
    res.precondition_residual = std::max(res.precondition_residual, diff.max_abs_coeff(p));
    Eigen::MatrixXd xv = x.eval(p);
    for (int k = 1; k <= omega.dim(); ++k) {
      Eigen::MatrixXd wk = omega.eval_dir(p, k);
      double c = (xv * wk - wk * xv).cwiseAbs().maxCoeff();
      res.commutator_residual = std::max(res.commutator_residual, c);
    }
  }
  res.precondition_ok = res.precondition_residual <= tol;
  res.commutes = res.commutator_residual <= tol;
  return res;
}

}  // namespace ntw
