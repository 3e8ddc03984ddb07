// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "ntwistor/expr.hpp"
#include "ntwistor/sampling.hpp"

namespace ntw {

/// Strictly increasing tuple of 1-based coordinate indices.
using FormKey = std::vector<int>;

/// Differential p-form on R^m with Expr coefficients.  Degree 0 is a bare
/// scalar (single empty key).  Coefficients that fold to the constant 0
/// are dropped, so the zero form has an empty coefficient map.
class Form {
 public:
  Form() : Form(1, 0) {}  // the zero scalar
  Form(int dim, int degree);

  static Form scalar(int dim, const Expr& e);         // degree 0
  static Form dx(int dim, int k);                     // basis 1-form dx_k
  static Form one_form(int dim, std::vector<Expr> coeffs);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  bool is_zero() const { return coeffs_.empty(); }

  const std::map<FormKey, Expr>& coeffs() const { return coeffs_; }
  Expr coeff(const FormKey& key) const;               // zero Expr if absent
  void set_coeff(const FormKey& key, const Expr& e);  // key must be strictly increasing
  Expr as_scalar() const;                             // degree 0 only

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator-() const;
  Form scaled(const Expr& s) const;
  Form scaled(double s) const { return scaled(Expr::constant(s)); }

  /// Coefficient array at a point: one value per lexicographically ordered
  /// key of this degree (p choose m layout), used by residual evaluation.
  double eval_coeff(const FormKey& key, const Point& p) const;
  double max_abs_coeff(const Point& p) const;

  /// Degree-1 helper: value of the dx_k coefficient at p.
  double eval_dir(const Point& p, int k) const;

 private:
  int dim_, degree_;
  std::map<FormKey, Expr> coeffs_;
};

Form wedge(const Form& a, const Form& b);
Form ext_d(const Form& f);

/// r x c grid of forms of a common degree and ambient dimension.
class MatrixForm {
 public:
  MatrixForm(int rows, int cols, int dim, int degree);

  static MatrixForm zero(int rows, int cols, int dim, int degree);
  static MatrixForm identity(int size, int dim);  // degree 0
  static MatrixForm from_matrix(const Eigen::MatrixXd& a, int dim);  // degree 0, constants

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return dim_; }
  int degree() const { return degree_; }

  /// 0-based entry access.
  Form& at(int i, int j);
  const Form& at(int i, int j) const;

  MatrixForm operator+(const MatrixForm& o) const;
  MatrixForm operator-(const MatrixForm& o) const;
  MatrixForm operator-() const;
  MatrixForm scaled(const Expr& s) const;
  MatrixForm scaled(double s) const { return scaled(Expr::constant(s)); }
  MatrixForm transpose() const;

  /// Degree-0 value at a point.
  Eigen::MatrixXd eval(const Point& p) const;
  /// Degree-1: the dx_k coefficient matrix at p.
  Eigen::MatrixXd eval_dir(const Point& p, int k) const;
  double max_abs_coeff(const Point& p) const;

 private:
  int rows_, cols_, dim_, degree_;
  std::vector<Form> entries_;
};

/// Matrix product with entry-wise wedge: (A ^ B)_ik = sum_j A_ij ^ B_jk.
MatrixForm mwedge(const MatrixForm& a, const MatrixForm& b);

/// Entry-wise exterior derivative.
MatrixForm ext_d(const MatrixForm& a);

/// Plain matrix product for degree-0 against degree-p (coefficients multiply).
MatrixForm mmul(const MatrixForm& a, const MatrixForm& b);

/// max over points, entries and index pairs of |coefficient of (d omega + omega ^ omega)|.
double flatness_residual(const MatrixForm& omega, const std::vector<Point>& points);

struct PotentialCommuteResult {
  bool precondition_ok;   // omega == ext_d(x) on the sample set
  bool commutes;          // [x(p), omega_k(p)] vanishes for all p, k
  double precondition_residual;
  double commutator_residual;
};

/// Checks whether the matrix potential x (omega = dx) commutes with its own
/// derivative, which is what makes e = e0 * exp(x) a valid frame field.
PotentialCommuteResult potential_commutes(const MatrixForm& x, const MatrixForm& omega,
                                          const std::vector<Point>& points, double tol = 1e-10);

}  // namespace ntw
