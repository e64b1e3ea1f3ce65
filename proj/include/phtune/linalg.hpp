#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace phtune {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Lower Cholesky factor L with a = L * L^T.  Throws NumericalError naming
/// `what` if the factorization fails (a not SPD up to roundoff).
Mat chol_lower(const Mat& a, const std::string& what);

/// Upper-triangular U with positive diagonal and inverse(a) = U * U^T.
/// Computed as the inverse transpose of the lower Cholesky factor of a.
Mat ut_factor_of_inverse(const Mat& a, const std::string& what);

/// Upper-triangular U with positive diagonal and a = U^T * U.
Mat ut_left_factor(const Mat& a, const std::string& what);

/// Extreme eigenvalues of the symmetric part of a.
double lambda_min_sym(const Mat& a);
double lambda_max_sym(const Mat& a);

/// Largest singular value.
double sigma_max(const Mat& a);

/// True when the symmetric part of a is positive definite beyond tol.
bool is_pd(const Mat& a, double tol = 0.0);

/// max_ij |a_ij|
double max_abs(const Mat& a);

/// max_ij |a_ij - a_ji|  (0 for symmetric matrices)
double symmetry_defect(const Mat& a);

/// max_ij |a_ij + a_ji|  (0 for skew-symmetric matrices)
double skewness_defect(const Mat& a);

/// Central finite differences.  Steps scale as base_step * (1 + |q_i|).
Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q,
                      int i, double base_step = 1e-6);
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q,
                double base_step = 1e-6);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q,
                double base_step = 1e-6);

}  // namespace phtune
