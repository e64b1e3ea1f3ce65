#include "phtune/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "phtune/errors.hpp"

namespace phtune {

Mat chol_lower(const Mat& a, const std::string& what) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("cholesky factorization failed: " + what +
                         " is not positive definite");
  }
  return llt.matrixL();
}

Mat ut_factor_of_inverse(const Mat& a, const std::string& what) {
  const Mat l = chol_lower(a, what);
  const long n = a.rows();
  Mat u = l.transpose()
              .triangularView<Eigen::Upper>()
              .solve(Mat::Identity(n, n));
  return u;
}

Mat ut_left_factor(const Mat& a, const std::string& what) {
  return chol_lower(a, what).transpose();
}

double lambda_min_sym(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max_sym(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double sigma_max(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

bool is_pd(const Mat& a, double tol) { return lambda_min_sym(a) > tol; }

double max_abs(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double symmetry_defect(const Mat& a) { return max_abs(a - a.transpose()); }

double skewness_defect(const Mat& a) { return max_abs(a + a.transpose()); }

Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q,
                      int i, double base_step) {
  const double h = base_step * (1.0 + std::abs(q(i)));
  Vec qp = q, qm = q;
  qp(i) += h;
  qm(i) -= h;
  return (f(qp) - f(qm)) / (2.0 * h);
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q,
                double base_step) {
  Vec g(q.size());
  for (int i = 0; i < q.size(); ++i) {
    const double h = base_step * (1.0 + std::abs(q(i)));
    Vec qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    g(i) = (f(qp) - f(qm)) / (2.0 * h);
  }
  return g;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q,
                double base_step) {
  const Vec f0 = f(q);
  Mat jac(f0.size(), q.size());
  for (int i = 0; i < q.size(); ++i) {
    const double h = base_step * (1.0 + std::abs(q(i)));
    Vec qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    jac.col(i) = (f(qp) - f(qm)) / (2.0 * h);
  }
  return jac;
}

}  // namespace phtune
