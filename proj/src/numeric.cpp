#include "steamreg/numeric.hpp"

#include <cmath>
#include <string>

#include "steamreg/errors.hpp"

namespace steamreg {

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) {
    throw DimensionError("solve_linear: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  if (b.size() != a.rows()) {
    throw DimensionError("solve_linear: right-hand side has " + std::to_string(b.size()) +
                         " entries, expected " + std::to_string(a.rows()));
  }
  if (a.size() == 0) return Vector();

  const double scale = a.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(scale > 0.0) || !(min_pivot > 1e-12 * scale)) {
    throw SingularMatrixError("solve_linear: matrix is singular to working precision");
  }
  return lu.solve(b);
}

LeastSquaresResult least_squares(const Matrix& phi, const Matrix& targets) {
  if (phi.rows() != targets.rows()) {
    throw DimensionError("least_squares: design matrix has " + std::to_string(phi.rows()) +
                         " rows but targets have " + std::to_string(targets.rows()));
  }
  LeastSquaresResult result;
  if (phi.rows() >= phi.cols()) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    if (qr.rank() == phi.cols()) {
      result.weights = qr.solve(Eigen::MatrixXd(targets));
      return result;
    }
  }

  // Ridge solve as an augmented QR: [phi; sqrt(l) I] W = [T; 0].
  const Eigen::Index n = phi.rows();
  const Eigen::Index p = phi.cols();
  Eigen::MatrixXd aug(n + p, p);
  aug.topRows(n) = phi;
  aug.bottomRows(p) = std::sqrt(kRidgeFallback) * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + p, targets.cols());
  rhs.topRows(n) = targets;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aug);
  result.weights = qr.solve(rhs);
  result.ridge_fallback = true;
  return result;
}

double normal_equation_residual(const Matrix& phi, const Matrix& weights,
                                const Matrix& targets) {
  const Matrix r = phi * weights - targets;
  const Matrix g = phi.transpose() * r;
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

double normal_equation_scale(const Matrix& phi, const Matrix& weights,
                             const Matrix& targets) {
  const double p = phi.norm();
  return std::max(1.0, p * (p * weights.norm() + targets.norm()));
}

}  // namespace steamreg
