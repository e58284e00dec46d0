#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "steamreg/exec.hpp"

namespace steamreg {

class RngStream;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Partial-pivot LU solve. Throws SingularMatrixError when a pivot falls
// below 1e-12 times the largest entry of A.
Vector solve_linear(const Matrix& a, const Vector& b);

inline constexpr double kRidgeFallback = 1e-10;

struct LeastSquaresResult {
  Matrix weights;
  // Set when Phi was rank deficient (or under-determined) and the ridge
  // solve with kRidgeFallback was used instead of plain QR.
  bool ridge_fallback = false;
};

// Minimizes ||phi * W - targets||_F column by column.
LeastSquaresResult least_squares(const Matrix& phi, const Matrix& targets);

// ||phi^T (phi W - T)||_inf, the optimality residual of a least-squares fit.
double normal_equation_residual(const Matrix& phi, const Matrix& weights,
                                const Matrix& targets);
// Backward-error scale for the residual above:
// ||phi||_F (||phi||_F ||W||_F + ||T||_F), floored at 1.
double normal_equation_scale(const Matrix& phi, const Matrix& weights,
                             const Matrix& targets);

struct KMeansResult {
  Matrix centers;
  std::vector<std::size_t> assignments;
  // Within-cluster sum of squares after seeding and after every iteration.
  std::vector<double> sse_history;
  std::size_t iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm with farthest-point seeding. The first seed is drawn
// from `rng`; each later seed is the point farthest from its nearest seed.
KMeansResult kmeans(const Matrix& points, std::size_t k, RngStream& rng,
                    std::size_t max_iters, Exec exec = Exec::parallel);

// Nearest-center assignment; returns SSE. Exposed for the kernel benchmark.
double kmeans_assign(const Matrix& points, const Matrix& centers,
                     std::vector<std::size_t>& assignments,
                     std::vector<double>& distances, Exec exec);

std::size_t count_distinct_rows(const Matrix& points);

}  // namespace steamreg
