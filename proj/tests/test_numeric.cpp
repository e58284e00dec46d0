#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "steamreg/errors.hpp"
#include "steamreg/numeric.hpp"
#include "steamreg/rng.hpp"
#include "test_support.hpp"

using namespace steamreg;
using steamreg::testing::random_matrix;

TEST(SolveLinear, Identity) {
  const Matrix a = Matrix::Identity(3, 3);
  const Vector b = Vector::LinSpaced(3, 1, 3);
  const Vector x = solve_linear(a, b);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
  EXPECT_DOUBLE_EQ(x[2], 3.0);
}

TEST(SolveLinear, Diagonal) {
  Matrix a(2, 2);
  a << 2, 0, 0, 4;
  Vector b(2);
  b << 2, 8;
  const Vector x = solve_linear(a, b);
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveLinear, RankDeficientThrows) {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  Vector b(2);
  b << 1, 2;
  EXPECT_THROW(solve_linear(a, b), SingularMatrixError);
  EXPECT_THROW(solve_linear(Matrix::Zero(3, 3), Vector::Ones(3)), SingularMatrixError);
}

TEST(SolveLinear, ShapeErrors) {
  EXPECT_THROW(solve_linear(Matrix::Identity(2, 3), Vector::Ones(2)), DimensionError);
  EXPECT_THROW(solve_linear(Matrix::Identity(3, 3), Vector::Ones(2)), DimensionError);
}

TEST(SolveLinear, ResidualContractOnRandomSystems) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(12, 12, gen);
    a.diagonal().array() += 6.0;  // well conditioned
    const Vector b = steamreg::testing::random_vector(12, gen, -5, 5);
    const Vector x = solve_linear(a, b);
    EXPECT_LE((a * x - b).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
}

TEST(LeastSquares, ConsistentLine) {
  Matrix phi(3, 1);
  phi << 1, 2, 3;
  Matrix t(3, 1);
  t << 2, 4, 6;
  const auto ls = least_squares(phi, t);
  EXPECT_FALSE(ls.ridge_fallback);
  EXPECT_NEAR(ls.weights(0, 0), 2.0, 1e-14);
  EXPECT_NEAR((phi * ls.weights - t).norm(), 0.0, 1e-13);
}

TEST(LeastSquares, ZeroTargets) {
  std::mt19937_64 gen(3);
  const Matrix phi = random_matrix(10, 4, gen);
  const auto ls = least_squares(phi, Matrix::Zero(10, 2));
  EXPECT_EQ(ls.weights.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LeastSquares, RecoversConstructedWeights) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix phi = random_matrix(20, 3, gen);
    const Matrix w_true = random_matrix(3, 2, gen, -3, 3);
    const Matrix t = phi * w_true;
    const auto ls = least_squares(phi, t);
    EXPECT_LE((ls.weights - w_true).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(LeastSquares, NormalEquationResidualOnNoisyData) {
  std::mt19937_64 gen(8);
  const Matrix phi = random_matrix(50, 6, gen);
  const Matrix t = random_matrix(50, 3, gen);
  const auto ls = least_squares(phi, t);
  EXPECT_LE(normal_equation_residual(phi, ls.weights, t),
            1e-8 * normal_equation_scale(phi, ls.weights, t));
}

TEST(LeastSquares, RankDeficientUsesRidge) {
  Matrix phi(4, 2);
  phi << 1, 2, 2, 4, 3, 6, 4, 8;  // second column = 2 * first
  Matrix t(4, 1);
  t << 1, 2, 3, 4;
  const auto ls = least_squares(phi, t);
  EXPECT_TRUE(ls.ridge_fallback);
  EXPECT_TRUE(ls.weights.allFinite());
  EXPECT_NEAR((phi * ls.weights - t).norm(), 0.0, 1e-6);
}

TEST(LeastSquares, AgreesWithSolveLinearOnSquareSystems) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(6, 6, gen);
    a.diagonal().array() += 4.0;
    const Vector b = steamreg::testing::random_vector(6, gen);
    const Vector x1 = solve_linear(a, b);
    const auto x2 = least_squares(a, Matrix(b));
    EXPECT_LE((x1 - x2.weights.col(0)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

namespace {

// Exhaustive optimum over all two-cluster partitions of a 1-D point set.
std::pair<double, double> brute_force_two_means(const std::vector<double>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> centers;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double s0 = 0, s1 = 0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        s1 += pts[i];
        ++n1;
      } else {
        s0 += pts[i];
        ++n0;
      }
    }
    const double m0 = s0 / n0, m1 = s1 / n1;
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = (mask & (1u << i)) ? m1 : m0;
      sse += (pts[i] - c) * (pts[i] - c);
    }
    if (sse < best) {
      best = sse;
      centers = {std::min(m0, m1), std::max(m0, m1)};
    }
  }
  return centers;
}

}  // namespace

TEST(KMeans, MatchesExhaustivePartitionOptimum) {
  const std::vector<double> pts = {0.0, 0.1, 10.0, 10.1};
  const auto oracle = brute_force_two_means(pts);
  EXPECT_NEAR(oracle.first, 0.05, 1e-12);
  EXPECT_NEAR(oracle.second, 10.05, 1e-12);

  Matrix points(4, 1);
  points << 0.0, 0.1, 10.0, 10.1;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    RngStream rng(seed);
    const auto km = kmeans(points, 2, rng, 100);
    std::vector<double> c = {km.centers(0, 0), km.centers(1, 0)};
    std::sort(c.begin(), c.end());
    EXPECT_NEAR(c[0], oracle.first, 1e-12);
    EXPECT_NEAR(c[1], oracle.second, 1e-12);
    EXPECT_TRUE(km.converged);
  }
}

TEST(KMeans, KEqualsPointCount) {
  std::mt19937_64 gen(2);
  const Matrix points = random_matrix(7, 3, gen);
  RngStream rng(1);
  const auto km = kmeans(points, 7, rng, 50);
  EXPECT_NEAR(km.sse_history.back(), 0.0, 1e-24);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = static_cast<Eigen::Index>(km.assignments[static_cast<std::size_t>(i)]);
    EXPECT_EQ((km.centers.row(c) - points.row(i)).norm(), 0.0);
  }
}

TEST(KMeans, SingleClusterIsGlobalMean) {
  std::mt19937_64 gen(4);
  const Matrix points = random_matrix(30, 2, gen);
  RngStream rng(9);
  const auto km = kmeans(points, 1, rng, 10);
  const Eigen::RowVectorXd mean = points.colwise().mean();
  EXPECT_LE((km.centers.row(0) - mean).norm(), 1e-14);
}

TEST(KMeans, TooManyClustersThrows) {
  Matrix points(3, 1);
  points << 1, 2, 3;
  RngStream rng(0);
  EXPECT_THROW(kmeans(points, 4, rng, 10), InvalidArgument);
  Matrix dup(3, 1);
  dup << 1, 1, 2;
  EXPECT_THROW(kmeans(dup, 3, rng, 10), InvalidArgument);
}

TEST(KMeans, SseNonIncreasingAndCentersAreMeans) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 15; ++trial) {
    const Matrix points = random_matrix(200, 3, gen);
    RngStream rng(static_cast<std::uint64_t>(trial));
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 9);
    const auto km = kmeans(points, k, rng, trial % 2 ? 3 : 200);
    for (std::size_t i = 1; i < km.sse_history.size(); ++i) {
      EXPECT_LE(km.sse_history[i], km.sse_history[i - 1] * (1 + 1e-12));
    }
    for (std::size_t j = 0; j < k; ++j) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(3);
      int count = 0;
      for (std::size_t i = 0; i < km.assignments.size(); ++i) {
        if (km.assignments[i] == j) {
          sum += points.row(static_cast<Eigen::Index>(i));
          ++count;
        }
      }
      ASSERT_GT(count, 0);
      EXPECT_LE((km.centers.row(static_cast<Eigen::Index>(j)) - sum / count).norm(), 1e-12);
    }
  }
}

TEST(RngStream, EqualSeedsGiveIdenticalSequences) {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngStream, DerivedStreamsAreReproducibleAndDistinct) {
  const RngStream root(7);
  RngStream a = root.derive(3), b = root.derive(3), c = root.derive(4);
  EXPECT_EQ(a.stream(), b.stream());
  EXPECT_NE(a.stream(), c.stream());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
  EXPECT_EQ(RngStream::algorithm(), "mt19937_64");
}

TEST(RngStream, UniformRange) {
  RngStream r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(5), 5u);
  }
}
