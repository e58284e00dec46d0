#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "steamreg/errors.hpp"
#include "steamreg/lssvm.hpp"
#include "test_support.hpp"

using namespace steamreg;
using steamreg::testing::random_matrix;
using steamreg::testing::random_vector;

namespace {

double system_residual(const LsSvmSystem& s, const LsSvmModel& m) {
  Vector x(s.rhs.size());
  x[0] = m.bias;
  x.tail(m.coef.size()) = m.coef;
  return (s.lhs * x - s.rhs).cwiseAbs().maxCoeff();
}

double system_scale(const LsSvmSystem& s, const LsSvmModel& m) {
  const double x_inf = std::max(std::abs(m.bias), m.coef.cwiseAbs().maxCoeff());
  const double a_inf = s.lhs.cwiseAbs().rowwise().sum().maxCoeff();
  return std::max(1.0, a_inf * x_inf + s.rhs.cwiseAbs().maxCoeff());
}

}  // namespace

TEST(GaussianKernel, Values) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_vector(3, gen), y = random_vector(3, gen);
    EXPECT_EQ(gaussian_kernel(x, x, 0.7), 1.0);
    EXPECT_EQ(gaussian_kernel(x, y, 0.7), gaussian_kernel(y, x, 0.7));
  }
  Vector a = Vector::Zero(2), b(2);
  b << 1.0, 1.0;  // squared distance 2
  EXPECT_NEAR(gaussian_kernel(a, b, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_THROW(gaussian_kernel(a, b, 0.0), InvalidArgument);
  EXPECT_THROW(gaussian_kernel(a, b, -2.0), InvalidArgument);
}

TEST(KernelMatrix, SymmetricPositiveSemidefinite) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(40, 4, gen);
    for (KernelKind kind : {KernelKind::gaussian, KernelKind::linear}) {
      const Matrix k = kernel_matrix(x, x, kind, 0.05 + 0.3 * trial);
      EXPECT_EQ(k, k.transpose());
      const Eigen::MatrixXd kd = k;
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(kd).eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(KernelMatrix, SerialAndParallelIdentical) {
  std::mt19937_64 gen(3);
  const Matrix a = random_matrix(150, 4, gen), b = random_matrix(90, 4, gen);
  EXPECT_EQ(kernel_matrix(a, b, KernelKind::gaussian, 0.3, Exec::serial),
            kernel_matrix(a, b, KernelKind::gaussian, 0.3, Exec::parallel));
}

TEST(KernelNames, RoundTrip) {
  for (KernelKind k : {KernelKind::gaussian, KernelKind::linear}) {
    EXPECT_EQ(parse_kernel(kernel_name(k)), k);
  }
  EXPECT_THROW(parse_kernel("sigmoid"), InvalidArgument);
}

TEST(LsSvmTrain, SinglePoint) {
  // The 2x2 system [[0, 1], [1, 1 + 1/C]] [b; a] = [0; t] has a = 0, b = t.
  const Matrix x = Matrix::Constant(1, 2, 0.3);
  const auto m = lssvm_train(x, Vector::Constant(1, 4.2), 10, 1);
  EXPECT_NEAR(m.coef[0], 0.0, 1e-15);
  EXPECT_NEAR(m.bias, 4.2, 1e-14);
  std::mt19937_64 gen(4);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(lssvm_predict(m, random_vector(2, gen, -5, 5)), 4.2, 1e-14);
  }
}

TEST(LsSvmTrain, ConstantTargets) {
  std::mt19937_64 gen(5);
  const Matrix x = random_matrix(30, 3, gen);
  for (double c : {0.1, 10.0, 1e4}) {
    const auto m = lssvm_train(x, Vector::Constant(30, -0.75), c, 0.5);
    EXPECT_NEAR(m.bias, -0.75, 1e-10);
    EXPECT_LT(m.coef.cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(LsSvmTrain, SystemResidualAndConstraints) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(50, 4, gen, 0, 1);
    const Vector t = random_vector(50, gen, 0, 1);
    const double c = std::pow(10.0, trial % 4 - 1), s2 = std::pow(10.0, trial % 3 - 1);
    const auto m = lssvm_train(x, t, c, s2);
    const auto sys = lssvm_system(x, t, c, s2);
    EXPECT_LE(system_residual(sys, m), 1e-8 * system_scale(sys, m));
    EXPECT_LE(std::abs(m.coef.sum()), 1e-10);
    // t_i = f(x_i) + a_i / C
    const Vector f = lssvm_predict_batch(m, x);
    EXPECT_LE((t - f - m.coef / c).cwiseAbs().maxCoeff(), 1e-8 * system_scale(sys, m));
  }
}

TEST(LsSvmTrain, DuplicatePointsWithLargeCAreSingular) {
  Matrix x(3, 1);
  x << 0.5, 0.5, 0.9;
  Vector t(3);
  t << 0.0, 1.0, 0.2;
  EXPECT_THROW(lssvm_train(x, t, 1e20, 1.0), SingularMatrixError);
}

TEST(LsSvmTrain, RejectsBadParameters) {
  const Matrix x = Matrix::Zero(2, 1);
  const Vector t = Vector::Zero(2);
  EXPECT_THROW(lssvm_train(x, t, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(lssvm_train(x, t, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(lssvm_train(Matrix(0, 1), Vector(0), 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(lssvm_train(x, Vector::Zero(3), 1.0, 1.0), DimensionError);
}

TEST(LsSvmPredict, ZeroDualsGiveBias) {
  LsSvmModel m;
  m.support = Matrix::Ones(3, 2);
  m.coef = Vector::Zero(3);
  m.bias = 1.25;
  EXPECT_EQ(lssvm_predict(m, Vector::Constant(2, 9.0)), 1.25);
}

TEST(LsSvmPredict, NearInterpolationAtLargeC) {
  Matrix x(5, 1);
  x << 0.0, 0.2, 0.45, 0.7, 1.0;
  Vector t(5);
  t << 0.1, 0.9, -0.3, 0.4, 0.0;
  const auto m = lssvm_train(x, t, 1e8, 0.05);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_NEAR(lssvm_predict(m, x.row(i).transpose()), t[i], 1e-3);
  }
}

TEST(LsSvmPredict, InvariantUnderSupportPermutation) {
  std::mt19937_64 gen(7);
  const Matrix x = random_matrix(25, 3, gen);
  const Vector t = random_vector(25, gen);
  const auto m = lssvm_train(x, t, 10, 1);
  std::vector<Eigen::Index> perm(25);
  for (Eigen::Index i = 0; i < 25; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  LsSvmModel p = m;
  for (Eigen::Index i = 0; i < 25; ++i) {
    p.support.row(i) = m.support.row(perm[static_cast<std::size_t>(i)]);
    p.coef[i] = m.coef[perm[static_cast<std::size_t>(i)]];
  }
  for (int i = 0; i < 20; ++i) {
    const Vector q = random_vector(3, gen);
    EXPECT_NEAR(lssvm_predict(m, q), lssvm_predict(p, q), 1e-12);
  }
}

TEST(LsSvmTrain, TrainingErrorNonIncreasingInC) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_matrix(40, 2, gen, 0, 1);
    const Vector t = random_vector(40, gen, 0, 1);
    double prev = INFINITY;
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
      const auto m = lssvm_train(x, t, c, 0.2);
      const double sse = (lssvm_predict_batch(m, x) - t).squaredNorm();
      EXPECT_LE(sse, prev * (1 + 1e-10));
      prev = sse;
    }
  }
}

TEST(EpsInsensitiveLoss, Values) {
  EXPECT_EQ(eps_insensitive_loss(1.5, 1.0, 1.0), 0.0);
  EXPECT_EQ(eps_insensitive_loss(2.5, 1.0, 1.0), 0.5);
  EXPECT_EQ(eps_insensitive_loss(-0.5, 1.0, 1.0), 0.5);
  EXPECT_EQ(eps_insensitive_loss(0.25, 1.0, 0.0), 0.75);
  EXPECT_THROW(eps_insensitive_loss(0, 0, -1), InvalidArgument);
}

TEST(GridTune, SinglePoint) {
  std::mt19937_64 gen(9);
  const Matrix x = random_matrix(20, 2, gen);
  const Vector t = random_vector(20, gen);
  const auto r = grid_tune(x, t, x, t, {0.3}, {7.0});
  EXPECT_EQ(r.c, 7.0);
  EXPECT_EQ(r.sigma2, 0.3);
  EXPECT_EQ(r.validation_mse.rows(), 1);
}

TEST(GridTune, TiesPreferSmallerCThenLargerSigma) {
  // Constant targets are fitted exactly by the bias for every grid point.
  std::mt19937_64 gen(10);
  const Matrix x = random_matrix(20, 2, gen);
  const Vector t = Vector::Constant(20, 0.4);
  const auto r = grid_tune(x, t, x, t, {0.1, 1.0, 10.0}, {100.0, 1.0, 10.0});
  EXPECT_EQ(r.c, 1.0);
  EXPECT_EQ(r.sigma2, 10.0);
  EXPECT_EQ(r.validation_mse.rows(), 3);
  EXPECT_EQ(r.validation_mse.cols(), 3);
}

TEST(GridTune, RecoversGeneratingBandwidth) {
  // Targets drawn from a kernel expansion with a known bandwidth.
  const double true_sigma2 = 0.05;
  const std::vector<double> grid = {0.005, 0.0158, 0.05, 0.158, 0.5, 1.58};
  std::mt19937_64 gen(11);
  int hits = 0;
  constexpr int kTrials = 5;
  for (int trial = 0; trial < kTrials; ++trial) {
    const Matrix centers = random_matrix(15, 2, gen, 0, 1);
    const Vector coef = random_vector(15, gen, -1, 1);
    auto target = [&](const Matrix& x) {
      return Vector(kernel_matrix(x, centers, KernelKind::gaussian, true_sigma2) * coef);
    };
    const Matrix xt = random_matrix(200, 2, gen, 0, 1), xv = random_matrix(100, 2, gen, 0, 1);
    const auto r = grid_tune(xt, target(xt), xv, target(xv), grid, {1e3});
    const auto pos = std::find(grid.begin(), grid.end(), r.sigma2) - grid.begin();
    if (std::abs(pos - 2) <= 1) ++hits;
  }
  EXPECT_EQ(hits, kTrials);
}

TEST(LsSvmMulti, IndependentPerOutput) {
  std::mt19937_64 gen(12);
  Dataset d;
  d.inputs = random_matrix(30, 3, gen, 0, 1);
  d.targets = random_matrix(30, 3, gen, 0, 1);
  d.targets.col(2) = d.targets.col(0);
  const auto m = lssvm_train_multi(d, {{10, 1}, {1, 0.5}, {10, 1}});
  ASSERT_EQ(m.outputs.size(), 3u);
  EXPECT_EQ(m.outputs[0].coef, m.outputs[2].coef);
  EXPECT_EQ(m.outputs[0].bias, m.outputs[2].bias);

  Dataset changed = d;
  changed.targets.col(1) = random_vector(30, gen);
  const auto m2 = lssvm_train_multi(changed, {{10, 1}, {1, 0.5}, {10, 1}});
  EXPECT_EQ(m2.outputs[0].coef, m.outputs[0].coef);

  const Matrix pred = lssvm_predict_multi(m, d.inputs);
  for (Eigen::Index k = 0; k < 3; ++k) {
    EXPECT_LE((pred.col(k) - lssvm_predict_batch(m.outputs[static_cast<std::size_t>(k)], d.inputs))
                  .cwiseAbs()
                  .maxCoeff(),
              0.0);
  }
  EXPECT_THROW(lssvm_train_multi(d, {{10, 1}}), DimensionError);
}
