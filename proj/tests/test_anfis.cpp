#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "steamreg/anfis.hpp"
#include "steamreg/errors.hpp"
#include "test_support.hpp"

using namespace steamreg;
using steamreg::testing::finite_difference;
using steamreg::testing::max_relative_error;
using steamreg::testing::random_matrix;
using steamreg::testing::random_vector;

namespace {

const std::vector<MfFamily> kFamilies = {
    MfFamily::gaussian,           MfFamily::bell,           MfFamily::triangular,
    MfFamily::trapezoidal,        MfFamily::sigmoid_difference, MfFamily::sigmoid_product,
    MfFamily::pi_curve,
};

MembershipFunction mf(MfFamily f, std::vector<double> p) { return {f, std::move(p), 0}; }

// Piecewise-quadratic pi curve written out region by region.
double pi_oracle(double a, double b, double c, double d, double x) {
  if (x <= a || x >= d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < (a + b) / 2) return 2 * std::pow((x - a) / (b - a), 2);
  if (x < b) return 1 - 2 * std::pow((x - b) / (b - a), 2);
  if (x < (c + d) / 2) return 1 - 2 * std::pow((x - c) / (d - c), 2);
  return 2 * std::pow((x - d) / (d - c), 2);
}

// Layer-by-layer evaluation with its own rule enumeration (odometer order,
// last input fastest).
double reference_anfis(const AnfisModel& m, const Vector& x) {
  std::vector<std::size_t> digits(m.n_in, 0);
  std::vector<double> w, z;
  for (std::size_t r = 0; r < m.rule_count(); ++r) {
    double strength = 1.0;
    for (std::size_t i = 0; i < m.n_in; ++i) {
      strength *= membership_eval(m.mfs[i * m.mfs_per_input + digits[i]], x[static_cast<Eigen::Index>(i)]);
    }
    double out = m.consequents(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.n_in));
    for (std::size_t i = 0; i < m.n_in; ++i) {
      out += m.consequents(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) *
             x[static_cast<Eigen::Index>(i)];
    }
    w.push_back(strength);
    z.push_back(out);
    for (std::size_t i = m.n_in; i-- > 0;) {
      if (++digits[i] < m.mfs_per_input) break;
      digits[i] = 0;
    }
  }
  double total = 0, y = 0;
  for (double v : w) total += v;
  for (std::size_t r = 0; r < w.size(); ++r) y += w[r] / total * z[r];
  return y;
}

AnfisModel random_model(std::size_t n_in, std::size_t m, MfFamily family, std::mt19937_64& gen) {
  const Matrix x = random_matrix(20, static_cast<Eigen::Index>(n_in), gen, 0, 1);
  AnfisModel model = anfis_init_grid(x, m, family);
  model.consequents = random_matrix(model.consequents.rows(), model.consequents.cols(), gen, -2, 2);
  // Perturb the premises so the test is not at the symmetric init.
  auto p = anfis_premise_params(model);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  for (double& v : p) v += jitter(gen);
  anfis_set_premise_params(model, p);
  for (auto& f : model.mfs) membership_clamp(f);
  return model;
}

double sse(const AnfisModel& m, const Matrix& x, const Vector& t) {
  return (anfis_forward_batch(m, x, Exec::serial) - t).squaredNorm();
}

}  // namespace

TEST(Membership, FamilyNamesRoundTrip) {
  for (auto f : kFamilies) EXPECT_EQ(parse_mf_family(mf_family_name(f)), f);
  EXPECT_THROW(parse_mf_family("mamdani"), InvalidArgument);
}

TEST(Membership, CharacteristicValues) {
  EXPECT_EQ(membership_eval(mf(MfFamily::gaussian, {0.3, 0.1}), 0.3), 1.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::gaussian, {0.2, 0.1, 0.4, 0.1}), 0.3), 1.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::triangular, {0, 1, 2}), 1.0), 1.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::triangular, {0, 1, 2}), -0.5), 0.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::triangular, {0, 1, 2}), 2.5), 0.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::triangular, {0, 1, 2}), 0.5), 0.5);
  EXPECT_EQ(membership_eval(mf(MfFamily::trapezoidal, {0, 1, 2, 4}), 1.5), 1.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::trapezoidal, {0, 1, 2, 4}), 3.0), 0.5);
  EXPECT_EQ(membership_eval(mf(MfFamily::bell, {2, 3, 1}), 1.0), 1.0);
  EXPECT_EQ(membership_eval(mf(MfFamily::bell, {2, 3, 1}), 3.0), 0.5);
  EXPECT_EQ(membership_eval(mf(MfFamily::sigmoid_product, {5, 0, -5, 0}), 0.0), 0.25);
}

TEST(Membership, PiCurveAgainstPiecewiseOracle) {
  const double a = 1, b = 3, c = 4, d = 7;
  const auto f = mf(MfFamily::pi_curve, {a, b, c, d});
  for (double x : {0.0, 1.5, 2.5, 3.5, 4.8, 6.2, 8.0}) {
    EXPECT_NEAR(membership_eval(f, x), pi_oracle(a, b, c, d, x), 1e-15) << x;
  }
  EXPECT_EQ(membership_eval(f, 3.5), 1.0);
  EXPECT_EQ(membership_eval(f, 0.0), 0.0);
  EXPECT_EQ(membership_eval(f, 8.0), 0.0);
  double prev = 0;
  for (double x = a; x <= b; x += 0.01) {
    const double v = membership_eval(f, x);
    EXPECT_GE(v, prev);
    prev = v;
  }
  for (double x = c; x <= d; x += 0.01) {
    const double v = membership_eval(f, x);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Membership, ValuesInUnitInterval) {
  std::mt19937_64 gen(1);
  for (auto family : kFamilies) {
    for (int trial = 0; trial < 20; ++trial) {
      auto model = random_model(1, 3, family, gen);
      for (double x = -1.0; x <= 2.0; x += 0.013) {
        for (const auto& f : model.mfs) {
          const double v = membership_eval(f, x);
          ASSERT_GE(v, 0.0);
          ASSERT_LE(v, 1.0);
        }
      }
    }
  }
}

TEST(Membership, InvalidParametersRejectedAndClamped) {
  auto tri = mf(MfFamily::triangular, {2, 1, 3});
  EXPECT_FALSE(membership_valid(tri));
  EXPECT_THROW(membership_eval(tri, 0.0), InvalidArgument);
  EXPECT_TRUE(membership_clamp(tri));
  EXPECT_TRUE(membership_valid(tri));
  EXPECT_EQ(tri.params, (std::vector<double>{1, 2, 3}));

  auto g = mf(MfFamily::gaussian, {0.0, -0.2});
  EXPECT_FALSE(membership_valid(g));
  EXPECT_TRUE(membership_clamp(g));
  EXPECT_TRUE(membership_valid(g));

  EXPECT_FALSE(membership_valid(mf(MfFamily::bell, {1, 2})));
  EXPECT_FALSE(membership_valid(mf(MfFamily::trapezoidal, {0, 2, 1, 3})));
  auto ok = mf(MfFamily::bell, {1, 2, 0});
  EXPECT_FALSE(membership_clamp(ok));
}

TEST(Membership, ParameterGradientMatchesFiniteDifferences) {
  const std::vector<MembershipFunction> cases = {
      mf(MfFamily::gaussian, {0.4, 0.2}),
      mf(MfFamily::gaussian, {0.3, 0.1, 0.6, 0.25}),
      mf(MfFamily::bell, {0.3, 2.5, 0.5}),
      mf(MfFamily::triangular, {0.1, 0.45, 0.9}),
      mf(MfFamily::trapezoidal, {0.05, 0.3, 0.55, 0.95}),
      mf(MfFamily::sigmoid_difference, {12, 0.3, 9, 0.7}),
      mf(MfFamily::sigmoid_product, {12, 0.3, -9, 0.7}),
      mf(MfFamily::pi_curve, {0.05, 0.3, 0.55, 0.95}),
  };
  const std::vector<double> probes = {0.0, 0.17, 0.22, 0.41, 0.52, 0.66, 0.78, 0.93, 1.1};
  for (const auto& f : cases) {
    for (double x : probes) {
      const auto g = membership_param_grad(f, x);
      const Vector analytic = Eigen::Map<const Vector>(g.data(), static_cast<Eigen::Index>(g.size()));
      const Vector p0 = Eigen::Map<const Vector>(f.params.data(), static_cast<Eigen::Index>(f.params.size()));
      const Vector numeric = finite_difference(
          [&](const Vector& p) {
            auto probe = f;
            probe.params.assign(p.data(), p.data() + p.size());
            return membership_eval(probe, x);
          },
          p0, 1e-7);
      EXPECT_LE((analytic - numeric).cwiseAbs().maxCoeff(), 1e-6)
          << mf_family_name(f.family) << " at " << x;
    }
  }
}

TEST(RuleFiring, Product) {
  const std::vector<double> ones = {1, 1, 1, 1}, zero = {0.3, 0.0, 0.9}, halves = {0.5, 0.5};
  EXPECT_EQ(rule_firing(ones), 1.0);
  EXPECT_EQ(rule_firing(zero), 0.0);
  EXPECT_EQ(rule_firing(halves), 0.25);
}

TEST(NormalizeFiring, Values) {
  const std::vector<double> a = {2, 2}, b = {7}, c = {1, 3}, none = {0, 0, 0};
  EXPECT_EQ(normalize_firing(a), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(normalize_firing(b), (std::vector<double>{1.0}));
  EXPECT_EQ(normalize_firing(c), (std::vector<double>{0.25, 0.75}));
  try {
    normalize_firing(none);
    FAIL();
  } catch (const NoFiringError& e) {
    EXPECT_NE(std::string(e.what()).find("outside all membership supports"), std::string::npos);
  }
}

TEST(ConsequentEval, Values) {
  const std::vector<double> coeffs = {1, 2, 3}, x = {1, 1};
  EXPECT_EQ(consequent_eval(coeffs, x), 6.0);
  const std::vector<double> constant = {0, 0, 4.5};
  EXPECT_EQ(consequent_eval(constant, x), 4.5);
  const std::vector<double> x3 = {2.5, -1.0}, x3a = {7.5, -3.0};
  EXPECT_DOUBLE_EQ(consequent_eval(coeffs, x3a) - 3, 3 * (consequent_eval(coeffs, x3) - 3));
  EXPECT_THROW(consequent_eval(coeffs, std::vector<double>{1.0}), DimensionError);
}

TEST(AnfisModel, GridRuleLayout) {
  std::mt19937_64 gen(2);
  const auto m = anfis_init_grid(random_matrix(30, 4, gen, 0, 1), 2, MfFamily::gaussian);
  EXPECT_EQ(m.rule_count(), 16u);
  EXPECT_EQ(m.consequents.rows(), 16);
  EXPECT_EQ(m.consequents.cols(), 5);
  EXPECT_EQ(m.mfs.size(), 8u);
  EXPECT_EQ(m.term(0, 0), 0u);
  EXPECT_EQ(m.term(8, 0), 1u);  // input 0 is the most significant digit
  EXPECT_EQ(m.term(1, 3), 1u);
  EXPECT_EQ(m.term(15, 2), 1u);
  const auto m3 = anfis_init_grid(random_matrix(30, 2, gen, 0, 1), 3, MfFamily::bell);
  EXPECT_EQ(m3.rule_count(), 9u);
}

TEST(AnfisModel, GridCoversInputRange) {
  std::mt19937_64 gen(3);
  for (auto family : kFamilies) {
    for (std::size_t m : {2u, 3u, 4u}) {
      const Matrix x = random_matrix(200, 2, gen, -3, 5);
      const auto model = anfis_init_grid(x, m, family);
      for (Eigen::Index n = 0; n < x.rows(); ++n) {
        for (std::size_t i = 0; i < 2; ++i) {
          double best = 0;
          for (std::size_t j = 0; j < m; ++j) {
            best = std::max(best, membership_eval(model.mf(i, j), x(n, static_cast<Eigen::Index>(i))));
          }
          EXPECT_GE(best, 0.5 - 1e-9) << mf_family_name(family) << " m=" << m;
        }
      }
    }
  }
}

TEST(AnfisForward, WeightedAverageExamples) {
  // One input, two identical MFs: normalized weights (0.5, 0.5).
  AnfisModel m;
  m.n_in = 1;
  m.mfs_per_input = 2;
  m.mfs = {mf(MfFamily::gaussian, {0.0, 1.0}), mf(MfFamily::gaussian, {0.0, 1.0})};
  m.consequents.resize(2, 2);
  m.consequents << 0, 4, 0, 6;
  EXPECT_EQ(anfis_forward(m, Vector::Constant(1, 0.3)), 5.0);

  // Second MF has no support at x: the first rule alone decides.
  m.mfs[1] = mf(MfFamily::triangular, {5, 6, 7});
  m.consequents << 2, 1, 0, 6;
  EXPECT_EQ(anfis_forward(m, Vector::Constant(1, 0.5)), 2.0);

  m.mfs[0] = mf(MfFamily::triangular, {5, 6, 7});
  EXPECT_THROW(anfis_forward(m, Vector::Constant(1, 0.5)), NoFiringError);
  EXPECT_THROW(anfis_forward(m, Vector::Constant(2, 0.5)), DimensionError);
}

TEST(AnfisForward, MatchesReferenceEvaluator) {
  std::mt19937_64 gen(4);
  for (auto family : kFamilies) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto m = random_model(1 + trial % 4, 2 + trial % 2, family, gen);
      for (int k = 0; k < 10; ++k) {
        const Vector x = random_vector(static_cast<Eigen::Index>(m.n_in), gen, 0.1, 0.9);
        const double ref = reference_anfis(m, x);
        EXPECT_NEAR(anfis_forward(m, x), ref, 1e-13 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST(AnfisForward, ConvexCombinationOfRuleOutputs) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_model(3, 2, MfFamily::gaussian, gen);
    const Vector x = random_vector(3, gen, 0, 1);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < m.rule_count(); ++r) {
      const auto row = m.consequents.row(static_cast<Eigen::Index>(r));
      const std::vector<double> coeffs(row.begin(), row.end());
      const double z = consequent_eval(coeffs, std::vector<double>(x.data(), x.data() + 3));
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    const double y = anfis_forward(m, x);
    EXPECT_GE(y, lo - 1e-12);
    EXPECT_LE(y, hi + 1e-12);
  }
}

TEST(AnfisDesignMatrix, NormalizedFiringSumsToOne) {
  std::mt19937_64 gen(6);
  const auto m = random_model(4, 2, MfFamily::bell, gen);
  const Matrix x = random_matrix(100, 4, gen, 0, 1);
  const Matrix d = anfis_design_matrix(m, x);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    double total = 0;
    for (std::size_t r = 0; r < m.rule_count(); ++r) total += d(n, static_cast<Eigen::Index>(r * 5 + 4));
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(AnfisLse, RecoversConstructedConsequents) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto truth = random_model(2, 2, MfFamily::gaussian, gen);
    const Matrix x = random_matrix(80, 2, gen, 0, 1);
    const Vector t = anfis_forward_batch(truth, x);
    AnfisModel start = truth;
    start.consequents.setZero();
    const auto fit = anfis_lse_consequents(start, x, t);
    EXPECT_FALSE(fit.ridge_fallback);
    EXPECT_LE((fit.model.consequents - truth.consequents).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(sse(fit.model, x, t), 1e-20);
  }
}

TEST(AnfisLse, ConstantTargets) {
  std::mt19937_64 gen(8);
  const Matrix x = random_matrix(60, 2, gen, 0, 1);
  const auto m = anfis_init_grid(x, 2, MfFamily::gaussian);
  const auto fit = anfis_lse_consequents(m, x, Vector::Constant(60, 0.37));
  EXPECT_LE(fit.model.consequents.leftCols(2).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((fit.model.consequents.col(2).array() - 0.37).abs().maxCoeff(), 1e-8);
}

TEST(AnfisLse, OptimalAndNeverWorse) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_model(3, 2, kFamilies[static_cast<std::size_t>(trial) % kFamilies.size()], gen);
    const Matrix x = random_matrix(120, 3, gen, 0.05, 0.95);
    const Vector t = random_vector(120, gen, 0, 1);
    const auto fit = anfis_lse_consequents(m, x, t);
    EXPECT_LE(sse(fit.model, x, t), sse(m, x, t) * (1 + 1e-12));
    const Matrix phi = anfis_design_matrix(fit.model, x);
    const Eigen::Map<const Vector> w(fit.model.consequents.data(), fit.model.consequents.size());
    EXPECT_LE(normal_equation_residual(phi, Matrix(w), Matrix(t)),
              1e-8 * normal_equation_scale(phi, Matrix(w), Matrix(t)));
  }
}

TEST(AnfisPremiseGradient, MatchesFiniteDifferences) {
  std::mt19937_64 gen(10);
  for (auto family : {MfFamily::gaussian, MfFamily::bell, MfFamily::sigmoid_difference,
                      MfFamily::sigmoid_product}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto m = random_model(2, 2, family, gen);
      const Matrix x = random_matrix(30, 2, gen, 0, 1);
      const Vector t = random_vector(30, gen, 0, 1);
      const auto p0 = anfis_premise_params(m);
      const Vector analytic = anfis_premise_gradient(m, x, t);
      const Vector numeric = finite_difference(
          [&](const Vector& p) {
            AnfisModel probe = m;
            anfis_set_premise_params(probe, std::vector<double>(p.data(), p.data() + p.size()));
            return sse(probe, x, t);
          },
          Eigen::Map<const Vector>(p0.data(), static_cast<Eigen::Index>(p0.size())));
      EXPECT_LT(max_relative_error(analytic, numeric), 1e-4) << mf_family_name(family);
    }
  }
}

TEST(AnfisPremiseGradient, PiecewiseFamiliesAwayFromKinks) {
  // Inputs sit strictly between breakpoints so every MF is differentiable.
  for (auto family : {MfFamily::triangular, MfFamily::trapezoidal, MfFamily::pi_curve}) {
    Matrix grid(2, 1);
    grid << 0.0, 1.0;
    AnfisModel m = anfis_init_grid(grid, 2, family);
    std::mt19937_64 gen(11);
    m.consequents = random_matrix(2, 2, gen);
    Matrix x(12, 1);
    for (Eigen::Index n = 0; n < 12; ++n) x(n, 0) = 0.02 + 0.08 * static_cast<double>(n) + 0.013;
    const Vector t = random_vector(12, gen);
    const auto p0 = anfis_premise_params(m);
    const Vector numeric = finite_difference(
        [&](const Vector& p) {
          AnfisModel probe = m;
          anfis_set_premise_params(probe, std::vector<double>(p.data(), p.data() + p.size()));
          return sse(probe, x, t);
        },
        Eigen::Map<const Vector>(p0.data(), static_cast<Eigen::Index>(p0.size())), 1e-7);
    EXPECT_LT(max_relative_error(anfis_premise_gradient(m, x, t), numeric), 1e-4)
        << mf_family_name(family);
  }
}

TEST(AnfisPremiseGradient, SerialAndParallelAgree) {
  std::mt19937_64 gen(12);
  const auto m = random_model(4, 2, MfFamily::gaussian, gen);
  const Matrix x = random_matrix(300, 4, gen, 0, 1);
  const Vector t = random_vector(300, gen, 0, 1);
  EXPECT_LE(max_relative_error(anfis_premise_gradient(m, x, t, Exec::parallel),
                               anfis_premise_gradient(m, x, t, Exec::serial)),
            1e-12);
}

TEST(AnfisBackprop, ZeroRateAndPerfectFitAreIdentity) {
  std::mt19937_64 gen(13);
  const auto truth = random_model(2, 2, MfFamily::gaussian, gen);
  const Matrix x = random_matrix(40, 2, gen, 0, 1);
  const Vector t = anfis_forward_batch(truth, x, Exec::serial);
  const auto same = anfis_backprop_premise(truth, x, random_vector(40, gen), 0.0);
  EXPECT_EQ(anfis_premise_params(same.model), anfis_premise_params(truth));
  // Residuals at a perfect fit are rounding-level, so the step is too.
  const auto fit = anfis_backprop_premise(truth, x, t, 0.5, Exec::serial);
  const auto before = anfis_premise_params(truth), after = anfis_premise_params(fit.model);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(after[i], before[i], 1e-12);
  EXPECT_THROW(anfis_backprop_premise(truth, x, t, -1.0), InvalidArgument);
}

TEST(AnfisBackprop, SmallStepReducesError) {
  std::mt19937_64 gen(14);
  const auto m = random_model(2, 2, MfFamily::bell, gen);
  const Matrix x = random_matrix(50, 2, gen, 0, 1);
  const Vector t = random_vector(50, gen, 0, 1);
  const auto step = anfis_backprop_premise(m, x, t, 1e-4);
  EXPECT_LT(sse(step.model, x, t), sse(m, x, t));
}

TEST(AnfisBackprop, InvalidStepIsClamped) {
  Matrix grid(2, 1);
  grid << 0.0, 1.0;
  AnfisModel m = anfis_init_grid(grid, 2, MfFamily::triangular);
  m.consequents << 5, -3, -5, 4;
  Matrix x(6, 1);
  x << 0.1, 0.3, 0.45, 0.55, 0.7, 0.9;
  const Vector t = Vector::LinSpaced(6, 3, -3);
  const auto step = anfis_backprop_premise(m, x, t, 1e3);
  EXPECT_TRUE(step.clamped);
  for (const auto& f : step.model.mfs) EXPECT_TRUE(membership_valid(f));
}

TEST(AnfisHybrid, LearnsLinearFunction) {
  std::mt19937_64 gen(15);
  const Matrix xt = random_matrix(100, 2, gen, 0, 1), xv = random_matrix(50, 2, gen, 0, 1);
  const Vector tt = xt.col(0), tv = xv.col(0);
  AnfisTrainOptions opt;
  opt.epochs = 50;
  const auto r = anfis_train_hybrid(anfis_init_grid(xt, 2, MfFamily::gaussian), xt, tt, xv, tv, opt);
  EXPECT_EQ(r.train_rmse.size(), 50u);
  EXPECT_EQ(r.validation_rmse.size(), 50u);
  EXPECT_LT(*std::min_element(r.validation_rmse.begin(), r.validation_rmse.end()), 1e-3);
  EXPECT_LT(std::sqrt((anfis_forward_batch(r.model, xv) - tv).squaredNorm() / 50), 1e-3);
}

TEST(AnfisHybrid, ZeroEpochsReturnsInitialModel) {
  std::mt19937_64 gen(16);
  const auto m = random_model(2, 2, MfFamily::gaussian, gen);
  const Matrix x = random_matrix(20, 2, gen, 0, 1);
  AnfisTrainOptions opt;
  opt.epochs = 0;
  const auto r = anfis_train_hybrid(m, x, x.col(0), x, x.col(0), opt);
  EXPECT_EQ(r.model.consequents, m.consequents);
  EXPECT_EQ(anfis_premise_params(r.model), anfis_premise_params(m));
  EXPECT_TRUE(r.train_rmse.empty());
}

TEST(AnfisHybrid, CheckpointIsBestValidationAndRuleCountFixed) {
  std::mt19937_64 gen(17);
  const Matrix xt = random_matrix(150, 4, gen, 0, 1), xv = random_matrix(60, 4, gen, 0, 1);
  auto f = [](const Matrix& x) {
    Vector t(x.rows());
    for (Eigen::Index n = 0; n < x.rows(); ++n) t[n] = std::sin(3 * x(n, 0)) * x(n, 1) + x(n, 2) * x(n, 3);
    return t;
  };
  AnfisTrainOptions opt;
  opt.epochs = 25;
  const auto r = anfis_train_hybrid(anfis_init_grid(xt, 2, MfFamily::gaussian), xt, f(xt), xv, f(xv), opt);
  EXPECT_EQ(r.model.rule_count(), 16u);
  EXPECT_EQ(r.model.consequents.rows(), 16);
  const double best = *std::min_element(r.validation_rmse.begin(), r.validation_rmse.end());
  EXPECT_EQ(r.validation_rmse[r.best_epoch - 1], best);
  EXPECT_NEAR(std::sqrt((anfis_forward_batch(r.model, xv) - f(xv)).squaredNorm() / 60), best, 1e-12);
}

TEST(AnfisMulti, StacksOutputs) {
  std::mt19937_64 gen(18);
  AnfisMulti multi{{random_model(2, 2, MfFamily::gaussian, gen), random_model(2, 2, MfFamily::bell, gen)}};
  const Matrix x = random_matrix(10, 2, gen, 0.2, 0.8);
  const Matrix y = anfis_predict_multi(multi, x);
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    const Vector p = predict(multi, x.row(n).transpose());
    EXPECT_NEAR(y(n, 0), p[0], 1e-13);
    EXPECT_NEAR(y(n, 1), p[1], 1e-13);
  }
}
