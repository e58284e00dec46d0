#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/numeric.hpp"

namespace steamreg {

// Parameter layouts:
//   gaussian            [c, sigma] or two-sided [c1, sigma1, c2, sigma2]
//   bell                [a, b, c]        1 / (1 + |(x - c) / a|^(2b))
//   triangular          [a, b, c]        a <= b <= c
//   trapezoidal         [a, b, c, d]     a <= b <= c <= d
//   sigmoid_difference  [a1, c1, a2, c2] |s1(x) - s2(x)|
//   sigmoid_product     [a1, c1, a2, c2] s1(x) * s2(x)
//   pi_curve            [a, b, c, d]     S-curve(a, b) * Z-curve(c, d)
enum class MfFamily {
  gaussian,
  bell,
  triangular,
  trapezoidal,
  sigmoid_difference,
  sigmoid_product,
  pi_curve,
};

std::string_view mf_family_name(MfFamily family);
MfFamily parse_mf_family(std::string_view name);

struct MembershipFunction {
  MfFamily family = MfFamily::gaussian;
  std::vector<double> params;
  std::size_t input = 0;
};

bool membership_valid(const MembershipFunction& mf);
// Throws InvalidArgument when the parameters are not valid for the family.
double membership_eval(const MembershipFunction& mf, double x);
// d mu / d params at x. Kinks of the piecewise-linear families get 0.
std::vector<double> membership_param_grad(const MembershipFunction& mf, double x);
// Projects parameters back into the valid region; returns true if anything
// changed.
bool membership_clamp(MembershipFunction& mf);

// Product AND over the rule's membership degrees.
double rule_firing(std::span<const double> memberships);
// Throws NoFiringError when every strength is zero.
std::vector<double> normalize_firing(std::span<const double> strengths);
// coeffs = (p_1, ..., p_n, c): z = sum p_i x_i + c
double consequent_eval(std::span<const double> coeffs, std::span<const double> x);

// First-order Sugeno system on a grid partition: every combination of one
// membership function per input forms a rule. Rule r picks, for input i,
// the digit i of r written in base mfs_per_input (input 0 most significant).
struct AnfisModel {
  std::size_t n_in = 0;
  std::size_t mfs_per_input = 0;
  std::vector<MembershipFunction> mfs;  // input-major: mfs[i * mfs_per_input + j]
  Matrix consequents;                   // rules x (n_in + 1)

  std::size_t rule_count() const;
  std::size_t term(std::size_t rule, std::size_t input) const;
  const MembershipFunction& mf(std::size_t input, std::size_t j) const {
    return mfs[input * mfs_per_input + j];
  }
  std::size_t premise_param_count() const;
};

// Evenly spaced centers over each input's range; adjacent functions cross
// at 0.5. Consequents start at zero.
AnfisModel anfis_init_grid(const Matrix& inputs, std::size_t mfs_per_input, MfFamily family);

double anfis_forward(const AnfisModel& model, const Vector& x);
Vector anfis_forward_batch(const AnfisModel& model, const Matrix& inputs,
                           Exec exec = Exec::parallel);

// Row n: for each rule r, normalized firing times [x_n, 1].
Matrix anfis_design_matrix(const AnfisModel& model, const Matrix& inputs,
                           Exec exec = Exec::parallel);

struct AnfisUpdate {
  AnfisModel model;
  bool ridge_fallback = false;
  bool clamped = false;
};

// Consequents minimizing batch SSE with the premises held fixed.
AnfisUpdate anfis_lse_consequents(const AnfisModel& model, const Matrix& inputs,
                                  const Vector& targets, Exec exec = Exec::parallel);

// Gradient of sum (y_n - t_n)^2 with respect to the premise parameters,
// flattened in mfs order.
Vector anfis_premise_gradient(const AnfisModel& model, const Matrix& inputs,
                              const Vector& targets, Exec exec = Exec::parallel);
std::vector<double> anfis_premise_params(const AnfisModel& model);
void anfis_set_premise_params(AnfisModel& model, std::span<const double> params);

// One gradient-descent step of the premise parameters.
AnfisUpdate anfis_backprop_premise(const AnfisModel& model, const Matrix& inputs,
                                   const Vector& targets, double learning_rate,
                                   Exec exec = Exec::parallel);

struct AnfisTrainOptions {
  std::size_t epochs = 100;
  // Length of each premise step along the normalized gradient; grows by
  // step_increase after four straight error reductions and shrinks by
  // step_decrease after two up/down oscillations.
  double step_size = 0.01;
  double step_increase = 1.1;
  double step_decrease = 0.9;
  Exec exec = Exec::parallel;
};

struct AnfisTrainResult {
  AnfisModel model;  // minimum validation RMSE checkpoint
  std::vector<double> train_rmse;
  std::vector<double> validation_rmse;
  std::size_t best_epoch = 0;
  bool ridge_fallback = false;
  bool clamped = false;
};

AnfisTrainResult anfis_train_hybrid(const AnfisModel& model, const Matrix& train_x,
                                    const Vector& train_t, const Matrix& val_x,
                                    const Vector& val_t, const AnfisTrainOptions& options);

// One system per target column.
struct AnfisMulti {
  std::vector<AnfisModel> outputs;
};

Vector predict(const AnfisModel& model, const Vector& x);
Vector predict(const AnfisMulti& model, const Vector& x);
Matrix anfis_predict_multi(const AnfisMulti& model, const Matrix& inputs,
                           Exec exec = Exec::parallel);

}  // namespace steamreg
