#pragma once

#include "steamreg/cli/config.hpp"
#include "steamreg/data.hpp"

namespace steamreg::cli {

// Stand-in plant data. Inputs: fuel and air uniform in [0, 1], reference
// level uniform in [10, 30], disturbance uniform in [0, 10]. With u the
// inputs rescaled to [0, 1], each output is lo + span * (g + noise * N(0,1)):
//
//   drum pressure  [250, 350]  g1 = 0.15 + 0.5 u1 + 0.2 u1 (1 - u4) + 0.15 sin(pi u2)
//   excess oxygen  [1, 6]      g2 = 0.5 + 0.4 tanh(3 (u2 - u1)) + 0.05 u4
//   water level    [-1, 1]     g3 = 0.5 + 0.25 (2 u3 - 1) + 0.4 exp(-4 (u1 - u4)^2) (u2 - 0.5)
//   steam flow     [5, 25]     g4 = 0.1 + 0.6 u1 (0.5 + 0.5 u2) + 0.3 u4^2
//
// Every g lies in [0, 1], so `noise` is in scaled output units.
Dataset generate_synthetic(const SyntheticSpec& spec);

// The noise-free map applied to raw input rows.
Matrix synthetic_targets(const Matrix& inputs);

}  // namespace steamreg::cli
