// Serial reference loops against the blocked OpenMP kernels. Arg 0 is the
// serial path, arg 1 the parallel one.

#include <benchmark/benchmark.h>

#include <random>

#include "steamreg/anfis.hpp"
#include "steamreg/lssvm.hpp"
#include "steamreg/mlp.hpp"
#include "steamreg/numeric.hpp"
#include "steamreg/rbf.hpp"
#include "steamreg/rng.hpp"

using namespace steamreg;

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(gen);
  return m;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_MlpGradient(benchmark::State& state) {
  const Matrix x = uniform(5000, 4, 1), t = uniform(5000, 4, 2);
  RngStream rng(3);
  const MlpModel m = mlp_init({4, 8, 4}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_loss_gradient(m.shape, m.params, x, t, 0.01, 1.0, exec_of(state)));
  }
}

void BM_KernelMatrix(benchmark::State& state) {
  const Matrix x = uniform(1200, 4, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_matrix(x, x, KernelKind::gaussian, 1.0, exec_of(state)));
  }
}

void BM_KmeansAssign(benchmark::State& state) {
  const Matrix x = uniform(8000, 4, 5), centers = uniform(30, 4, 6);
  std::vector<std::size_t> assignments;
  std::vector<double> distances;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans_assign(x, centers, assignments, distances, exec_of(state)));
  }
}

void BM_RbfDesignMatrix(benchmark::State& state) {
  const Matrix x = uniform(8000, 4, 7), centers = uniform(30, 4, 8);
  const Vector widths = Vector::Constant(30, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rbf_design_matrix(centers, widths, x, exec_of(state)));
  }
}

void BM_AnfisDesignMatrix(benchmark::State& state) {
  const Matrix x = uniform(8000, 4, 9);
  const AnfisModel m = anfis_init_grid(x, 2, MfFamily::gaussian);
  for (auto _ : state) {
    benchmark::DoNotOptimize(anfis_design_matrix(m, x, exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_MlpGradient)->Arg(0)->Arg(1);
BENCHMARK(BM_KernelMatrix)->Arg(0)->Arg(1);
BENCHMARK(BM_KmeansAssign)->Arg(0)->Arg(1);
BENCHMARK(BM_RbfDesignMatrix)->Arg(0)->Arg(1);
BENCHMARK(BM_AnfisDesignMatrix)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
