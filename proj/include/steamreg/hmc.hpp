#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/mlp.hpp"
#include "steamreg/numeric.hpp"

namespace steamreg {

class RngStream;

// Posterior over MLP weights with Gaussian prior (precision alpha) and
// Gaussian noise (precision beta). Energies are -log posterior without the
// normalising constants Z_w, Z_D and Z_S, which cancel in every acceptance
// ratio and are never computed.
struct PosteriorSpec {
  MlpShape shape;
  double alpha = 0.01;
  double beta = 30.0;
  const Dataset* data = nullptr;
  Exec exec = Exec::parallel;

  void validate() const;
};

// S(w) = beta/2 * sum ||y(x_n; w) - t_n||^2 + alpha/2 * ||w||^2
double posterior_energy(const PosteriorSpec& spec, const Vector& w);
Vector posterior_energy_grad(const PosteriorSpec& spec, const Vector& w);

// Energy and gradient of an arbitrary target, exp(-energy).
struct Potential {
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> gradient;
};

Potential make_potential(const PosteriorSpec& spec);

Vector random_walk_step(const Vector& w, double scale, RngStream& rng);

// Accepts a move from energy `current` to `candidate` with probability
// min(1, exp(current - candidate)). Non-finite candidates are rejected.
bool metropolis_accept(double current, double candidate, RngStream& rng);

struct PhasePoint {
  Vector w;
  Vector p;
};

// L leapfrog steps of size eps on H = E(w) + |p|^2 / 2. Returns nullopt when
// the trajectory leaves the finite range.
std::optional<PhasePoint> leapfrog(const Vector& w, const Vector& p, double eps, std::size_t steps,
                                   const std::function<Vector(const Vector&)>& grad);

struct HmcConfig {
  double step_size = 0.0005;
  std::size_t leapfrog_steps = 100;
  std::size_t burn_in = 10;
  std::size_t retained = 100;

  void validate() const;
};

struct SampleChain {
  std::vector<Vector> samples;
  std::vector<double> energy_trace;  // energy of the chain state after every transition
  std::size_t accepted = 0;
  std::size_t proposed = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

// Hybrid Monte Carlo. Each transition resamples the momentum, picks a
// direction lambda in {-1, +1}, integrates with step lambda * eps and applies
// the Metropolis test to the total energy. The first burn_in states are
// discarded; the next `retained` states are kept.
SampleChain hmc_sample(const Potential& potential, const HmcConfig& config, const Vector& init,
                       RngStream& rng);

// Random-walk Metropolis with isotropic Gaussian proposals.
SampleChain rwm_sample(const Potential& potential, double scale, std::size_t burn_in,
                       std::size_t retained, const Vector& init, RngStream& rng);

struct PosteriorEnsemble {
  MlpShape shape;
  std::vector<Vector> samples;
  std::vector<double> energy_trace;
  double acceptance_rate = 0.0;
};

PosteriorEnsemble hmc_sample(const PosteriorSpec& spec, const HmcConfig& config,
                             const Vector& init, RngStream& rng);

struct BayesPrediction {
  Vector mean;
  Vector stddev;  // population standard deviation over samples
};

BayesPrediction bayesian_predict(const PosteriorEnsemble& ensemble, const Vector& x);
Matrix bayesian_predict_batch(const PosteriorEnsemble& ensemble, const Matrix& inputs,
                              Exec exec = Exec::parallel);
inline Vector predict(const PosteriorEnsemble& ensemble, const Vector& x) {
  return bayesian_predict(ensemble, x).mean;
}

}  // namespace steamreg
