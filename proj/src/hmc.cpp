#include "steamreg/hmc.hpp"

#include <cmath>
#include <string>

#include "steamreg/errors.hpp"
#include "steamreg/rng.hpp"

namespace steamreg {

void PosteriorSpec::validate() const {
  if (!(std::isfinite(alpha) && alpha > 0.0)) throw InvalidArgument("posterior: alpha must be positive");
  if (!(std::isfinite(beta) && beta >= 0.0)) throw InvalidArgument("posterior: beta must be non-negative");
  if (data == nullptr) throw InvalidArgument("posterior: no training data");
}

double posterior_energy(const PosteriorSpec& spec, const Vector& w) {
  return mlp_loss_gradient(spec.shape, w, spec.data->inputs, spec.data->targets, spec.alpha,
                           spec.beta, spec.exec, false)
      .loss;
}

Vector posterior_energy_grad(const PosteriorSpec& spec, const Vector& w) {
  return mlp_loss_gradient(spec.shape, w, spec.data->inputs, spec.data->targets, spec.alpha,
                           spec.beta, spec.exec, true)
      .gradient;
}

Potential make_potential(const PosteriorSpec& spec) {
  spec.validate();
  return Potential{[spec](const Vector& w) { return posterior_energy(spec, w); },
                   [spec](const Vector& w) { return posterior_energy_grad(spec, w); }};
}

Vector random_walk_step(const Vector& w, double scale, RngStream& rng) {
  if (!(scale >= 0.0)) throw InvalidArgument("random_walk_step: scale must be non-negative");
  Vector out = w;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += scale * rng.normal();
  return out;
}

bool metropolis_accept(double current, double candidate, RngStream& rng) {
  if (!std::isfinite(candidate)) return false;
  if (candidate <= current) return true;
  return rng.uniform() < std::exp(current - candidate);
}

std::optional<PhasePoint> leapfrog(const Vector& w, const Vector& p, double eps, std::size_t steps,
                                   const std::function<Vector(const Vector&)>& grad) {
  if (w.size() != p.size()) throw DimensionError("leapfrog: position/momentum size mismatch");
  PhasePoint s{w, p};
  Vector g = grad(s.w);
  for (std::size_t l = 0; l < steps; ++l) {
    s.p -= 0.5 * eps * g;
    s.w += eps * s.p;
    g = grad(s.w);
    s.p -= 0.5 * eps * g;
    if (!s.w.allFinite() || !s.p.allFinite()) return std::nullopt;
  }
  return s;
}

void HmcConfig::validate() const {
  if (!(std::isfinite(step_size) && step_size > 0.0)) {
    throw InvalidArgument("hmc: step size must be positive");
  }
  if (leapfrog_steps < 1) throw InvalidArgument("hmc: at least one leapfrog step is required");
  if (retained < 1) throw InvalidArgument("hmc: at least one retained sample is required");
}

SampleChain hmc_sample(const Potential& potential, const HmcConfig& config, const Vector& init,
                       RngStream& rng) {
  config.validate();
  SampleChain chain;
  chain.samples.reserve(config.retained);
  Vector w = init;
  double energy = potential.energy(w);
  if (!std::isfinite(energy)) throw TrainingError("hmc: initial energy is not finite");

  const std::size_t total = config.burn_in + config.retained;
  Vector p(w.size());
  for (std::size_t t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = rng.normal();
    const double lambda = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double h_current = energy + 0.5 * p.squaredNorm();

    ++chain.proposed;
    const auto end = leapfrog(w, p, lambda * config.step_size, config.leapfrog_steps,
                              potential.gradient);
    if (end) {
      const double e_new = potential.energy(end->w);
      const double h_new = e_new + 0.5 * end->p.squaredNorm();
      if (metropolis_accept(h_current, h_new, rng)) {
        w = end->w;
        energy = e_new;
        ++chain.accepted;
      }
    }
    chain.energy_trace.push_back(energy);
    if (t >= config.burn_in) chain.samples.push_back(w);
  }
  return chain;
}

SampleChain rwm_sample(const Potential& potential, double scale, std::size_t burn_in,
                       std::size_t retained, const Vector& init, RngStream& rng) {
  if (retained < 1) throw InvalidArgument("rwm: at least one retained sample is required");
  SampleChain chain;
  Vector w = init;
  double energy = potential.energy(w);
  if (!std::isfinite(energy)) throw TrainingError("rwm: initial energy is not finite");
  for (std::size_t t = 0; t < burn_in + retained; ++t) {
    Vector candidate = random_walk_step(w, scale, rng);
    const double e_new = potential.energy(candidate);
    ++chain.proposed;
    if (metropolis_accept(energy, e_new, rng)) {
      w = std::move(candidate);
      energy = e_new;
      ++chain.accepted;
    }
    chain.energy_trace.push_back(energy);
    if (t >= burn_in) chain.samples.push_back(w);
  }
  return chain;
}

PosteriorEnsemble hmc_sample(const PosteriorSpec& spec, const HmcConfig& config,
                             const Vector& init, RngStream& rng) {
  if (static_cast<std::size_t>(init.size()) != spec.shape.param_count()) {
    throw DimensionError("hmc: initial weights have " + std::to_string(init.size()) +
                         " entries, expected " + std::to_string(spec.shape.param_count()));
  }
  const SampleChain chain = hmc_sample(make_potential(spec), config, init, rng);
  PosteriorEnsemble out;
  out.shape = spec.shape;
  out.samples = chain.samples;
  out.energy_trace = chain.energy_trace;
  out.acceptance_rate = chain.acceptance_rate();
  return out;
}

BayesPrediction bayesian_predict(const PosteriorEnsemble& ensemble, const Vector& x) {
  if (ensemble.samples.empty()) throw InvalidArgument("bayesian_predict: empty ensemble");
  MlpModel model(ensemble.shape);
  std::vector<Vector> outputs;
  outputs.reserve(ensemble.samples.size());
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(ensemble.shape.n_out));
  for (const auto& w : ensemble.samples) {
    model.params = w;
    outputs.push_back(mlp_forward(model, x));
    sum += outputs.back();
  }
  const double n = static_cast<double>(outputs.size());
  BayesPrediction out;
  out.mean = sum / n;
  // Spread measured from the first output so that identical samples give
  // exactly zero regardless of rounding in the mean.
  Vector shift = Vector::Zero(out.mean.size());
  for (const auto& y : outputs) shift += y - outputs.front();
  shift /= n;
  Vector sq = Vector::Zero(out.mean.size());
  for (const auto& y : outputs) sq += (y - outputs.front() - shift).cwiseAbs2();
  out.stddev = (sq / n).cwiseSqrt();
  return out;
}

Matrix bayesian_predict_batch(const PosteriorEnsemble& ensemble, const Matrix& inputs,
                              Exec exec) {
  if (ensemble.samples.empty()) throw InvalidArgument("bayesian_predict: empty ensemble");
  MlpModel model(ensemble.shape);
  Matrix sum = Matrix::Zero(inputs.rows(), static_cast<Eigen::Index>(ensemble.shape.n_out));
  for (const auto& w : ensemble.samples) {
    model.params = w;
    sum += mlp_predict(model, inputs, exec);
  }
  return sum / static_cast<double>(ensemble.samples.size());
}

}  // namespace steamreg
