#pragma once

#include <concepts>
#include <cstddef>
#include <exception>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "steamreg/data.hpp"
#include "steamreg/errors.hpp"
#include "steamreg/exec.hpp"
#include "steamreg/numeric.hpp"
#include "steamreg/rng.hpp"

namespace steamreg {

template <class M>
concept Regressor = requires(const M& m, const Vector& x) {
  { predict(m, x) } -> std::convertible_to<Vector>;
};

// Averaging committee. When `weights` is non-empty the members are combined
// with those fixed weights instead of the plain mean.
template <Regressor M>
struct Committee {
  std::vector<M> members;
  std::vector<double> weights;
};

template <Regressor M>
Vector committee_predict(const Committee<M>& committee, const Vector& x) {
  const auto& members = committee.members;
  if (members.empty()) throw InvalidArgument("committee_predict: empty committee");
  const bool weighted = !committee.weights.empty();
  if (weighted && committee.weights.size() != members.size()) {
    throw DimensionError("committee_predict: weight count does not match member count");
  }
  Vector sum = predict(members[0], x);
  if (weighted) sum *= committee.weights[0];
  for (std::size_t i = 1; i < members.size(); ++i) {
    const Vector y = predict(members[i], x);
    if (y.size() != sum.size()) throw DimensionError("committee_predict: member output arity differs");
    if (weighted) {
      sum += committee.weights[i] * y;
    } else {
      sum += y;
    }
  }
  return weighted ? sum : Vector(sum / static_cast<double>(members.size()));
}

template <Regressor M>
Vector predict(const Committee<M>& committee, const Vector& x) {
  return committee_predict(committee, x);
}

// Row-wise prediction for any regressor.
template <Regressor M>
Matrix predict_batch(const M& model, const Matrix& inputs, Exec exec = Exec::parallel) {
  const auto n = static_cast<std::size_t>(inputs.rows());
  if (n == 0) return Matrix();
  const Vector first = predict(model, inputs.row(0).transpose());
  Matrix out(inputs.rows(), first.size());
  out.row(0) = first.transpose();
  if (exec == Exec::serial) {
    for (Eigen::Index i = 1; i < inputs.rows(); ++i) {
      out.row(i) = predict(model, inputs.row(i).transpose()).transpose();
    }
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 1; i < n; ++i) {
    try {
      const auto r = static_cast<Eigen::Index>(i);
      out.row(r) = predict(model, inputs.row(r).transpose()).transpose();
    } catch (...) {
#pragma omp critical(steamreg_predict_batch)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// n draws with replacement from 0..n-1.
std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng);
Dataset bootstrap_sample(const Dataset& train, RngStream& rng);

// Resample indices used for each bagging member: member i draws from
// rng.derive(i), and then trains with that same stream.
std::vector<std::vector<std::size_t>> bagging_resamples(std::size_t members, std::size_t rows,
                                                        const RngStream& rng);

// Trains `members` models, member i on a bootstrap resample (or on the full
// training set when `bootstrap` is false) with its own derived stream.
// Member trainings run concurrently, so `trainer` must be thread-safe.
template <class Trainer>
auto bagging_train(Trainer&& trainer, std::size_t members, const Dataset& train,
                   const RngStream& rng, bool bootstrap = true)
    -> Committee<std::remove_cvref_t<std::invoke_result_t<Trainer&, const Dataset&, RngStream&>>> {
  using Model = std::remove_cvref_t<std::invoke_result_t<Trainer&, const Dataset&, RngStream&>>;
  if (members == 0) throw InvalidArgument("bagging_train: at least one member is required");
  if (train.empty()) throw InvalidArgument("bagging_train: empty training set");

  std::vector<Model> models(members);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < members; ++i) {
    try {
      RngStream stream = rng.derive(i);
      if (bootstrap) {
        const Dataset resample = train.subset(bootstrap_indices(train.size(), stream));
        models[i] = trainer(resample, stream);
      } else {
        models[i] = trainer(train, stream);
      }
    } catch (...) {
#pragma omp critical(steamreg_bagging)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return Committee<Model>{std::move(models), {}};
}

// Averaging ensemble of members trained on the same data from different
// random starts.
template <class Trainer>
auto committee_train(Trainer&& trainer, std::size_t members, const Dataset& train,
                     const RngStream& rng) {
  return bagging_train(std::forward<Trainer>(trainer), members, train, rng, false);
}

}  // namespace steamreg
