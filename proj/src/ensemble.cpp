#include "steamreg/ensemble.hpp"

namespace steamreg {

std::vector<std::size_t> bootstrap_indices(std::size_t n, RngStream& rng) {
  if (n == 0) throw InvalidArgument("bootstrap: empty training set");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

Dataset bootstrap_sample(const Dataset& train, RngStream& rng) {
  return train.subset(bootstrap_indices(train.size(), rng));
}

std::vector<std::vector<std::size_t>> bagging_resamples(std::size_t members, std::size_t rows,
                                                        const RngStream& rng) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(members);
  for (std::size_t i = 0; i < members; ++i) {
    RngStream stream = rng.derive(i);
    out.push_back(bootstrap_indices(rows, stream));
  }
  return out;
}

}  // namespace steamreg
