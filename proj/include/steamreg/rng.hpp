#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace steamreg {

// Seeded random stream. Streams with equal (seed, index) produce identical
// sequences; `derive` yields statistically independent child streams for
// parallel work.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  static constexpr std::string_view algorithm() { return "mt19937_64"; }

  RngStream derive(std::uint64_t index) const;

  // Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace steamreg
