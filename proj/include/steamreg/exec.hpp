#pragma once

#include <cstddef>

namespace steamreg {

// Selects between the straightforward per-sample reference loops and the
// blocked OpenMP kernels. Both paths are always compiled; tests hold them
// against each other.
enum class Exec { serial, parallel };

// Rows per block in the parallel kernels. Partial results are combined in
// block order, so output does not depend on the thread count.
inline constexpr std::size_t kBlockRows = 64;

inline std::size_t block_count(std::size_t rows) {
  return (rows + kBlockRows - 1) / kBlockRows;
}

}  // namespace steamreg
