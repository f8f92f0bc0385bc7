#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace ggdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Counters for guarded numerical events. Functions that may clamp or skip
/// take an optional pointer to one of these; nothing is shared globally.
struct NumericalHealth {
  std::size_t clamped_singular_values = 0;  // cos(theta) above 1 + 1e-8
  std::size_t clamped_determinants = 0;     // Fubini-Study |det A| near 1
  std::size_t skipped_pairs = 0;            // SingularPair skipped in a sum
  std::size_t degenerate_gaps = 0;          // sigma_n ~ sigma_{n+1} in SVD

  NumericalHealth& operator+=(const NumericalHealth& o) {
    clamped_singular_values += o.clamped_singular_values;
    clamped_determinants += o.clamped_determinants;
    skipped_pairs += o.skipped_pairs;
    degenerate_gaps += o.degenerate_gaps;
    return *this;
  }
  std::size_t total() const {
    return clamped_singular_values + clamped_determinants + skipped_pairs +
           degenerate_gaps;
  }
};

}  // namespace ggdr
