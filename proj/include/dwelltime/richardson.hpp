#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dwelltime/errors.hpp"

namespace dwelltime {

struct Extrapolation {
  double value = 0.0;
  // |T(n,n) - T(n-1,n-1)| from the last two tableau diagonals; NaN for a single sample.
  double error_estimate = std::numeric_limits<double>::quiet_NaN();
};

// Polynomial (Neville) extrapolation of samples f(h_k) to h = 0. For a geometric
// ladder h_k = h_0 r^k this is the Richardson tableau.
template <std::floating_point Real>
Extrapolation extrapolate_to_zero(std::span<const Real> h, std::span<const Real> f) {
  if (h.size() != f.size() || h.empty())
    throw DomainError("extrapolation needs matching, non-empty step and value lists");
  const std::size_t n = h.size();
  std::vector<Real> row(f.begin(), f.end());
  Real previous_diagonal = row[0];
  Real diagonal = row[0];
  Extrapolation out;
  // After pass `level`, row[j] holds the interpolant through samples j-level..j.
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t j = n - 1; j >= level; --j) {
      const Real hi = h[j - level];
      const Real hj = h[j];
      row[j] = (hi * row[j] - hj * row[j - 1]) / (hi - hj);
    }
    previous_diagonal = diagonal;
    diagonal = row[level];
  }
  out.value = static_cast<double>(row[n - 1]);
  if (n > 1) out.error_estimate = static_cast<double>(std::abs(row[n - 1] - previous_diagonal));
  return out;
}

}  // namespace dwelltime
