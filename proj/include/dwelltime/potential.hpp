#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dwelltime/errors.hpp"
#include "dwelltime/quantities.hpp"

namespace dwelltime {

using complex = std::complex<double>;

// Piecewise-constant potential V_R - i V_I. Segment j spans
// [breakpoints[j], breakpoints[j+1]] with value values[j]; outside the first
// and last breakpoint the potential is zero. An empty breakpoint list is the
// free particle. The region D must cover every nonzero segment.
class PiecewisePotential {
 public:
  PiecewisePotential() = default;

  PiecewisePotential(std::vector<double> breakpoints, std::vector<complex> values,
                     RegionSpec region)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)), region_(region) {
    validate_invariants();
  }

  static PiecewisePotential free(RegionSpec region) { return {{}, {}, region}; }

  // A single strip of constant value filling the whole region.
  static PiecewisePotential strip(RegionSpec region, complex value) {
    return {{region.left_edge, region.right_edge}, {value}, region};
  }

  static PiecewisePotential square_barrier(RegionSpec region, double height) {
    return strip(region, complex(height, 0.0));
  }

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const complex> values() const { return values_; }
  const RegionSpec& region() const { return region_; }
  std::size_t segment_count() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  bool is_real() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const complex& v) { return v.imag() == 0.0; });
  }

  bool symmetric_about_region_center(double rel_tol = 1e-14) const;

  // Largest real part over all segments (zero outside).
  double max_real() const {
    double v = 0.0;
    for (const auto& s : values_) v = std::max(v, s.real());
    return v;
  }

  // Returns a copy with `shift` added to the potential everywhere on D. New
  // breakpoints are inserted at the region edges where needed.
  PiecewisePotential shifted_on_region(complex shift) const;

  // Potential at x; a point on a breakpoint belongs to the segment on its right.
  complex value_at(double x) const;

  PiecewisePotential with_absorption(double v_imag) const {
    return shifted_on_region(complex(0.0, -v_imag));
  }

 private:
  void validate_invariants() const;

  std::vector<double> breakpoints_;
  std::vector<complex> values_;
  RegionSpec region_;
};

inline void PiecewisePotential::validate_invariants() const {
  validate(region_);
  if (breakpoints_.empty() && values_.empty()) return;
  if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size())
    throw DomainError("a potential with n segments needs n + 1 breakpoints");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i + 1] > breakpoints_[i]))
      throw DomainError("breakpoints must be strictly increasing");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const complex& v = values_[j];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("potential values must be finite");
    if (v.imag() > 0.0) throw DomainError("V_I must be non-negative in every segment");
    if (v != complex(0.0, 0.0) &&
        (breakpoints_[j] < region_.left_edge || breakpoints_[j + 1] > region_.right_edge))
      throw DomainError("region of interest must contain every nonzero segment");
  }
}

inline bool PiecewisePotential::symmetric_about_region_center(double rel_tol) const {
  const double c2 = region_.left_edge + region_.right_edge;
  const double scale = std::max(1.0, region_.length()) * rel_tol;
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (std::abs(breakpoints_[i] + breakpoints_[breakpoints_.size() - 1 - i] - c2) >
        scale * std::max(1.0, std::abs(c2)))
      return false;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(values_[j] - values_[n - 1 - j]) > rel_tol * std::max(1.0, std::abs(values_[j])))
      return false;
  }
  return true;
}

inline complex PiecewisePotential::value_at(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return {};
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

inline PiecewisePotential PiecewisePotential::shifted_on_region(complex shift) const {
  std::vector<double> cuts(breakpoints_.begin(), breakpoints_.end());
  cuts.push_back(region_.left_edge);
  cuts.push_back(region_.right_edge);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<complex> vals;
  vals.reserve(cuts.size() - 1);
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
    vals.push_back(value_at(mid) + (region_.contains(mid) ? shift : complex{}));
  }
  return {std::move(cuts), std::move(vals), region_};
}

}  // namespace dwelltime
