#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "redunsense/components.hpp"
#include "redunsense/selection.hpp"

namespace redunsense {

/// One-shot measurement of every component of a realized set.
class EstimatedSet {
 public:
  EstimatedSet(RealizedSet base, std::vector<double> estimated, double sigma_meas,
               std::uint64_t seed);

  const RealizedSet& base() const { return base_; }
  std::span<const double> estimated() const { return estimated_; }
  double sigma_meas() const { return sigma_meas_; }
  std::uint64_t seed() const { return seed_; }

  /// Reference line the device can compute from its own estimates.
  Reference estimated_reference() const;

 private:
  RealizedSet base_;
  std::vector<double> estimated_;
  double sigma_meas_;
  std::uint64_t seed_;
};

/// estimated[i] = actual[i] + sigma_meas * z_i, z_i standard normal keyed on (seed, i).
EstimatedSet estimate_errors(const RealizedSet& realized, double sigma_meas, std::uint64_t seed);

/// Chooses assemblies from estimated values, reports errors against the truth.
class CalibratedSelector {
 public:
  CalibratedSelector(const EstimatedSet& est, const SelectionStrategy& strategy);

  /// Assembly picked by the estimate-driven solver, with achieved value and
  /// objective error evaluated on the true component values and reference.
  Selection select(Code code) const;

 private:
  std::vector<double> truth_;
  Reference true_reference_;
  Selector chooser_;
};

Selection select_calibrated(const EstimatedSet& est, Code code, const SelectionStrategy& strategy);

}  // namespace redunsense
