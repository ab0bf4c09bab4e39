#include "redunsense/calibration.hpp"

#include <cmath>
#include <stdexcept>

#include "redunsense/rng.hpp"

namespace redunsense {

EstimatedSet::EstimatedSet(RealizedSet base, std::vector<double> estimated, double sigma_meas,
                           std::uint64_t seed)
    : base_(std::move(base)), estimated_(std::move(estimated)), sigma_meas_(sigma_meas),
      seed_(seed) {
  if (estimated_.size() != base_.actual().size()) {
    throw std::invalid_argument("estimate count must match the component count");
  }
}

Reference EstimatedSet::estimated_reference() const {
  return reference_from(base_.base(), estimated_);
}

EstimatedSet estimate_errors(const RealizedSet& realized, double sigma_meas, std::uint64_t seed) {
  if (!(sigma_meas >= 0.0) || !std::isfinite(sigma_meas)) {
    throw std::invalid_argument("sigma_meas must be a finite nonnegative number");
  }
  std::vector<double> est(realized.actual().begin(), realized.actual().end());
  if (sigma_meas > 0.0) {
    for (std::size_t i = 0; i < est.size(); ++i) {
      est[i] += sigma_meas * rng::standard_normal(seed, rng::Stream::measurement, i);
    }
  }
  return EstimatedSet(realized, std::move(est), sigma_meas, seed);
}

CalibratedSelector::CalibratedSelector(const EstimatedSet& est, const SelectionStrategy& strategy)
    : truth_(est.base().actual().begin(), est.base().actual().end()),
      true_reference_(reference_of(est.base())),
      chooser_(est.base().base(), std::vector<double>(est.estimated().begin(), est.estimated().end()),
               est.estimated_reference(), strategy) {}

Selection CalibratedSelector::select(Code code) const {
  Selection chosen = chooser_.select(code);
  return evaluate(code, std::move(chosen.assembly.members), truth_, true_reference_);
}

Selection select_calibrated(const EstimatedSet& est, Code code, const SelectionStrategy& strategy) {
  return CalibratedSelector(est, strategy).select(code);
}

}  // namespace redunsense
