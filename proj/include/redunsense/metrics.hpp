#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "redunsense/calibration.hpp"
#include "redunsense/components.hpp"
#include "redunsense/selection.hpp"

namespace redunsense {

/// gain_normalized: deviations from the endpoint-referenced line, in LSB.
/// raw: deviations from the nominal line (one unit per code), in units.
enum class ErrorMode { gain_normalized, raw };

std::string_view to_string(ErrorMode mode);
ErrorMode parse_error_mode(std::string_view name);

/// Output level selected for every code of one realization.
struct TransferFunction {
  std::string set_id;
  std::uint64_t seed = 0;
  SelectionStrategy strategy;
  std::vector<double> outputs;  // indexed by code 0..full_scale
  Reference reference;
  double lsb = 1.0;

  Code full_scale() const { return static_cast<Code>(outputs.size()) - 1; }
};

struct AccuracyReport {
  std::vector<double> inl;
  std::vector<double> dnl;
  double max_inl = 0.0;
  double rms_inl = 0.0;
  double max_dnl = 0.0;
  ErrorMode mode = ErrorMode::gain_normalized;

  friend bool operator==(const AccuracyReport&, const AccuracyReport&) = default;
};

/// Throws NoAssembly naming the first unrepresentable code if the set is incomplete.
TransferFunction transfer_function(const RealizedSet& realized, const SelectionStrategy& strategy);

/// Transfer function of a device that chose its assemblies from estimates.
TransferFunction transfer_function(const EstimatedSet& est, const SelectionStrategy& strategy);

std::vector<double> inl(const TransferFunction& tf, ErrorMode mode = ErrorMode::gain_normalized);

/// dnl[0] = 0 by convention.
std::vector<double> dnl(const TransferFunction& tf, ErrorMode mode = ErrorMode::gain_normalized);

AccuracyReport summary(const TransferFunction& tf, ErrorMode mode = ErrorMode::gain_normalized);

/// "# set=... seed=... strategy=... mode=..." then `code,output,inl,dnl` rows.
void write_metrics_csv(const TransferFunction& tf, ErrorMode mode, std::ostream& out);

}  // namespace redunsense
