#include "redunsense/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "redunsense/errors.hpp"
#include "redunsense/microstates.hpp"
#include "redunsense/text_io.hpp"

namespace redunsense {

std::string_view to_string(ErrorMode mode) {
  return mode == ErrorMode::raw ? "raw" : "gain_normalized";
}

ErrorMode parse_error_mode(std::string_view name) {
  if (name == "gain_normalized") return ErrorMode::gain_normalized;
  if (name == "raw") return ErrorMode::raw;
  throw std::invalid_argument("unknown error mode '" + std::string(name) +
                              "' (expected gain_normalized or raw)");
}

namespace {

void require_complete(const ComponentSet& set) {
  if (const auto gap = first_unrepresentable(set)) {
    throw NoAssembly("set '" + set.id() + "' is incomplete: code " + std::to_string(*gap) +
                     " has no assembly");
  }
}

template <class Chooser>
TransferFunction build(const RealizedSet& realized, const SelectionStrategy& strategy,
                       const Chooser& chooser) {
  TransferFunction tf;
  tf.set_id = realized.base().id();
  tf.seed = realized.seed();
  tf.strategy = strategy;
  tf.reference = reference_of(realized);
  tf.lsb = tf.reference.lsb();
  const Code fs = realized.base().full_scale();
  tf.outputs.resize(static_cast<std::size_t>(fs) + 1);
  for (Code x = 0; x <= fs; ++x) {
    tf.outputs[static_cast<std::size_t>(x)] = chooser.select(x).achieved;
  }
  return tf;
}

}  // namespace

TransferFunction transfer_function(const RealizedSet& realized, const SelectionStrategy& strategy) {
  require_complete(realized.base());
  return build(realized, strategy, Selector(realized, strategy));
}

TransferFunction transfer_function(const EstimatedSet& est, const SelectionStrategy& strategy) {
  require_complete(est.base().base());
  return build(est.base(), strategy, CalibratedSelector(est, strategy));
}

std::vector<double> inl(const TransferFunction& tf, ErrorMode mode) {
  std::vector<double> out(tf.outputs.size());
  for (std::size_t x = 0; x < out.size(); ++x) {
    const auto code = static_cast<Code>(x);
    out[x] = mode == ErrorMode::raw
                 ? tf.outputs[x] - static_cast<double>(code)
                 : (tf.outputs[x] - tf.reference.ideal(code)) / tf.lsb;
  }
  return out;
}

std::vector<double> dnl(const TransferFunction& tf, ErrorMode mode) {
  const double step = mode == ErrorMode::raw ? 1.0 : tf.lsb;
  std::vector<double> out(tf.outputs.size(), 0.0);
  for (std::size_t x = 1; x < out.size(); ++x) {
    out[x] = (tf.outputs[x] - tf.outputs[x - 1]) / step - 1.0;
  }
  return out;
}

AccuracyReport summary(const TransferFunction& tf, ErrorMode mode) {
  AccuracyReport r;
  r.mode = mode;
  r.inl = inl(tf, mode);
  r.dnl = dnl(tf, mode);
  double sq = 0.0;
  for (double v : r.inl) {
    r.max_inl = std::max(r.max_inl, std::abs(v));
    sq += v * v;
  }
  r.rms_inl = r.inl.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(r.inl.size()));
  for (double v : r.dnl) r.max_dnl = std::max(r.max_dnl, std::abs(v));
  return r;
}

void write_metrics_csv(const TransferFunction& tf, ErrorMode mode, std::ostream& out) {
  const std::vector<double> i = inl(tf, mode);
  const std::vector<double> d = dnl(tf, mode);
  out << "# set=" << tf.set_id << " seed=" << tf.seed << " strategy=" << tf.strategy.label()
      << " mode=" << to_string(mode) << '\n';
  out << "code,output,inl,dnl\n";
  for (std::size_t x = 0; x < tf.outputs.size(); ++x) {
    out << x << ',' << format_double(tf.outputs[x]) << ',' << format_double(i[x]) << ','
        << format_double(d[x]) << '\n';
  }
}

}  // namespace redunsense
