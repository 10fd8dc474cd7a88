#pragma once

#include <span>
#include <vector>

#include "tdroc/cohort.hpp"

namespace tdroc {

/// Right-continuous step function: `values[k]` holds on [times[k], times[k+1]).
struct StepCurve {
  std::vector<double> times;
  std::vector<double> values;
  double initial_value = 1.0;

  /// Value at the largest jump time <= t, or `initial_value` before the first.
  [[nodiscard]] double operator()(double t) const;
  /// Left limit at t (value just before t).
  [[nodiscard]] double left_limit(double t) const;
};

/// Percentile nearest-neighbour window. A neighbourhood holds roughly a
/// fraction 2*span of the sample, so 0 < 2*span < 1 is required.
struct KernelSpec {
  double span = 0.1;

  void validate() const;
};

/// Weighted product-limit estimator. Empty `weights` means unit weights.
/// At a shared time point events are removed from the risk set before
/// censorings. Throws InputError on negative times or all-zero weights.
[[nodiscard]] StepCurve kaplan_meier(std::span<const double> times, std::span<const int> status,
                                     std::span<const double> weights = {});

[[nodiscard]] StepCurve kaplan_meier(std::span<const SurvivalRecord> records);

/// Empirical percentile of each value: average rank / n (ties share the
/// mean of their ranks).
[[nodiscard]] std::vector<double> percentile_ranks(std::span<const double> values);

/// Percentile of an arbitrary point x against sorted data, on the same
/// scale as percentile_ranks: (#{< x} + (#{== x} + 1) / 2) / n.
[[nodiscard]] double percentile_of(std::span<const double> sorted, double x);

/// 0/1 weights of the percentile window around `anchor`:
/// 1{ |F(M_i) - F(anchor)| < span }.
[[nodiscard]] std::vector<double> nne_window(std::span<const SurvivalRecord> records, double anchor,
                                             const KernelSpec& kernel);

/// Local product-limit estimate S(t | M = anchor) over the percentile window.
[[nodiscard]] StepCurve conditional_km_nne(std::span<const SurvivalRecord> records, double anchor,
                                           const KernelSpec& kernel);

}  // namespace tdroc
