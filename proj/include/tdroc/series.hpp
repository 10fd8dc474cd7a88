#pragma once

#include <cstddef>
#include <vector>

#include "tdroc/cohort.hpp"

namespace tdroc {

/// One time point of an accuracy curve. `raw` is the per-time statistic
/// (mean rank, indicator average, landmark AUC); `smoothed` and `variance`
/// are filled in by a smoother. Undefined points stay in the series with
/// `defined == false` and NaN values.
struct AccuracyPoint {
  double time = 0.0;
  double raw = kNaN;
  std::size_t n_cases = 0;
  std::size_t n_controls = 0;
  double smoothed = kNaN;
  double variance = kNaN;
  bool defined = false;
};

struct AccuracySeries {
  std::vector<AccuracyPoint> points;

  [[nodiscard]] std::size_t defined_count() const;
  /// Smoothed curve at t: linear interpolation between defined points,
  /// held constant beyond the first and last. NaN if nothing is defined.
  [[nodiscard]] double smoothed_at(double t) const;
  [[nodiscard]] double variance_at(double t) const;
};

}  // namespace tdroc
