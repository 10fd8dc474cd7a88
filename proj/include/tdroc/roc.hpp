#pragma once

#include <span>
#include <vector>

namespace tdroc {

struct RocPoint {
  double fpf = 0.0;
  double tpf = 0.0;
  double threshold = 0.0;  // positive means marker > threshold
};

/// ROC points ordered by FPF (ties by TPF), from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;

  /// TPF at the largest FPF not exceeding p (step interpolation).
  [[nodiscard]] double tpf_at(double p) const;
};

/// Trapezoidal area under points already sorted by FPF.
[[nodiscard]] double trapezoid_auc(std::span<const RocPoint> points);

/// Snaps round-off at 0 and 1, sorts raw (possibly non-monotone) points by
/// FPF, then TPF, and fills in the area.
[[nodiscard]] RocCurve finish_roc(std::vector<RocPoint> points);

/// Distinct observed values in ascending order.
[[nodiscard]] std::vector<double> distinct_sorted(std::span<const double> values);

}  // namespace tdroc
