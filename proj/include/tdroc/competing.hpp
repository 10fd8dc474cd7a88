#pragma once

#include <span>
#include <vector>

#include "tdroc/cohort.hpp"
#include "tdroc/km.hpp"
#include "tdroc/roc.hpp"

namespace tdroc {

/// Conditional cumulative incidence of one cause around a marker value.
/// `values[k]` holds on [times[k], times[k+1]); zero before times[0].
struct CifCurve {
  int cause = 1;
  double anchor_marker = kNaN;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> survival;  // all-cause local survival at the same times

  [[nodiscard]] double operator()(double t) const;
};

/// Aalen-Johansen estimate over the percentile window around `anchor`:
/// C_j(t) = sum_{s <= t} S(s-) d_j(s) / Y(s), with S the local all-cause
/// product-limit curve and Y the number at risk. Throws EstimationError if
/// the cause never occurs or the window is empty.
[[nodiscard]] CifCurve cif_nne(std::span<const SurvivalRecord> records, double anchor, int cause,
                               const KernelSpec& kernel);

/// Cumulative/dynamic ROC for cause j at t: cases weighted by C_j(t|M_i),
/// controls by S(t|M_i) (all-cause survivors), each subject carrying mass 1/n.
[[nodiscard]] RocCurve cd_accuracy_competing(std::span<const SurvivalRecord> records, int cause,
                                             double t, const KernelSpec& kernel);

struct CompetingIdResult {
  double gamma = 0.0;  // cause-specific coefficient of the marker
  RocCurve roc;
};

/// Incident/dynamic ROC for cause j at t: marker-only Cox fit with the
/// other causes censored, then risk-set reweighting with that coefficient.
[[nodiscard]] CompetingIdResult id_accuracy_competing(const Cohort& cohort, int cause, double t,
                                                      MarkerMode mode = MarkerMode::updated);

}  // namespace tdroc
