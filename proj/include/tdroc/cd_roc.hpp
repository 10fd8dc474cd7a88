#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tdroc/cohort.hpp"
#include "tdroc/km.hpp"
#include "tdroc/roc.hpp"
#include "tdroc/series.hpp"

namespace tdroc {

/// Nearest-neighbour estimate of S(c, t) = P(M > c, T > t).
/// `values[k][g]` is the estimate at times[k] and marker_grid[g];
/// `marginal[k]` is S(-inf, times[k]).
struct BivariateSurvival {
  std::vector<double> marker_grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  std::vector<double> marginal;
};

/// Span used when the caller does not fix one: 0.04 * n^-0.2.
[[nodiscard]] double default_cd_span(std::size_t n);

/// S(t | M = M_i) for every record, using the percentile window around M_i.
[[nodiscard]] std::vector<double> conditional_survival_at(std::span<const SurvivalRecord> records,
                                                          double t, const KernelSpec& kernel);

[[nodiscard]] BivariateSurvival nne_bivariate_survival(std::span<const SurvivalRecord> records,
                                                       std::span<const double> times,
                                                       const KernelSpec& kernel);

/// Cumulative/dynamic ROC at t from Kaplan-Meier curves of the marker
/// subsets (Bayes-rule form). Raw points may be non-monotone.
[[nodiscard]] RocCurve cd_roc_km(std::span<const SurvivalRecord> records, double t);

/// Cumulative/dynamic ROC at t from the nearest-neighbour bivariate
/// survival estimator. Monotone by construction.
[[nodiscard]] RocCurve cd_roc_nne(std::span<const SurvivalRecord> records, double t,
                                  const KernelSpec& kernel);

/// Landmark series: at each index time s, re-baseline the cohort and
/// estimate AUC for events in (s, s + window]. `kernel` empty means the
/// default span for each landmark subset size. Points with no cases or no
/// controls are kept and flagged undefined.
[[nodiscard]] AccuracySeries sequential_cd_auc(const Cohort& cohort,
                                               std::span<const double> index_times, double window,
                                               std::optional<KernelSpec> kernel, MarkerMode mode);

}  // namespace tdroc
