#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdroc/cohort.hpp"
#include "tdroc/rng.hpp"

namespace tdroc {

enum class StatisticKind { c_index, id_auc, id_tpr, cd_auc };

/// Declarative description of a scalar accuracy statistic.
struct StatisticSpec {
  StatisticKind kind = StatisticKind::c_index;
  MarkerMode mode = MarkerMode::baseline;
  double time = 0.0;    // evaluation time (id_*) or landmark (cd_auc)
  double window = 0.0;  // cd_auc prediction window
  double lambda = 0.2;  // smoothing span for id_* curves
  double tau = 0.0;     // c_index truncation
  double fpf = 0.1;     // id_tpr
  std::optional<double> cd_span;  // empty: default span per sample size

  [[nodiscard]] std::string label() const;
};

/// Evaluates the statistic; NaN when it is undefined on this cohort.
[[nodiscard]] double evaluate_statistic(const Cohort& cohort, const StatisticSpec& spec);

struct BootstrapResult {
  std::vector<double> replicates;  // NaN marks an undefined replicate
  double point = kNaN;
  double ci_low = kNaN;
  double ci_high = kNaN;
  std::uint64_t seed = 0;
  std::size_t B = 0;
  std::size_t defined = 0;
  bool unstable = false;  // fewer than 90% of replicates defined
};

/// R type-7 sample quantile of the finite values.
[[nodiscard]] double quantile_type7(std::vector<double> values, double p);

/// Draws n subjects with replacement, keeping whole interval chains; each
/// draw gets a fresh id so duplicates stay distinct subjects.
[[nodiscard]] Cohort resample_subjects(const Cohort& cohort, Rng& rng);

/// Statistics evaluated together on each replicate (one output per entry).
using MultiStatistic = std::function<std::vector<double>(const Cohort&)>;

/// Subject-level bootstrap of several statistics at once. Replicate r uses
/// the seed split_seed(seed, r), so results do not depend on `threads`
/// (0 = hardware concurrency).
[[nodiscard]] std::vector<BootstrapResult> bootstrap_many(const Cohort& cohort,
                                                          const MultiStatistic& statistic,
                                                          std::size_t B, std::uint64_t seed,
                                                          unsigned threads = 0);

[[nodiscard]] BootstrapResult bootstrap_ci(const Cohort& cohort, const StatisticSpec& spec,
                                           std::size_t B, std::uint64_t seed, unsigned threads = 0);

/// Paired bootstrap of c_index(marker_a) - c_index(marker_b): each
/// replicate feeds the same resampled subjects to both. Markers are per
/// interval of `cohort`.
[[nodiscard]] BootstrapResult cindex_difference_ci(const Cohort& cohort,
                                                   std::span<const double> marker_a,
                                                   std::span<const double> marker_b, double tau,
                                                   MarkerMode mode, std::size_t B,
                                                   std::uint64_t seed, unsigned threads = 0);

}  // namespace tdroc
