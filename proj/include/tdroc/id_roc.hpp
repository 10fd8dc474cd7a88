#pragma once

#include <span>
#include <vector>

#include "tdroc/cohort.hpp"
#include "tdroc/cox.hpp"
#include "tdroc/km.hpp"
#include "tdroc/roc.hpp"
#include "tdroc/series.hpp"

namespace tdroc {

/// A(t) at every event time: fraction of (case, control) pairs in the risk
/// set where the case marker is strictly larger. Points without controls
/// are flagged undefined.
[[nodiscard]] AccuracySeries mean_rank(const Cohort& cohort, MarkerMode mode);

/// Nearest-neighbour smoothing over event-time rank: the window around the
/// i-th defined point holds the defined points j with |i - j| < span * m.
/// Fills `smoothed` and `variance` (within-window variance / window size).
[[nodiscard]] AccuracySeries wmr_smooth(const AccuracySeries& series, const KernelSpec& kernel);

/// 0.05 + k/200 for k = 1..80.
[[nodiscard]] std::vector<double> default_bandwidth_grid();

/// Leave-one-out integrated squared error of the smoother at `span`; NaN
/// when no point has a neighbour inside its window.
[[nodiscard]] double loo_imse(const AccuracySeries& series, double span);

/// Grid value minimising loo_imse; tied minimisers are averaged.
[[nodiscard]] double bandwidth_cv(const AccuracySeries& series, std::span<const double> grid);

/// Sensitivity at a fixed false-positive fraction p per event time. The
/// threshold is the (floor(p * n_c) + 1)-th largest control marker, so the
/// realised FPF never exceeds p. Smoothed as in wmr_smooth.
[[nodiscard]] AccuracySeries dynamic_tpr(const Cohort& cohort, double fpf, MarkerMode mode,
                                         const KernelSpec& kernel);

/// Step function of time for a varying coefficient.
struct GammaPath {
  std::vector<double> times;
  std::vector<double> values;

  [[nodiscard]] double operator()(double t) const;
};

/// Incident/dynamic ROC at t under a proportional-hazards reweighting of
/// the risk set: TPF(c) = sum_k 1(M_k > c) pi_k with pi proportional to
/// exp(gamma * M) over subjects at risk; FPF(c) is the empirical
/// distribution among subjects surviving beyond t.
[[nodiscard]] RocCurve cox_id_accuracy(const Cohort& cohort, double gamma, double t,
                                       MarkerMode mode = MarkerMode::updated);
[[nodiscard]] RocCurve cox_id_accuracy(const Cohort& cohort, const GammaPath& gamma, double t,
                                       MarkerMode mode = MarkerMode::updated);

/// gamma(t) from locally linear smoothing of scaled Schoenfeld residuals
/// (gamma_hat + D * r_i / I) over event-rank windows. Single-term fits only.
[[nodiscard]] GammaPath gamma_t_schoenfeld(const CoxFit& fit, const Cohort& cohort,
                                           const KernelSpec& kernel);

struct CindexResult {
  double value = kNaN;
  double tau = 0.0;
  double weights_sum = 0.0;
  std::size_t n_times = 0;  // event times contributing
};

/// Weighted average of A(t) over event times t <= tau with weights
/// proportional to f(t) S(t) from the Kaplan-Meier curve, normalised to
/// sum to one.
[[nodiscard]] CindexResult c_index(const Cohort& cohort, MarkerMode mode, double tau);

}  // namespace tdroc
