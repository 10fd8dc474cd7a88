#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdroc {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kDaysPerYear = 365.25;

/// Which marker value an estimator reads for a subject: the value recorded
/// at entry, or the value in force on the interval covering the time point.
enum class MarkerMode { baseline, updated };

/// One counting-process row. `status` is 0 for censored and the cause code
/// (>= 1) for an event; only the last interval of a subject may carry one.
struct Interval {
  std::string subject_id;
  double start = 0.0;
  double stop = 0.0;
  int status = 0;
  double marker = kNaN;
  std::vector<double> covariates;

  [[nodiscard]] bool is_event() const { return status > 0; }
};

/// Subject-level (follow-up time, status, marker) triple.
struct SurvivalRecord {
  double time = 0.0;
  int status = 0;
  double marker = kNaN;

  [[nodiscard]] bool is_event() const { return status > 0; }
};

/// Immutable collection of interval chains, grouped by subject.
///
/// Intervals are stored subject by subject (subjects in first-appearance
/// order, each chain sorted by start). Construction validates the chain
/// invariants and throws InputError on violation.
class Cohort {
 public:
  Cohort() = default;
  Cohort(std::vector<Interval> intervals, std::vector<std::string> covariate_names,
         double time_unit = kDaysPerYear);

  [[nodiscard]] std::span<const Interval> intervals() const { return intervals_; }
  [[nodiscard]] const Interval& interval(std::size_t i) const { return intervals_[i]; }
  [[nodiscard]] std::size_t interval_count() const { return intervals_.size(); }
  [[nodiscard]] std::size_t subject_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  /// Interval chain of the k-th subject.
  [[nodiscard]] std::span<const Interval> subject(std::size_t k) const;
  /// Subject index owning interval i.
  [[nodiscard]] std::size_t subject_of(std::size_t i) const { return owner_[i]; }
  /// End of follow-up of the subject owning interval i.
  [[nodiscard]] double terminal_stop(std::size_t i) const { return subject(owner_[i]).back().stop; }

  [[nodiscard]] const std::vector<std::string>& covariate_names() const { return covariate_names_; }
  [[nodiscard]] std::optional<std::size_t> covariate_index(std::string_view name) const;
  [[nodiscard]] double time_unit() const { return time_unit_; }
  [[nodiscard]] bool is_baseline_only() const { return intervals_.size() == subject_count(); }

  /// One record per subject: first start, terminal stop/status, first
  /// interval's marker and covariates.
  [[nodiscard]] Cohort baseline_view() const;
  /// The cohort as seen by an estimator in the given marker mode.
  [[nodiscard]] Cohort view(MarkerMode mode) const {
    return mode == MarkerMode::baseline && !is_baseline_only() ? baseline_view() : *this;
  }
  /// Copy with per-interval markers replaced.
  [[nodiscard]] Cohort with_markers(std::span<const double> markers) const;
  /// Terminal (time, status) per subject with the first interval's marker.
  [[nodiscard]] std::vector<SurvivalRecord> subject_records() const;

  /// Sorted distinct event times (any cause).
  [[nodiscard]] std::vector<double> event_times() const;

 private:
  std::vector<Interval> intervals_;
  std::vector<std::string> covariate_names_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  double time_unit_ = kDaysPerYear;
};

/// Partition of the subjects under observation just before `eval_time`.
/// Members are interval indices into the cohort the set was built from.
struct RiskSet {
  double eval_time = 0.0;
  std::vector<std::size_t> cases;
  std::vector<std::size_t> controls;

  [[nodiscard]] bool empty() const { return cases.empty() && controls.empty(); }
};

/// Cases: intervals ending in an event at t. Controls: subjects observed
/// beyond t, represented by the interval with start < t <= stop. A subject
/// whose follow-up ends censored at exactly t is in neither set; a split at
/// t (new measurement) keeps the subject as a control.
[[nodiscard]] RiskSet risk_set_at(const Cohort& cohort, double t);

/// Re-baselines the cohort at index time s. Keeps subjects with an interval
/// start <= s < stop; each contributes one record with the marker and
/// covariates of that interval, follow-up shifted to start at 0.
[[nodiscard]] Cohort landmark_subset(const Cohort& cohort, double s);

/// PBC status coding: 0 censored, 1 transplant (censored), 2 death (event).
[[nodiscard]] int transplant_censor(int raw_status);

/// Baseline table row for build_counting_process.
struct BaselineRow {
  std::string subject_id;
  double follow_up = 0.0;
  int status = 0;
  std::vector<double> covariates;
};

/// Longitudinal measurement row. NaN covariates mean "not measured" and
/// keep the previous value.
struct MeasurementRow {
  std::string subject_id;
  double day = 0.0;
  std::vector<double> covariates;
  std::size_t source_line = 0;
};

struct CountingProcessReport {
  std::size_t subjects = 0;
  std::size_t events = 0;
  std::size_t records = 0;    // intervals + rejected measurement rows
  std::size_t intervals = 0;
  std::vector<std::string> rejected;  // one diagnostic per rejected row
};

/// Splits each subject's follow-up at its measurement days and carries the
/// last measurement forward. Both tables share `covariate_names`; the
/// baseline row supplies values before the first measurement and for
/// covariates a measurement leaves missing. `fixed_covariates` names
/// covariates that always keep their baseline value.
[[nodiscard]] Cohort build_counting_process(std::span<const BaselineRow> baseline,
                                            std::span<const MeasurementRow> longitudinal,
                                            const std::vector<std::string>& covariate_names,
                                            const std::vector<std::string>& fixed_covariates = {},
                                            CountingProcessReport* report = nullptr);

}  // namespace tdroc
