#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdroc/cox.hpp"
#include "tdroc/io.hpp"
#include "tdroc/resampling.hpp"
#include "tdroc/series.hpp"

namespace tdroc {

/// PBC analysis settings; times in years.
struct CaseStudyOptions {
  int folds = 10;
  std::uint64_t seed = 49;
  double lambda_auc = 0.2;
  bool cv_bandwidth = false;  // choose each row's AUC I/D span by bandwidth_cv
  double lambda_tpr = 0.3;
  double fpf = 0.1;
  double tau_years = 10.0;
  std::vector<double> landmarks_years{1.0, 4.0, 6.0};
  double window_years = 1.0;
  std::size_t nboot = 500;  // 0 skips the bootstrap
  unsigned threads = 0;
  std::optional<double> cd_span;
  CoxOptions cox;
};

struct ScoredCohorts {
  ModelSpec spec;
  CoxFit full_fit;  // fit on all baseline rows, used for updated scores
  Cohort baseline;  // one row per subject, cross-validated score as marker
  Cohort updated;   // intervals scored with their own covariates
};

[[nodiscard]] ScoredCohorts score_pbc(const PbcData& data, const ModelSpec& spec, int folds,
                                      std::uint64_t seed, const CoxOptions& cox = {});

struct CaseStudyRow {
  std::string model;
  MarkerMode mode = MarkerMode::baseline;
  std::vector<BootstrapResult> id_auc;  // one per landmark
  BootstrapResult cindex;
  std::vector<BootstrapResult> cd_auc;  // one per landmark
  double id_span = 0.0;                 // span used for AUC I/D
  AccuracySeries id_series;             // smoothed mean rank
  AccuracySeries tpr_series;            // sensitivity at the fixed FPF
};

struct CaseStudyResult {
  std::vector<CaseStudyRow> rows;  // 4-cov/5-cov x baseline/updated
  BootstrapResult cindex_difference;  // 5-cov minus 4-cov, baseline scores
  std::vector<ScoredCohorts> scores;  // four_covariate, five_covariate
};

/// Statistics of one scored cohort in a fixed order: AUC I/D at each
/// landmark, c-index, AUC C/D at each landmark (NaN where undefined).
[[nodiscard]] std::vector<double> case_study_statistics(const Cohort& cohort, MarkerMode mode,
                                                        const CaseStudyOptions& opt);

[[nodiscard]] CaseStudyResult run_case_study(const PbcData& data, const CaseStudyOptions& opt);

}  // namespace tdroc
