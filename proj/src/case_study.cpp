#include "tdroc/case_study.hpp"

#include <cmath>

#include "tdroc/cd_roc.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"

namespace tdroc {

ScoredCohorts score_pbc(const PbcData& data, const ModelSpec& spec, int folds, std::uint64_t seed,
                        const CoxOptions& cox) {
  ScoredCohorts out;
  out.spec = spec;
  out.full_fit = fit_cox(data.baseline, spec, cox);
  out.baseline = data.baseline.with_markers(kfold_cv_scores(data.baseline, spec, folds, seed, cox));
  out.updated = time_varying_scores(data.sequential, out.full_fit);
  return out;
}

std::vector<double> case_study_statistics(const Cohort& cohort, MarkerMode mode,
                                          const CaseStudyOptions& opt) {
  const double unit = cohort.time_unit();
  std::vector<double> out;
  const auto smooth = wmr_smooth(mean_rank(cohort, mode), KernelSpec{opt.lambda_auc});
  for (double s : opt.landmarks_years) out.push_back(smooth.smoothed_at(s * unit));
  double c = kNaN;
  try {
    c = c_index(cohort, mode, opt.tau_years * unit).value;
  } catch (const EstimationError&) {
  }
  out.push_back(c);
  std::vector<double> index_times;
  for (double s : opt.landmarks_years) index_times.push_back(s * unit);
  std::optional<KernelSpec> k;
  if (opt.cd_span) k = KernelSpec{*opt.cd_span};
  const auto cd = sequential_cd_auc(cohort, index_times, opt.window_years * unit, k, mode);
  for (const auto& p : cd.points) out.push_back(p.defined ? p.raw : kNaN);
  return out;
}

namespace {

BootstrapResult point_only(double v) {
  BootstrapResult r;
  r.point = v;
  return r;
}

}  // namespace

CaseStudyResult run_case_study(const PbcData& data, const CaseStudyOptions& opt) {
  CaseStudyResult res;
  res.scores.push_back(score_pbc(data, ModelSpec::four_covariate(), opt.folds, opt.seed, opt.cox));
  res.scores.push_back(score_pbc(data, ModelSpec::five_covariate(), opt.folds, opt.seed, opt.cox));
  const std::size_t L = opt.landmarks_years.size();

  for (MarkerMode mode : {MarkerMode::baseline, MarkerMode::updated}) {
    for (const auto& sc : res.scores) {
      const Cohort& cohort = mode == MarkerMode::baseline ? sc.baseline : sc.updated;
      CaseStudyRow row;
      row.model = sc.spec.name;
      row.mode = mode;
      CaseStudyOptions row_opt = opt;
      if (opt.cv_bandwidth) {
        const auto grid = default_bandwidth_grid();
        row_opt.lambda_auc = bandwidth_cv(mean_rank(cohort, mode), grid);
      }
      row.id_span = row_opt.lambda_auc;
      std::vector<BootstrapResult> stats;
      if (opt.nboot > 0) {
        stats = bootstrap_many(
            cohort, [&](const Cohort& c) { return case_study_statistics(c, mode, row_opt); }, opt.nboot,
            opt.seed, opt.threads);
      } else {
        for (double v : case_study_statistics(cohort, mode, row_opt)) stats.push_back(point_only(v));
      }
      row.id_auc.assign(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(L));
      row.cindex = stats[L];
      row.cd_auc.assign(stats.begin() + static_cast<std::ptrdiff_t>(L) + 1, stats.end());
      row.id_series = wmr_smooth(mean_rank(cohort, mode), KernelSpec{row_opt.lambda_auc});
      row.tpr_series = dynamic_tpr(cohort, opt.fpf, mode, KernelSpec{opt.lambda_tpr});
      res.rows.push_back(std::move(row));
    }
  }

  const Cohort& five = res.scores[1].baseline;
  const Cohort& four = res.scores[0].baseline;
  std::vector<double> a(five.interval_count());
  std::vector<double> b(four.interval_count());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = five.interval(i).marker;
    b[i] = four.interval(i).marker;
  }
  const double tau = opt.tau_years * five.time_unit();
  if (opt.nboot > 0) {
    res.cindex_difference =
        cindex_difference_ci(five, a, b, tau, MarkerMode::baseline, opt.nboot, opt.seed, opt.threads);
  } else {
    res.cindex_difference = point_only(c_index(five, MarkerMode::baseline, tau).value -
                                       c_index(four, MarkerMode::baseline, tau).value);
  }
  return res;
}

}  // namespace tdroc
