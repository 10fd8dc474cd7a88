#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdroc/cohort.hpp"

namespace tdroc {

enum class Transform { identity, log };

struct ModelTerm {
  std::string covariate;
  Transform transform = Transform::identity;

  [[nodiscard]] std::string label() const;
  /// Transformed value; throws InputError for log of a non-positive value.
  [[nodiscard]] double apply(double x) const;
};

struct ModelSpec {
  std::string name = "custom";
  std::vector<ModelTerm> terms;

  /// log(bili), albumin, log(protime), edema, age.
  static ModelSpec five_covariate();
  /// five_covariate without log(bili).
  static ModelSpec four_covariate();
  /// The marker column as the only term.
  static ModelSpec marker_only();
};

struct CoxFit {
  std::vector<std::string> terms;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> centers;  // covariate means of the training rows
  Eigen::MatrixXd information;  // observed information at the optimum
  double log_partial_likelihood = 0.0;
  double log_partial_likelihood_null = 0.0;
  double score_norm = 0.0;  // max |score| at the optimum
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;  // one entry per accepted iterate
  ModelSpec spec;
};

enum class TieMethod { efron, breslow };

struct CoxOptions {
  TieMethod ties = TieMethod::efron;
  int max_iterations = 50;
  double tolerance = 1e-8;  // on the Newton decrement U' I^-1 U
};

/// Counting-process data in design-matrix form.
struct CoxData {
  std::vector<double> start;
  std::vector<double> stop;
  std::vector<int> event;  // 0/1
  Eigen::MatrixXd x;       // rows aligned with start/stop
  std::vector<std::string> names;
};

/// Builds the design for `spec` from the cohort's intervals. `event_cause`
/// 0 treats every cause as an event; otherwise only that cause counts and
/// other causes are censored.
[[nodiscard]] CoxData make_cox_data(const Cohort& cohort, const ModelSpec& spec, int event_cause = 0);

struct PartialLikelihood {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd information;
};

/// Log partial likelihood, score and observed information at beta.
[[nodiscard]] PartialLikelihood cox_partial_likelihood(const CoxData& data,
                                                       const Eigen::VectorXd& beta,
                                                       TieMethod ties = TieMethod::efron);

/// Maximum partial likelihood fit by Newton-Raphson with step halving.
/// Throws EstimationError when there are no events or the design is
/// collinear (naming the offending terms). Non-convergence is reported via
/// `converged == false`.
[[nodiscard]] CoxFit fit_cox(const CoxData& data, const CoxOptions& options = {});
[[nodiscard]] CoxFit fit_cox(const Cohort& cohort, const ModelSpec& spec,
                             const CoxOptions& options = {});

/// exp(sum_k (term_k(x) - center_k) * beta_k). Throws InputError on a
/// missing covariate or an invalid log argument.
[[nodiscard]] double predict_risk(const CoxFit& fit, const std::map<std::string, double>& covariates);

/// predict_risk for every interval of the cohort (covariates by name).
[[nodiscard]] std::vector<double> predict_risk(const CoxFit& fit, const Cohort& cohort);

/// Fold label per subject: a seeded random permutation dealt round-robin,
/// so every fold is non-empty whenever k <= n.
[[nodiscard]] std::vector<int> assign_folds(std::size_t n, int k, std::uint64_t seed);

/// Cross-validated risk score per subject of a baseline cohort, each
/// predicted from the model fit on the other folds.
[[nodiscard]] std::vector<double> kfold_cv_scores(const Cohort& baseline_cohort, const ModelSpec& spec,
                                                  int k, std::uint64_t seed,
                                                  const CoxOptions& options = {});

/// Fits on the cohort's baseline rows and scores every interval with its
/// own covariates.
[[nodiscard]] Cohort time_varying_scores(const Cohort& cohort, const CoxFit& fit_on_baseline);

}  // namespace tdroc
