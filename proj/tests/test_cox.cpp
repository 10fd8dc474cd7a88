#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tdroc/cox.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"
#include "tdroc/io.hpp"
#include "tdroc/simulate.hpp"

using namespace tdroc;

namespace {

CoxData one_covariate(const std::vector<double>& time, const std::vector<int>& event, const std::vector<double>& x) {
  CoxData d;
  d.names = {"x"};
  d.start.assign(time.size(), 0.0);
  d.stop = time;
  d.event = event;
  d.x.resize(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) d.x(static_cast<Eigen::Index>(i), 0) = x[i];
  return d;
}

const PbcData& pbc() {
  static const PbcData data =
      load_pbc(std::string(TDROC_DATA_DIR) + "/pbc.csv", std::string(TDROC_DATA_DIR) + "/pbcseq.csv");
  return data;
}

}  // namespace

TEST_CASE("six-subject fit matches a grid search of the partial likelihood") {
  const std::vector<double> time{1, 2, 2, 4, 5, 7};
  const std::vector<int> event{1, 1, 0, 1, 0, 1};
  const std::vector<double> x{1.2, 0.3, -0.4, 0.8, -1.0, -0.2};
  const CoxData d = one_covariate(time, event, x);
  const CoxFit fit = fit_cox(d);
  REQUIRE(fit.converged);
  CHECK(fit.score_norm < 1e-8);
  // grid on [-5, 5] with step 1e-4
  double best = -5, fbest = -INFINITY;
  for (int k = 0; k <= 100000; ++k) {
    const double b = -5.0 + 1e-4 * k;
    const double v = oracle::cox_loglik_1d(d.start, d.stop, d.event, x, b);
    if (v > fbest) {
      fbest = v;
      best = b;
    }
  }
  CHECK(std::fabs(fit.coefficients[0] - best) < 1e-3);
  CHECK(fit.log_partial_likelihood == doctest::Approx(fbest).epsilon(1e-6));
  CHECK(fit.log_partial_likelihood >= fit.log_partial_likelihood_null);
}

TEST_CASE("partial likelihood agrees with the direct formula, Efron ties") {
  Rng rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> t, x;
    std::vector<int> e;
    for (int i = 0; i < 20; ++i) {
      t.push_back(1.0 + static_cast<double>(rng.below(6)));
      e.push_back(rng.uniform() < 0.7);
      x.push_back(rng.normal());
    }
    const CoxData d = one_covariate(t, e, x);
    Eigen::VectorXd b(1);
    b(0) = 0.4;
    CHECK(cox_partial_likelihood(d, b).loglik == doctest::Approx(oracle::cox_loglik_1d(d.start, d.stop, d.event, x, 0.4)).epsilon(1e-12));
  }
}

TEST_CASE("null marker: estimate within three standard errors of zero") {
  ScenarioSpec s;
  s.n = 2000;
  s.seed = 62;
  s.causes[0].gamma = 0.0;
  s.censoring = CensoringKind::independent;
  const CoxFit fit = fit_cox(generate(s), ModelSpec::marker_only());
  CHECK(std::fabs(fit.coefficients[0]) < 3 * fit.std_errors[0]);
}

TEST_CASE("errors: no events, collinear terms") {
  CHECK_THROWS_AS((void)fit_cox(one_covariate({1, 2}, {0, 0}, {1, 2})), EstimationError);
  CoxData d = one_covariate({1, 2, 3, 4}, {1, 1, 0, 1}, {1, 2, 3, 5});
  d.names = {"a", "b"};
  d.x.conservativeResize(4, 2);
  d.x.col(1) = 2.0 * d.x.col(0);
  try {
    (void)fit_cox(d);
    FAIL("expected a collinearity error");
  } catch (const EstimationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('a') != std::string::npos);
    CHECK(msg.find('b') != std::string::npos);
  }
}

TEST_CASE("PBC five-covariate fit: signs and tie rules") {
  const CoxFit fit = fit_cox(pbc().baseline, ModelSpec::five_covariate());
  REQUIRE(fit.converged);
  REQUIRE(fit.terms == std::vector<std::string>{"log(bili)", "albumin", "log(protime)", "edema", "age"});
  CHECK(fit.coefficients[0] > 0);
  CHECK(fit.coefficients[1] < 0);
  CHECK(fit.coefficients[2] > 0);
  CHECK(fit.coefficients[3] > 0);
  CHECK(fit.coefficients[4] > 0);
  for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1]);
  CoxOptions br;
  br.ties = TieMethod::breslow;
  const CoxFit b = fit_cox(pbc().baseline, ModelSpec::five_covariate(), br);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::fabs(b.coefficients[k] - fit.coefficients[k]) < 0.05 * std::fabs(fit.coefficients[k]) + 1e-3);
}

TEST_CASE("predict_risk") {
  const CoxFit fit = fit_cox(pbc().baseline, ModelSpec::five_covariate());
  std::map<std::string, double> at_mean{{"bili", std::exp(fit.centers[0])}, {"albumin", fit.centers[1]},
                                        {"protime", std::exp(fit.centers[2])}, {"edema", fit.centers[3]},
                                        {"age", fit.centers[4]}};
  CHECK(predict_risk(fit, at_mean) == doctest::Approx(1.0).epsilon(1e-12));
  auto plus = at_mean;
  plus["albumin"] += 1.0;
  CHECK(predict_risk(fit, plus) == doctest::Approx(std::exp(fit.coefficients[1])).epsilon(1e-12));
  auto missing = at_mean;
  missing.erase("age");
  CHECK_THROWS_AS((void)predict_risk(fit, missing), InputError);
  auto bad = at_mean;
  bad["bili"] = 0.0;
  CHECK_THROWS_AS((void)predict_risk(fit, bad), InputError);
}

TEST_CASE("folds and cross-validated scores") {
  const auto f = assign_folds(23, 5, 9);
  std::vector<int> sizes(5, 0);
  for (int k : f) ++sizes[static_cast<std::size_t>(k)];
  for (int s : sizes) CHECK(s >= 4);
  CHECK(assign_folds(23, 5, 9) == f);
  CHECK_THROWS_AS((void)assign_folds(3, 5, 1), InputError);
  CHECK_THROWS_AS((void)assign_folds(3, 1, 1), InputError);

  const Cohort& base = pbc().baseline;
  const auto a = kfold_cv_scores(base, ModelSpec::five_covariate(), 10, 3);
  CHECK(a == kfold_cv_scores(base, ModelSpec::five_covariate(), 10, 3));
  CHECK(a != kfold_cv_scores(base, ModelSpec::five_covariate(), 10, 4));

  // leave-one-out on ten subjects: ten distinct training fits
  ScenarioSpec s;
  s.n = 10;
  s.seed = 63;
  const Cohort small = generate(s);
  const auto loo = kfold_cv_scores(small, ModelSpec::marker_only(), 10, 1);
  CHECK(std::set<double>(loo.begin(), loo.end()).size() == 10);
}

TEST_CASE("updated scores follow the covariates") {
  const CoxFit fit = fit_cox(pbc().baseline, ModelSpec::five_covariate());
  const Cohort scored = time_varying_scores(pbc().sequential, fit);
  const auto bili = *scored.covariate_index("bili");
  const auto alb = *scored.covariate_index("albumin");
  const auto pro = *scored.covariate_index("protime");
  const auto ed = *scored.covariate_index("edema");
  for (std::size_t k = 0; k < scored.subject_count(); ++k) {
    const auto ch = scored.subject(k);
    for (std::size_t j = 1; j < ch.size(); ++j) {
      const auto& a = ch[j - 1].covariates;
      const auto& b = ch[j].covariates;
      const bool same_rest = a[alb] == b[alb] && a[pro] == b[pro] && a[ed] == b[ed];
      if (same_rest && a[bili] == b[bili]) CHECK(ch[j].marker == ch[j - 1].marker);
      if (same_rest && b[bili] > a[bili]) CHECK(ch[j].marker > ch[j - 1].marker);
    }
  }
}

TEST_CASE("adding a constant to a covariate leaves rank-based accuracy unchanged") {
  const Cohort& base = pbc().baseline;
  std::vector<Interval> shifted(base.intervals().begin(), base.intervals().end());
  const auto age = *base.covariate_index("age");
  for (auto& iv : shifted) iv.covariates[age] += 10.0;
  const Cohort moved(std::move(shifted), base.covariate_names(), base.time_unit());
  const CoxFit f1 = fit_cox(base, ModelSpec::five_covariate());
  const CoxFit f2 = fit_cox(moved, ModelSpec::five_covariate());
  const Cohort s1 = base.with_markers(predict_risk(f1, base));
  const Cohort s2 = moved.with_markers(predict_risk(f2, moved));
  const double tau = 10 * kDaysPerYear;
  CHECK(c_index(s1, MarkerMode::baseline, tau).value ==
        doctest::Approx(c_index(s2, MarkerMode::baseline, tau).value).epsilon(1e-12));
}

TEST_CASE("model spec terms") {
  ModelTerm t{"bili", Transform::log};
  CHECK(t.label() == "log(bili)");
  CHECK(t.apply(std::exp(2.0)) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)t.apply(-1.0), InputError);
  CHECK(ModelSpec::four_covariate().terms.size() == 4);
}
