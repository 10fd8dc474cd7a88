#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tdroc/competing.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"
#include "tdroc/cd_roc.hpp"
#include "tdroc/cox.hpp"
#include "tdroc/simulate.hpp"

using namespace tdroc;

namespace {

std::vector<SurvivalRecord> two_cause(std::uint64_t seed, std::size_t n, CensoringKind cens, double g2 = 0.0) {
  ScenarioSpec s;
  s.n = n;
  s.seed = seed;
  s.causes = {HazardSpec{1.0, 1.0, {}, 0.0}, HazardSpec{g2, 1.0, {}, 0.0}};
  s.censoring = cens;
  return generate(s).subject_records();
}

}  // namespace

TEST_CASE("single cause: CIF is one minus the local survival") {
  Rng rng(71);
  const auto r = oracle::random_records(rng, 50, true, true);
  for (const auto& a : r) {
    const CifCurve cif = cif_nne(r, a.marker, 1, KernelSpec{0.2});
    const StepCurve km = conditional_km_nne(r, a.marker, KernelSpec{0.2});
    for (double t : km.times) CHECK(std::fabs(cif(t) - (1.0 - km(t))) < 1e-12);
  }
}

TEST_CASE("two causes, complete data, wide window: counting fractions") {
  const auto r = two_cause(72, 9, CensoringKind::none);
  // median-ranked anchor with span 0.45 covers all nine subjects
  std::vector<double> m;
  for (const auto& x : r) m.push_back(x.marker);
  std::sort(m.begin(), m.end());
  for (int cause : {1, 2}) {
    bool any = false;
    for (const auto& x : r) any = any || x.status == cause;
    if (!any) continue;
    const CifCurve cif = cif_nne(r, m[4], cause, KernelSpec{0.45});
    for (const auto& x : r) {
      double failed = 0;
      for (const auto& y : r) failed += y.status == cause && y.time <= x.time;
      CHECK(cif(x.time) == doctest::Approx(failed / 9.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("CIFs and survival add to one; late cause is zero early") {
  const auto r = two_cause(73, 200, CensoringKind::independent);
  for (std::size_t a = 0; a < r.size(); a += 17) {
    const CifCurve c1 = cif_nne(r, r[a].marker, 1, KernelSpec{0.1});
    const CifCurve c2 = cif_nne(r, r[a].marker, 2, KernelSpec{0.1});
    const StepCurve s = conditional_km_nne(r, r[a].marker, KernelSpec{0.1});
    for (double t : s.times) CHECK(std::fabs(c1(t) + c2(t) + s(t) - 1.0) < 1e-9);
    for (std::size_t k = 1; k < c1.values.size(); ++k) CHECK(c1.values[k] >= c1.values[k - 1]);
  }
  std::vector<SurvivalRecord> late{{50, 1, 1}, {150, 2, 2}, {120, 1, 3}, {200, 0, 4}, {300, 2, 5}};
  const CifCurve c2 = cif_nne(late, 3, 2, KernelSpec{0.45});
  CHECK(c2(99) == 0.0);
  CHECK_THROWS_AS((void)cif_nne(late, 3, 3, KernelSpec{0.45}), EstimationError);
}

TEST_CASE("competing C/D: single cause reduces; marker predictive of cause 1 only") {
  Rng rng(74);
  const auto r = oracle::random_records(rng, 60, false, false);
  std::vector<double> t;
  for (const auto& x : r) t.push_back(x.time);
  std::sort(t.begin(), t.end());
  const RocCurve a = cd_accuracy_competing(r, 1, t[30], KernelSpec{0.1});
  const RocCurve b = cd_roc_nne(r, t[30], KernelSpec{0.1});
  CHECK(a.auc == doctest::Approx(b.auc).epsilon(1e-9));

  const auto sim = two_cause(75, 3000, CensoringKind::independent);
  const double tm = 0.4;
  const KernelSpec k{default_cd_span(sim.size())};
  // truth from tests/oracles/competing_truth.py. Cause 2 ignores M, yet its
  // case/survivor odds still grow with the all-cause hazard, so it is a
  // little above 1/2.
  CHECK(std::fabs(cd_accuracy_competing(sim, 1, tm, k).auc - 0.795001) < 0.03);
  CHECK(std::fabs(cd_accuracy_competing(sim, 2, tm, k).auc - 0.558190) < 0.03);
  std::vector<SurvivalRecord> only1{{1, 1, 1}, {2, 1, 2}, {5, 0, 3}};
  CHECK_THROWS_AS((void)cd_accuracy_competing(only1, 2, 3, KernelSpec{0.3}), EstimationError);
}

TEST_CASE("competing I/D") {
  const auto rec = two_cause(76, 3000, CensoringKind::none);
  const Cohort c = oracle::to_cohort(rec);
  const double t = 0.3;
  const auto res = id_accuracy_competing(c, 1, t, MarkerMode::baseline);
  CHECK(std::fabs(res.gamma - 1.0) < 0.1);
  // same as the single-cause run with cause 2 recoded as censored
  std::vector<SurvivalRecord> censored = rec;
  for (auto& x : censored) x.status = x.status == 1 ? 1 : 0;
  const Cohort c1 = oracle::to_cohort(censored);
  const CoxFit fit = fit_cox(c1, ModelSpec::marker_only());
  CHECK(res.gamma == doctest::Approx(fit.coefficients[0]).epsilon(1e-9));
  const RocCurve single = cox_id_accuracy(c1, fit.coefficients[0], t, MarkerMode::baseline);
  CHECK(std::fabs(res.roc.auc - single.auc) < 0.03);
  const auto null = id_accuracy_competing(c, 2, t, MarkerMode::baseline);
  CHECK(std::fabs(null.gamma) < 0.1);
}
