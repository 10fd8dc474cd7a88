#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "tdroc/cohort.hpp"
#include "tdroc/error.hpp"
#include "tdroc/io.hpp"

using namespace tdroc;

namespace {

Interval iv(const std::string& id, double a, double b, int st, double m) { return {id, a, b, st, m, {}}; }

const PbcData& pbc() {
  static const PbcData data =
      load_pbc(std::string(TDROC_DATA_DIR) + "/pbc.csv", std::string(TDROC_DATA_DIR) + "/pbcseq.csv");
  return data;
}

// (start, stop, status, bili, albumin, protime, edema) from
// tests/oracles/pbc_merge_oracle.py
struct Row {
  double start, stop;
  int status;
  double bili, albumin, protime, edema;
};

void check_chain(const std::string& id, const std::vector<Row>& want) {
  const Cohort& c = pbc().sequential;
  std::vector<Interval> got;
  for (const auto& x : c.intervals()) {
    if (x.subject_id == id) got.push_back(x);
  }
  REQUIRE(got.size() == want.size());
  const auto bili = *c.covariate_index("bili");
  const auto alb = *c.covariate_index("albumin");
  const auto pro = *c.covariate_index("protime");
  const auto ed = *c.covariate_index("edema");
  for (std::size_t k = 0; k < want.size(); ++k) {
    CHECK(got[k].start == want[k].start);
    CHECK(got[k].stop == want[k].stop);
    CHECK(got[k].status == want[k].status);
    CHECK(got[k].covariates[bili] == want[k].bili);
    CHECK(got[k].covariates[alb] == want[k].albumin);
    CHECK(got[k].covariates[pro] == want[k].protime);
    CHECK(got[k].covariates[ed] == want[k].edema);
  }
}

}  // namespace

TEST_CASE("cohort rejects broken chains") {
  CHECK_THROWS_AS(Cohort({iv("a", 0, 0, 0, 1)}, {}), InputError);
  CHECK_THROWS_AS(Cohort({iv("a", 0, 5, 0, 1), iv("a", 6, 8, 1, 1)}, {}), InputError);
  CHECK_THROWS_AS(Cohort({iv("a", 0, 5, 1, 1), iv("a", 5, 8, 0, 1)}, {}), InputError);
  CHECK_THROWS_AS(Cohort({iv("a", 0, 5, 0, 1)}, {}, 0.0), InputError);
  CHECK_NOTHROW(Cohort({iv("a", 5, 8, 1, 2), iv("a", 0, 5, 0, 1)}, {}));
}

TEST_CASE("risk set: three subjects") {
  const Cohort c({iv("1", 0, 5, 1, 1), iv("2", 0, 8, 1, 2), iv("3", 0, 10, 0, 3)}, {});
  const RiskSet rs = risk_set_at(c, 8);
  REQUIRE(rs.cases.size() == 1);
  CHECK(c.interval(rs.cases[0]).subject_id == "2");
  REQUIRE(rs.controls.size() == 1);
  CHECK(c.interval(rs.controls[0]).subject_id == "3");
  CHECK(risk_set_at(c, 11).empty());
}

TEST_CASE("risk set: censoring at t excluded, split at t kept") {
  const Cohort c({iv("1", 0, 4, 1, 1), iv("2", 0, 4, 0, 2), iv("3", 0, 4, 0, 3), iv("3", 4, 9, 0, 4)}, {});
  const RiskSet rs = risk_set_at(c, 4);
  CHECK(rs.cases.size() == 1);
  REQUIRE(rs.controls.size() == 1);
  CHECK(c.interval(rs.controls[0]).marker == 3);
}

TEST_CASE("risk set invariants on PBC match a linear scan") {
  const Cohort& c = pbc().sequential;
  for (double t : {365.0, 1000.0, 2000.0, 3650.0}) {
    const RiskSet rs = risk_set_at(c, t);
    std::size_t cases = 0;
    std::size_t controls = 0;
    for (std::size_t k = 0; k < c.subject_count(); ++k) {
      const auto ch = c.subject(k);
      if (ch.back().stop == t && ch.back().is_event()) ++cases;
      if (ch.back().stop > t && ch.front().start < t) ++controls;
    }
    CHECK(rs.cases.size() == cases);
    CHECK(rs.controls.size() == controls);
    for (std::size_t i : rs.cases) CHECK(std::find(rs.controls.begin(), rs.controls.end(), i) == rs.controls.end());
    for (std::size_t i : rs.controls) {
      CHECK(c.interval(i).start < t);
      CHECK(t <= c.interval(i).stop);
    }
  }
}

TEST_CASE("landmark subset") {
  const Cohort base({iv("1", 0, 100, 0, 1), iv("2", 0, 300, 1, 2), iv("3", 0, 50, 1, 3)}, {});
  const Cohort same = landmark_subset(base, 0);
  REQUIRE(same.interval_count() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same.interval(i).stop == base.interval(i).stop);
    CHECK(same.interval(i).marker == base.interval(i).marker);
  }
  const Cohort at200 = landmark_subset(base, 200);
  REQUIRE(at200.interval_count() == 1);
  CHECK(at200.interval(0).subject_id == "2");
  CHECK(at200.interval(0).stop == 100);
  CHECK(at200.interval(0).status == 1);

  // marker in force at s
  const Cohort tv({iv("a", 0, 10, 0, 1), iv("a", 10, 30, 1, 5)}, {});
  CHECK(landmark_subset(tv, 10).interval(0).marker == 5);
  CHECK(landmark_subset(tv, 9.5).interval(0).marker == 1);
  CHECK(landmark_subset(tv, 30).interval_count() == 0);
}

TEST_CASE("landmark at 4 years on PBC matches a filter count") {
  const Cohort& c = pbc().sequential;
  const double s = 4 * kDaysPerYear;
  std::size_t expected = 0;
  for (std::size_t k = 0; k < c.subject_count(); ++k) expected += c.subject(k).back().stop > s;
  CHECK(landmark_subset(c, s).subject_count() == expected);
}

TEST_CASE("landmark at 0 then risk set equals risk set of the baseline cohort") {
  const Cohort& c = pbc().baseline;
  const Cohort lm = landmark_subset(c, 0);
  for (double t : {400.0, 1500.0}) {
    CHECK(risk_set_at(lm, t).cases == risk_set_at(c, t).cases);
    CHECK(risk_set_at(lm, t).controls == risk_set_at(c, t).controls);
  }
}

TEST_CASE("transplant censoring") {
  CHECK(transplant_censor(0) == 0);
  CHECK(transplant_censor(1) == 0);
  CHECK(transplant_censor(2) == 1);
  CHECK_THROWS_AS((void)transplant_censor(3), InputError);
}

TEST_CASE("counting process from baseline and visits") {
  const std::vector<BaselineRow> base{{"a", 65, 1, {10}}, {"b", 40, 0, {7}}};
  const std::vector<MeasurementRow> visits{{"a", 0, {11}, 2},  {"a", 25, {12}, 3}, {"a", 58, {13}, 4},
                                           {"a", 70, {14}, 5}, {"a", 25, {15}, 6}};
  CountingProcessReport rep;
  const Cohort c = build_counting_process(base, visits, {"m"}, {}, &rep);
  REQUIRE(c.interval_count() == 4);
  CHECK(c.interval(0).stop == 25);
  CHECK(c.interval(0).covariates[0] == 11);
  CHECK(c.interval(1).covariates[0] == 12);
  CHECK(c.interval(2).start == 58);
  CHECK(c.interval(2).stop == 65);
  CHECK(c.interval(2).status == 1);
  CHECK(c.interval(3).subject_id == "b");
  CHECK(c.interval(3).covariates[0] == 7);
  CHECK(rep.rejected.size() == 2);  // day 70 after follow-up, duplicate day 25
  CHECK(rep.records == 6);

  // missing values are carried forward; fixed covariates never change
  const std::vector<BaselineRow> b2{{"x", 50, 0, {1, 100}}};
  const std::vector<MeasurementRow> v2{{"x", 10, {kNaN, 200}, 1}, {"x", 20, {3, kNaN}, 2}};
  const Cohort c2 = build_counting_process(b2, v2, {"lab", "other"}, {"other"});
  REQUIRE(c2.interval_count() == 3);
  CHECK(c2.interval(1).covariates[0] == 1);
  CHECK(c2.interval(2).covariates[0] == 3);
  for (const auto& x : c2.intervals()) CHECK(x.covariates[1] == 100);
}

TEST_CASE("PBC cohort reproduces the baseline table and the frozen chains") {
  const auto& d = pbc();
  CHECK(d.report.subjects == 312);
  CHECK(d.report.events == 125);
  CHECK(d.report.records == 1945);
  CHECK(d.report.intervals == 1807);
  const auto flat = d.sequential.subject_records();
  const auto base = d.baseline.subject_records();
  REQUIRE(flat.size() == base.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    CHECK(flat[i].time == base[i].time);
    CHECK(flat[i].status == base[i].status);
  }
  check_chain("1", {{0, 192, 0, 14.5, 2.6, 12.2, 1}, {192, 400, 1, 21.3, 2.94, 11.2, 1}});
  check_chain("2", {{0, 182, 0, 1.1, 4.14, 10.6, 0},
                    {182, 365, 0, 0.8, 3.6, 11.0, 0},
                    {365, 768, 0, 1.0, 3.55, 11.6, 0},
                    {768, 1790, 0, 1.9, 3.92, 10.6, 0},
                    {1790, 2151, 0, 2.6, 3.32, 11.3, 0.5},
                    {2151, 2515, 0, 3.6, 2.92, 11.5, 1},
                    {2515, 2882, 0, 4.2, 2.73, 11.5, 1},
                    {2882, 3226, 0, 3.6, 2.8, 11.5, 1},
                    {3226, 4500, 0, 4.6, 2.67, 11.5, 1}});
  check_chain("5", {{0, 199, 0, 3.4, 3.53, 10.9, 0},
                    {199, 391, 0, 1.9, 3.28, 10.7, 0},
                    {391, 769, 0, 2.5, 3.34, 10.5, 0.5},
                    {769, 1098, 0, 5.7, 3.09, 11.4, 1},
                    {1098, 1455, 0, 5.2, 3.02, 11.3, 1},
                    {1455, 1504, 0, 19.0, 2.09, 13.9, 0.5}});
  // age is fixed at its baseline value along each chain
  const auto age = *d.sequential.covariate_index("age");
  for (std::size_t k = 0; k < d.sequential.subject_count(); ++k) {
    const auto ch = d.sequential.subject(k);
    for (const auto& x : ch) CHECK(x.covariates[age] == ch.front().covariates[age]);
  }
}
