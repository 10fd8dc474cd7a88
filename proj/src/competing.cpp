#include "tdroc/competing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdroc/cox.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"

namespace tdroc {

double CifCurve::operator()(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

namespace {

struct LocalIncidence {
  std::vector<double> times;
  std::vector<double> cif;
  std::vector<double> surv;
};

// Aalen-Johansen over the members with weight > 0, evaluated at every
// distinct event time (any cause) up to `horizon`.
LocalIncidence local_incidence(std::span<const SurvivalRecord> records, std::span<const double> w,
                               int cause, double horizon) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (w[i] > 0.0) members.push_back(i);
  }
  if (members.empty()) throw EstimationError("empty neighbourhood around anchor");
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) { return records[a].time < records[b].time; });
  LocalIncidence out;
  double at_risk = 0.0;
  for (std::size_t i : members) at_risk += w[i];
  double surv = 1.0;
  double cif = 0.0;
  for (std::size_t k = 0; k < members.size();) {
    const double time = records[members[k]].time;
    if (time > horizon) break;
    double died = 0.0;
    double died_j = 0.0;
    double leaving = 0.0;
    for (; k < members.size() && records[members[k]].time == time; ++k) {
      const auto& r = records[members[k]];
      if (r.is_event()) died += w[members[k]];
      if (r.status == cause) died_j += w[members[k]];
      leaving += w[members[k]];
    }
    if (died > 0.0) {
      cif += surv * died_j / at_risk;
      surv *= 1.0 - died / at_risk;
      out.times.push_back(time);
      out.cif.push_back(cif);
      out.surv.push_back(surv);
    }
    at_risk -= leaving;
  }
  return out;
}

void require_cause(std::span<const SurvivalRecord> records, int cause, double horizon) {
  if (cause < 1) throw InputError("cause codes start at 1");
  const bool seen = std::any_of(records.begin(), records.end(), [&](const SurvivalRecord& r) {
    return r.status == cause && r.time <= horizon;
  });
  if (!seen) throw EstimationError("no events of cause " + std::to_string(cause));
}

}  // namespace

CifCurve cif_nne(std::span<const SurvivalRecord> records, double anchor, int cause,
                 const KernelSpec& kernel) {
  require_cause(records, cause, std::numeric_limits<double>::infinity());
  const auto w = nne_window(records, anchor, kernel);
  auto local = local_incidence(records, w, cause, std::numeric_limits<double>::infinity());
  CifCurve curve;
  curve.cause = cause;
  curve.anchor_marker = anchor;
  curve.times = std::move(local.times);
  curve.values = std::move(local.cif);
  curve.survival = std::move(local.surv);
  return curve;
}

RocCurve cd_accuracy_competing(std::span<const SurvivalRecord> records, int cause, double t,
                               const KernelSpec& kernel) {
  kernel.validate();
  require_cause(records, cause, t);
  const std::size_t n = records.size();

  // C_j(t|M_i) and S(t|M_i), computed once per distinct marker value
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].marker < records[b].marker; });
  std::vector<double> cif(n);
  std::vector<double> surv(n);
  for (std::size_t k = 0; k < n;) {
    const double m = records[order[k]].marker;
    const auto w = nne_window(records, m, kernel);
    const auto local = local_incidence(records, w, cause, t);
    const double c = local.cif.empty() ? 0.0 : local.cif.back();
    const double s = local.surv.empty() ? 1.0 : local.surv.back();
    for (; k < n && records[order[k]].marker == m; ++k) {
      cif[order[k]] = c;
      surv[order[k]] = s;
    }
  }
  const double cif_total = std::accumulate(cif.begin(), cif.end(), 0.0);
  const double surv_total = std::accumulate(surv.begin(), surv.end(), 0.0);
  if (!(cif_total > 0.0)) throw EstimationError("cumulative incidence is zero at the time point");
  if (!(surv_total > 0.0)) throw EstimationError("no estimated survivors at the time point");

  std::vector<RocPoint> points;
  double cif_above = 0.0;
  double surv_above = 0.0;
  for (std::size_t k = n; k > 0;) {
    const double c = records[order[k - 1]].marker;
    points.push_back({surv_above / surv_total, cif_above / cif_total, c});
    for (; k > 0 && records[order[k - 1]].marker == c; --k) {
      cif_above += cif[order[k - 1]];
      surv_above += surv[order[k - 1]];
    }
  }
  points.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
  return finish_roc(std::move(points));
}

CompetingIdResult id_accuracy_competing(const Cohort& cohort, int cause, double t, MarkerMode mode) {
  if (cause < 1) throw InputError("cause codes start at 1");
  const Cohort source = cohort.view(mode);
  CoxData data = make_cox_data(source, ModelSpec::marker_only(), cause);
  const CoxFit fit = fit_cox(data);
  CompetingIdResult res;
  res.gamma = fit.coefficients[0];
  res.roc = cox_id_accuracy(source, res.gamma, t, MarkerMode::updated);
  return res;
}

}  // namespace tdroc
