#include "tdroc/cd_roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdroc/error.hpp"

namespace tdroc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_records(std::span<const SurvivalRecord> records, double t) {
  if (records.empty()) throw EstimationError("no subjects");
  bool has_case = false;
  bool has_control = false;
  for (const auto& r : records) {
    if (!std::isfinite(r.marker)) throw InputError("non-finite marker value");
    if (r.is_event() && r.time <= t) has_case = true;
    if (r.time > t) has_control = true;
  }
  if (!has_case) throw EstimationError("no events up to the prediction time");
  if (!has_control) throw EstimationError("no subjects followed beyond the prediction time");
}

// Product-limit value at t over the given members.
double km_value_at(std::vector<std::pair<double, int>>& members, double t) {
  std::sort(members.begin(), members.end());
  double at_risk = static_cast<double>(members.size());
  double surv = 1.0;
  for (std::size_t k = 0; k < members.size();) {
    const double time = members[k].first;
    if (time > t) break;
    double died = 0.0;
    double leaving = 0.0;
    for (; k < members.size() && members[k].first == time; ++k) {
      if (members[k].second > 0) died += 1.0;
      leaving += 1.0;
    }
    if (died > 0.0) surv *= 1.0 - died / at_risk;
    at_risk -= leaving;
  }
  return surv;
}

// Sorted-by-marker view of the records with their average ranks; windows
// of the percentile kernel are contiguous runs in this order.
struct MarkerOrder {
  std::vector<std::size_t> order;
  std::vector<double> rank;  // average rank, aligned with `order`
  std::vector<std::size_t> group_begin;  // start of each tie group in `order`

  explicit MarkerOrder(std::span<const SurvivalRecord> records) {
    const std::size_t n = records.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return records[a].marker < records[b].marker;
    });
    rank.resize(n);
    for (std::size_t k = 0; k < n;) {
      std::size_t j = k;
      while (j < n && records[order[j]].marker == records[order[k]].marker) ++j;
      group_begin.push_back(k);
      const double avg = 0.5 * static_cast<double>(k + 1 + j);
      for (std::size_t m = k; m < j; ++m) rank[m] = avg;
      k = j;
    }
    group_begin.push_back(n);
  }

  // [lo, hi) of members with |rank - center| < reach.
  std::pair<std::size_t, std::size_t> window(double center, double reach) const {
    auto lo = std::upper_bound(rank.begin(), rank.end(), center - reach);
    auto hi = std::lower_bound(rank.begin(), rank.end(), center + reach);
    return {static_cast<std::size_t>(lo - rank.begin()), static_cast<std::size_t>(hi - rank.begin())};
  }
};

}  // namespace

double default_cd_span(std::size_t n) {
  return 0.04 * std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> conditional_survival_at(std::span<const SurvivalRecord> records, double t,
                                            const KernelSpec& kernel) {
  kernel.validate();
  for (const auto& r : records) {
    if (!std::isfinite(r.marker)) throw InputError("non-finite marker value");
  }
  const MarkerOrder mo(records);
  const double reach = kernel.span * static_cast<double>(records.size());
  std::vector<double> out(records.size());
  std::vector<std::pair<double, int>> members;
  for (std::size_t g = 0; g + 1 < mo.group_begin.size(); ++g) {
    const std::size_t first = mo.group_begin[g];
    const auto [lo, hi] = mo.window(mo.rank[first], reach);
    members.clear();
    for (std::size_t k = lo; k < hi; ++k) {
      members.emplace_back(records[mo.order[k]].time, records[mo.order[k]].status);
    }
    const double s = km_value_at(members, t);
    for (std::size_t k = first; k < mo.group_begin[g + 1]; ++k) out[mo.order[k]] = s;
  }
  return out;
}

BivariateSurvival nne_bivariate_survival(std::span<const SurvivalRecord> records,
                                         std::span<const double> times, const KernelSpec& kernel) {
  BivariateSurvival out;
  std::vector<double> markers(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) markers[i] = records[i].marker;
  out.marker_grid = distinct_sorted(markers);
  out.times.assign(times.begin(), times.end());

  // conditional curves, one per distinct marker value
  std::vector<StepCurve> curves;
  curves.reserve(out.marker_grid.size());
  for (double m : out.marker_grid) curves.push_back(conditional_km_nne(records, m, kernel));

  const double n = static_cast<double>(records.size());
  for (double t : out.times) {
    std::vector<double> at_grid(out.marker_grid.size());
    for (std::size_t g = 0; g < at_grid.size(); ++g) at_grid[g] = curves[g](t);
    // mass of each grid value: count of subjects at that marker
    std::vector<double> contrib(out.marker_grid.size(), 0.0);
    for (double m : markers) {
      const auto g = static_cast<std::size_t>(
          std::lower_bound(out.marker_grid.begin(), out.marker_grid.end(), m) - out.marker_grid.begin());
      contrib[g] += at_grid[g] / n;
    }
    std::vector<double> row(out.marker_grid.size());
    double tail = 0.0;  // sum over markers strictly above grid[g]
    for (std::size_t g = out.marker_grid.size(); g-- > 0;) {
      row[g] = tail;
      tail += contrib[g];
    }
    out.marginal.push_back(tail);
    out.values.push_back(std::move(row));
  }
  return out;
}

RocCurve cd_roc_km(std::span<const SurvivalRecord> records, double t) {
  check_records(records, t);
  const std::size_t n = records.size();
  const double s_all = kaplan_meier(records)(t);
  if (s_all <= 0.0 || s_all >= 1.0) {
    throw EstimationError("Kaplan-Meier survival at the prediction time is 0 or 1");
  }

  std::vector<double> markers(n);
  for (std::size_t i = 0; i < n; ++i) markers[i] = records[i].marker;
  std::vector<RocPoint> points;
  points.push_back({1.0, 1.0, kNegInf});

  std::vector<SurvivalRecord> above;
  std::vector<SurvivalRecord> below;
  for (double c : distinct_sorted(markers)) {
    above.clear();
    below.clear();
    for (const auto& r : records) (r.marker > c ? above : below).push_back(r);
    const double f_c = static_cast<double>(below.size()) / static_cast<double>(n);
    const double surv_above = above.empty() ? 1.0 : kaplan_meier(above)(t);
    const double surv_below = below.empty() ? 1.0 : kaplan_meier(below)(t);
    const double tpf = (1.0 - surv_above) * (1.0 - f_c) / (1.0 - s_all);
    const double fpf = 1.0 - surv_below * f_c / s_all;
    points.push_back({fpf, tpf, c});
  }
  return finish_roc(std::move(points));
}

RocCurve cd_roc_nne(std::span<const SurvivalRecord> records, double t, const KernelSpec& kernel) {
  check_records(records, t);
  const std::size_t n = records.size();
  const auto s_cond = conditional_survival_at(records, t, kernel);

  const MarkerOrder mo(records);
  const double s_all = std::accumulate(s_cond.begin(), s_cond.end(), 0.0) / static_cast<double>(n);
  if (s_all <= 0.0 || s_all >= 1.0) {
    throw EstimationError("nearest-neighbour survival at the prediction time is 0 or 1");
  }

  // Walk thresholds from the top marker down: S(c,t) accumulates the
  // subjects strictly above c.
  std::vector<RocPoint> points;
  double s_above = 0.0;
  double n_above = 0.0;
  for (std::size_t g = mo.group_begin.size() - 1; g-- > 0;) {
    const double c = records[mo.order[mo.group_begin[g]]].marker;
    const double surv_joint = s_above / static_cast<double>(n);
    const double tail = n_above / static_cast<double>(n);
    points.push_back({surv_joint / s_all, (tail - surv_joint) / (1.0 - s_all), c});
    for (std::size_t k = mo.group_begin[g]; k < mo.group_begin[g + 1]; ++k) {
      s_above += s_cond[mo.order[k]];
      n_above += 1.0;
    }
  }
  points.push_back({1.0, 1.0, kNegInf});
  return finish_roc(std::move(points));
}

AccuracySeries sequential_cd_auc(const Cohort& cohort, std::span<const double> index_times,
                                 double window, std::optional<KernelSpec> kernel, MarkerMode mode) {
  if (!(window > 0.0)) throw InputError("window must be positive");
  if (kernel) kernel->validate();
  const Cohort source = cohort.view(mode);
  AccuracySeries series;
  for (double s : index_times) {
    if (s < 0.0) throw InputError("index times must be non-negative");
    AccuracyPoint pt;
    pt.time = s;
    const Cohort sub = landmark_subset(source, s);
    const auto records = sub.subject_records();
    for (const auto& r : records) {
      if (r.is_event() && r.time <= window) ++pt.n_cases;
      if (r.time > window) ++pt.n_controls;
    }
    if (pt.n_cases > 0 && pt.n_controls > 0) {
      const KernelSpec k = kernel.value_or(KernelSpec{default_cd_span(records.size())});
      try {
        pt.raw = cd_roc_nne(records, window, k).auc;
        pt.smoothed = pt.raw;
        pt.defined = true;
      } catch (const EstimationError&) {
        pt.defined = false;
      }
    }
    series.points.push_back(pt);
  }
  return series;
}

}  // namespace tdroc
