#include "tdroc/km.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdroc/error.hpp"

namespace tdroc {

double StepCurve::operator()(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return initial_value;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

double StepCurve::left_limit(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return initial_value;
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

void KernelSpec::validate() const {
  if (!(span > 0.0 && 2.0 * span < 1.0)) {
    throw InputError("kernel span must satisfy 0 < 2*span < 1, got " + std::to_string(span));
  }
}

StepCurve kaplan_meier(std::span<const double> times, std::span<const int> status,
                       std::span<const double> weights) {
  const std::size_t n = times.size();
  if (status.size() != n || (!weights.empty() && weights.size() != n)) {
    throw InputError("kaplan_meier: input lengths differ");
  }
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] < 0.0) throw InputError("kaplan_meier: negative time");
    if (w(i) < 0.0) throw InputError("kaplan_meier: negative weight");
    total += w(i);
  }
  if (n > 0 && total <= 0.0) throw InputError("kaplan_meier: all weights are zero");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  StepCurve curve;
  double at_risk = total;
  double surv = 1.0;
  for (std::size_t k = 0; k < n;) {
    const double t = times[order[k]];
    double died = 0.0;
    double leaving = 0.0;
    for (; k < n && times[order[k]] == t; ++k) {
      const std::size_t i = order[k];
      if (status[i] > 0) died += w(i);
      leaving += w(i);
    }
    if (died > 0.0 && at_risk > 0.0) {
      surv *= 1.0 - died / at_risk;
      curve.times.push_back(t);
      curve.values.push_back(surv);
    }
    at_risk -= leaving;
  }
  return curve;
}

StepCurve kaplan_meier(std::span<const SurvivalRecord> records) {
  std::vector<double> t(records.size());
  std::vector<int> d(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    t[i] = records[i].time;
    d[i] = records[i].status;
  }
  return kaplan_meier(t, d);
}

std::vector<double> percentile_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> pct(n);
  for (std::size_t k = 0; k < n;) {
    std::size_t j = k;
    while (j < n && values[order[j]] == values[order[k]]) ++j;
    // ranks k+1 .. j share their mean
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + j);
    for (std::size_t m = k; m < j; ++m) pct[order[m]] = avg_rank / static_cast<double>(n);
    k = j;
  }
  return pct;
}

namespace {

// Average rank of x against sorted data; exact in half-integers.
double average_rank_of(std::span<const double> sorted, double x) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
  const auto hi = std::upper_bound(lo, sorted.end(), x);
  const double below = static_cast<double>(lo - sorted.begin());
  const double equal = static_cast<double>(hi - lo);
  return below + 0.5 * (equal + 1.0);
}

}  // namespace

double percentile_of(std::span<const double> sorted, double x) {
  return average_rank_of(sorted, x) / static_cast<double>(sorted.size());
}

std::vector<double> nne_window(std::span<const SurvivalRecord> records, double anchor,
                               const KernelSpec& kernel) {
  kernel.validate();
  std::vector<double> markers(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!std::isfinite(records[i].marker)) throw InputError("conditional_km_nne: non-finite marker");
    markers[i] = records[i].marker;
  }
  if (!std::isfinite(anchor)) throw InputError("conditional_km_nne: non-finite anchor");
  std::vector<double> sorted = markers;
  std::sort(sorted.begin(), sorted.end());
  // compare in rank units so that |F_i - F_a| < span has no rounding slack
  const double center = average_rank_of(sorted, anchor);
  const double reach = kernel.span * static_cast<double>(records.size());
  std::vector<double> w(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (std::abs(average_rank_of(sorted, markers[i]) - center) < reach) w[i] = 1.0;
  }
  return w;
}

StepCurve conditional_km_nne(std::span<const SurvivalRecord> records, double anchor,
                             const KernelSpec& kernel) {
  const auto w = nne_window(records, anchor, kernel);
  if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; })) {
    throw EstimationError("conditional_km_nne: empty neighbourhood around anchor");
  }
  std::vector<double> t(records.size());
  std::vector<int> d(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    t[i] = records[i].time;
    d[i] = records[i].status;
  }
  return kaplan_meier(t, d, w);
}

}  // namespace tdroc
