#include "tdroc/id_roc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tdroc/error.hpp"

namespace tdroc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Number of sorted values strictly below x.
std::size_t count_below(const std::vector<double>& sorted, double x) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

std::vector<std::size_t> defined_indices(const AccuracySeries& series) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    if (series.points[i].defined) idx.push_back(i);
  }
  return idx;
}

// Window [lo, hi) around position i of m defined points: |i - j| < span * m.
std::pair<std::size_t, std::size_t> rank_window(std::size_t i, std::size_t m, double span) {
  const double reach = span * static_cast<double>(m);
  // largest integer strictly below reach
  const auto half = static_cast<std::size_t>(std::max(0.0, std::ceil(reach) - 1.0));
  const std::size_t lo = i > half ? i - half : 0;
  const std::size_t hi = std::min(m, i + half + 1);
  return {lo, hi};
}

void check_markers(const Cohort& cohort) {
  for (const auto& iv : cohort.intervals()) {
    if (!std::isfinite(iv.marker)) throw InputError("non-finite marker for subject " + iv.subject_id);
  }
}

}  // namespace

AccuracySeries mean_rank(const Cohort& cohort, MarkerMode mode) {
  const Cohort source = cohort.view(mode);
  check_markers(source);
  const auto times = source.event_times();
  if (times.empty()) throw EstimationError("no events");

  AccuracySeries series;
  series.points.reserve(times.size());
  std::vector<double> controls;
  for (double t : times) {
    const RiskSet rs = risk_set_at(source, t);
    AccuracyPoint pt;
    pt.time = t;
    pt.n_cases = rs.cases.size();
    pt.n_controls = rs.controls.size();
    if (!rs.controls.empty()) {
      controls.clear();
      for (std::size_t j : rs.controls) controls.push_back(source.interval(j).marker);
      std::sort(controls.begin(), controls.end());
      double pairs = 0.0;
      for (std::size_t i : rs.cases) pairs += static_cast<double>(count_below(controls, source.interval(i).marker));
      pt.raw = pairs / (static_cast<double>(rs.cases.size()) * static_cast<double>(controls.size()));
      pt.defined = true;
    }
    series.points.push_back(pt);
  }
  return series;
}

AccuracySeries wmr_smooth(const AccuracySeries& series, const KernelSpec& kernel) {
  kernel.validate();
  AccuracySeries out = series;
  const auto idx = defined_indices(series);
  const std::size_t m = idx.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = rank_window(i, m, kernel.span);
    double sum = 0.0;
    for (std::size_t j = lo; j < hi; ++j) sum += series.points[idx[j]].raw;
    const double size = static_cast<double>(hi - lo);
    const double mean = sum / size;
    double ss = 0.0;
    for (std::size_t j = lo; j < hi; ++j) ss += std::pow(series.points[idx[j]].raw - mean, 2);
    auto& pt = out.points[idx[i]];
    pt.smoothed = mean;
    pt.variance = hi - lo > 1 ? ss / (size - 1.0) / size : 0.0;
  }
  return out;
}

std::vector<double> default_bandwidth_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 80; ++k) grid.push_back(0.05 + k / 200.0);
  return grid;
}

double loo_imse(const AccuracySeries& series, double span) {
  const auto idx = defined_indices(series);
  const std::size_t m = idx.size();
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = rank_window(i, m, span);
    if (hi - lo < 2) continue;
    double sum = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      if (j != i) sum += series.points[idx[j]].raw;
    }
    const double fit = sum / static_cast<double>(hi - lo - 1);
    total += std::pow(series.points[idx[i]].raw - fit, 2);
    ++used;
  }
  return used == 0 ? kNaN : total / static_cast<double>(used);
}

double bandwidth_cv(const AccuracySeries& series, std::span<const double> grid) {
  if (grid.empty()) throw InputError("empty bandwidth grid");
  std::vector<double> imse;
  imse.reserve(grid.size());
  for (double span : grid) {
    KernelSpec{span}.validate();
    imse.push_back(loo_imse(series, span));
  }
  double best = std::numeric_limits<double>::infinity();
  for (double v : imse) {
    if (!std::isnan(v)) best = std::min(best, v);
  }
  if (std::isinf(best)) throw EstimationError("leave-one-out error undefined for every bandwidth");
  const double tol = 1e-12 * std::max(1.0, best);
  double sum = 0.0;
  int count = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!std::isnan(imse[g]) && imse[g] <= best + tol) {
      sum += grid[g];
      ++count;
    }
  }
  return sum / count;
}

AccuracySeries dynamic_tpr(const Cohort& cohort, double fpf, MarkerMode mode, const KernelSpec& kernel) {
  if (!(fpf > 0.0 && fpf < 1.0)) throw InputError("false-positive fraction must lie in (0, 1)");
  const Cohort source = cohort.view(mode);
  check_markers(source);
  const auto times = source.event_times();
  if (times.empty()) throw EstimationError("no events");

  AccuracySeries series;
  std::vector<double> controls;
  for (double t : times) {
    const RiskSet rs = risk_set_at(source, t);
    AccuracyPoint pt;
    pt.time = t;
    pt.n_cases = rs.cases.size();
    pt.n_controls = rs.controls.size();
    if (!rs.controls.empty()) {
      controls.clear();
      for (std::size_t j : rs.controls) controls.push_back(source.interval(j).marker);
      std::sort(controls.begin(), controls.end(), std::greater<>());
      const auto k = static_cast<std::size_t>(std::floor(fpf * static_cast<double>(controls.size())));
      const double threshold = controls[k];
      std::size_t hits = 0;
      for (std::size_t i : rs.cases) hits += source.interval(i).marker > threshold ? 1 : 0;
      pt.raw = static_cast<double>(hits) / static_cast<double>(rs.cases.size());
      pt.defined = true;
    }
    series.points.push_back(pt);
  }
  return wmr_smooth(series, kernel);
}

double GammaPath::operator()(double t) const {
  if (times.empty()) throw InputError("empty coefficient path");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

namespace {

RocCurve reweighted_roc(const Cohort& cohort, double gamma, double t, MarkerMode mode) {
  if (!std::isfinite(gamma)) throw InputError("coefficient must be finite");
  const Cohort source = cohort.view(mode);
  check_markers(source);
  std::vector<double> at_risk;
  std::vector<double> survivors;
  const auto ivs = source.intervals();
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (!(ivs[i].start < t && t <= ivs[i].stop)) continue;
    at_risk.push_back(ivs[i].marker);
    if (source.terminal_stop(i) > t) survivors.push_back(ivs[i].marker);
  }
  if (at_risk.empty()) throw EstimationError("empty risk set");
  if (survivors.empty()) throw EstimationError("no subjects surviving beyond the time point");

  // Weights exp(gamma * M) shifted by the largest exponent.
  double top = kNegInf;
  for (double m : at_risk) top = std::max(top, gamma * m);
  std::vector<std::pair<double, double>> mass;  // (marker, weight)
  double total = 0.0;
  for (double m : at_risk) {
    const double w = std::exp(gamma * m - top);
    mass.emplace_back(m, w);
    total += w;
  }
  std::sort(mass.begin(), mass.end());
  std::sort(survivors.begin(), survivors.end());

  // thresholds from the top down; TPF accumulates weight strictly above c
  std::vector<RocPoint> points;
  double above = 0.0;
  const double n_surv = static_cast<double>(survivors.size());
  for (std::size_t k = mass.size(); k > 0;) {
    const double c = mass[k - 1].first;
    const auto surv_above = static_cast<double>(
        survivors.end() - std::upper_bound(survivors.begin(), survivors.end(), c));
    points.push_back({surv_above / n_surv, above / total, c});
    while (k > 0 && mass[k - 1].first == c) {
      above += mass[k - 1].second;
      --k;
    }
  }
  points.push_back({1.0, 1.0, kNegInf});
  return finish_roc(std::move(points));
}

}  // namespace

RocCurve cox_id_accuracy(const Cohort& cohort, double gamma, double t, MarkerMode mode) {
  return reweighted_roc(cohort, gamma, t, mode);
}

RocCurve cox_id_accuracy(const Cohort& cohort, const GammaPath& gamma, double t, MarkerMode mode) {
  return reweighted_roc(cohort, gamma(t), t, mode);
}

GammaPath gamma_t_schoenfeld(const CoxFit& fit, const Cohort& cohort, const KernelSpec& kernel) {
  kernel.validate();
  if (!fit.converged) throw EstimationError("Cox fit did not converge");
  if (fit.coefficients.size() != 1) throw InputError("coefficient path needs a single-term model");
  const CoxData data = make_cox_data(cohort, fit.spec);
  const double beta = fit.coefficients[0];
  const double info = fit.information(0, 0);
  if (!(info > 0.0)) throw EstimationError("zero information in the Cox fit");

  const std::size_t n = data.stop.size();
  std::vector<std::size_t> events;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.event[i] != 0) events.push_back(i);
  }
  std::stable_sort(events.begin(), events.end(),
                   [&](std::size_t a, std::size_t b) { return data.stop[a] < data.stop[b]; });
  std::vector<double> distinct;
  for (std::size_t e : events) {
    if (distinct.empty() || distinct.back() != data.stop[e]) distinct.push_back(data.stop[e]);
  }
  if (distinct.size() < 3) throw EstimationError("fewer than 3 event times; cannot smooth");

  // Scaled residuals, Breslow risk-set mean at each event time.
  const double d = static_cast<double>(events.size());
  std::vector<double> ev_time;
  std::vector<double> scaled;
  for (std::size_t k = 0; k < events.size();) {
    const double t = data.stop[events[k]];
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(data.start[i] < t && t <= data.stop[i])) continue;
      const double x = data.x(static_cast<Eigen::Index>(i), 0) - fit.centers[0];
      const double w = std::exp(beta * x);
      s0 += w;
      s1 += w * x;
    }
    const double mean = s1 / s0;
    for (; k < events.size() && data.stop[events[k]] == t; ++k) {
      const double x = data.x(static_cast<Eigen::Index>(events[k]), 0) - fit.centers[0];
      ev_time.push_back(t);
      scaled.push_back(beta + d * (x - mean) / info);
    }
  }

  // Local linear fit over the rank window of each event.
  const std::size_t m = scaled.size();
  std::vector<double> fitted(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = rank_window(i, m, kernel.span);
    const double cnt = static_cast<double>(hi - lo);
    double mt = 0.0;
    double my = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      mt += ev_time[j];
      my += scaled[j];
    }
    mt /= cnt;
    my /= cnt;
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      stt += (ev_time[j] - mt) * (ev_time[j] - mt);
      sty += (ev_time[j] - mt) * (scaled[j] - my);
    }
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    fitted[i] = my + slope * (ev_time[i] - mt);
  }

  GammaPath path;
  for (std::size_t i = 0; i < m;) {
    const double t = ev_time[i];
    double sum = 0.0;
    std::size_t cnt = 0;
    for (; i < m && ev_time[i] == t; ++i, ++cnt) sum += fitted[i];
    path.times.push_back(t);
    path.values.push_back(sum / static_cast<double>(cnt));
  }
  return path;
}

CindexResult c_index(const Cohort& cohort, MarkerMode mode, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  const auto records = cohort.subject_records();
  const StepCurve km = kaplan_meier(records);
  if (km(tau) >= 1.0) throw EstimationError("no events up to tau");
  const AccuracySeries series = mean_rank(cohort, mode);

  CindexResult res;
  res.tau = tau;
  std::size_t times_to_tau = 0;
  std::vector<std::pair<double, double>> terms;  // (weight, A)
  double den = 0.0;
  for (const auto& pt : series.points) {
    if (pt.time > tau) break;
    ++times_to_tau;
    if (!pt.defined) continue;
    const double s = km(pt.time);
    const double f = km.left_limit(pt.time) - s;
    const double w = f * s;
    if (w <= 0.0) continue;
    terms.emplace_back(w, pt.raw);
    den += w;
    ++res.n_times;
  }
  if (times_to_tau < 2) throw EstimationError("fewer than two event times up to tau");
  if (!(den > 0.0)) throw EstimationError("all concordance weights are zero");
  res.value = 0.0;
  for (const auto& [w, a] : terms) {
    res.value += w / den * a;
    res.weights_sum += w / den;
  }
  return res;
}

}  // namespace tdroc
