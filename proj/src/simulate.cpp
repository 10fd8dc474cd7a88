#include "tdroc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdroc/error.hpp"
#include "tdroc/rng.hpp"

namespace tdroc {

void ScenarioSpec::validate() const {
  if (n < 2) throw InputError("scenario needs n >= 2");
  if (causes.empty()) throw InputError("scenario needs at least one cause");
  for (const auto& c : causes) {
    if (!(c.rate > 0.0)) throw InputError("hazard rates must be positive");
    if (c.gamma_after && !(c.change_time > 0.0)) throw InputError("change time must be positive");
  }
  if (censoring != CensoringKind::none && !(censor_rate > 0.0)) {
    throw InputError("censoring rate must be positive");
  }
  if (censoring == CensoringKind::marker_dependent && !(censor_multiplier > 0.0)) {
    throw InputError("censoring multiplier must be positive");
  }
}

namespace {

double draw_marker(MarkerDist dist, Rng& rng) {
  return dist == MarkerDist::standard_normal ? rng.normal() : rng.uniform();
}

// Inverse cumulative hazard at a unit-exponential draw.
double draw_time(const HazardSpec& h, double marker, Rng& rng) {
  const double e = rng.exponential(1.0);
  const double h1 = h.rate * std::exp(marker * h.gamma);
  if (!h.gamma_after) return e / h1;
  const double before = h1 * h.change_time;
  if (e < before) return e / h1;
  const double h2 = h.rate * std::exp(marker * *h.gamma_after);
  return h.change_time + (e - before) / h2;
}

struct Draw {
  double marker;
  double time;
  int cause;
};

Draw draw_subject(const ScenarioSpec& spec, Rng& rng) {
  Draw d{draw_marker(spec.marker_dist, rng), std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < spec.causes.size(); ++j) {
    const double t = draw_time(spec.causes[j], d.marker, rng);
    if (t < d.time) {
      d.time = t;
      d.cause = static_cast<int>(j) + 1;
    }
  }
  return d;
}

}  // namespace

Cohort generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<Interval> rows;
  rows.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Draw d = draw_subject(spec, rng);
    double c = std::numeric_limits<double>::infinity();
    if (spec.censoring == CensoringKind::independent) {
      c = rng.exponential(spec.censor_rate);
    } else if (spec.censoring == CensoringKind::marker_dependent) {
      c = rng.exponential(spec.censor_rate * std::pow(spec.censor_multiplier, d.marker));
    }
    Interval iv;
    iv.subject_id = "s" + std::to_string(i + 1);
    iv.start = 0.0;
    iv.stop = std::min(d.time, c);
    iv.status = d.time <= c ? d.cause : 0;
    iv.marker = d.marker;
    rows.push_back(std::move(iv));
  }
  return Cohort(std::move(rows), {}, 1.0);
}

double truth_cd_auc(const ScenarioSpec& spec, double s, double t, std::size_t mc_n) {
  spec.validate();
  if (!(t > s)) throw InputError("prediction time must exceed the landmark");
  Rng rng(split_seed(spec.seed, 0x7275746855ULL));
  std::vector<std::pair<double, int>> pool;  // (marker, 1 case / 0 control)
  pool.reserve(mc_n);
  for (std::size_t i = 0; i < mc_n; ++i) {
    const Draw d = draw_subject(spec, rng);
    if (d.time <= s) continue;
    pool.emplace_back(d.marker, d.time <= t ? 1 : 0);
  }
  std::sort(pool.begin(), pool.end());
  // Mann-Whitney count with ties at half weight.
  double controls_below = 0.0;
  double concordant = 0.0;
  double cases = 0.0;
  for (std::size_t k = 0; k < pool.size();) {
    std::size_t j = k;
    double tie_cases = 0.0;
    double tie_controls = 0.0;
    for (; j < pool.size() && pool[j].first == pool[k].first; ++j) {
      (pool[j].second == 1 ? tie_cases : tie_controls) += 1.0;
    }
    concordant += tie_cases * (controls_below + 0.5 * tie_controls);
    cases += tie_cases;
    controls_below += tie_controls;
    k = j;
  }
  if (cases == 0.0 || controls_below == 0.0) throw EstimationError("no cases or no controls in Monte-Carlo sample");
  return concordant / (cases * controls_below);
}

}  // namespace tdroc
