#include "tdroc/series.hpp"

#include <algorithm>
#include <cmath>

namespace tdroc {

std::size_t AccuracySeries::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const AccuracyPoint& p) { return p.defined; }));
}

namespace {

template <class Field>
double interpolate(const std::vector<AccuracyPoint>& points, double t, Field field) {
  const AccuracyPoint* before = nullptr;
  const AccuracyPoint* after = nullptr;
  for (const auto& p : points) {
    if (!p.defined || std::isnan(field(p))) continue;
    if (p.time <= t) before = &p;
    if (p.time >= t && after == nullptr) after = &p;
  }
  if (before == nullptr && after == nullptr) return kNaN;
  if (before == nullptr) return field(*after);
  if (after == nullptr || after == before) return field(*before);
  const double w = (t - before->time) / (after->time - before->time);
  return (1.0 - w) * field(*before) + w * field(*after);
}

}  // namespace

double AccuracySeries::smoothed_at(double t) const {
  return interpolate(points, t, [](const AccuracyPoint& p) { return p.smoothed; });
}

double AccuracySeries::variance_at(double t) const {
  return interpolate(points, t, [](const AccuracyPoint& p) { return p.variance; });
}

}  // namespace tdroc
