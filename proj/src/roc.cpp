#include "tdroc/roc.hpp"

#include <algorithm>
#include <cmath>

namespace tdroc {

double RocCurve::tpf_at(double p) const {
  double best = 0.0;
  for (const auto& pt : points) {
    if (pt.fpf <= p) best = std::max(best, pt.tpf);
  }
  return best;
}

double trapezoid_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].fpf - points[k - 1].fpf) * 0.5 * (points[k].tpf + points[k - 1].tpf);
  }
  return area;
}

RocCurve finish_roc(std::vector<RocPoint> points) {
  // Snap round-off first: an FPF of -1e-17 sorted ahead of (0, 0) folds the
  // path back and costs half a pair of area. FPF is compared on a 1e-12
  // grid so one-ulp noise cannot reorder points either.
  auto snap = [](double v) {
    if (std::fabs(v) < 1e-12) return 0.0;
    if (std::fabs(v - 1.0) < 1e-12) return 1.0;
    return v;
  };
  for (auto& p : points) {
    p.fpf = snap(p.fpf);
    p.tpf = snap(p.tpf);
  }
  auto key = [](double v) { return std::round(v * 1e12); };
  std::stable_sort(points.begin(), points.end(), [&](const RocPoint& a, const RocPoint& b) {
    if (key(a.fpf) != key(b.fpf)) return key(a.fpf) < key(b.fpf);
    return a.tpf < b.tpf;
  });
  RocCurve curve;
  curve.auc = trapezoid_auc(points);
  curve.points = std::move(points);
  return curve;
}

std::vector<double> distinct_sorted(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace tdroc
