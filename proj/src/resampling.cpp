#include "tdroc/resampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "tdroc/cd_roc.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"

namespace tdroc {

std::string StatisticSpec::label() const {
  std::ostringstream out;
  const char* m = mode == MarkerMode::baseline ? "baseline" : "updated";
  switch (kind) {
    case StatisticKind::c_index:
      out << "c_index(" << m << ",tau=" << tau << ")";
      break;
    case StatisticKind::id_auc:
      out << "id_auc(" << m << ",t=" << time << ",lambda=" << lambda << ")";
      break;
    case StatisticKind::id_tpr:
      out << "id_tpr(" << m << ",t=" << time << ",fpf=" << fpf << ",lambda=" << lambda << ")";
      break;
    case StatisticKind::cd_auc:
      out << "cd_auc(" << m << ",s=" << time << ",window=" << window << ")";
      break;
  }
  return out.str();
}

double evaluate_statistic(const Cohort& cohort, const StatisticSpec& spec) {
  try {
    switch (spec.kind) {
      case StatisticKind::c_index:
        return c_index(cohort, spec.mode, spec.tau).value;
      case StatisticKind::id_auc:
        return wmr_smooth(mean_rank(cohort, spec.mode), KernelSpec{spec.lambda}).smoothed_at(spec.time);
      case StatisticKind::id_tpr:
        return dynamic_tpr(cohort, spec.fpf, spec.mode, KernelSpec{spec.lambda}).smoothed_at(spec.time);
      case StatisticKind::cd_auc: {
        const double s[] = {spec.time};
        std::optional<KernelSpec> k;
        if (spec.cd_span) k = KernelSpec{*spec.cd_span};
        const auto series = sequential_cd_auc(cohort, s, spec.window, k, spec.mode);
        return series.points.front().defined ? series.points.front().raw : kNaN;
      }
    }
  } catch (const EstimationError&) {
    return kNaN;
  }
  return kNaN;
}

double quantile_type7(std::vector<double> values, double p) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Cohort resample_subjects(const Cohort& cohort, Rng& rng) {
  const std::size_t n = cohort.subject_count();
  std::vector<Interval> rows;
  rows.reserve(cohort.interval_count());
  for (std::size_t draw = 0; draw < n; ++draw) {
    const auto chain = cohort.subject(rng.below(n));
    const std::string id = chain.front().subject_id + "#" + std::to_string(draw);
    for (Interval iv : chain) {
      iv.subject_id = id;
      rows.push_back(std::move(iv));
    }
  }
  return Cohort(std::move(rows), cohort.covariate_names(), cohort.time_unit());
}

std::vector<BootstrapResult> bootstrap_many(const Cohort& cohort, const MultiStatistic& statistic,
                                            std::size_t B, std::uint64_t seed, unsigned threads) {
  if (B < 1) throw InputError("number of bootstrap replicates must be at least 1");
  if (cohort.subject_count() == 0) throw InputError("empty cohort");
  const std::vector<double> point = statistic(cohort);
  const std::size_t k = point.size();
  for (double v : point) {
    if (!std::isfinite(v)) throw EstimationError("statistic undefined on the full data");
  }

  std::vector<std::vector<double>> reps(B);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < B; r = next++) {
      Rng rng(split_seed(seed, r));
      const Cohort sample = resample_subjects(cohort, rng);
      std::vector<double> v;
      try {
        v = statistic(sample);
      } catch (const EstimationError&) {
        v.assign(k, kNaN);
      }
      if (v.size() != k) v.assign(k, kNaN);
      reps[r] = std::move(v);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, B));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<BootstrapResult> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    auto& res = out[j];
    res.point = point[j];
    res.seed = seed;
    res.B = B;
    res.replicates.reserve(B);
    for (std::size_t r = 0; r < B; ++r) res.replicates.push_back(reps[r][j]);
    res.defined = static_cast<std::size_t>(std::count_if(
        res.replicates.begin(), res.replicates.end(), [](double v) { return std::isfinite(v); }));
    res.unstable = static_cast<double>(res.defined) < 0.9 * static_cast<double>(B);
    res.ci_low = quantile_type7(res.replicates, 0.025);
    res.ci_high = quantile_type7(res.replicates, 0.975);
  }
  return out;
}

BootstrapResult bootstrap_ci(const Cohort& cohort, const StatisticSpec& spec, std::size_t B,
                             std::uint64_t seed, unsigned threads) {
  return bootstrap_many(
      cohort, [&](const Cohort& c) { return std::vector<double>{evaluate_statistic(c, spec)}; }, B,
      seed, threads)[0];
}

BootstrapResult cindex_difference_ci(const Cohort& cohort, std::span<const double> marker_a,
                                     std::span<const double> marker_b, double tau, MarkerMode mode,
                                     std::size_t B, std::uint64_t seed, unsigned threads) {
  if (marker_a.size() != cohort.interval_count() || marker_b.size() != cohort.interval_count()) {
    throw InputError("marker vectors must have one value per interval");
  }
  // Carry marker b in an extra covariate column so it travels with each
  // resampled interval.
  std::vector<Interval> rows(cohort.intervals().begin(), cohort.intervals().end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].marker = marker_a[i];
    rows[i].covariates.push_back(marker_b[i]);
  }
  auto names = cohort.covariate_names();
  names.push_back("__marker_b");
  const Cohort paired(std::move(rows), names, cohort.time_unit());
  const std::size_t col = names.size() - 1;

  auto statistic = [&](const Cohort& c) {
    std::vector<double> b(c.interval_count());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = c.interval(i).covariates[col];
    const double ca = c_index(c, mode, tau).value;
    const double cb = c_index(c.with_markers(b), mode, tau).value;
    return std::vector<double>{ca - cb};
  };
  return bootstrap_many(paired, statistic, B, seed, threads)[0];
}

}  // namespace tdroc
