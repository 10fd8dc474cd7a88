#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdroc/cohort.hpp"

namespace tdroc {

enum class MarkerDist { standard_normal, uniform };
enum class CensoringKind { none, independent, marker_dependent };

/// Exponential cause-specific hazard rate * exp(M * gamma), optionally with
/// gamma switching to `gamma_after` at `change_time`.
struct HazardSpec {
  double gamma = 1.0;
  double rate = 1.0;
  std::optional<double> gamma_after;
  double change_time = 0.0;
};

struct ScenarioSpec {
  std::size_t n = 500;
  MarkerDist marker_dist = MarkerDist::standard_normal;
  /// One entry per cause; cause codes are positions + 1.
  std::vector<HazardSpec> causes{HazardSpec{}};
  CensoringKind censoring = CensoringKind::none;
  double censor_rate = 0.5;
  /// Marker-dependent censoring hazard: censor_rate * censor_multiplier^M.
  double censor_multiplier = 1.0;
  std::uint64_t seed = 1;

  /// Throws InputError on n < 2, non-positive rates or no causes.
  void validate() const;
};

/// One interval per subject with start 0; ids s1..sn; time unit 1.
[[nodiscard]] Cohort generate(const ScenarioSpec& spec);

/// Monte-Carlo AUC for cases with s < T <= t and controls with T > t among
/// uncensored draws with T > s (all causes). Uses its own substream of the
/// scenario seed.
[[nodiscard]] double truth_cd_auc(const ScenarioSpec& spec, double s, double t,
                                  std::size_t mc_n = 1'000'000);

}  // namespace tdroc
