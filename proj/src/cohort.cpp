#include "tdroc/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "tdroc/error.hpp"

namespace tdroc {

Cohort::Cohort(std::vector<Interval> intervals, std::vector<std::string> covariate_names,
               double time_unit)
    : covariate_names_(std::move(covariate_names)), time_unit_(time_unit) {
  if (!(time_unit_ > 0.0)) throw InputError("time_unit must be positive");

  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<Interval>> groups;
  for (auto& iv : intervals) {
    if (!(iv.start < iv.stop)) {
      std::ostringstream msg;
      msg << "subject " << iv.subject_id << ": interval start " << iv.start
          << " is not before stop " << iv.stop;
      throw InputError(msg.str());
    }
    if (iv.start < 0.0) throw InputError("subject " + iv.subject_id + ": negative start time");
    if (iv.status < 0) throw InputError("subject " + iv.subject_id + ": negative status code");
    if (iv.covariates.size() != covariate_names_.size()) {
      throw InputError("subject " + iv.subject_id + ": covariate count does not match header");
    }
    auto [it, inserted] = slot.try_emplace(iv.subject_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(std::move(iv));
  }

  intervals_.reserve(intervals.size());
  offsets_.reserve(groups.size() + 1);
  offsets_.push_back(0);
  for (auto& chain : groups) {
    std::stable_sort(chain.begin(), chain.end(),
                     [](const Interval& a, const Interval& b) { return a.start < b.start; });
    for (std::size_t k = 0; k < chain.size(); ++k) {
      if (k + 1 < chain.size()) {
        if (chain[k].stop != chain[k + 1].start) {
          std::ostringstream msg;
          msg << "subject " << chain[k].subject_id << ": intervals are not contiguous at "
              << chain[k].stop;
          throw InputError(msg.str());
        }
        if (chain[k].is_event()) {
          throw InputError("subject " + chain[k].subject_id +
                           ": event status on a non-final interval");
        }
      }
      owner_.push_back(offsets_.size() - 1);
      intervals_.push_back(std::move(chain[k]));
    }
    offsets_.push_back(intervals_.size());
  }
}

std::span<const Interval> Cohort::subject(std::size_t k) const {
  return std::span<const Interval>(intervals_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

std::optional<std::size_t> Cohort::covariate_index(std::string_view name) const {
  auto it = std::find(covariate_names_.begin(), covariate_names_.end(), name);
  if (it == covariate_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - covariate_names_.begin());
}

Cohort Cohort::baseline_view() const {
  std::vector<Interval> rows;
  rows.reserve(subject_count());
  for (std::size_t k = 0; k < subject_count(); ++k) {
    auto chain = subject(k);
    Interval row = chain.front();
    row.stop = chain.back().stop;
    row.status = chain.back().status;
    rows.push_back(std::move(row));
  }
  return Cohort(std::move(rows), covariate_names_, time_unit_);
}

Cohort Cohort::with_markers(std::span<const double> markers) const {
  if (markers.size() != intervals_.size()) {
    throw InputError("marker vector length does not match interval count");
  }
  std::vector<Interval> rows(intervals_.begin(), intervals_.end());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].marker = markers[i];
  return Cohort(std::move(rows), covariate_names_, time_unit_);
}

std::vector<SurvivalRecord> Cohort::subject_records() const {
  std::vector<SurvivalRecord> out;
  out.reserve(subject_count());
  for (std::size_t k = 0; k < subject_count(); ++k) {
    auto chain = subject(k);
    out.push_back({chain.back().stop, chain.back().status, chain.front().marker});
  }
  return out;
}

std::vector<double> Cohort::event_times() const {
  std::vector<double> times;
  for (const auto& iv : intervals_) {
    if (iv.is_event()) times.push_back(iv.stop);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

RiskSet risk_set_at(const Cohort& cohort, double t) {
  RiskSet rs;
  rs.eval_time = t;
  const auto ivs = cohort.intervals();
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    const auto& iv = ivs[i];
    if (!(iv.start < t && t <= iv.stop)) continue;
    if (iv.stop == t && iv.is_event()) {
      rs.cases.push_back(i);
    } else if (iv.stop > t || cohort.terminal_stop(i) > t) {
      rs.controls.push_back(i);
    }
  }
  return rs;
}

Cohort landmark_subset(const Cohort& cohort, double s) {
  std::vector<Interval> rows;
  for (std::size_t k = 0; k < cohort.subject_count(); ++k) {
    auto chain = cohort.subject(k);
    auto it = std::find_if(chain.begin(), chain.end(),
                           [s](const Interval& iv) { return iv.start <= s && s < iv.stop; });
    if (it == chain.end()) continue;
    Interval row = *it;
    row.start = 0.0;
    row.stop = chain.back().stop - s;
    row.status = chain.back().status;
    rows.push_back(std::move(row));
  }
  return Cohort(std::move(rows), cohort.covariate_names(), cohort.time_unit());
}

int transplant_censor(int raw_status) {
  switch (raw_status) {
    case 0:
    case 1:
      return 0;
    case 2:
      return 1;
    default:
      throw InputError("unknown PBC status code " + std::to_string(raw_status));
  }
}

Cohort build_counting_process(std::span<const BaselineRow> baseline,
                              std::span<const MeasurementRow> longitudinal,
                              const std::vector<std::string>& covariate_names,
                              const std::vector<std::string>& fixed_covariates,
                              CountingProcessReport* report) {
  const std::size_t p = covariate_names.size();
  std::vector<bool> fixed(p, false);
  for (const auto& name : fixed_covariates) {
    auto it = std::find(covariate_names.begin(), covariate_names.end(), name);
    if (it == covariate_names.end()) throw InputError("unknown fixed covariate " + name);
    fixed[it - covariate_names.begin()] = true;
  }

  std::unordered_map<std::string, const BaselineRow*> by_id;
  for (const auto& row : baseline) {
    if (row.covariates.size() != p) throw InputError("baseline row width mismatch for " + row.subject_id);
    if (!by_id.emplace(row.subject_id, &row).second) {
      throw InputError("duplicate baseline row for subject " + row.subject_id);
    }
  }

  CountingProcessReport local;
  CountingProcessReport& rep = report ? *report : local;
  rep = CountingProcessReport{};

  std::unordered_map<std::string, std::map<double, const MeasurementRow*>> visits;
  for (const auto& m : longitudinal) {
    std::ostringstream diag;
    auto base = by_id.find(m.subject_id);
    if (m.covariates.size() != p) {
      diag << "line " << m.source_line << ": width mismatch";
    } else if (base == by_id.end()) {
      diag << "line " << m.source_line << ": subject " << m.subject_id << " not in baseline table";
    } else if (m.day < 0.0) {
      diag << "line " << m.source_line << ": negative measurement day " << m.day;
    } else if (m.day >= base->second->follow_up) {
      diag << "line " << m.source_line << ": subject " << m.subject_id << " measured on day "
           << m.day << ", at or after end of follow-up " << base->second->follow_up;
    } else if (!visits[m.subject_id].emplace(m.day, &m).second) {
      diag << "line " << m.source_line << ": duplicate measurement for subject " << m.subject_id
           << " on day " << m.day;
    }
    if (!diag.str().empty()) rep.rejected.push_back(diag.str());
  }

  std::vector<Interval> rows;
  for (const auto& b : baseline) {
    if (!(b.follow_up > 0.0)) throw InputError("subject " + b.subject_id + ": follow-up must be positive");
    std::vector<double> current = b.covariates;
    std::vector<std::pair<double, const MeasurementRow*>> epochs;
    auto v = visits.find(b.subject_id);
    if (v == visits.end() || v->second.begin()->first > 0.0) epochs.emplace_back(0.0, nullptr);
    if (v != visits.end()) {
      for (const auto& [day, m] : v->second) epochs.emplace_back(day, m);
    }
    for (std::size_t k = 0; k < epochs.size(); ++k) {
      if (const MeasurementRow* m = epochs[k].second) {
        for (std::size_t j = 0; j < p; ++j) {
          if (!fixed[j] && !std::isnan(m->covariates[j])) current[j] = m->covariates[j];
        }
      }
      Interval iv;
      iv.subject_id = b.subject_id;
      iv.start = epochs[k].first;
      iv.stop = k + 1 < epochs.size() ? epochs[k + 1].first : b.follow_up;
      iv.status = k + 1 < epochs.size() ? 0 : b.status;
      iv.covariates = current;
      rows.push_back(std::move(iv));
    }
    ++rep.subjects;
    if (b.status > 0) ++rep.events;
  }
  rep.intervals = rows.size();
  rep.records = rows.size() + rep.rejected.size();
  return Cohort(std::move(rows), covariate_names);
}

}  // namespace tdroc
