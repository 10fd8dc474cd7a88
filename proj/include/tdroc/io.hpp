#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tdroc/cohort.hpp"
#include "tdroc/cox.hpp"
#include "tdroc/series.hpp"
#include "tdroc/simulate.hpp"

namespace tdroc {

/// Header plus string cells; quoted fields may contain commas.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  /// Column position; throws InputError naming the column if absent.
  [[nodiscard]] std::size_t column(const std::string& name, const std::string& file = {}) const;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Numeric cell: empty, NA and NaN read as NaN; anything else unparsable
/// throws InputError.
[[nodiscard]] double parse_number(const std::string& cell);

/// Cohort file: id,start,stop,status,marker,<covariates...>.
[[nodiscard]] Cohort read_cohort(const std::filesystem::path& path, double time_unit = kDaysPerYear);
void write_cohort(const std::filesystem::path& path, const Cohort& cohort);

/// Shortest round-trip text for a double ("NA" for NaN).
[[nodiscard]] std::string format_number(double v);

/// `key = value` lines; '#' starts a comment. Keys may repeat.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
[[nodiscard]] KeyValues read_key_values(const std::filesystem::path& path);
[[nodiscard]] KeyValues parse_key_values(const std::string& text);

/// Model file: `name = <id>` and one `term = <covariate>` or
/// `term = log:<covariate>` per term.
[[nodiscard]] ModelSpec parse_model_spec(const KeyValues& kv);

/// Scenario file keys: n, seed, marker_dist, gamma, rate, gamma_after,
/// change_time, cause (repeatable, gamma:rate), censoring, censor_rate,
/// censor_multiplier.
[[nodiscard]] ScenarioSpec parse_scenario(const KeyValues& kv);

/// Column names of the two PBC tables, overridable by a mapping file with
/// keys `baseline.<field>` and `sequential.<field>`.
struct PbcColumns {
  std::map<std::string, std::string> baseline{{"id", "id"},         {"time", "time"},
                                              {"status", "status"}, {"age", "age"},
                                              {"edema", "edema"},   {"bili", "bili"},
                                              {"albumin", "albumin"}, {"protime", "protime"}};
  std::map<std::string, std::string> sequential{{"id", "id"},           {"day", "day"},
                                                {"age", "age"},         {"edema", "edema"},
                                                {"bili", "bili"},       {"albumin", "albumin"},
                                                {"protime", "protime"}};

  static PbcColumns from_mapping(const KeyValues& kv);
};

struct PbcData {
  Cohort baseline;     // one row per subject, corrected baseline values
  Cohort sequential;   // counting-process intervals with LOCF labs
  CountingProcessReport report;
  std::size_t protime_corrections = 0;
  std::size_t age_corrections = 0;
};

/// Loads the PBC tables: transplant is censored, baseline protime and age
/// are replaced by day-0 sequential values where they disagree, labs are
/// carried forward and age stays at its baseline value.
[[nodiscard]] PbcData load_pbc(const std::filesystem::path& baseline_csv,
                               const std::filesystem::path& sequential_csv,
                               const PbcColumns& columns = {});

/// Table written as CSV or JSON (array of row objects).
struct ResultTable {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void write_table_csv(const std::filesystem::path& path, const ResultTable& table);
void write_table_json(const std::filesystem::path& path, const ResultTable& table);

/// Plot data: time, raw, smoothed, ci_low, ci_high. Times are divided by
/// `time_unit`; CI columns are NaN when not supplied.
[[nodiscard]] ResultTable plot_table(const AccuracySeries& series, double time_unit,
                                     const std::vector<double>& ci_low = {},
                                     const std::vector<double>& ci_high = {});

}  // namespace tdroc
