#include "tdroc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "tdroc/error.hpp"

namespace tdroc {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

int parse_int(const std::string& cell, const std::string& what) {
  const double v = parse_number(cell);
  if (std::isnan(v) || v != std::floor(v)) throw InputError("non-integer " + what + ": '" + cell + "'");
  return static_cast<int>(v);
}

}  // namespace

std::size_t CsvTable::column(const std::string& name, const std::string& file) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw InputError("missing column '" + name + "'" + (file.empty() ? "" : " in " + file));
  }
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_input(path);
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw InputError(path.string() + " line " + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.lines.push_back(lineno);
  }
  return table;
}

double parse_number(const std::string& cell) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return kNaN;
  if (cell == "Inf" || cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-Inf" || cell == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw InputError("not a number: '" + cell + "'");
  return v;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Cohort read_cohort(const fs::path& path, double time_unit) {
  const CsvTable t = read_csv(path);
  static const std::vector<std::string> fixed = {"id", "start", "stop", "status", "marker"};
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    if (k >= t.header.size() || t.header[k] != fixed[k]) {
      throw InputError(path.string() + ": column " + std::to_string(k + 1) + " must be '" + fixed[k] +
                       "'" + (k < t.header.size() ? ", found '" + t.header[k] + "'" : ""));
    }
  }
  std::vector<std::string> names(t.header.begin() + 5, t.header.end());
  std::vector<Interval> rows;
  rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    try {
      Interval iv;
      iv.subject_id = c[0];
      iv.start = parse_number(c[1]);
      iv.stop = parse_number(c[2]);
      iv.status = parse_int(c[3], "status");
      iv.marker = parse_number(c[4]);
      for (std::size_t k = 5; k < c.size(); ++k) iv.covariates.push_back(parse_number(c[k]));
      if (iv.status < 0) throw InputError("negative status");
      rows.push_back(std::move(iv));
    } catch (const InputError& e) {
      throw InputError(path.string() + " line " + std::to_string(t.lines[r]) + ": " + e.what());
    }
  }
  return Cohort(std::move(rows), std::move(names), time_unit);
}

void write_cohort(const fs::path& path, const Cohort& cohort) {
  auto out = open_output(path);
  out << "id,start,stop,status,marker";
  for (const auto& n : cohort.covariate_names()) out << ',' << csv_escape(n);
  out << '\n';
  for (const auto& iv : cohort.intervals()) {
    out << csv_escape(iv.subject_id) << ',' << format_number(iv.start) << ',' << format_number(iv.stop)
        << ',' << iv.status << ',' << format_number(iv.marker);
    for (double v : iv.covariates) out << ',' << format_number(v);
    out << '\n';
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("line " + std::to_string(lineno) + ": empty key");
    kv.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_key_values(const fs::path& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_key_values(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

ModelSpec parse_model_spec(const KeyValues& kv) {
  ModelSpec spec;
  for (const auto& [key, value] : kv) {
    if (key == "name") {
      spec.name = value;
    } else if (key == "term") {
      ModelTerm term;
      if (value.rfind("log:", 0) == 0) {
        term.transform = Transform::log;
        term.covariate = trim(value.substr(4));
      } else {
        term.covariate = value;
      }
      if (term.covariate.empty()) throw InputError("empty model term");
      spec.terms.push_back(term);
    } else {
      throw InputError("unknown model key '" + key + "'");
    }
  }
  if (spec.terms.empty()) throw InputError("model file defines no terms");
  return spec;
}

ScenarioSpec parse_scenario(const KeyValues& kv) {
  ScenarioSpec spec;
  HazardSpec main;
  std::vector<HazardSpec> extra;
  auto num = [](const std::string& key, const std::string& v) {
    try {
      return parse_number(v);
    } catch (const InputError&) {
      throw InputError("scenario key '" + key + "': not a number '" + v + "'");
    }
  };
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      spec.n = static_cast<std::size_t>(num(key, value));
    } else if (key == "seed") {
      spec.seed = std::stoull(value);
    } else if (key == "marker_dist") {
      if (value == "standard_normal") spec.marker_dist = MarkerDist::standard_normal;
      else if (value == "uniform") spec.marker_dist = MarkerDist::uniform;
      else throw InputError("unknown marker_dist '" + value + "'");
    } else if (key == "gamma") {
      main.gamma = num(key, value);
    } else if (key == "rate") {
      main.rate = num(key, value);
    } else if (key == "gamma_after") {
      main.gamma_after = num(key, value);
    } else if (key == "change_time") {
      main.change_time = num(key, value);
    } else if (key == "cause") {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw InputError("cause must be gamma:rate");
      HazardSpec h;
      h.gamma = num(key, value.substr(0, colon));
      h.rate = num(key, value.substr(colon + 1));
      extra.push_back(h);
    } else if (key == "censoring") {
      if (value == "none") spec.censoring = CensoringKind::none;
      else if (value == "independent") spec.censoring = CensoringKind::independent;
      else if (value == "marker_dependent") spec.censoring = CensoringKind::marker_dependent;
      else throw InputError("unknown censoring '" + value + "'");
    } else if (key == "censor_rate") {
      spec.censor_rate = num(key, value);
    } else if (key == "censor_multiplier") {
      spec.censor_multiplier = num(key, value);
    } else {
      throw InputError("unknown scenario key '" + key + "'");
    }
  }
  // `cause` entries list every cause explicitly; otherwise a single cause
  // from gamma/rate.
  spec.causes = extra.empty() ? std::vector<HazardSpec>{main} : extra;
  spec.validate();
  return spec;
}

PbcColumns PbcColumns::from_mapping(const KeyValues& kv) {
  PbcColumns cols;
  for (const auto& [key, value] : kv) {
    const auto dot = key.find('.');
    const std::string table = key.substr(0, dot);
    const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);
    auto& target = table == "baseline" ? cols.baseline : cols.sequential;
    if ((table != "baseline" && table != "sequential") || !target.contains(field)) {
      throw InputError("unknown mapping key '" + key + "'");
    }
    target[field] = value;
  }
  return cols;
}

PbcData load_pbc(const fs::path& baseline_csv, const fs::path& sequential_csv, const PbcColumns& columns) {
  const std::vector<std::string> names = {"age", "edema", "bili", "albumin", "protime"};
  const CsvTable base = read_csv(baseline_csv);
  const std::string bfile = baseline_csv.filename().string();
  const std::size_t b_id = base.column(columns.baseline.at("id"), bfile);
  const std::size_t b_time = base.column(columns.baseline.at("time"), bfile);
  const std::size_t b_status = base.column(columns.baseline.at("status"), bfile);
  std::vector<std::size_t> b_cov;
  for (const auto& n : names) b_cov.push_back(base.column(columns.baseline.at(n), bfile));

  std::vector<BaselineRow> baseline;
  for (std::size_t r = 0; r < base.rows.size(); ++r) {
    const auto& c = base.rows[r];
    try {
      BaselineRow row;
      row.subject_id = c[b_id];
      row.follow_up = parse_number(c[b_time]);
      row.status = transplant_censor(parse_int(c[b_status], "status"));
      for (std::size_t k : b_cov) row.covariates.push_back(parse_number(c[k]));
      baseline.push_back(std::move(row));
    } catch (const InputError& e) {
      throw InputError(bfile + " line " + std::to_string(base.lines[r]) + ": " + e.what());
    }
  }

  // An empty sequential file (no header) gives a baseline-only cohort.
  CsvTable seq;
  if (fs::file_size(sequential_csv) > 0) seq = read_csv(sequential_csv);
  std::vector<MeasurementRow> visits;
  if (!seq.header.empty()) {
    const std::string sfile = sequential_csv.filename().string();
    const std::size_t s_id = seq.column(columns.sequential.at("id"), sfile);
    const std::size_t s_day = seq.column(columns.sequential.at("day"), sfile);
    std::vector<std::size_t> s_cov;
    for (const auto& n : names) s_cov.push_back(seq.column(columns.sequential.at(n), sfile));
    for (std::size_t r = 0; r < seq.rows.size(); ++r) {
      const auto& c = seq.rows[r];
      try {
        MeasurementRow m;
        m.subject_id = c[s_id];
        m.day = parse_number(c[s_day]);
        for (std::size_t k : s_cov) m.covariates.push_back(parse_number(c[k]));
        m.source_line = seq.lines[r];
        visits.push_back(std::move(m));
      } catch (const InputError& e) {
        throw InputError(sfile + " line " + std::to_string(seq.lines[r]) + ": " + e.what());
      }
    }
  }

  // Baseline correction from day-0 measurements (protime, age).
  PbcData out;
  std::unordered_map<std::string, const MeasurementRow*> day0;
  for (const auto& m : visits) {
    if (m.day == 0.0) day0.emplace(m.subject_id, &m);
  }
  const std::size_t age = 0;
  const std::size_t protime = 4;
  for (auto& row : baseline) {
    auto it = day0.find(row.subject_id);
    if (it == day0.end()) continue;
    for (std::size_t k : {age, protime}) {
      const double v = it->second->covariates[k];
      if (std::isnan(v) || std::abs(v - row.covariates[k]) <= 1e-9 * std::max(1.0, std::abs(v))) continue;
      row.covariates[k] = v;
      ++(k == age ? out.age_corrections : out.protime_corrections);
    }
  }

  out.baseline = build_counting_process(baseline, {}, names);
  out.sequential = build_counting_process(baseline, visits, names, {"age"}, &out.report);
  return out;
}

void write_table_csv(const fs::path& path, const ResultTable& table) {
  auto out = open_output(path);
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << csv_escape(table.columns[k]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (const auto* d = std::get_if<double>(&row[k])) out << format_number(*d);
      else out << csv_escape(std::get<std::string>(row[k]));
    }
    out << '\n';
  }
}

void write_table_json(const fs::path& path, const ResultTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (const auto* d = std::get_if<double>(&row[k])) {
        if (std::isfinite(*d)) obj[table.columns[k]] = *d;
        else obj[table.columns[k]] = nullptr;
      } else {
        obj[table.columns[k]] = std::get<std::string>(row[k]);
      }
    }
    arr.push_back(std::move(obj));
  }
  auto out = open_output(path);
  out << arr.dump(2) << '\n';
}

ResultTable plot_table(const AccuracySeries& series, double time_unit, const std::vector<double>& ci_low,
                       const std::vector<double>& ci_high) {
  ResultTable t;
  t.columns = {"time", "raw", "smoothed", "ci_low", "ci_high"};
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    t.rows.push_back({p.time / time_unit, p.raw, p.smoothed, i < ci_low.size() ? ci_low[i] : kNaN,
                      i < ci_high.size() ? ci_high[i] : kNaN});
  }
  return t;
}

}  // namespace tdroc
