// tdroc: command-line front end for time-dependent ROC analysis.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdroc/case_study.hpp"
#include "tdroc/cd_roc.hpp"
#include "tdroc/competing.hpp"
#include "tdroc/cox.hpp"
#include "tdroc/error.hpp"
#include "tdroc/id_roc.hpp"
#include "tdroc/io.hpp"
#include "tdroc/resampling.hpp"
#include "tdroc/simulate.hpp"

#ifndef TDROC_DATA_DIR
#define TDROC_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace tdroc;

namespace {

struct Config {
  std::string input;
  std::string input_b;
  std::string sequential;
  std::string mapping;
  std::string output_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 49;
  std::optional<double> lambda;
  bool cv_bandwidth = false;
  std::vector<double> landmarks{1.0, 4.0, 6.0};
  double window = 1.0;
  double tau = 10.0;
  double time = 1.0;
  double fpf = 0.1;
  std::size_t nboot = 0;
  std::string marker_mode = "baseline";
  std::string model = "five_covariate";
  int cause = 1;
  int folds = 10;
  double time_unit = kDaysPerYear;
  std::string method = "nne";
  std::string ties = "efron";
  std::string statistic = "cindex";
  std::string scenario;
  unsigned threads = 0;
};

MarkerMode parse_mode(const std::string& s) {
  if (s == "baseline") return MarkerMode::baseline;
  if (s == "updated") return MarkerMode::updated;
  throw InputError("unknown marker mode '" + s + "'");
}

ModelSpec parse_model(const std::string& s) {
  if (s == "five_covariate") return ModelSpec::five_covariate();
  if (s == "four_covariate") return ModelSpec::four_covariate();
  if (s.rfind("custom:", 0) == 0) return parse_model_spec(read_key_values(s.substr(7)));
  throw InputError("unknown model '" + s + "'");
}

CoxOptions cox_options(const Config& cfg) {
  CoxOptions o;
  if (cfg.ties == "breslow") o.ties = TieMethod::breslow;
  else if (cfg.ties != "efron") throw InputError("unknown tie method '" + cfg.ties + "'");
  return o;
}

Cohort load_input(const Config& cfg) {
  if (cfg.input.empty()) throw InputError("--input is required");
  if (!fs::exists(cfg.input)) throw InputError("input file not found: " + cfg.input);
  return read_cohort(cfg.input, cfg.time_unit);
}

void emit(const Config& cfg, const std::string& stem, const ResultTable& table) {
  const fs::path path = fs::path(cfg.output_dir) / (stem + "." + cfg.format);
  if (cfg.format == "json") write_table_json(path, table);
  else write_table_csv(path, table);
  std::cout << "wrote " << path.string() << '\n';
}

ResultTable roc_table(const RocCurve& roc) {
  ResultTable t;
  t.columns = {"threshold", "fpf", "tpf"};
  for (const auto& p : roc.points) t.rows.push_back({p.threshold, p.fpf, p.tpf});
  return t;
}

// Single-row plot file for a scalar estimate with an optional CI.
ResultTable scalar_plot(double time, double value, const BootstrapResult* boot) {
  ResultTable t;
  t.columns = {"time", "raw", "smoothed", "ci_low", "ci_high"};
  t.rows.push_back({time, value, value, boot ? boot->ci_low : kNaN, boot ? boot->ci_high : kNaN});
  return t;
}

// Pointwise bootstrap of a smoothed curve at the full-data time points.
std::pair<std::vector<double>, std::vector<double>> curve_ci(
    const Cohort& cohort, const AccuracySeries& full,
    const std::function<AccuracySeries(const Cohort&)>& build, const Config& cfg) {
  if (cfg.nboot == 0) return {};
  std::vector<double> times;
  for (const auto& p : full.points) times.push_back(p.time);
  auto stat = [&](const Cohort& c) {
    const AccuracySeries s = build(c);
    std::vector<double> v;
    for (double t : times) v.push_back(s.smoothed_at(t));
    return v;
  };
  const auto res = bootstrap_many(cohort, stat, cfg.nboot, cfg.seed, cfg.threads);
  std::vector<double> lo;
  std::vector<double> hi;
  for (const auto& r : res) {
    lo.push_back(r.ci_low);
    hi.push_back(r.ci_high);
  }
  return {lo, hi};
}

int cmd_prepare_pbc(const Config& cfg) {
  const fs::path base = cfg.input.empty() ? fs::path(TDROC_DATA_DIR) / "pbc.csv" : fs::path(cfg.input);
  const fs::path seq =
      cfg.sequential.empty() ? fs::path(TDROC_DATA_DIR) / "pbcseq.csv" : fs::path(cfg.sequential);
  for (const auto& p : {base, seq}) {
    if (!fs::exists(p)) throw InputError("input file not found: " + p.string());
  }
  const PbcColumns cols = cfg.mapping.empty() ? PbcColumns{} : PbcColumns::from_mapping(read_key_values(cfg.mapping));
  const PbcData data = load_pbc(base, seq, cols);
  fs::create_directories(cfg.output_dir);
  write_cohort(fs::path(cfg.output_dir) / "cohort.csv", data.sequential);
  write_cohort(fs::path(cfg.output_dir) / "baseline.csv", data.baseline);
  {
    std::ofstream out(fs::path(cfg.output_dir) / "rejected.txt");
    for (const auto& r : data.report.rejected) out << r << '\n';
  }
  std::cout << "subjects=" << data.report.subjects << " deaths=" << data.report.events
            << " records=" << data.report.records << '\n'
            << "intervals=" << data.report.intervals << " rejected=" << data.report.rejected.size()
            << " protime_corrections=" << data.protime_corrections
            << " age_corrections=" << data.age_corrections << '\n';
  return 0;
}

int cmd_km(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const auto records = cohort.subject_records();
  const StepCurve km = kaplan_meier(records);
  ResultTable t;
  t.columns = {"time", "survival"};
  for (std::size_t k = 0; k < km.times.size(); ++k) t.rows.push_back({km.times[k] / cfg.time_unit, km.values[k]});
  emit(cfg, "km", t);
  ResultTable plot;
  plot.columns = {"time", "raw", "smoothed", "ci_low", "ci_high"};
  for (std::size_t k = 0; k < km.times.size(); ++k) {
    plot.rows.push_back({km.times[k] / cfg.time_unit, km.values[k], km.values[k], kNaN, kNaN});
  }
  emit(cfg, "km_plot", plot);
  return 0;
}

int cmd_cd_roc(const Config& cfg) {
  const Cohort cohort = load_input(cfg).view(parse_mode(cfg.marker_mode));
  const auto records = cohort.subject_records();
  const double t = cfg.time * cfg.time_unit;
  auto estimate = [&](std::span<const SurvivalRecord> r) {
    return cfg.method == "km" ? cd_roc_km(r, t) : cd_roc_nne(r, t, KernelSpec{cfg.lambda.value_or(default_cd_span(r.size()))});
  };
  if (cfg.method != "km" && cfg.method != "nne") throw InputError("unknown method '" + cfg.method + "'");
  const RocCurve roc = estimate(records);
  emit(cfg, "cd_roc", roc_table(roc));
  std::optional<BootstrapResult> boot;
  if (cfg.nboot > 0) {
    boot = bootstrap_many(
        cohort,
        [&](const Cohort& c) {
          const auto r = c.subject_records();
          try {
            return std::vector<double>{estimate(r).auc};
          } catch (const EstimationError&) {
            return std::vector<double>{kNaN};
          }
        },
        cfg.nboot, cfg.seed, cfg.threads)[0];
  }
  emit(cfg, "cd_roc_plot", scalar_plot(cfg.time, roc.auc, boot ? &*boot : nullptr));
  std::cout << "auc=" << format_number(roc.auc) << '\n';
  return 0;
}

int cmd_cd_sequential(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const MarkerMode mode = parse_mode(cfg.marker_mode);
  std::vector<double> index;
  for (double s : cfg.landmarks) index.push_back(s * cfg.time_unit);
  std::optional<KernelSpec> k;
  if (cfg.lambda) k = KernelSpec{*cfg.lambda};
  const auto series = sequential_cd_auc(cohort, index, cfg.window * cfg.time_unit, k, mode);
  ResultTable t;
  t.columns = {"landmark", "auc", "n_cases", "n_controls", "defined"};
  for (const auto& p : series.points) {
    t.rows.push_back({p.time / cfg.time_unit, p.raw, static_cast<double>(p.n_cases),
                      static_cast<double>(p.n_controls), p.defined ? 1.0 : 0.0});
  }
  emit(cfg, "cd_sequential", t);
  std::vector<double> lo;
  std::vector<double> hi;
  if (cfg.nboot > 0) {
    const auto res = bootstrap_many(
        cohort,
        [&](const Cohort& c) {
          const auto s = sequential_cd_auc(c, index, cfg.window * cfg.time_unit, k, mode);
          std::vector<double> v;
          for (const auto& p : s.points) v.push_back(p.defined ? p.raw : kNaN);
          return v;
        },
        cfg.nboot, cfg.seed, cfg.threads);
    for (const auto& r : res) {
      lo.push_back(r.ci_low);
      hi.push_back(r.ci_high);
    }
  }
  emit(cfg, "cd_sequential_plot", plot_table(series, cfg.time_unit, lo, hi));
  return 0;
}

double choose_span(const Config& cfg, const AccuracySeries& raw, double fallback) {
  if (cfg.cv_bandwidth) {
    const auto grid = default_bandwidth_grid();
    const double span = bandwidth_cv(raw, grid);
    std::cout << "cross-validated span=" << format_number(span) << '\n';
    return span;
  }
  return cfg.lambda.value_or(fallback);
}

int cmd_id_auc(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const MarkerMode mode = parse_mode(cfg.marker_mode);
  const AccuracySeries raw = mean_rank(cohort, mode);
  const double span = choose_span(cfg, raw, 0.2);
  const AccuracySeries smooth = wmr_smooth(raw, KernelSpec{span});
  ResultTable t;
  t.columns = {"time", "mean_rank", "n_cases", "n_controls", "smoothed", "variance"};
  for (const auto& p : smooth.points) {
    t.rows.push_back({p.time / cfg.time_unit, p.raw, static_cast<double>(p.n_cases),
                      static_cast<double>(p.n_controls), p.smoothed, p.variance});
  }
  emit(cfg, "id_auc", t);
  const auto [lo, hi] = curve_ci(
      cohort, smooth, [&](const Cohort& c) { return wmr_smooth(mean_rank(c, mode), KernelSpec{span}); }, cfg);
  emit(cfg, "id_auc_plot", plot_table(smooth, cfg.time_unit, lo, hi));
  return 0;
}

int cmd_id_tpr(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const MarkerMode mode = parse_mode(cfg.marker_mode);
  const double span = cfg.lambda.value_or(0.3);
  const AccuracySeries series = dynamic_tpr(cohort, cfg.fpf, mode, KernelSpec{span});
  ResultTable t;
  t.columns = {"time", "tpf", "n_cases", "n_controls", "smoothed", "variance"};
  for (const auto& p : series.points) {
    t.rows.push_back({p.time / cfg.time_unit, p.raw, static_cast<double>(p.n_cases),
                      static_cast<double>(p.n_controls), p.smoothed, p.variance});
  }
  emit(cfg, "id_tpr", t);
  const auto [lo, hi] = curve_ci(
      cohort, series, [&](const Cohort& c) { return dynamic_tpr(c, cfg.fpf, mode, KernelSpec{span}); }, cfg);
  emit(cfg, "id_tpr_plot", plot_table(series, cfg.time_unit, lo, hi));
  return 0;
}

ResultTable fit_table(const CoxFit& fit) {
  ResultTable t;
  t.columns = {"term", "coef", "se", "hazard_ratio", "center"};
  for (std::size_t k = 0; k < fit.terms.size(); ++k) {
    t.rows.push_back({fit.terms[k], fit.coefficients[k], fit.std_errors[k], std::exp(fit.coefficients[k]),
                      fit.centers[k]});
  }
  return t;
}

int cmd_cox_fit(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const CoxFit fit = fit_cox(cohort, parse_model(cfg.model), cox_options(cfg));
  emit(cfg, "cox_fit", fit_table(fit));
  ResultTable trace;
  trace.columns = {"iteration", "log_partial_likelihood"};
  for (std::size_t k = 0; k < fit.loglik_trace.size(); ++k) {
    trace.rows.push_back({static_cast<double>(k), fit.loglik_trace[k]});
  }
  emit(cfg, "cox_fit_plot", trace);
  std::cout << "loglik=" << format_number(fit.log_partial_likelihood)
            << " null=" << format_number(fit.log_partial_likelihood_null) << " iterations=" << fit.iterations
            << " converged=" << (fit.converged ? "yes" : "no") << '\n';
  return 0;
}

int cmd_cv_scores(const Config& cfg) {
  const Cohort cohort = load_input(cfg).view(MarkerMode::baseline);
  const auto scores = kfold_cv_scores(cohort, parse_model(cfg.model), cfg.folds, cfg.seed, cox_options(cfg));
  const Cohort scored = cohort.with_markers(scores);
  const fs::path path = fs::path(cfg.output_dir) / "cv_scores_cohort.csv";
  write_cohort(path, scored);
  std::cout << "wrote " << path.string() << '\n';
  ResultTable t;
  t.columns = {"id", "score"};
  for (const auto& iv : scored.intervals()) t.rows.push_back({iv.subject_id, iv.marker});
  emit(cfg, "cv_scores", t);
  return 0;
}

int cmd_cindex(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  StatisticSpec spec;
  spec.kind = StatisticKind::c_index;
  spec.mode = parse_mode(cfg.marker_mode);
  spec.tau = cfg.tau * cfg.time_unit;
  const CindexResult res = c_index(cohort, spec.mode, spec.tau);
  std::optional<BootstrapResult> boot;
  if (cfg.nboot > 0) boot = bootstrap_ci(cohort, spec, cfg.nboot, cfg.seed, cfg.threads);
  ResultTable t;
  t.columns = {"tau", "c_index", "ci_low", "ci_high", "event_times"};
  t.rows.push_back({cfg.tau, res.value, boot ? boot->ci_low : kNaN, boot ? boot->ci_high : kNaN,
                    static_cast<double>(res.n_times)});
  emit(cfg, "cindex", t);
  emit(cfg, "cindex_plot", scalar_plot(cfg.tau, res.value, boot ? &*boot : nullptr));
  std::cout << "c_index=" << format_number(res.value) << '\n';
  return 0;
}

int cmd_cindex_diff(const Config& cfg) {
  const Cohort a = load_input(cfg);
  if (cfg.input_b.empty()) throw InputError("--compare is required");
  const Cohort b = read_cohort(cfg.input_b, cfg.time_unit);
  if (a.interval_count() != b.interval_count()) throw InputError("cohorts differ in their intervals");
  for (std::size_t i = 0; i < a.interval_count(); ++i) {
    const auto& x = a.interval(i);
    const auto& y = b.interval(i);
    if (x.subject_id != y.subject_id || x.start != y.start || x.stop != y.stop || x.status != y.status) {
      throw InputError("cohorts differ at row " + std::to_string(i + 1) + " (subject " + x.subject_id + ")");
    }
  }
  std::vector<double> ma;
  std::vector<double> mb;
  for (const auto& iv : a.intervals()) ma.push_back(iv.marker);
  for (const auto& iv : b.intervals()) mb.push_back(iv.marker);
  const MarkerMode mode = parse_mode(cfg.marker_mode);
  const std::size_t B = cfg.nboot > 0 ? cfg.nboot : 500;
  const BootstrapResult res = cindex_difference_ci(a, ma, mb, cfg.tau * cfg.time_unit, mode, B, cfg.seed, cfg.threads);
  ResultTable t;
  t.columns = {"difference", "ci_low", "ci_high", "B", "defined", "unstable"};
  t.rows.push_back({res.point, res.ci_low, res.ci_high, static_cast<double>(res.B),
                    static_cast<double>(res.defined), res.unstable ? 1.0 : 0.0});
  emit(cfg, "cindex_diff", t);
  emit(cfg, "cindex_diff_plot", scalar_plot(cfg.tau, res.point, &res));
  std::cout << "difference=" << format_number(res.point) << " ci=(" << format_number(res.ci_low) << ", "
            << format_number(res.ci_high) << ")\n";
  return 0;
}

int cmd_competing_cd(const Config& cfg) {
  const Cohort cohort = load_input(cfg).view(MarkerMode::baseline);
  const auto records = cohort.subject_records();
  const KernelSpec kernel{cfg.lambda.value_or(default_cd_span(records.size()))};
  const RocCurve roc = cd_accuracy_competing(records, cfg.cause, cfg.time * cfg.time_unit, kernel);
  emit(cfg, "competing_cd", roc_table(roc));
  emit(cfg, "competing_cd_plot", scalar_plot(cfg.time, roc.auc, nullptr));
  std::cout << "auc=" << format_number(roc.auc) << '\n';
  return 0;
}

int cmd_competing_id(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  const auto res = id_accuracy_competing(cohort, cfg.cause, cfg.time * cfg.time_unit, parse_mode(cfg.marker_mode));
  emit(cfg, "competing_id", roc_table(res.roc));
  emit(cfg, "competing_id_plot", scalar_plot(cfg.time, res.roc.auc, nullptr));
  std::cout << "gamma=" << format_number(res.gamma) << " auc=" << format_number(res.roc.auc) << '\n';
  return 0;
}

int cmd_bootstrap(const Config& cfg) {
  const Cohort cohort = load_input(cfg);
  StatisticSpec spec;
  spec.mode = parse_mode(cfg.marker_mode);
  spec.time = cfg.time * cfg.time_unit;
  spec.window = cfg.window * cfg.time_unit;
  spec.tau = cfg.tau * cfg.time_unit;
  spec.fpf = cfg.fpf;
  if (cfg.statistic == "cindex") {
    spec.kind = StatisticKind::c_index;
  } else if (cfg.statistic == "id-auc") {
    spec.kind = StatisticKind::id_auc;
    spec.lambda = cfg.lambda.value_or(0.2);
  } else if (cfg.statistic == "id-tpr") {
    spec.kind = StatisticKind::id_tpr;
    spec.lambda = cfg.lambda.value_or(0.3);
  } else if (cfg.statistic == "cd-auc") {
    spec.kind = StatisticKind::cd_auc;
    spec.cd_span = cfg.lambda;
  } else {
    throw InputError("unknown statistic '" + cfg.statistic + "'");
  }
  const std::size_t B = cfg.nboot > 0 ? cfg.nboot : 500;
  const BootstrapResult res = bootstrap_ci(cohort, spec, B, cfg.seed, cfg.threads);
  ResultTable t;
  t.columns = {"statistic", "point", "ci_low", "ci_high", "B", "defined", "unstable", "seed"};
  t.rows.push_back({spec.label(), res.point, res.ci_low, res.ci_high, static_cast<double>(res.B),
                    static_cast<double>(res.defined), res.unstable ? 1.0 : 0.0, std::to_string(res.seed)});
  emit(cfg, "bootstrap", t);
  ResultTable reps;
  reps.columns = {"replicate", "value"};
  for (std::size_t r = 0; r < res.replicates.size(); ++r) reps.rows.push_back({static_cast<double>(r + 1), res.replicates[r]});
  emit(cfg, "bootstrap_replicates", reps);
  emit(cfg, "bootstrap_plot", scalar_plot(cfg.time, res.point, &res));
  if (res.unstable) std::cout << "warning: fewer than 90% of replicates defined\n";
  return 0;
}

int cmd_simulate(const Config& cfg, bool seed_given) {
  if (cfg.scenario.empty()) throw InputError("--scenario is required");
  ScenarioSpec spec = parse_scenario(read_key_values(cfg.scenario));
  if (seed_given) spec.seed = cfg.seed;
  const Cohort cohort = generate(spec);
  const fs::path path = fs::path(cfg.output_dir) / "simulated_cohort.csv";
  write_cohort(path, cohort);
  std::cout << "wrote " << path.string() << '\n';
  const auto records = cohort.subject_records();
  ResultTable t;
  t.columns = {"n", "events", "censored", "truth_cd_auc", "time"};
  std::size_t events = 0;
  for (const auto& r : records) events += r.is_event() ? 1 : 0;
  const double truth = truth_cd_auc(spec, 0.0, cfg.time, 200000);
  t.rows.push_back({static_cast<double>(records.size()), static_cast<double>(events),
                    static_cast<double>(records.size() - events), truth, cfg.time});
  emit(cfg, "simulate", t);
  emit(cfg, "simulate_plot", scalar_plot(cfg.time, truth, nullptr));
  return 0;
}

// Published values for the PBC table, printed next to the estimates.
struct Reference {
  const char* model;
  MarkerMode mode;
  double id[3];
  double c;
  double cd[3];
};
constexpr Reference kReference[] = {
    {"four_covariate", MarkerMode::baseline, {0.84, 0.69, 0.64}, 0.72, {0.77, 0.72, 0.77}},
    {"five_covariate", MarkerMode::baseline, {0.88, 0.85, 0.66}, 0.79, {0.80, 0.78, 0.65}},
    {"four_covariate", MarkerMode::updated, {0.90, 0.86, 0.84}, 0.86, {0.79, 0.81, 0.84}},
    {"five_covariate", MarkerMode::updated, {0.92, 0.92, 0.88}, 0.89, {0.82, 0.84, 0.87}},
};

int cmd_case_study(const Config& cfg) {
  const fs::path base = cfg.input.empty() ? fs::path(TDROC_DATA_DIR) / "pbc.csv" : fs::path(cfg.input);
  const fs::path seq =
      cfg.sequential.empty() ? fs::path(TDROC_DATA_DIR) / "pbcseq.csv" : fs::path(cfg.sequential);
  const PbcData data = load_pbc(base, seq);
  CaseStudyOptions opt;
  opt.seed = cfg.seed;
  opt.folds = cfg.folds;
  opt.nboot = cfg.nboot;
  opt.threads = cfg.threads;
  opt.tau_years = cfg.tau;
  opt.window_years = cfg.window;
  opt.landmarks_years = cfg.landmarks;
  opt.fpf = cfg.fpf;
  opt.cox = cox_options(cfg);
  if (cfg.lambda) opt.lambda_auc = *cfg.lambda;
  opt.cv_bandwidth = cfg.cv_bandwidth;
  const CaseStudyResult res = run_case_study(data, opt);

  const bool standard = cfg.landmarks == std::vector<double>{1.0, 4.0, 6.0};
  ResultTable t;
  t.columns = {"model", "score"};
  for (double s : cfg.landmarks) {
    const std::string y = format_number(s) + "y";
    for (const char* part : {"", "_ci_low", "_ci_high"}) t.columns.push_back("auc_id_" + y + part);
  }
  for (const char* part : {"c_index", "c_index_ci_low", "c_index_ci_high"}) t.columns.emplace_back(part);
  for (double s : cfg.landmarks) {
    const std::string y = format_number(s) + "y";
    for (const char* part : {"", "_ci_low", "_ci_high"}) t.columns.push_back("auc_cd_" + y + part);
  }
  if (standard) {
    for (const char* c : {"ref_auc_id_1y", "ref_auc_id_4y", "ref_auc_id_6y", "ref_c_index", "ref_auc_cd_1y",
                          "ref_auc_cd_4y", "ref_auc_cd_6y"}) {
      t.columns.emplace_back(c);
    }
  }
  std::printf("%-15s %-8s | %-20s | %-6s | %-20s\n", "model", "score", "AUC I/D", "c", "AUC C/D");
  for (const auto& row : res.rows) {
    std::vector<ResultTable::Cell> cells{row.model, row.mode == MarkerMode::baseline ? "baseline" : "updated"};
    auto add = [&](const BootstrapResult& b) {
      cells.emplace_back(b.point);
      cells.emplace_back(b.ci_low);
      cells.emplace_back(b.ci_high);
    };
    for (const auto& b : row.id_auc) add(b);
    add(row.cindex);
    for (const auto& b : row.cd_auc) add(b);
    const Reference* ref = nullptr;
    for (const auto& r : kReference) {
      if (row.model == r.model && row.mode == r.mode) ref = &r;
    }
    if (standard && ref) {
      for (double v : ref->id) cells.emplace_back(v);
      cells.emplace_back(ref->c);
      for (double v : ref->cd) cells.emplace_back(v);
    }
    t.rows.push_back(std::move(cells));

    std::printf("%-15s %-8s |", row.model.c_str(), row.mode == MarkerMode::baseline ? "baseline" : "updated");
    for (const auto& b : row.id_auc) std::printf(" %.2f", b.point);
    std::printf(" | %.2f |", row.cindex.point);
    for (const auto& b : row.cd_auc) std::printf(" %.2f", b.point);
    if (standard && ref) {
      std::printf("   (reference");
      for (double v : ref->id) std::printf(" %.2f", v);
      std::printf(" | %.2f |", ref->c);
      for (double v : ref->cd) std::printf(" %.2f", v);
      std::printf(")");
    }
    if (cfg.cv_bandwidth) std::printf("   [span %.3f]", row.id_span);
    std::printf("\n");
  }
  emit(cfg, "case_study", t);

  ResultTable diff;
  diff.columns = {"difference", "ci_low", "ci_high", "reference", "reference_ci_low", "reference_ci_high"};
  const auto& d = res.cindex_difference;
  diff.rows.push_back({d.point, d.ci_low, d.ci_high, 0.07, 0.04, 0.11});
  emit(cfg, "cindex_difference", diff);
  std::printf("c-index difference (five - four, baseline): %.3f (%.3f, %.3f)   (reference 0.07 (0.04, 0.11))\n",
              d.point, d.ci_low, d.ci_high);

  ResultTable fits;
  fits.columns = {"model", "term", "coef", "se"};
  for (const auto& sc : res.scores) {
    for (std::size_t k = 0; k < sc.full_fit.terms.size(); ++k) {
      fits.rows.push_back({sc.spec.name, sc.full_fit.terms[k], sc.full_fit.coefficients[k], sc.full_fit.std_errors[k]});
    }
  }
  emit(cfg, "case_study_fits", fits);

  // plot data for the accuracy curves
  for (const auto& row : res.rows) {
    const std::string stem = row.model + "_" + (row.mode == MarkerMode::baseline ? "baseline" : "updated");
    emit(cfg, "plot_auc_id_" + stem, plot_table(row.id_series, data.baseline.time_unit()));
    emit(cfg, "plot_tpr_" + stem, plot_table(row.tpr_series, data.baseline.time_unit()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent ROC analysis for censored survival data"};
  app.require_subcommand(1);
  Config cfg;
  bool seed_given = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Input cohort CSV (id,start,stop,status,marker,...)");
    sub->add_option("--output-dir", cfg.output_dir, "Directory for result files");
    sub->add_option("--format", cfg.format, "Result format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { cfg.seed = s; seed_given = true; },
                                            "Random seed");
    sub->add_option("--time-unit", cfg.time_unit, "Days per display time unit")->check(CLI::PositiveNumber);
    sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    sub->add_option("--marker-mode", cfg.marker_mode, "baseline or updated")
        ->check(CLI::IsMember({"baseline", "updated"}));
    sub->add_option("--nboot", cfg.nboot, "Bootstrap replicates");
  };
  auto with_lambda = [&](CLI::App* sub) {
    sub->add_option_function<double>("--lambda", [&](double v) { cfg.lambda = v; }, "Nearest-neighbour span");
  };

  auto* prepare = app.add_subcommand("prepare-pbc", "Build the counting-process PBC cohort");
  common(prepare);
  prepare->add_option("--sequential", cfg.sequential, "PBC sequential CSV");
  prepare->add_option("--mapping", cfg.mapping, "Column mapping file");

  auto* km = app.add_subcommand("km", "Kaplan-Meier curve");
  common(km);

  auto* cd = app.add_subcommand("cd-roc", "Cumulative/dynamic ROC at one time");
  common(cd);
  with_lambda(cd);
  cd->add_option("--time", cfg.time, "Prediction time (display units)");
  cd->add_option("--method", cfg.method, "km or nne")->check(CLI::IsMember({"km", "nne"}));

  auto* seqcd = app.add_subcommand("cd-sequential", "Landmark AUC C/D series");
  common(seqcd);
  with_lambda(seqcd);
  seqcd->add_option("--landmarks", cfg.landmarks, "Landmark times (display units)");
  seqcd->add_option("--window", cfg.window, "Prediction window (display units)");

  auto* idauc = app.add_subcommand("id-auc", "Incident/dynamic AUC curve (mean rank)");
  common(idauc);
  with_lambda(idauc);
  idauc->add_flag("--cv-bandwidth", cfg.cv_bandwidth, "Choose the span by cross-validation");

  auto* idtpr = app.add_subcommand("id-tpr", "Sensitivity at a fixed FPF over time");
  common(idtpr);
  with_lambda(idtpr);
  idtpr->add_option("--fpf", cfg.fpf, "False-positive fraction");

  auto* coxfit = app.add_subcommand("cox-fit", "Fit a Cox model");
  common(coxfit);
  coxfit->add_option("--model", cfg.model, "five_covariate, four_covariate or custom:<path>");
  coxfit->add_option("--ties", cfg.ties, "efron or breslow");

  auto* cv = app.add_subcommand("cv-scores", "Cross-validated baseline risk scores");
  common(cv);
  cv->add_option("--model", cfg.model, "five_covariate, four_covariate or custom:<path>");
  cv->add_option("--folds", cfg.folds, "Number of folds");
  cv->add_option("--ties", cfg.ties, "efron or breslow");

  auto* cidx = app.add_subcommand("cindex", "Concordance index");
  common(cidx);
  cidx->add_option("--tau", cfg.tau, "Truncation time (display units)");

  auto* cdiff = app.add_subcommand("cindex-diff", "Paired bootstrap of a c-index difference");
  common(cdiff);
  cdiff->add_option("--compare", cfg.input_b, "Cohort with the second marker (same rows)");
  cdiff->add_option("--tau", cfg.tau, "Truncation time (display units)");

  auto* ccd = app.add_subcommand("competing-cd", "Cause-specific cumulative/dynamic ROC");
  common(ccd);
  with_lambda(ccd);
  ccd->add_option("--cause", cfg.cause, "Cause code");
  ccd->add_option("--time", cfg.time, "Prediction time (display units)");

  auto* cid = app.add_subcommand("competing-id", "Cause-specific incident/dynamic ROC");
  common(cid);
  cid->add_option("--cause", cfg.cause, "Cause code");
  cid->add_option("--time", cfg.time, "Time point (display units)");

  auto* boot = app.add_subcommand("bootstrap", "Bootstrap CI for one statistic");
  common(boot);
  with_lambda(boot);
  boot->add_option("--statistic", cfg.statistic, "cindex, id-auc, id-tpr or cd-auc")
      ->check(CLI::IsMember({"cindex", "id-auc", "id-tpr", "cd-auc"}));
  boot->add_option("--time", cfg.time, "Evaluation time or landmark (display units)");
  boot->add_option("--window", cfg.window, "Prediction window for cd-auc");
  boot->add_option("--tau", cfg.tau, "Truncation time for cindex");
  boot->add_option("--fpf", cfg.fpf, "False-positive fraction for id-tpr");

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic cohort");
  common(sim);
  sim->add_option("--scenario", cfg.scenario, "Scenario file")->required();
  sim->add_option("--time", cfg.time, "Time for the reference AUC C/D");

  auto* cs = app.add_subcommand("case-study", "Full PBC analysis");
  common(cs);
  with_lambda(cs);
  cs->add_option("--sequential", cfg.sequential, "PBC sequential CSV");
  cs->add_flag("--cv-bandwidth", cfg.cv_bandwidth, "Choose AUC I/D spans by cross-validation");
  cs->add_option("--landmarks", cfg.landmarks, "Landmark times (years)");
  cs->add_option("--window", cfg.window, "Prediction window (years)");
  cs->add_option("--tau", cfg.tau, "c-index truncation (years)");
  cs->add_option("--fpf", cfg.fpf, "False-positive fraction for sensitivity curves");
  cs->add_option("--folds", cfg.folds, "Cross-validation folds");
  cs->add_option("--ties", cfg.ties, "efron or breslow");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(cfg.output_dir);
    if (*prepare) return cmd_prepare_pbc(cfg);
    if (*km) return cmd_km(cfg);
    if (*cd) return cmd_cd_roc(cfg);
    if (*seqcd) return cmd_cd_sequential(cfg);
    if (*idauc) return cmd_id_auc(cfg);
    if (*idtpr) return cmd_id_tpr(cfg);
    if (*coxfit) return cmd_cox_fit(cfg);
    if (*cv) return cmd_cv_scores(cfg);
    if (*cidx) return cmd_cindex(cfg);
    if (*cdiff) return cmd_cindex_diff(cfg);
    if (*ccd) return cmd_competing_cd(cfg);
    if (*cid) return cmd_competing_id(cfg);
    if (*boot) return cmd_bootstrap(cfg);
    if (*sim) return cmd_simulate(cfg, seed_given);
    if (*cs) return cmd_case_study(cfg);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
