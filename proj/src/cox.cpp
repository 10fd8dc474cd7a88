#include "tdroc/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "tdroc/error.hpp"
#include "tdroc/rng.hpp"

namespace tdroc {

std::string ModelTerm::label() const {
  return transform == Transform::log ? "log(" + covariate + ")" : covariate;
}

double ModelTerm::apply(double x) const {
  if (std::isnan(x)) throw InputError("missing value for covariate " + covariate);
  if (transform == Transform::identity) return x;
  if (!(x > 0.0)) {
    throw InputError("log transform of non-positive value " + std::to_string(x) + " in " + covariate);
  }
  return std::log(x);
}

ModelSpec ModelSpec::five_covariate() {
  return {"five_covariate",
          {{"bili", Transform::log},
           {"albumin", Transform::identity},
           {"protime", Transform::log},
           {"edema", Transform::identity},
           {"age", Transform::identity}}};
}

ModelSpec ModelSpec::four_covariate() {
  return {"four_covariate",
          {{"albumin", Transform::identity},
           {"protime", Transform::log},
           {"edema", Transform::identity},
           {"age", Transform::identity}}};
}

ModelSpec ModelSpec::marker_only() { return {"marker", {{"marker", Transform::identity}}}; }

namespace {

// Column source for a term: a named covariate, or the interval marker when
// the cohort has no covariate called "marker".
struct TermSource {
  std::optional<std::size_t> covariate;
};

std::vector<TermSource> resolve_terms(const std::vector<std::string>& names, const ModelSpec& spec) {
  std::vector<TermSource> out;
  for (const auto& term : spec.terms) {
    auto it = std::find(names.begin(), names.end(), term.covariate);
    if (it != names.end()) {
      out.push_back({static_cast<std::size_t>(it - names.begin())});
    } else if (term.covariate == "marker") {
      out.push_back({std::nullopt});
    } else {
      throw InputError("model term " + term.label() + ": covariate not found");
    }
  }
  return out;
}

double term_value(const Interval& iv, const ModelTerm& term, const TermSource& src) {
  const double raw = src.covariate ? iv.covariates[*src.covariate] : iv.marker;
  return term.apply(raw);
}

void check_full_rank(const CoxData& data) {
  const Eigen::Index p = data.x.cols();
  if (p == 0) return;
  Eigen::MatrixXd centered = data.x.rowwise() - data.x.colwise().mean();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(centered);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // name every term that enters a linear dependency
    Eigen::FullPivLU<Eigen::MatrixXd> lu(centered);
    lu.setThreshold(1e-10);
    const Eigen::MatrixXd kernel = lu.kernel();
    std::ostringstream msg;
    msg << "singular design: collinear terms";
    for (Eigen::Index j = 0; j < p; ++j) {
      if (kernel.row(j).cwiseAbs().maxCoeff() > 1e-8) msg << " " << data.names[j];
    }
    throw EstimationError(msg.str());
  }
}

CoxData select_rows(const CoxData& data, const std::vector<std::size_t>& rows) {
  CoxData out;
  out.names = data.names;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.start.push_back(data.start[rows[r]]);
    out.stop.push_back(data.stop[rows[r]]);
    out.event.push_back(data.event[rows[r]]);
    out.x.row(static_cast<Eigen::Index>(r)) = data.x.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

}  // namespace

CoxData make_cox_data(const Cohort& cohort, const ModelSpec& spec, int event_cause) {
  if (spec.terms.empty()) throw InputError("model has no terms");
  const auto sources = resolve_terms(cohort.covariate_names(), spec);
  CoxData data;
  const auto ivs = cohort.intervals();
  data.x.resize(static_cast<Eigen::Index>(ivs.size()), static_cast<Eigen::Index>(spec.terms.size()));
  for (const auto& term : spec.terms) data.names.push_back(term.label());
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    data.start.push_back(ivs[i].start);
    data.stop.push_back(ivs[i].stop);
    const bool ev = event_cause == 0 ? ivs[i].is_event() : ivs[i].status == event_cause;
    data.event.push_back(ev ? 1 : 0);
    for (std::size_t k = 0; k < spec.terms.size(); ++k) {
      data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          term_value(ivs[i], spec.terms[k], sources[k]);
    }
  }
  return data;
}

PartialLikelihood cox_partial_likelihood(const CoxData& data, const Eigen::VectorXd& beta,
                                         TieMethod ties) {
  const std::size_t n = data.stop.size();
  const Eigen::Index p = data.x.cols();
  const Eigen::VectorXd eta = data.x * beta;
  const double shift = n > 0 ? eta.maxCoeff() : 0.0;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) w(i) = std::exp(eta(i) - shift);

  std::vector<std::size_t> by_stop(n);
  std::iota(by_stop.begin(), by_stop.end(), 0);
  std::sort(by_stop.begin(), by_stop.end(),
            [&](std::size_t a, std::size_t b) { return data.stop[a] > data.stop[b]; });
  std::vector<std::size_t> by_start(n);
  std::iota(by_start.begin(), by_start.end(), 0);
  std::sort(by_start.begin(), by_start.end(),
            [&](std::size_t a, std::size_t b) { return data.start[a] > data.start[b]; });

  PartialLikelihood out;
  out.score = Eigen::VectorXd::Zero(p);
  out.information = Eigen::MatrixXd::Zero(p, p);

  // Sweep event times in decreasing order: rows enter when stop >= t and
  // leave once start >= t.
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  std::size_t in = 0;
  std::size_t out_ptr = 0;
  std::size_t k = 0;
  while (k < n) {
    const double t = data.stop[by_stop[k]];
    // tied rows ending at t
    std::size_t k_end = k;
    while (k_end < n && data.stop[by_stop[k_end]] == t) ++k_end;
    bool any_event = false;
    for (std::size_t m = k; m < k_end; ++m) any_event |= data.event[by_stop[m]] != 0;
    for (; in < k_end; ++in) {
      const std::size_t i = by_stop[in];
      const auto xi = data.x.row(static_cast<Eigen::Index>(i)).transpose();
      s0 += w(i);
      s1 += w(i) * xi;
      s2 += w(i) * xi * xi.transpose();
    }
    for (; out_ptr < n && data.start[by_start[out_ptr]] >= t; ++out_ptr) {
      const std::size_t i = by_start[out_ptr];
      const auto xi = data.x.row(static_cast<Eigen::Index>(i)).transpose();
      s0 -= w(i);
      s1 -= w(i) * xi;
      s2 -= w(i) * xi * xi.transpose();
    }
    if (any_event) {
      double d0 = 0.0;
      Eigen::VectorXd d1 = Eigen::VectorXd::Zero(p);
      Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(p, p);
      int deaths = 0;
      for (std::size_t m = k; m < k_end; ++m) {
        const std::size_t i = by_stop[m];
        if (data.event[i] == 0) continue;
        const auto xi = data.x.row(static_cast<Eigen::Index>(i)).transpose();
        ++deaths;
        out.loglik += eta(i);
        out.score += xi;
        d0 += w(i);
        d1 += w(i) * xi;
        d2 += w(i) * xi * xi.transpose();
      }
      for (int l = 0; l < deaths; ++l) {
        const double a = ties == TieMethod::efron ? static_cast<double>(l) / deaths : 0.0;
        const double r0 = s0 - a * d0;
        const Eigen::VectorXd r1 = s1 - a * d1;
        const Eigen::MatrixXd r2 = s2 - a * d2;
        const Eigen::VectorXd mean = r1 / r0;
        out.loglik -= std::log(r0) + shift;
        out.score -= mean;
        out.information += r2 / r0 - mean * mean.transpose();
      }
    }
    k = k_end;
  }
  return out;
}

CoxFit fit_cox(const CoxData& raw, const CoxOptions& options) {
  if (std::none_of(raw.event.begin(), raw.event.end(), [](int e) { return e != 0; })) {
    throw EstimationError("Cox fit: no events");
  }
  check_full_rank(raw);

  CoxData data = raw;
  const Eigen::Index p = data.x.cols();
  const Eigen::RowVectorXd centers = data.x.colwise().mean();
  data.x.rowwise() -= centers;

  CoxFit fit;
  fit.terms = data.names;
  fit.centers.assign(centers.data(), centers.data() + p);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  PartialLikelihood cur = cox_partial_likelihood(data, beta, options.ties);
  fit.log_partial_likelihood_null = cur.loglik;
  fit.loglik_trace.push_back(cur.loglik);

  // Stop on the Newton decrement U' I^-1 U (about twice the remaining gain
  // in log-likelihood); an absolute score bound fails to be reachable once
  // the score is a sum over thousands of subjects.
  auto newton_step = [](const PartialLikelihood& pl) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(pl.information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw EstimationError("Cox fit: information matrix is not positive definite");
    }
    return Eigen::VectorXd(ldlt.solve(pl.score));
  };
  int iter = 0;
  Eigen::VectorXd step = newton_step(cur);
  double decrement = cur.score.dot(step);
  while (decrement >= options.tolerance && iter < options.max_iterations) {
    ++iter;
    PartialLikelihood next = cox_partial_likelihood(data, beta + step, options.ties);
    int halvings = 0;
    while ((!std::isfinite(next.loglik) || next.loglik < cur.loglik) && halvings < 30) {
      step *= 0.5;
      ++halvings;
      next = cox_partial_likelihood(data, beta + step, options.ties);
    }
    if (!std::isfinite(next.loglik) || next.loglik < cur.loglik) break;
    beta += step;
    cur = std::move(next);
    fit.loglik_trace.push_back(cur.loglik);
    step = newton_step(cur);
    decrement = cur.score.dot(step);
  }

  fit.iterations = iter;
  fit.score_norm = cur.score.cwiseAbs().maxCoeff();
  fit.converged = decrement < options.tolerance;
  fit.log_partial_likelihood = cur.loglik;
  fit.information = cur.information;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cur.information);
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  for (Eigen::Index j = 0; j < p; ++j) fit.std_errors.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  return fit;
}

CoxFit fit_cox(const Cohort& cohort, const ModelSpec& spec, const CoxOptions& options) {
  CoxFit fit = fit_cox(make_cox_data(cohort, spec), options);
  fit.spec = spec;
  return fit;
}

double predict_risk(const CoxFit& fit, const std::map<std::string, double>& covariates) {
  double eta = 0.0;
  for (std::size_t k = 0; k < fit.spec.terms.size(); ++k) {
    const auto& term = fit.spec.terms[k];
    auto it = covariates.find(term.covariate);
    if (it == covariates.end()) throw InputError("missing covariate " + term.covariate);
    eta += (term.apply(it->second) - fit.centers[k]) * fit.coefficients[k];
  }
  return std::exp(eta);
}

std::vector<double> predict_risk(const CoxFit& fit, const Cohort& cohort) {
  const auto sources = resolve_terms(cohort.covariate_names(), fit.spec);
  std::vector<double> out;
  out.reserve(cohort.interval_count());
  for (const auto& iv : cohort.intervals()) {
    double eta = 0.0;
    for (std::size_t k = 0; k < fit.spec.terms.size(); ++k) {
      eta += (term_value(iv, fit.spec.terms[k], sources[k]) - fit.centers[k]) * fit.coefficients[k];
    }
    out.push_back(std::exp(eta));
  }
  return out;
}

std::vector<int> assign_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw InputError("number of folds must be at least 2");
  if (static_cast<std::size_t>(k) > n) throw InputError("more folds than subjects");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<int> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return fold;
}

std::vector<double> kfold_cv_scores(const Cohort& baseline_cohort, const ModelSpec& spec, int k,
                                    std::uint64_t seed, const CoxOptions& options) {
  const Cohort base = baseline_cohort.view(MarkerMode::baseline);
  const std::size_t n = base.subject_count();
  const auto folds = assign_folds(n, k, seed);
  const CoxData all = make_cox_data(base, spec);

  std::vector<double> scores(n, kNaN);
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) (folds[i] == f ? test : train).push_back(i);
    CoxData train_data = select_rows(all, train);
    if (std::none_of(train_data.event.begin(), train_data.event.end(), [](int e) { return e != 0; })) {
      throw EstimationError("cross-validation: training split without events (fold " +
                            std::to_string(f + 1) + ")");
    }
    CoxFit fit = fit_cox(train_data, options);
    fit.spec = spec;
    for (std::size_t i : test) {
      double eta = 0.0;
      for (Eigen::Index j = 0; j < all.x.cols(); ++j) {
        eta += (all.x(static_cast<Eigen::Index>(i), j) - fit.centers[j]) * fit.coefficients[j];
      }
      scores[i] = std::exp(eta);
    }
  }
  return scores;
}

Cohort time_varying_scores(const Cohort& cohort, const CoxFit& fit_on_baseline) {
  if (!fit_on_baseline.converged) throw EstimationError("baseline Cox fit did not converge");
  const auto scores = predict_risk(fit_on_baseline, cohort);
  return cohort.with_markers(scores);
}

}  // namespace tdroc
