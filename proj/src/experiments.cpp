/*
Copyright 2026 The odfkit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "odfkit/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "odfkit/version.hpp"

namespace odf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kLambdas[3] = {1.0, 10.0, 100.0};

std::string format_value(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Runs body(0..count-1) over a fixed worker count; results must be written
// into per-index slots so the outcome is identical for any thread count.
void parallel_indices(int count, int threads, const std::function<void(int)>& body) {
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  t = std::min(t, count);
  if (t <= 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= count) return;
        try {
          body(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (const double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return kNaN;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (const double x : xs) acc += (x - m) * (x - m);
  const double sd = std::sqrt(acc / (static_cast<double>(xs.size()) - 1.0));
  return sd / std::sqrt(static_cast<double>(xs.size()));
}

double rmise_from_projections(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              std::size_t eval_p) {
  const double area = 2.0 * M_PI / static_cast<double>(eval_p);
  return std::sqrt(area * (a - b).squaredNorm());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (kappas.empty()) throw InvalidArgumentError("config: no kappa values");
  for (const double k : kappas) {
    if (!(k > 0.0)) throw InvalidArgumentError("config: kappa must be positive");
  }
  if (sigma2 < 0.0) throw InvalidArgumentError("config: sigma2 must be nonnegative");
  if (n_dirs < 2) throw InvalidArgumentError("config: need at least 2 directions");
  if (grid_p < 1 || bayes_grid_p < 1 || eval_p < 1) {
    throw InvalidArgumentError("config: grid sizes must be positive");
  }
  if (trials < 1) throw InvalidArgumentError("config: trials must be positive");
  if (k_folds < 2) throw InvalidArgumentError("config: k_folds must be at least 2");
  if (post_bary_samples < 1) {
    throw InvalidArgumentError("config: post_bary_samples must be positive");
  }
  if (correlation_estimator != "nnls" && correlation_estimator != "b2s") {
    throw InvalidArgumentError("config: correlation estimator must be nnls or b2s");
  }
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "kappa=";
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (i) out << ",";
    out << format_value(kappas[i]);
  }
  out << " sigma2=" << format_value(sigma2) << " n=" << n_dirs
      << " grid_p=" << grid_p << " bayes_grid_p=" << bayes_grid_p
      << " post_bary_samples=" << post_bary_samples << " eval_p=" << eval_p
      << " trials=" << trials << " k_folds=" << k_folds << " seed=" << seed
      << " estimator=" << correlation_estimator;
  return out.str();
}

double ResultTable::cell(const std::string& row, const std::string& col) const {
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    if (row_labels[r] != row) continue;
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      if (col_labels[c] == col) {
        return values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  throw InvalidArgumentError("ResultTable::cell: no cell (" + row + ", " + col + ")");
}

std::string ResultTable::to_tsv() const {
  const bool with_se = standard_errors.size() > 0;
  const bool with_notes = !row_notes.empty();
  std::ostringstream out;
  out << "# odfkit " << kVersion << " " << metadata << "\n";
  out << row_header;
  for (const auto& c : col_labels) {
    out << "\t" << c;
    if (with_se) out << "\t" << c << "_se";
  }
  if (with_notes) out << "\tstatus";
  out << "\n";
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out << row_labels[r];
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      out << "\t"
          << format_value(values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      if (with_se) {
        out << "\t"
            << format_value(standard_errors(static_cast<Eigen::Index>(r),
                                            static_cast<Eigen::Index>(c)));
      }
    }
    if (with_notes) out << "\t" << (row_notes[r].empty() ? "ok" : row_notes[r]);
    out << "\n";
  }
  return out.str();
}

double pearson_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw InvalidArgumentError("pearson_corr: series length mismatch");
  }
  if (a.size() < 2) {
    throw UndefinedCorrelationError("pearson_corr: need at least two points");
  }
  const double ma = a.mean();
  const double mb = b.mean();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    throw UndefinedCorrelationError("pearson_corr: zero-variance series");
  }
  return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// Model comparison (two orthogonal equal-weight fibers).

namespace {

struct ComparisonSetup {
  GridPtr grid;
  GridPtr bayes_grid;
  GridPtr eval_grid;
  AcquisitionScheme scheme;
};

constexpr int kModelCount = 5;
const char* kModelLabels[kModelCount] = {"bayes-mean", "post-bary", "b2s", "nnls",
                                         "kfold-bary"};
constexpr int kMeasureCount = 9;
const char* kMeasureLabels[kMeasureCount] = {"AE",   "RMISE", "EMD",
                                             "TV1",  "TV10",  "TV100",
                                             "SKL1", "SKL10", "SKL100"};

Eigen::MatrixXd comparison_trial(const ExperimentConfig& cfg,
                                 const ComparisonSetup& setup, Rng rng) {
  const double kappa = cfg.kappas[0];
  Direction u = random_direction(rng);
  Direction v = random_orthogonal_direction(u, rng);
  if (cfg.grid_align_truth) {
    u = (*setup.grid)[setup.grid->nearest(u)];
    v = (*setup.grid)[setup.grid->nearest(v)];
  }
  const DiscreteFodf truth({{u, 0.5}, {v, 0.5}});
  const Eigen::VectorXd mu = predict_signal(truth, setup.scheme);
  const SignalSet sig(setup.scheme, add_rician_noise(mu, cfg.sigma2, rng));

  // The likelihood variance must stay positive even for noise-free data.
  const double bayes_sigma2 = std::max(cfg.sigma2, 1e-6);
  const BayesPosterior post = fit_bayes(sig, setup.bayes_grid, bayes_sigma2);
  std::vector<Fodf> fits;
  fits.reserve(kModelCount);
  fits.emplace_back(posterior_mean(post));
  fits.emplace_back(posterior_barycenter(post, setup.grid, cfg.post_bary_samples, rng));
  fits.emplace_back(*fit_best_k_subset(sig, setup.grid, 2).fodf);
  fits.emplace_back(*fit_nnls(sig, setup.grid).fodf);
  fits.emplace_back(kfold_barycenter(sig, setup.grid, cfg.k_folds, nnls_estimator(), rng));

  // Smoothed truth forms (log domain, shared across models) and projection.
  Eigen::VectorXd truth_log[3];
  Eigen::VectorXd truth_weights[3];
  for (int l = 0; l < 3; ++l) {
    truth_log[l] = smooth_log(Fodf(truth), SmoothingParam(kLambdas[l]), setup.grid);
    truth_weights[l] = truth_log[l].array().exp();
  }
  const Eigen::VectorXd truth_proj = st_project(truth, kappa, setup.eval_grid->points());

  Eigen::MatrixXd row(kModelCount, kMeasureCount);
  for (int m = 0; m < kModelCount; ++m) {
    const Fodf& fit = fits[static_cast<std::size_t>(m)];
    const auto* atomic = std::get_if<DiscreteFodf>(&fit);
    row(m, 0) = (atomic && atomic->size() == truth.size())
                    ? angular_error(truth, *atomic)
                    : kNaN;
    row(m, 1) = rmise_from_projections(
        truth_proj, st_project(fit, kappa, setup.eval_grid->points()), cfg.eval_p);
    row(m, 2) = emd(Fodf(truth), fit);
    for (int l = 0; l < 3; ++l) {
      const Eigen::VectorXd fit_log =
          smooth_log(fit, SmoothingParam(kLambdas[l]), setup.grid);
      row(m, 3 + l) = total_variation(truth_weights[l],
                                      Eigen::VectorXd(fit_log.array().exp()));
      row(m, 6 + l) = skl_from_log(truth_log[l], fit_log);
    }
  }
  return row;
}

}  // namespace

ResultTable run_model_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  const ComparisonSetup setup{
      make_grid(cfg.grid_p), make_grid(cfg.bayes_grid_p),
      cfg.eval_p == 1000 ? default_eval_grid() : make_grid(cfg.eval_p),
      AcquisitionScheme(sample_grid(cfg.n_dirs).points(), cfg.kappas[0], 1.0,
                        cfg.sigma2)};
  const Rng master(cfg.seed);

  std::vector<Eigen::MatrixXd> per_trial(static_cast<std::size_t>(cfg.trials));
  parallel_indices(cfg.trials, cfg.threads, [&](int t) {
    per_trial[static_cast<std::size_t>(t)] =
        comparison_trial(cfg, setup, master.child(static_cast<std::uint64_t>(t)));
  });

  ResultTable table;
  table.row_header = "model";
  table.row_labels.assign(kModelLabels, kModelLabels + kModelCount);
  table.col_labels.assign(kMeasureLabels, kMeasureLabels + kMeasureCount);
  table.values.resize(kModelCount, kMeasureCount);
  table.standard_errors.resize(kModelCount, kMeasureCount);
  table.metadata = "study=model-comparison " + cfg.echo();
  for (int m = 0; m < kModelCount; ++m) {
    for (int c = 0; c < kMeasureCount; ++c) {
      std::vector<double> xs;
      xs.reserve(static_cast<std::size_t>(cfg.trials));
      bool undefined = false;
      for (const auto& row : per_trial) {
        const double x = row(m, c);
        if (std::isnan(x)) {
          undefined = true;
          break;
        }
        xs.push_back(x);
      }
      table.values(m, c) = undefined ? kNaN : mean_of(xs);
      table.standard_errors(m, c) = undefined ? kNaN : stderr_of(xs);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Correlation of error with replicate error.

namespace {

constexpr int kCorrMetricCount = 9;
const char* kCorrMetricLabels[kCorrMetricCount] = {
    "EMD", "W2", "TV1", "TV10", "TV100", "SKL1", "SKL10", "SKL100", "RMISE"};

struct CorrelationTrial {
  double err[kCorrMetricCount];
  double re[kCorrMetricCount];
  double rrmse_value;
  double re_rmise;
};

CorrelationTrial correlation_trial(const ExperimentConfig& cfg, double kappa,
                                   const GridPtr& grid, const GridPtr& eval_grid,
                                   const AcquisitionScheme& scheme, Rng rng) {
  const Direction u1 = random_direction(rng);
  const Direction u2 = random_direction(rng);
  const double w1 = rng.uniform();
  const DiscreteFodf truth({{u1, w1}, {u2, 1.0 - w1}});

  const Eigen::VectorXd mu = predict_signal(truth, scheme);
  const SignalSet y1(scheme, add_rician_noise(mu, cfg.sigma2, rng));
  const SignalSet y2(scheme, add_rician_noise(mu, cfg.sigma2, rng));

  const bool use_b2s = cfg.correlation_estimator == "b2s";
  const NnlsFit fit1 = use_b2s ? fit_best_k_subset(y1, grid, 2) : fit_nnls(y1, grid);
  const NnlsFit fit2 = use_b2s ? fit_best_k_subset(y2, grid, 2) : fit_nnls(y2, grid);
  if (!fit1.fodf || !fit2.fodf) {
    throw EmptyFitError("correlation study: degenerate fit");
  }
  const DiscreteFodf& f1 = *fit1.fodf;
  const DiscreteFodf& f2 = *fit2.fodf;
  // The prediction scale for RRMSE always comes from a full NNLS fit.
  const double s0_hat = use_b2s ? fit_nnls(y1, grid).s0_hat : fit1.s0_hat;

  CorrelationTrial out;
  out.err[0] = emd(Fodf(truth), Fodf(f1));
  out.re[0] = emd(Fodf(f1), Fodf(f2));
  out.err[1] = wasserstein2(Fodf(truth), Fodf(f1));
  out.re[1] = wasserstein2(Fodf(f1), Fodf(f2));
  for (int l = 0; l < 3; ++l) {
    const SmoothingParam lam(kLambdas[l]);
    const Eigen::VectorXd lt = smooth_log(Fodf(truth), lam, grid);
    const Eigen::VectorXd l1 = smooth_log(Fodf(f1), lam, grid);
    const Eigen::VectorXd l2 = smooth_log(Fodf(f2), lam, grid);
    out.err[2 + l] = total_variation(Eigen::VectorXd(lt.array().exp()),
                                     Eigen::VectorXd(l1.array().exp()));
    out.re[2 + l] = total_variation(Eigen::VectorXd(l1.array().exp()),
                                    Eigen::VectorXd(l2.array().exp()));
    out.err[5 + l] = skl_from_log(lt, l1);
    out.re[5 + l] = skl_from_log(l1, l2);
  }
  const Eigen::VectorXd proj_truth = st_project(truth, kappa, eval_grid->points());
  const Eigen::VectorXd proj_f1 = st_project(f1, kappa, eval_grid->points());
  const Eigen::VectorXd proj_f2 = st_project(f2, kappa, eval_grid->points());
  out.err[8] = rmise_from_projections(proj_truth, proj_f1, cfg.eval_p);
  out.re_rmise = rmise_from_projections(proj_f1, proj_f2, cfg.eval_p);
  out.re[8] = out.re_rmise;

  const Eigen::VectorXd pred1 = s0_hat * st_project(f1, kappa, scheme.meas_dirs);
  out.rrmse_value = std::sqrt((y2.y - pred1).squaredNorm() /
                              static_cast<double>(scheme.n()));
  return out;
}

}  // namespace

ResultTable run_correlation_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const GridPtr grid = make_grid(cfg.grid_p);
  const GridPtr eval_grid =
      cfg.eval_p == 1000 ? default_eval_grid() : make_grid(cfg.eval_p);
  const std::vector<Direction> dirs = sample_grid(cfg.n_dirs).points();
  const Rng master(cfg.seed);

  ResultTable table;
  table.row_header = "kappa";
  table.col_labels.assign(kCorrMetricLabels, kCorrMetricLabels + kCorrMetricCount);
  table.col_labels.push_back("RRMSE");
  table.values.resize(static_cast<Eigen::Index>(cfg.kappas.size()),
                      kCorrMetricCount + 1);
  table.standard_errors.resize(static_cast<Eigen::Index>(cfg.kappas.size()),
                               kCorrMetricCount + 1);
  table.metadata = "study=correlation " + cfg.echo();

  for (std::size_t ki = 0; ki < cfg.kappas.size(); ++ki) {
    const double kappa = cfg.kappas[ki];
    const AcquisitionScheme scheme(dirs, kappa, 1.0, cfg.sigma2);
    table.row_labels.push_back(format_value(kappa));

    std::vector<CorrelationTrial> per_trial(static_cast<std::size_t>(cfg.trials));
    // Stream (ki, t) keeps every kappa block independent and reproducible.
    const Rng kappa_master = master.child(ki);
    parallel_indices(cfg.trials, cfg.threads, [&](int t) {
      per_trial[static_cast<std::size_t>(t)] =
          correlation_trial(cfg, kappa, grid, eval_grid, scheme,
                            kappa_master.child(static_cast<std::uint64_t>(t)));
    });

    Eigen::VectorXd err(cfg.trials), re(cfg.trials);
    for (int c = 0; c < kCorrMetricCount; ++c) {
      for (int t = 0; t < cfg.trials; ++t) {
        err[t] = per_trial[static_cast<std::size_t>(t)].err[c];
        re[t] = per_trial[static_cast<std::size_t>(t)].re[c];
      }
      double r = kNaN;
      try {
        r = pearson_corr(err, re);
      } catch (const UndefinedCorrelationError&) {
      }
      table.values(static_cast<Eigen::Index>(ki), c) = r;
      table.standard_errors(static_cast<Eigen::Index>(ki), c) =
          std::isnan(r) ? kNaN
                        : (1.0 - r * r) / std::sqrt(static_cast<double>(cfg.trials) - 3.0);
    }
    for (int t = 0; t < cfg.trials; ++t) {
      err[t] = per_trial[static_cast<std::size_t>(t)].rrmse_value;
      re[t] = per_trial[static_cast<std::size_t>(t)].re_rmise;
    }
    double r = kNaN;
    try {
      r = pearson_corr(err, re);
    } catch (const UndefinedCorrelationError&) {
    }
    table.values(static_cast<Eigen::Index>(ki), kCorrMetricCount) = r;
    table.standard_errors(static_cast<Eigen::Index>(ki), kCorrMetricCount) =
        std::isnan(r) ? kNaN
                      : (1.0 - r * r) / std::sqrt(static_cast<double>(cfg.trials) - 3.0);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Per-voxel maps over tabular datasets.

ResultTable voxel_map(const VoxelDataset& dataset, const ExperimentConfig& cfg) {
  cfg.validate();
  if (dataset.dirs.empty()) {
    throw InvalidArgumentError("voxel_map: dataset has no directions");
  }
  const GridPtr grid = make_grid(cfg.grid_p);
  const AcquisitionScheme scheme(dataset.dirs, cfg.kappas[0], 1.0, cfg.sigma2);
  const Rng master(cfg.seed);
  const Estimator estimator = nnls_estimator();
  bool any_replicate = false;
  for (const auto& vox : dataset.voxels) {
    if (vox.y2) any_replicate = true;
  }

  const int count = static_cast<int>(dataset.voxels.size());
  struct VoxelRow {
    double kre = kNaN, re = kNaN, cv = kNaN;
    std::string note;
  };
  std::vector<VoxelRow> rows(static_cast<std::size_t>(count));
  parallel_indices(count, cfg.threads, [&](int vi) {
    const auto& vox = dataset.voxels[static_cast<std::size_t>(vi)];
    VoxelRow& row = rows[static_cast<std::size_t>(vi)];
    if (!vox.parse_error.empty()) {
      row.note = vox.parse_error;
      return;
    }
    try {
      Rng rng = master.child(static_cast<std::uint64_t>(vi));
      const SignalSet y1(scheme, vox.y1);
      DistanceSpec emd_spec;
      emd_spec.metric = Metric::Emd;
      row.kre = kfold_replicate_error(y1, grid, cfg.k_folds, estimator, emd_spec, rng)
                    .value;
      if (vox.y2) {
        const SignalSet y2(scheme, *vox.y2);
        row.re = emd(Fodf(estimator(y1, grid)), Fodf(estimator(y2, grid)));
      }
      row.cv = cvrmse(y1, grid, cfg.k_folds, estimator, rng);
    } catch (const Error& e) {
      row.note = e.what();
      row.kre = row.re = row.cv = kNaN;
    }
  });

  ResultTable table;
  table.row_header = "voxel";
  table.col_labels = {"KRE_EMD"};
  if (any_replicate) table.col_labels.push_back("RE_EMD");
  table.col_labels.push_back("CVRMSE");
  table.values.resize(count, static_cast<Eigen::Index>(table.col_labels.size()));
  table.metadata = "study=voxel-map " + cfg.echo();
  for (int vi = 0; vi < count; ++vi) {
    table.row_labels.push_back(dataset.voxels[static_cast<std::size_t>(vi)].id);
    table.row_notes.push_back(rows[static_cast<std::size_t>(vi)].note);
    Eigen::Index c = 0;
    table.values(vi, c++) = rows[static_cast<std::size_t>(vi)].kre;
    if (any_replicate) table.values(vi, c++) = rows[static_cast<std::size_t>(vi)].re;
    table.values(vi, c) = rows[static_cast<std::size_t>(vi)].cv;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Pinned study targets.

namespace {

std::string describe(double got, double want, double tol) {
  std::ostringstream out;
  out << "got " << format_value(got) << ", target " << format_value(want) << " +/- "
      << format_value(tol);
  return out.str();
}

bool has_row(const ResultTable& table, const std::string& row) {
  for (const auto& r : table.row_labels) {
    if (r == row) return true;
  }
  return false;
}

void add_point_check(std::vector<CheckResult>& out, const ResultTable& table,
                     const std::string& kappa_row, const std::string& metric,
                     double want, double tol) {
  if (!has_row(table, kappa_row)) return;
  const double got = table.cell(kappa_row, metric);
  out.push_back({"corr(" + metric + ") at kappa=" + kappa_row,
                 std::isfinite(got) && std::abs(got - want) <= tol,
                 describe(got, want, tol)});
}

}  // namespace

std::vector<CheckResult> check_correlation_targets(const ResultTable& table) {
  std::vector<CheckResult> out;
  for (const char* kappa : {"0.1", "1", "2"}) {
    if (!has_row(table, kappa)) continue;
    const double got = table.cell(kappa, "EMD");
    out.push_back({std::string("corr floor EMD at kappa=") + kappa,
                   std::isfinite(got) && got > 0.38,
                   "got " + format_value(got) + ", floor 0.38"});
  }
  add_point_check(out, table, "0.1", "EMD", 0.45, 0.06);
  add_point_check(out, table, "1", "EMD", 0.52, 0.06);
  add_point_check(out, table, "1", "TV1", 0.55, 0.06);
  add_point_check(out, table, "2", "TV10", 0.55, 0.06);
  return out;
}

std::vector<CheckResult> check_model_comparison_targets(const ResultTable& table) {
  std::vector<CheckResult> out;
  const struct {
    const char* metric;
    double want;
    double tol;
  } ratio_targets[] = {
      {"EMD", 1.9, 0.3}, {"TV1", 1.3, 0.2}, {"TV10", 1.3, 0.2}, {"TV100", 1.2, 0.2}};
  for (const auto& target : ratio_targets) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& model : table.row_labels) {
      const double v = table.cell(model, target.metric);
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double ratio = hi / lo;
    out.push_back({std::string("contrast ratio ") + target.metric,
                   std::isfinite(ratio) && std::abs(ratio - target.want) <= target.tol,
                   describe(ratio, target.want, target.tol)});
  }
  for (const char* metric : {"EMD", "RMISE", "TV1", "TV10", "TV100", "SKL1",
                             "SKL10", "SKL100"}) {
    const double kf = table.cell("kfold-bary", metric);
    const double nn = table.cell("nnls", metric);
    double margin = 0.0;
    for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
      if (table.row_labels[r] != "kfold-bary" && table.row_labels[r] != "nnls") {
        continue;
      }
      for (std::size_t c = 0; c < table.col_labels.size(); ++c) {
        if (table.col_labels[c] != metric) continue;
        const double se = table.standard_errors(static_cast<Eigen::Index>(r),
                                                static_cast<Eigen::Index>(c));
        if (std::isfinite(se)) margin += se * se;
      }
    }
    margin = 2.0 * std::sqrt(margin);
    out.push_back({std::string("kfold-bary <= nnls on ") + metric,
                   std::isfinite(kf) && std::isfinite(nn) && kf <= nn + margin,
                   "kfold-bary " + format_value(kf) + " vs nnls " + format_value(nn) +
                       " (margin " + format_value(margin) + ")"});
  }
  return out;
}

}  // namespace odf
