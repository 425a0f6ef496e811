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

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odfkit/distances.hpp"
#include "odfkit/experiments.hpp"
#include "odfkit/io.hpp"
#include "odfkit/resampling.hpp"
#include "odfkit/version.hpp"

namespace {

using namespace odf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

std::string significant(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

// Inserts "_rK" before the extension for replicate outputs.
std::string replicate_path(const std::string& base, int replicate) {
  const std::size_t slash = base.find_last_of('/');
  const std::size_t dot = base.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return base + "_r" + std::to_string(replicate);
  }
  return base.substr(0, dot) + "_r" + std::to_string(replicate) + base.substr(dot);
}

struct CommonOptions {
  double kappa = 1.5;
  double sigma2 = 0.04;
  std::size_t grid_p = 362;
  std::uint64_t seed = 0;
};

SignalSet load_signal_set(const std::string& path, const CommonOptions& opt) {
  const SignalTable raw = read_signal(path);
  AcquisitionScheme scheme(raw.dirs, opt.kappa, 1.0, opt.sigma2);
  return SignalSet(std::move(scheme), raw.y);
}

DiscreteFodf truth_orthogonal_pair() {
  return DiscreteFodf({{Direction(Vec3::UnitX()), 0.5},
                       {Direction(Vec3::UnitY()), 0.5}});
}

int cmd_simulate(const std::string& truth_name, const std::string& fodf_path,
                 const CommonOptions& opt, std::size_t n, int replicates,
                 const std::string& out) {
  Fodf truth = truth_orthogonal_pair();
  if (!fodf_path.empty()) {
    truth = read_fodf(fodf_path);
  } else if (truth_name != "orthogonal-pair") {
    throw InvalidArgumentError("unknown truth preset: " + truth_name);
  }
  const AcquisitionScheme scheme(sample_grid(n).points(), opt.kappa, 1.0, opt.sigma2);
  const Eigen::VectorXd mu = predict_signal(truth, scheme);
  Rng rng(opt.seed);
  std::ostringstream meta;
  meta << "simulate kappa=" << opt.kappa << " sigma2=" << opt.sigma2 << " n=" << n
       << " seed=" << opt.seed << " replicates=" << replicates;
  for (int r = 1; r <= replicates; ++r) {
    Rng stream = rng.child(static_cast<std::uint64_t>(r - 1));
    const Eigen::VectorXd y = add_rician_noise(mu, opt.sigma2, stream);
    const std::string path = replicates == 1 ? out : replicate_path(out, r);
    write_signal(path, scheme.meas_dirs, y, meta.str());
    std::cout << "wrote " << path << "\n";
  }
  return kExitOk;
}

int cmd_estimate(const std::string& signal_path, const std::string& model,
                 const CommonOptions& opt, int k_hat, int folds,
                 std::size_t bayes_grid_p, std::size_t samples,
                 const std::string& out) {
  const SignalSet sig = load_signal_set(signal_path, opt);
  const GridPtr grid = make_grid(opt.grid_p);
  Rng rng(opt.seed);
  Fodf result = truth_orthogonal_pair();  // placeholder, always overwritten
  if (model == "nnls") {
    NnlsFit fit = fit_nnls(sig, grid);
    if (!fit.fodf) throw DomainError("estimate: all-zero signal, empty fODF");
    result = *fit.fodf;
  } else if (model == "b2s") {
    NnlsFit fit = fit_best_k_subset(sig, grid, k_hat);
    if (!fit.fodf) throw DomainError("estimate: all-zero signal, empty fODF");
    result = *fit.fodf;
  } else if (model == "bayes-mean") {
    result = posterior_mean(fit_bayes(sig, make_grid(bayes_grid_p), opt.sigma2));
  } else if (model == "kfold-bary") {
    result = kfold_barycenter(sig, grid, folds, nnls_estimator(), rng);
  } else if (model == "post-bary") {
    const BayesPosterior post = fit_bayes(sig, make_grid(bayes_grid_p), opt.sigma2);
    result = posterior_barycenter(post, grid, samples, rng);
  } else {
    throw InvalidArgumentError("unknown model: " + model);
  }
  write_fodf(out, result);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int cmd_distance(const std::string& path1, const std::string& path2,
                 const std::string& metric, const CommonOptions& opt, double lambda,
                 std::size_t eval_p) {
  DistanceSpec spec;
  spec.metric = parse_metric(metric);
  spec.lambda = lambda;
  spec.kappa = opt.kappa;
  spec.grid = opt.grid_p == 362 ? default_grid() : make_grid(opt.grid_p);
  spec.eval_p = eval_p;
  const Fodf f1 = read_fodf(path1);
  const Fodf f2 = read_fodf(path2);
  std::cout << significant(fodf_distance(spec, f1, f2), 12) << "\n";
  return kExitOk;
}

int cmd_replicate_error(const std::string& signal_path, const std::string& signal2_path,
                        const std::string& metric, const CommonOptions& opt,
                        double lambda, int folds, const std::string& out) {
  DistanceSpec spec;
  spec.metric = parse_metric(metric);
  spec.lambda = lambda;
  spec.kappa = opt.kappa;
  spec.grid = opt.grid_p == 362 ? default_grid() : make_grid(opt.grid_p);
  const SignalSet y1 = load_signal_set(signal_path, opt);
  const GridPtr grid = spec.grid;

  std::ostringstream report;
  report << "# odfkit " << kVersion << " replicate-error metric=" << metric
         << " lambda=" << lambda << " kappa=" << opt.kappa << " K=" << folds
         << " seed=" << opt.seed << "\n";
  if (!signal2_path.empty()) {
    const SignalSet y2 = load_signal_set(signal2_path, opt);
    const Estimator est = nnls_estimator();
    const double re = replicate_error(Fodf(est(y1, grid)), Fodf(est(y2, grid)), spec);
    report << "metric\tvalue\n" << metric << "\t" << significant(re, 12) << "\n";
  } else {
    Rng rng(opt.seed);
    const ReplicateReport rep =
        kfold_replicate_error(y1, grid, folds, nnls_estimator(), spec, rng);
    report << "metric\tvalue\tK\n"
           << metric << "\t" << significant(rep.value, 12) << "\t" << rep.K << "\n";
    report << "pair_i\tpair_j\tdistance\n";
    Eigen::Index idx = 0;
    for (int i = 0; i < rep.K; ++i) {
      for (int j = i + 1; j < rep.K; ++j) {
        report << i << "\t" << j << "\t" << significant(rep.pair_distances[idx++], 12)
               << "\n";
      }
    }
  }
  if (out.empty()) {
    std::cout << report.str();
  } else {
    atomic_write(out, report.str());
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int cmd_barycenter(const std::vector<std::string>& fodf_paths,
                   const CommonOptions& opt, const std::string& out) {
  std::vector<DiscreteFodf> inputs;
  for (const auto& path : fodf_paths) {
    const Fodf f = read_fodf(path);
    if (const auto* d = std::get_if<DiscreteFodf>(&f)) {
      inputs.push_back(*d);
    } else {
      inputs.push_back(to_discrete(std::get<GridFodf>(f)));
    }
  }
  const GridFodf bary = wasserstein_barycenter(inputs, make_grid(opt.grid_p));
  if (out.empty()) {
    // Atom listing on stdout: grid index, direction, weight.
    std::cout << "# odfkit " << kVersion << " barycenter grid_p=" << opt.grid_p << "\n";
    std::cout << "index\tx\ty\tz\tw\n";
    for (Eigen::Index i = 0; i < bary.weights().size(); ++i) {
      if (bary.weights()[i] <= 0.0) continue;
      const Direction& d = bary.grid()[static_cast<std::size_t>(i)];
      std::cout << i << "\t" << significant(d.x(), 12) << "\t" << significant(d.y(), 12)
                << "\t" << significant(d.z(), 12) << "\t"
                << significant(bary.weights()[i], 12) << "\n";
    }
  } else {
    write_fodf(out, Fodf(bary));
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int cmd_reproduce(const std::string& study, ExperimentConfig cfg,
                  const std::string& dataset_path, const std::string& out,
                  bool check) {
  ResultTable table;
  if (study == "model-comparison") {
    table = run_model_comparison(cfg);
  } else if (study == "correlation") {
    table = run_correlation_study(cfg);
  } else if (study == "voxel-map") {
    if (dataset_path.empty()) {
      throw InvalidArgumentError("voxel-map study requires --dataset");
    }
    table = voxel_map(read_voxel_dataset(dataset_path), cfg);
  } else {
    throw InvalidArgumentError("unknown study: " + study);
  }
  if (out.empty()) {
    std::cout << table.to_tsv();
  } else {
    atomic_write(out, table.to_tsv());
    std::cout << "wrote " << out << "\n";
  }
  if (check) {
    std::vector<CheckResult> results;
    if (study == "correlation") {
      results = check_correlation_targets(table);
    } else if (study == "model-comparison") {
      results = check_model_comparison_targets(table);
    }
    if (results.empty()) {
      std::cout << "check: no targets for study " << study << "\n";
    }
    for (const auto& r : results) {
      std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail
                << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fODF estimation, transport-based distances, and simulation studies"};
  app.set_version_flag("--version", std::string("odfkit ") + kVersion);
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file (TOML/INI, one [subcommand] section per command); "
                 "explicit flags win");

  CommonOptions opt;

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic signal files");
  simulate->fallthrough();
  std::string truth_name = "orthogonal-pair";
  std::string fodf_path;
  std::size_t sim_n = 150;
  int replicates = 1;
  std::string sim_out = "signal.tsv";
  simulate->add_option("--truth", truth_name, "Built-in truth preset (orthogonal-pair)");
  simulate->add_option("--fodf", fodf_path, "Truth fODF file (overrides --truth)");
  simulate->add_option("--kappa", opt.kappa, "Kernel shape parameter");
  simulate->add_option("--sigma2", opt.sigma2, "Noise variance");
  simulate->add_option("--n", sim_n, "Number of measurement directions");
  simulate->add_option("--seed", opt.seed, "Random seed");
  simulate->add_option("--replicates", replicates, "Number of replicate files")
      ->check(CLI::Range(1, 16));
  simulate->add_option("--out", sim_out, "Output path (replicates get _rK suffix)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Fit an fODF to a signal file");
  estimate->fallthrough();
  std::string est_signal, est_model = "nnls", est_out = "fodf.json";
  int est_k = 2, est_folds = 20;
  std::size_t est_bayes_p = 150, est_samples = 50;
  estimate->add_option("--signal", est_signal, "Signal file")->required();
  estimate->add_option("--model", est_model,
                       "nnls|b2s|bayes-mean|kfold-bary|post-bary");
  estimate->add_option("--kappa", opt.kappa, "Kernel shape parameter");
  estimate->add_option("--sigma2", opt.sigma2, "Noise variance (Bayes models)");
  estimate->add_option("--k", est_k, "Direction count for b2s");
  estimate->add_option("--folds", est_folds, "Folds for kfold-bary");
  estimate->add_option("--grid-p", opt.grid_p, "Deconvolution grid size");
  estimate->add_option("--bayes-grid-p", est_bayes_p, "Posterior grid size");
  estimate->add_option("--samples", est_samples, "Posterior draws for post-bary");
  estimate->add_option("--seed", opt.seed, "Random seed");
  estimate->add_option("--out", est_out, "Output fODF file");

  // distance
  auto* distance = app.add_subcommand("distance", "Distance between two fODF files");
  distance->fallthrough();
  std::string dist_f1, dist_f2, dist_metric = "emd";
  double dist_lambda = 10.0;
  std::size_t dist_eval_p = 1000;
  distance->add_option("fodf1", dist_f1, "First fODF file")->required();
  distance->add_option("fodf2", dist_f2, "Second fODF file")->required();
  distance->add_option("--metric", dist_metric, "emd|w2|tv|stv|skl|sskl|ae|rmise");
  distance->add_option("--lambda", dist_lambda, "Smoothing parameter");
  distance->add_option("--kappa", opt.kappa, "Kernel shape (rmise)");
  distance->add_option("--grid-p", opt.grid_p, "Snapping/smoothing grid size");
  distance->add_option("--eval-p", dist_eval_p, "Quadrature grid size (rmise)");

  // replicate-error
  auto* repl = app.add_subcommand(
      "replicate-error", "K-fold replicate error, or plain RE given two replicates");
  repl->fallthrough();
  std::string re_signal, re_signal2, re_metric = "emd", re_out;
  double re_lambda = 10.0;
  int re_folds = 10;
  repl->add_option("--signal", re_signal, "Signal file")->required();
  repl->add_option("--signal2", re_signal2, "Second replicate (plain RE)");
  repl->add_option("--metric", re_metric, "emd|w2|tv|stv|skl|sskl|ae|rmise");
  repl->add_option("--lambda", re_lambda, "Smoothing parameter");
  repl->add_option("--kappa", opt.kappa, "Kernel shape parameter");
  repl->add_option("--K", re_folds, "Fold count for K-fold replicate error");
  repl->add_option("--grid-p", opt.grid_p, "Deconvolution grid size");
  repl->add_option("--seed", opt.seed, "Random seed");
  repl->add_option("--out", re_out, "Report path (default: stdout)");

  // barycenter
  auto* bary = app.add_subcommand("barycenter", "Barycenter of fODF files");
  bary->fallthrough();
  std::vector<std::string> bary_inputs;
  std::string bary_out;
  bary->add_option("fodfs", bary_inputs, "Input fODF files")->required();
  bary->add_option("--grid-p", opt.grid_p, "Support grid size");
  bary->add_option("--out", bary_out, "Output fODF file (default: stdout table)");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "Run a simulation study");
  repro->fallthrough();
  std::string study, dataset_path, repro_out;
  bool check = false;
  ExperimentConfig cfg;
  std::vector<double> repro_kappas;
  repro->add_option("--study", study, "model-comparison|correlation|voxel-map")
      ->required();
  repro->add_option("--trials", cfg.trials, "Monte Carlo trials");
  repro->add_option("--seed", cfg.seed, "Random seed");
  repro->add_option("--kappa", repro_kappas, "Kappa value(s)");
  repro->add_option("--sigma2", cfg.sigma2, "Noise variance");
  repro->add_option("--n", cfg.n_dirs, "Measurement directions");
  repro->add_option("--grid-p", cfg.grid_p, "Deconvolution grid size");
  repro->add_option("--bayes-grid-p", cfg.bayes_grid_p, "Posterior grid size");
  repro->add_option("--samples", cfg.post_bary_samples, "Posterior draws");
  repro->add_option("--folds", cfg.k_folds, "K for fold-based procedures");
  repro->add_option("--model", cfg.correlation_estimator,
                    "Correlation-study fit: nnls|b2s");
  repro->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
  repro->add_option("--dataset", dataset_path, "Voxel dataset (voxel-map study)");
  repro->add_option("--out", repro_out, "Output table path (default: stdout)");
  repro->add_flag("--check", check, "Print pass/fail against the pinned targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(truth_name, fodf_path, opt, sim_n, replicates, sim_out);
    }
    if (estimate->parsed()) {
      return cmd_estimate(est_signal, est_model, opt, est_k, est_folds, est_bayes_p,
                          est_samples, est_out);
    }
    if (distance->parsed()) {
      return cmd_distance(dist_f1, dist_f2, dist_metric, opt, dist_lambda,
                          dist_eval_p);
    }
    if (repl->parsed()) {
      return cmd_replicate_error(re_signal, re_signal2, re_metric, opt, re_lambda,
                                 re_folds, re_out);
    }
    if (bary->parsed()) {
      return cmd_barycenter(bary_inputs, opt, bary_out);
    }
    if (repro->parsed()) {
      if (study == "voxel-map" && cfg.k_folds == 20 &&
          repro->get_option("--folds")->empty()) {
        cfg.k_folds = 10;  // per-voxel default
      }
      if (!repro_kappas.empty()) cfg.kappas = repro_kappas;
      return cmd_reproduce(study, cfg, dataset_path, repro_out, check);
    }
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
