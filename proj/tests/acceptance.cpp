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

// End-to-end acceptance checks: the published simulation targets, the solver
// oracles, and the CLI determinism guarantees. Each numbered check prints a
// single PASS/FAIL line; the full suite runs in a few minutes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "odfkit/experiments.hpp"
#include "odfkit/io.hpp"
#include "support/oracles.hpp"

using namespace odf;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

void report(int index, const std::string& name, const Verdict& v) {
  std::printf("%s A%02d %s%s%s\n", v.pass ? "PASS" : "FAIL", index, name.c_str(),
              v.detail.empty() ? "" : " -- ", v.detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(v.pass, name, ": ", v.detail);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Studies are shared between checks; computed once on first use.
const ResultTable& correlation_table() {
  static const ResultTable table = [] {
    ExperimentConfig cfg;
    cfg.kappas = {0.1, 1.0, 2.0};
    cfg.sigma2 = 0.04;
    cfg.n_dirs = 150;
    cfg.trials = 2000;
    cfg.seed = 0;
    return run_correlation_study(cfg);
  }();
  return table;
}

const ResultTable& comparison_table() {
  static const ResultTable table = [] {
    ExperimentConfig cfg;
    cfg.kappas = {1.5};
    cfg.sigma2 = 0.04;
    cfg.n_dirs = 150;
    cfg.trials = 1000;
    cfg.k_folds = 20;
    cfg.seed = 0;
    return run_model_comparison(cfg);
  }();
  return table;
}

DiscreteFodf single_atom(const Direction& d) { return DiscreteFodf({{d, 1.0}}); }

DiscreteFodf random_fodf(Rng& rng, int max_atoms = 5) {
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_atoms)));
  std::vector<WeightedDirection> atoms;
  std::vector<double> raw;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    raw.push_back(rng.uniform());
    total += raw.back();
  }
  for (int i = 0; i < k; ++i) {
    atoms.push_back({random_direction(rng), raw[static_cast<std::size_t>(i)] / total});
  }
  return DiscreteFodf(std::move(atoms));
}

const char* cli_path() { return ODFKIT_BIN; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(cli_path()) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "odfkit_acceptance";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("A01 correlation floor") {
  // Corr(err_EMD, RE_EMD) > 0.38 at each kappa in {0.1, 1, 2}; 2000 trials,
  // sigma^2 = 0.04, n = 150, NNLS fits.
  Verdict v;
  const ResultTable& table = correlation_table();
  for (const char* kappa : {"0.1", "1", "2"}) {
    const double corr = table.cell(kappa, "EMD");
    v.require(std::isfinite(corr) && corr > 0.38,
              std::string("EMD corr at kappa=") + kappa + " = " + fmt(corr));
    v.detail += (v.detail.empty() ? "" : ", ") + std::string("kappa=") + kappa +
                ": " + fmt(corr);
  }
  report(1, "correlation floor (EMD > 0.38 at kappa 0.1/1/2)", v);
}

TEST_CASE("A02 correlation point targets") {
  Verdict v;
  const ResultTable& table = correlation_table();
  const struct {
    const char* kappa;
    const char* metric;
    double want;
  } targets[] = {
      {"0.1", "EMD", 0.45}, {"1", "EMD", 0.52}, {"1", "TV1", 0.55}, {"2", "TV10", 0.55}};
  for (const auto& t : targets) {
    const double got = table.cell(t.kappa, t.metric);
    v.require(std::isfinite(got) && std::abs(got - t.want) <= 0.06,
              std::string(t.metric) + "@" + t.kappa + " = " + fmt(got) +
                  " (target " + fmt(t.want) + " +/- 0.06)");
    v.detail += (v.detail.empty() ? "" : ", ") + std::string(t.metric) + "@" +
                t.kappa + ": " + fmt(got);
  }
  report(2, "correlation point targets (+/- 0.06)", v);
}

TEST_CASE("A03 model-comparison contrast ratios") {
  Verdict v;
  const ResultTable& table = comparison_table();
  const struct {
    const char* metric;
    double want;
    double tol;
  } targets[] = {
      {"EMD", 1.9, 0.3}, {"TV1", 1.3, 0.2}, {"TV10", 1.3, 0.2}, {"TV100", 1.2, 0.2}};
  for (const auto& t : targets) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& model : table.row_labels) {
      const double cell = table.cell(model, t.metric);
      if (!std::isfinite(cell)) continue;
      lo = std::min(lo, cell);
      hi = std::max(hi, cell);
    }
    const double ratio = hi / lo;
    v.require(std::abs(ratio - t.want) <= t.tol,
              std::string(t.metric) + " ratio " + fmt(ratio) + " (target " +
                  fmt(t.want) + " +/- " + fmt(t.tol) + ")");
    v.detail += (v.detail.empty() ? "" : ", ") + std::string(t.metric) + ": " +
                fmt(ratio);
  }
  report(3, "max/min inaccuracy ratios (EMD 1.9, TV1/TV10 1.3, TV100 1.2)", v);
}

TEST_CASE("A04 k-fold barycenter dominates NNLS") {
  Verdict v;
  const ResultTable& table = comparison_table();
  for (const auto& check : check_model_comparison_targets(table)) {
    if (check.name.rfind("kfold-bary", 0) != 0) continue;
    v.require(check.pass, check.name + ": " + check.detail);
  }
  const double kf = table.cell("kfold-bary", "EMD");
  const double nn = table.cell("nnls", "EMD");
  // Sparse estimates are also favored by EMD: best-2-subset stays below
  // NNLS within the same margin.
  const double b2s = table.cell("b2s", "EMD");
  const double margin =
      2.0 * std::hypot(table.standard_errors(2, 2), table.standard_errors(3, 2));
  v.require(b2s <= nn + margin, "b2s EMD " + fmt(b2s) + " vs nnls " + fmt(nn));
  v.detail += "EMD " + fmt(kf) + " vs " + fmt(nn) + " (and 7 more metrics); b2s " +
              fmt(b2s);
  report(4, "k-fold barycenter <= NNLS on every metric (2 SE margin)", v);
}

TEST_CASE("A05 single-atom distances extend angular error") {
  Verdict v;
  const GridPtr sweep_grid = make_grid(2000);
  const int steps = 49;
  double worst_gap = 0.0;
  std::vector<double> tv;
  for (int s = 0; s <= steps; ++s) {
    const double theta = (M_PI / 2) * s / steps;
    const Direction a(Vec3::UnitX());
    const Direction b(Vec3(std::cos(theta), std::sin(theta), 0.0));
    const DiscreteFodf fa = single_atom(a);
    const DiscreteFodf fb = single_atom(b);
    const double arc = arc_distance(a, b);
    worst_gap = std::max(worst_gap, std::abs(emd(Fodf(fa), Fodf(fb)) - arc));
    worst_gap = std::max(worst_gap, std::abs(wasserstein2(Fodf(fa), Fodf(fb)) - arc));
    worst_gap = std::max(worst_gap, std::abs(angular_error(fa, fb) - arc));
    tv.push_back(smoothed_tv(Fodf(fa), Fodf(fb), SmoothingParam(1.0), sweep_grid));
  }
  v.require(worst_gap < 1e-9, "emd/w2/ae vs arc gap " + fmt(worst_gap));
  double min_increment = 0.0;
  double max_second = -std::numeric_limits<double>::infinity();
  for (int s = 0; s + 1 <= steps; ++s) {
    min_increment = std::min(min_increment,
                             tv[static_cast<std::size_t>(s + 1)] -
                                 tv[static_cast<std::size_t>(s)]);
  }
  for (int s = 1; s + 1 <= steps; ++s) {
    max_second = std::max(max_second, tv[static_cast<std::size_t>(s + 1)] -
                                          2.0 * tv[static_cast<std::size_t>(s)] +
                                          tv[static_cast<std::size_t>(s - 1)]);
  }
  v.require(min_increment >= -1e-9, "smoothed TV decreased by " + fmt(-min_increment));
  v.require(max_second <= 1e-6, "second difference " + fmt(max_second));
  v.detail = "max |d - arc| " + fmt(worst_gap) + ", max second diff " +
             fmt(max_second);
  report(5, "EMD = 2WD = AE = arc on single atoms; smoothed TV concave", v);
}

TEST_CASE("A06 transport solver matches brute-force enumeration") {
  Verdict v;
  Rng rng(20240);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + static_cast<int>(rng.below(3));  // 2..4
    const int n = 2 + static_cast<int>(rng.below(3));
    Eigen::MatrixXd c(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) = rng.uniform();
    }
    Eigen::VectorXd a(m), b(n);
    for (int i = 0; i < m; ++i) a[i] = rng.uniform();
    for (int j = 0; j < n; ++j) b[j] = rng.uniform();
    a /= a.sum();
    b /= b.sum();
    const double got = solve_transport(c, a, b).cost;
    const double want = oracles::transport_bruteforce(c, a, b);
    worst = std::max(worst, std::abs(got - want));
  }
  v.require(worst < 1e-9, "max deviation " + fmt(worst));
  v.detail = "200 instances <= 4x4, max |lp - brute| = " + fmt(worst);
  report(6, "transportation simplex vs basic-feasible-solution oracle", v);
}

TEST_CASE("A07 robustness and scale profile on the euclidean line") {
  Verdict v;
  for (const double eps : {1e-1, 1e-2, 1e-3}) {
    for (const double x : {10.0, 100.0}) {
      Eigen::VectorXd xs(1), wx(1), ys(2), wy(2);
      xs << 0.0;
      wx << 1.0;
      ys << 0.0, x;
      wy << 1.0 - eps, eps;
      const double got_emd = line::emd(xs, wx, ys, wy);
      const double got_w2 = line::wasserstein2(xs, wx, ys, wy);
      v.require(std::abs(got_emd - eps * x) <= 1e-9 * std::max(1.0, eps * x),
                "emd eps=" + fmt(eps) + " x=" + fmt(x));
      v.require(std::abs(got_w2 - std::sqrt(eps) * x) <=
                    1e-9 * std::max(1.0, std::sqrt(eps) * x),
                "w2 eps=" + fmt(eps) + " x=" + fmt(x));
      const double lo = -1.0, hi = x + 1.0, step = 0.002;
      const int n = static_cast<int>((hi - lo) / step) + 1;
      Eigen::VectorXd grid(n);
      for (int i = 0; i < n; ++i) grid[i] = lo + i * step;
      const double stv =
          total_variation(line::smooth(xs, wx, 100.0, grid),
                          line::smooth(ys, wy, 100.0, grid));
      v.require(std::abs(stv - eps) <= 0.1 * eps,
                "smoothed tv eps=" + fmt(eps) + " x=" + fmt(x) + " got " + fmt(stv));
    }
  }
  Rng rng(7);
  for (const double scale : {2.0, 10.0}) {
    for (int t = 0; t < 50; ++t) {
      const int k1 = 1 + static_cast<int>(rng.below(4));
      const int k2 = 1 + static_cast<int>(rng.below(4));
      Eigen::VectorXd xs(k1), ys(k2), wx(k1), wy(k2);
      for (int i = 0; i < k1; ++i) {
        xs[i] = 10.0 * (rng.uniform() - 0.5);
        wx[i] = rng.uniform();
      }
      for (int j = 0; j < k2; ++j) {
        ys[j] = 10.0 * (rng.uniform() - 0.5);
        wy[j] = rng.uniform();
      }
      wx /= wx.sum();
      wy /= wy.sum();
      const double base = line::emd(xs, wx, ys, wy);
      const double scaled = line::emd(scale * xs, wx, scale * ys, wy);
      v.require(std::abs(scaled - scale * base) <= 1e-9 * std::max(1.0, scale * base),
                "scale equivariance at " + fmt(scale));
      const double tv0 = line::total_variation_atomic(xs, wx, ys, wy);
      const double tv1 = line::total_variation_atomic(scale * xs, wx, scale * ys, wy);
      v.require(std::abs(tv0 - tv1) <= 1e-12, "tv scale invariance");
    }
  }
  v.detail = "contamination exact for EMD/2WD, smoothed TV within 10%, scaling laws hold";
  report(7, "outlier-robustness approximations and scale laws", v);
}

TEST_CASE("A08 metric axioms") {
  Verdict v;
  Rng rng(555);
  double worst_sym = 0.0, worst_tri = -1.0, worst_id = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const DiscreteFodf a = random_fodf(rng);
    const DiscreteFodf b = random_fodf(rng);
    const double ab = emd(Fodf(a), Fodf(b));
    worst_sym = std::max(worst_sym, std::abs(ab - emd(Fodf(b), Fodf(a))));
    worst_id = std::max(worst_id, emd(Fodf(a), Fodf(a)));
    if (t % 4 == 0) {
      const DiscreteFodf c = random_fodf(rng);
      worst_tri = std::max(worst_tri, ab - emd(Fodf(a), Fodf(c)) - emd(Fodf(c), Fodf(b)));
    }
    v.require(ab >= 0.0 && ab <= M_PI / 2 + 1e-12, "emd range");
  }
  v.require(worst_sym < 1e-8, "emd symmetry " + fmt(worst_sym));
  v.require(worst_tri < 1e-8, "triangle slack " + fmt(worst_tri));
  v.require(worst_id < 1e-8, "identity " + fmt(worst_id));

  const GridPtr grid = make_grid(120);
  for (int t = 0; t < 100; ++t) {
    const double tv =
        total_variation(Fodf(random_fodf(rng)), Fodf(random_fodf(rng)), grid);
    v.require(tv >= 0.0 && tv <= 1.0 + 1e-12, "tv range");
  }
  const Fodf fa(single_atom((*grid)[3]));
  const Fodf fb(single_atom((*grid)[77]));
  v.require(std::isinf(skl(fa, fb, grid)), "skl disjoint supports must diverge");
  const GridFodf sa = smooth(fa, SmoothingParam(10.0), grid);
  const GridFodf sb = smooth(fb, SmoothingParam(10.0), grid);
  v.require(skl(sa, sb) == skl(sb, sa), "skl symmetry");
  v.detail = "emd sym " + fmt(worst_sym) + ", tri " + fmt(worst_tri) + ", id " +
             fmt(worst_id) + "; tv in [0,1]; skl symmetric, +inf on disjoint atoms";
  report(8, "EMD metric axioms, TV range, SKL divergence", v);
}

TEST_CASE("A09 k-fold replicate error is stable in K") {
  Verdict v;
  const GridPtr grid = make_grid(362);
  const AcquisitionScheme scheme(sample_grid(150).points(), 1.5, 1.0, 0.04);
  DistanceSpec spec;
  spec.metric = Metric::Emd;
  const Estimator estimator = nnls_estimator();
  const Rng master(4242);
  double means[3] = {0.0, 0.0, 0.0};
  const int folds[3] = {5, 10, 20};
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = master.child(static_cast<std::uint64_t>(s));
    const Direction u = random_direction(rng);
    const DiscreteFodf truth({{u, 0.5}, {random_orthogonal_direction(u, rng), 0.5}});
    const SignalSet sig(scheme,
                        add_rician_noise(predict_signal(truth, scheme), 0.04, rng));
    for (int f = 0; f < 3; ++f) {
      Rng fold_rng = rng.child(static_cast<std::uint64_t>(f));
      means[f] +=
          kfold_replicate_error(sig, grid, folds[f], estimator, spec, fold_rng).value;
    }
  }
  for (double& m : means) m /= seeds;
  const double lo = std::min({means[0], means[1], means[2]});
  const double hi = std::max({means[0], means[1], means[2]});
  v.require((hi - lo) / lo < 0.25, "spread " + fmt((hi - lo) / lo));
  v.detail = "mean K-RE at K=5/10/20: " + fmt(means[0]) + "/" + fmt(means[1]) + "/" +
             fmt(means[2]) + " (spread " + fmt(100.0 * (hi - lo) / lo) + "%)";
  report(9, "K-RE varies < 25% across K in {5, 10, 20}", v);
}

TEST_CASE("A10 CLI determinism") {
  Verdict v;
  const fs::path dir = work_dir();
  const auto same_bytes = [&](const fs::path& a, const fs::path& b) {
    return read_text_file(a.string()) == read_text_file(b.string());
  };

  const std::string sim = " --n 40 --sigma2 0.04 --seed 11 --out ";
  run_cli("simulate" + sim + (dir / "s1.tsv").string() + " > /dev/null");
  run_cli("simulate" + sim + (dir / "s2.tsv").string() + " > /dev/null");
  v.require(same_bytes(dir / "s1.tsv", dir / "s2.tsv"), "simulate differs");

  const std::string est = "estimate --signal " + (dir / "s1.tsv").string() +
                          " --model kfold-bary --folds 5 --seed 3 --out ";
  run_cli(est + (dir / "e1.json").string() + " > /dev/null");
  run_cli(est + (dir / "e2.json").string() + " > /dev/null");
  v.require(same_bytes(dir / "e1.json", dir / "e2.json"), "estimate differs");

  run_cli("distance " + (dir / "e1.json").string() + " " + (dir / "e2.json").string() +
          " --metric stv --lambda 10 > " + (dir / "d1.txt").string());
  run_cli("distance " + (dir / "e1.json").string() + " " + (dir / "e2.json").string() +
          " --metric stv --lambda 10 > " + (dir / "d2.txt").string());
  v.require(same_bytes(dir / "d1.txt", dir / "d2.txt"), "distance differs");

  const std::string repl = "replicate-error --signal " + (dir / "s1.tsv").string() +
                           " --K 4 --seed 5 --out ";
  run_cli(repl + (dir / "r1.txt").string() + " > /dev/null");
  run_cli(repl + (dir / "r2.txt").string() + " > /dev/null");
  v.require(same_bytes(dir / "r1.txt", dir / "r2.txt"), "replicate-error differs");

  const std::string corr =
      "reproduce --study correlation --trials 30 --kappa 1 --n 40 --grid-p 120 "
      "--seed 9 --out ";
  run_cli(corr + (dir / "c1.tsv").string() + " --threads 1 > /dev/null");
  run_cli(corr + (dir / "c2.tsv").string() + " --threads 2 > /dev/null");
  run_cli(corr + (dir / "c3.tsv").string() + " --threads 7 > /dev/null");
  v.require(same_bytes(dir / "c1.tsv", dir / "c2.tsv") &&
                same_bytes(dir / "c1.tsv", dir / "c3.tsv"),
            "correlation study differs across thread counts");

  const std::string comp =
      "reproduce --study model-comparison --trials 4 --n 40 --grid-p 100 "
      "--bayes-grid-p 40 --samples 8 --folds 4 --seed 2 --out ";
  run_cli(comp + (dir / "m1.tsv").string() + " --threads 1 > /dev/null");
  run_cli(comp + (dir / "m2.tsv").string() + " --threads 2 > /dev/null");
  v.require(same_bytes(dir / "m1.tsv", dir / "m2.tsv"),
            "model comparison differs across thread counts");

  v.detail = "simulate/estimate/distance/replicate-error/reproduce byte-identical, "
             "thread count 1/2/7 immaterial";
  report(10, "CLI outputs are byte-identical under re-runs and any thread count", v);
}

TEST_CASE("A11 voxel-map contrast proxy") {
  // Stand-in for the in-vivo maps: crossing-fiber voxels must show larger
  // mean EMD K-fold replicate error than single-fiber voxels.
  Verdict v;
  VoxelDataset data;
  data.dirs = sample_grid(60).points();
  const AcquisitionScheme scheme(data.dirs, 1.5, 1.0, 0.04);
  Rng rng(77);
  const GridPtr truth_grid = make_grid(200);
  for (int i = 0; i < 6; ++i) {
    VoxelDataset::Voxel vox;
    vox.id = "single_" + std::to_string(i);
    const DiscreteFodf truth({{(*truth_grid)[rng.below(truth_grid->size())], 1.0}});
    vox.y1 = add_rician_noise(predict_signal(truth, scheme), 0.04, rng);
    data.voxels.push_back(std::move(vox));
  }
  for (int i = 0; i < 6; ++i) {
    VoxelDataset::Voxel vox;
    vox.id = "double_" + std::to_string(i);
    const Direction u = random_direction(rng);
    const DiscreteFodf truth({{u, 0.5}, {random_orthogonal_direction(u, rng), 0.5}});
    vox.y1 = add_rician_noise(predict_signal(truth, scheme), 0.04, rng);
    data.voxels.push_back(std::move(vox));
  }
  ExperimentConfig cfg;
  cfg.sigma2 = 0.04;
  cfg.k_folds = 10;
  cfg.grid_p = 200;
  cfg.seed = 5;
  const ResultTable table = voxel_map(data, cfg);
  double single_mean = 0.0, double_mean = 0.0;
  for (int i = 0; i < 6; ++i) {
    single_mean += table.cell("single_" + std::to_string(i), "KRE_EMD") / 6.0;
    double_mean += table.cell("double_" + std::to_string(i), "KRE_EMD") / 6.0;
  }
  v.require(double_mean > single_mean, "no contrast");
  v.detail = "mean K-RE: crossing " + fmt(double_mean) + " vs single " +
             fmt(single_mean);
  report(11, "crossing-fiber voxels show higher K-RE than single-fiber voxels", v);
}
