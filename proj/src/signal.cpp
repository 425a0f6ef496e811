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

#include "odfkit/signal.hpp"

#include <cmath>
#include <limits>

namespace odf {

AcquisitionScheme::AcquisitionScheme(std::vector<Direction> dirs, double kappa_,
                                     double s0_, double sigma2_)
    : meas_dirs(std::move(dirs)), kappa(kappa_), s0(s0_), sigma2(sigma2_) {
  if (!(kappa > 0.0)) {
    throw InvalidArgumentError("AcquisitionScheme: kappa must be positive");
  }
  if (!(s0 > 0.0)) {
    throw InvalidArgumentError("AcquisitionScheme: s0 must be positive");
  }
  if (sigma2 < 0.0) {
    throw InvalidArgumentError("AcquisitionScheme: sigma2 must be nonnegative");
  }
}

bool AcquisitionScheme::same_as(const AcquisitionScheme& other) const {
  if (n() != other.n() || kappa != other.kappa || s0 != other.s0 ||
      sigma2 != other.sigma2) {
    return false;
  }
  for (std::size_t i = 0; i < n(); ++i) {
    if (!(meas_dirs[i] == other.meas_dirs[i])) return false;
  }
  return true;
}

SignalSet::SignalSet(AcquisitionScheme scheme_, Eigen::VectorXd y_)
    : scheme(std::move(scheme_)), y(std::move(y_)) {
  if (static_cast<std::size_t>(y.size()) != scheme.n()) {
    throw InvalidArgumentError("SignalSet: signal length does not match scheme");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0 || !std::isfinite(y[i])) {
      throw InvalidArgumentError("SignalSet: signal values must be nonnegative");
    }
  }
}

Eigen::VectorXd predict_signal(const DiscreteFodf& f, const AcquisitionScheme& scheme) {
  return scheme.s0 * st_project(f, scheme.kappa, scheme.meas_dirs);
}

Eigen::VectorXd predict_signal(const GridFodf& f, const AcquisitionScheme& scheme) {
  return scheme.s0 * st_project(f, scheme.kappa, scheme.meas_dirs);
}

Eigen::VectorXd predict_signal(const Fodf& f, const AcquisitionScheme& scheme) {
  return scheme.s0 * st_project(f, scheme.kappa, scheme.meas_dirs);
}

Eigen::VectorXd add_rician_noise(const Eigen::VectorXd& mu, double sigma2, Rng& rng) {
  if (sigma2 < 0.0) {
    throw InvalidArgumentError("add_rician_noise: sigma2 must be nonnegative");
  }
  const double sigma = std::sqrt(sigma2);
  Eigen::VectorXd out(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double z1 = rng.normal(0.0, sigma);
    const double z2 = rng.normal(0.0, sigma);
    out[i] = std::hypot(mu[i] + z1, z2);
  }
  return out;
}

double log_bessel_i0(double x) {
  x = std::abs(x);
  if (x < 20.0) {
    // Power series sum_k (x^2/4)^k / (k!)^2; converges quickly below the
    // switch point and stays well inside double range.
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k));
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::log(sum);
  }
  // Asymptotic expansion I0(x) ~ e^x / sqrt(2 pi x) * (1 + 1/(8x) + ...),
  // evaluated in the log domain. Successive factors are (2k-1)^2 / (8 k x).
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (8.0 * static_cast<double>(k) * x);
    sum += term;
    if (term < 1e-18) break;
  }
  return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(sum);
}

double rician_log_pdf(double y, double mu, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw InvalidArgumentError("rician_log_pdf: sigma2 must be positive");
  }
  if (y < 0.0) {
    throw InvalidArgumentError("rician_log_pdf: y must be nonnegative");
  }
  if (y == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(y / sigma2) - (y * y + mu * mu) / (2.0 * sigma2) +
         log_bessel_i0(y * mu / sigma2);
}

}  // namespace odf
