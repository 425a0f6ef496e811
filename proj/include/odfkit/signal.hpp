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

#ifndef ODFKIT_SIGNAL_HPP
#define ODFKIT_SIGNAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "odfkit/fodf.hpp"
#include "odfkit/rng.hpp"

namespace odf {

// Measurement directions plus the forward-model parameters.
struct AcquisitionScheme {
  AcquisitionScheme(std::vector<Direction> dirs, double kappa_, double s0_,
                    double sigma2_);

  std::size_t n() const { return meas_dirs.size(); }
  bool same_as(const AcquisitionScheme& other) const;

  std::vector<Direction> meas_dirs;
  double kappa;
  double s0;
  double sigma2;
};

// One voxel's measured (possibly noisy) signal values.
struct SignalSet {
  SignalSet(AcquisitionScheme scheme_, Eigen::VectorXd y_);

  AcquisitionScheme scheme;
  Eigen::VectorXd y;
};

// Noise-free forward model: entry i = s0 * sum_j w_j exp(-kappa (v_j . x_i)^2).
Eigen::VectorXd predict_signal(const DiscreteFodf& f, const AcquisitionScheme& scheme);
Eigen::VectorXd predict_signal(const GridFodf& f, const AcquisitionScheme& scheme);
Eigen::VectorXd predict_signal(const Fodf& f, const AcquisitionScheme& scheme);

// Magnitude noise: per entry returns sqrt((mu + Z1)^2 + Z2^2) with
// Z1, Z2 ~ N(0, sigma2) independent. sigma2 = 0 returns |mu| entrywise.
Eigen::VectorXd add_rician_noise(const Eigen::VectorXd& mu, double sigma2, Rng& rng);

// log I0(x), overflow-safe for arguments up to 1e6 and beyond.
double log_bessel_i0(double x);

// Log density of the magnitude-noise distribution at y >= 0 with location mu
// and Gaussian variance sigma2 > 0.
double rician_log_pdf(double y, double mu, double sigma2);

}  // namespace odf

#endif  // ODFKIT_SIGNAL_HPP
