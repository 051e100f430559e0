// Copyright 2026 The fluxtalk developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <functional>

namespace fluxtalk {

// Small self-contained optimization toolkit used by the fitting pipelines.
// The least-squares driver is a damped Gauss-Newton (Levenberg-Marquardt)
// with numeric Jacobians; Nelder-Mead is the derivative-free fallback.

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

struct LsqOptions {
  int max_iterations = 200;
  double ftol = 1e-12;       // relative chi^2 improvement
  double xtol = 1e-12;       // relative step size
  double lambda0 = 1e-3;     // initial Marquardt damping
  double lambda_max = 1e12;
  double jacobian_step = 1e-6;  // relative central-difference step
};

struct LsqResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T J)^{-1}; residuals must be whitened
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Residuals are expected pre-whitened (divided by their sigmas) so that
/// chi2 = ||r||^2 and the covariance is (J^T J)^{-1}.
LsqResult levenberg_marquardt(const ResidualFn& residuals,
                              const Eigen::VectorXd& x0,
                              const LsqOptions& options = {});

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const ScalarFn& f, const Eigen::VectorXd& x0,
                             double scale = 0.1, int max_iterations = 2000,
                             double tol = 1e-12);

/// Golden-section minimization on [a, b]; f must be unimodal there.
double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-8);

/// Brent-style bisection root finding; f(a) and f(b) must bracket a root.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-12);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_sigma = 0.0;
  double intercept_sigma = 0.0;
  double chi2 = 0.0;
};

/// Weighted straight-line fit; sigmas are per-point 1-sigma errors.
LinearFit weighted_linear_fit(const std::vector<double>& x,
                              const std::vector<double>& y,
                              const std::vector<double>& sigma);

struct SinusoidFit {
  double offset = 0.0;      // c in y = c + a cos(theta - theta0)
  double amplitude = 0.0;   // a >= 0
  double phase = 0.0;       // theta0 in (-pi, pi]
  double offset_sigma = 0.0;
  double amplitude_sigma = 0.0;
  double phase_sigma = 0.0;
  double cos_coeff = 0.0;   // p = a cos(theta0)
  double sin_coeff = 0.0;   // q = a sin(theta0)
  double cos_coeff_sigma = 0.0;
};

/// Fixed-frequency sinusoid fit, linear in (c, p, q) with y = c + p cos th
/// + q sin th. Exact weighted LSQ; no convergence concerns.
SinusoidFit fit_sinusoid(const std::vector<double>& theta,
                         const std::vector<double>& y,
                         const std::vector<double>& sigma);

}  // namespace fluxtalk
