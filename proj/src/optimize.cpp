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

#include "fluxtalk/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fluxtalk/errors.hpp"

namespace fluxtalk {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residuals,
                                 const Eigen::VectorXd& x,
                                 int m, double rel_step) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd xp = x;
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * std::max(std::abs(x[j]), 1.0);
    xp[j] = x[j] + h;
    const Eigen::VectorXd rp = residuals(xp);
    xp[j] = x[j] - h;
    const Eigen::VectorXd rm = residuals(xp);
    xp[j] = x[j];
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace

LsqResult levenberg_marquardt(const ResidualFn& residuals,
                              const Eigen::VectorXd& x0,
                              const LsqOptions& options) {
  LsqResult result;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = residuals(x);
  const int m = static_cast<int>(r.size());
  const int n = static_cast<int>(x.size());
  double chi2 = r.squaredNorm();
  double lambda = options.lambda0;

  Eigen::MatrixXd jac = numeric_jacobian(residuals, x, m, options.jacobian_step);
  bool jac_fresh = true;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    if (!jac_fresh) {
      jac = numeric_jacobian(residuals, x, m, options.jacobian_step);
      jac_fresh = true;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + chi2)) {
      result.converged = true;
      break;
    }

    bool stepped = false;
    while (lambda <= options.lambda_max) {
      Eigen::MatrixXd damped = jtj;
      for (int i = 0; i < n; ++i) {
        damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd x_new = x + step;
      const Eigen::VectorXd r_new = residuals(x_new);
      const double chi2_new = r_new.squaredNorm();
      if (chi2_new < chi2) {
        const double dchi = chi2 - chi2_new;
        const double dx = step.norm() / std::max(1.0, x.norm());
        x = x_new;
        r = r_new;
        chi2 = chi2_new;
        jac_fresh = false;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (dchi < options.ftol * std::max(chi2, 1e-300) || dx < options.xtol) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // Damping saturated without improvement: local minimum (or stall).
      result.converged = chi2 < 1e-20 || lambda > options.lambda_max;
      break;
    }
    if (result.converged) break;
  }

  if (!jac_fresh) jac = numeric_jacobian(residuals, x, m, options.jacobian_step);
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    result.covariance = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    // fall back to pseudo-inverse for (near-)singular normal equations
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = 1e-12 * svd.singularValues().maxCoeff();
    Eigen::VectorXd inv = svd.singularValues();
    for (int i = 0; i < inv.size(); ++i) {
      inv[i] = inv[i] > cutoff ? 1.0 / inv[i] : 0.0;
    }
    result.covariance =
        svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  }
  result.params = x;
  result.chi2 = chi2;
  return result;
}

NelderMeadResult nelder_mead(const ScalarFn& f, const Eigen::VectorXd& x0,
                             double scale, int max_iterations, double tol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) {
    simplex[i + 1][i] += scale * std::max(std::abs(x0[i]), 1.0);
  }
  for (int i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  auto order = [&] {
    for (int i = 1; i <= n; ++i) {
      for (int j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
        std::swap(fv[j], fv[j - 1]);
        std::swap(simplex[j], simplex[j - 1]);
      }
    }
  };
  order();

  NelderMeadResult result;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (std::abs(fv[n] - fv[0]) <= tol * (std::abs(fv[0]) + tol)) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - simplex[n]);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex[n]);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (simplex[n] - centroid);
      const double fc = f(xc);
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          fv[i] = f(simplex[i]);
        }
      }
    }
    order();
  }
  result.x = simplex[0];
  result.value = fv[0];
  return result;
}

double golden_section_min(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    throw FitFailure("bisect_root: endpoints do not bracket a root");
  }
  while (b - a > tol) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if (fa * fc < 0.0) {
      b = c;
      fb = fc;
    } else {
      a = c;
      fa = fc;
    }
  }
  return 0.5 * (a + b);
}

LinearFit weighted_linear_fit(const std::vector<double>& x,
                              const std::vector<double>& y,
                              const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2) {
    throw FitFailure("weighted_linear_fit: need >= 2 points with sigmas");
  }
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    swx += w * x[i];
    swy += w * y[i];
    swxx += w * x[i] * x[i];
    swxy += w * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0.0 || !std::isfinite(det)) {
    throw DegenerateTraces("weighted_linear_fit: x values do not span a range");
  }
  LinearFit fit;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.slope_sigma = std::sqrt(sw / det);
  fit.intercept_sigma = std::sqrt(swxx / det);
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - fit.slope * x[i] - fit.intercept) / sigma[i];
    fit.chi2 += r * r;
  }
  return fit;
}

SinusoidFit fit_sinusoid(const std::vector<double>& theta,
                         const std::vector<double>& y,
                         const std::vector<double>& sigma) {
  const size_t npts = theta.size();
  if (y.size() != npts || sigma.size() != npts || npts < 4) {
    throw FitFailure("fit_sinusoid: need >= 4 points with sigmas");
  }
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < npts; ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const Eigen::Vector3d row(1.0, std::cos(theta[i]), std::sin(theta[i]));
    ata += w * row * row.transpose();
    atb += w * row * y[i];
  }
  const Eigen::Vector3d sol = ata.ldlt().solve(atb);
  const Eigen::Matrix3d cov = ata.inverse();
  SinusoidFit fit;
  fit.offset = sol[0];
  fit.cos_coeff = sol[1];
  fit.sin_coeff = sol[2];
  fit.amplitude = std::hypot(sol[1], sol[2]);
  fit.phase = std::atan2(sol[2], sol[1]);
  fit.offset_sigma = std::sqrt(cov(0, 0));
  fit.cos_coeff_sigma = std::sqrt(cov(1, 1));
  if (fit.amplitude > 0.0) {
    const double p = sol[1], q = sol[2], a = fit.amplitude;
    fit.amplitude_sigma =
        std::sqrt(std::max(0.0, p * p * cov(1, 1) + q * q * cov(2, 2) +
                                    2.0 * p * q * cov(1, 2))) / a;
    fit.phase_sigma =
        std::sqrt(std::max(0.0, q * q * cov(1, 1) + p * p * cov(2, 2) -
                                    2.0 * p * q * cov(1, 2))) / (a * a);
  } else {
    fit.amplitude_sigma = std::sqrt(cov(1, 1));
    fit.phase_sigma = M_PI;
  }
  return fit;
}

}  // namespace fluxtalk
