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

#include "fluxtalk/tomography.hpp"

#include <array>
#include <cmath>
#include <complex>

#include "fluxtalk/errors.hpp"
#include "fluxtalk/optimize.hpp"
#include "fluxtalk/rng.hpp"

namespace fluxtalk {

namespace {

using complexd = std::complex<double>;

std::array<Eigen::Matrix2cd, 4> single_paulis() {
  std::array<Eigen::Matrix2cd, 4> p;
  p[0] << 1, 0, 0, 1;
  p[1] << 0, 1, 1, 0;
  p[2] << 0, complexd(0, -1), complexd(0, 1), 0;
  p[3] << 1, 0, 0, -1;
  return p;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return out;
}

std::vector<Eigen::Matrix4cd> default_prep_states() {
  // |0>, |1>, |+>, |+i> per qubit, product combinations
  std::array<Eigen::Vector2cd, 4> kets;
  kets[0] << 1, 0;
  kets[1] << 0, 1;
  kets[2] << M_SQRT1_2, M_SQRT1_2;
  kets[3] << M_SQRT1_2, complexd(0, M_SQRT1_2);
  std::vector<Eigen::Matrix4cd> states;
  states.reserve(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Eigen::Vector4cd ket;
      ket << kets[a][0] * kets[b][0], kets[a][0] * kets[b][1],
          kets[a][1] * kets[b][0], kets[a][1] * kets[b][1];
      states.push_back(ket * ket.adjoint());
    }
  }
  return states;
}

Eigen::Matrix4cd rz2(double alpha, double beta) {
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(complexd(0, beta));
  u(2, 2) = std::exp(complexd(0, alpha));
  u(3, 3) = std::exp(complexd(0, alpha + beta));
  return u;
}

}  // namespace

const Eigen::Matrix4cd& two_qubit_pauli(int i) {
  static const std::array<Eigen::Matrix4cd, 16> paulis = [] {
    const auto p = single_paulis();
    std::array<Eigen::Matrix4cd, 16> out;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) out[4 * a + b] = kron2(p[a], p[b]);
    }
    return out;
  }();
  return paulis[i];
}

Ptm ptm_of_operator(const Eigen::Matrix4cd& a) {
  Ptm r;
  const Eigen::Matrix4cd ad = a.adjoint();
  for (int j = 0; j < 16; ++j) {
    const Eigen::Matrix4cd mapped = a * two_qubit_pauli(j) * ad;
    for (int i = 0; i < 16; ++i) {
      r(i, j) = 0.25 * (two_qubit_pauli(i) * mapped).trace().real();
    }
  }
  return r;
}

const Ptm& cz_ideal_ptm() {
  static const Ptm r = ptm_of_operator(cz_ideal());
  return r;
}

double avg_fidelity_from_ptm(const Ptm& actual, const Ptm& ideal) {
  const double f_pro = (ideal.transpose() * actual).trace() / 16.0;
  return (4.0 * f_pro + 1.0) / 5.0;
}

ProcessTomogram tomogram_of_operator(const Eigen::Matrix4cd& a,
                                     const QptOptions& options) {
  const std::vector<Eigen::Matrix4cd> states =
      options.input_states ? *options.input_states : default_prep_states();
  if (states.size() != 16) {
    throw ConfigError("qpt needs exactly 16 preparation states");
  }

  ProcessTomogram out;
  if (!options.reconstruct && options.sampling_sigma == 0.0 &&
      options.prep_depol == 0.0) {
    out.ptm = ptm_of_operator(a);
  } else {
    // expectation values m(i,k) = tr(P_i E(rho_k)); rho_k possibly
    // depolarized at preparation
    Rng rng(mix_seed(options.seed, hash_tag("qpt-sampling")));
    Eigen::Matrix<double, 16, 16> meas, smat;
    const Eigen::Matrix4cd eye = Eigen::Matrix4cd::Identity();
    for (int k = 0; k < 16; ++k) {
      Eigen::Matrix4cd rho = states[k];
      if (options.prep_depol > 0.0) {
        rho = (1.0 - options.prep_depol) * rho +
              options.prep_depol * 0.25 * eye;
      }
      const Eigen::Matrix4cd evolved = a * rho * a.adjoint();
      for (int i = 0; i < 16; ++i) {
        smat(i, k) = (two_qubit_pauli(i) * states[k]).trace().real();
        double m = (two_qubit_pauli(i) * evolved).trace().real();
        if (options.sampling_sigma > 0.0) {
          m += options.sampling_sigma * rng.gaussian();
        }
        meas(i, k) = m;
      }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        smat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) /
                        std::max(svd.singularValues()(15), 1e-300);
    if (cond > 1e8) {
      throw ReconstructionIllConditioned(
          "preparation basis condition number " + std::to_string(cond));
    }
    // R S = M  =>  R = M S^{-1}
    out.ptm = smat.transpose()
                  .fullPivLu()
                  .solve(meas.transpose())
                  .transpose();
  }
  out.leakage = 1.0 - out.ptm(0, 0);
  out.avg_fidelity = avg_fidelity_from_ptm(out.ptm, cz_ideal_ptm());
  return out;
}

ProcessTomogram simulate_qpt(const Device& device, const GateContext& ctx,
                             const FluxProgram& adversary,
                             const QptOptions& options) {
  const GatePerturbations pert =
      crosstalk_to_perturbations(device, ctx, adversary);
  const Eigen::Matrix4cd a = cz_unitary(perturbed_model(device, ctx, pert));
  return tomogram_of_operator(a, options);
}

namespace {

RzCorrection optimize_rz_impl(const std::function<double(double, double)>& fid) {
  RzCorrection best;
  best.fidelity = fid(0.0, 0.0);
  best.alpha = 0.0;
  best.beta = 0.0;
  constexpr int kGrid = 64;
  for (int i = 0; i < kGrid; ++i) {
    const double alpha = -M_PI + 2.0 * M_PI * i / kGrid;
    for (int j = 0; j < kGrid; ++j) {
      const double beta = -M_PI + 2.0 * M_PI * j / kGrid;
      const double f = fid(alpha, beta);
      if (f > best.fidelity) {
        best.fidelity = f;
        best.alpha = alpha;
        best.beta = beta;
      }
    }
  }
  const ScalarFn neg = [&](const Eigen::VectorXd& p) {
    return -fid(p[0], p[1]);
  };
  Eigen::VectorXd x0(2);
  x0 << best.alpha, best.beta;
  const NelderMeadResult nm = nelder_mead(neg, x0, 2.0 * M_PI / kGrid, 500, 1e-10);
  if (-nm.value >= best.fidelity) {
    best.alpha = std::remainder(nm.x[0], 2.0 * M_PI);
    best.beta = std::remainder(nm.x[1], 2.0 * M_PI);
    best.fidelity = -nm.value;
  }
  return best;
}

}  // namespace

RzCorrection optimize_rz_correction(const Eigen::Matrix4cd& actual) {
  const Eigen::Matrix4cd ideal = cz_ideal();
  return optimize_rz_impl([&](double alpha, double beta) {
    return 1.0 - average_infidelity(rz2(alpha, beta) * actual, ideal);
  });
}

RzCorrection optimize_rz_correction(const ProcessTomogram& tomogram) {
  return optimize_rz_impl([&](double alpha, double beta) {
    const Ptm corrected = ptm_of_operator(rz2(alpha, beta)) * tomogram.ptm;
    return avg_fidelity_from_ptm(corrected, cz_ideal_ptm());
  });
}

}  // namespace fluxtalk
