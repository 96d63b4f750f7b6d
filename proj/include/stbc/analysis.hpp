// SPDX-License-Identifier: Apache-2.0
//
// Pairwise error probability of the rotated four-group codes, diversity
// slopes and peak-to-average power. beta is the rotated difference
// R_eff * delta of one group; rho is the linear SNR per receive antenna.

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "stbc/channel.hpp"
#include "stbc/constellation.hpp"
#include "stbc/rotation.hpp"
#include "stbc/scheme.hpp"

namespace stbc {

/// Adaptive Gauss-Legendre quadrature: 64 nodes per panel, panels bisected
/// until the two-panel sum changes by less than `rel_tol` relative.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

/// Closed form of int_0^{pi/2} sin^n(x) dx.
double wallis_sine_integral(int n);

/// (1/pi) int_0^{pi/2} prod_i (1 + rho beta_i^2 / (8 sin^2 a))^{-2} da.
/// Applies to both code families; m = beta.size().
double pep_exact(const RealVector& beta, double rho);
double pep_exact_qstbc(const RealVector& beta, double rho);
double pep_exact_sast(const RealVector& beta, double rho);

/// High-SNR approximation. `deficient` is set (and value is +inf) when some
/// beta_i is zero, i.e. the pair does not reach full diversity.
struct AsymptoticPep {
  double value = 0.0;
  bool deficient = false;
};

/// 1,647,360 rho^-8 prod |beta_i|^-4 (m = 4).
inline constexpr double kQstbcAsymptoticConstant = 1647360.0;
AsymptoticPep pep_asymptotic_qstbc(const RealVector& beta, double rho);

/// The SAST expression 2^{6m} rho^{-2m} 2^{-17} C(16,8) prod |beta_i|^{-4}.
/// Its constant is the m = 4 Wallis factor; `pep_asymptotic` is the general form.
AsymptoticPep pep_asymptotic_sast(const RealVector& beta, double rho);

/// 2^{6m} rho^{-2m} prod |beta_i|^{-4} (1/pi) int_0^{pi/2} sin^{4m}; the limit of pep_exact.
AsymptoticPep pep_asymptotic(const RealVector& beta, double rho);

/// Q(sqrt(rho sum_ij beta_j^2 |lambda_ij|^2 / (4m))) with lambda rows i = 1, 2
/// (2 x m). Both evaluation paths are returned.
struct ConditionalPep {
  double erfc_form = 0.0;
  double craig_form = 0.0;
};
ConditionalPep conditional_pep(const RealVector& beta, const ComplexMatrix& lambdas, double rho);

/// Gaussian tail Q(x).
double gaussian_q(double x);

/// Least-squares slope of log10(pep) against log10(rho).
double diversity_slope(const std::vector<std::pair<double, double>>& curve);

struct WorstCasePep {
  double pep = 0.0;
  RealVector delta;  // normalized difference
  RealVector beta;
  AsymptoticPep asymptotic;  // general Wallis form
};

/// Largest pep_exact over the difference set, beta = effective * delta.
WorstCasePep worst_case_pep(const DifferenceSet& diffs, const RealMatrix& effective, double rho);

/// Max over antennas of peak |x|^2 / mean |x|^2 over `trials` random blocks.
double papr(const TransmissionScheme& scheme, const Constellation& constellation, long trials,
            RngStream& rng);

}  // namespace stbc
