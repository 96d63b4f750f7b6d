// SPDX-License-Identifier: Apache-2.0

#include "stbc/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace stbc {

namespace {

constexpr int kNodes = 64;

struct GaussLegendre {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};

  GaussLegendre() {
    // Newton iteration on P_n from the Chebyshev initial guesses.
    for (int i = 0; i < (kNodes + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (kNodes + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= kNodes; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = kNodes * (z * p1 - p2) / (z * z - 1.0);
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[static_cast<size_t>(i)] = -z;
      x[static_cast<size_t>(kNodes - 1 - i)] = z;
      w[static_cast<size_t>(i)] = w[static_cast<size_t>(kNodes - 1 - i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }

  double panel(const std::function<double(double)>& f, double a, double b) const {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < kNodes; ++i) s += w[static_cast<size_t>(i)] * f(c + h * x[static_cast<size_t>(i)]);
    return h * s;
  }
};

const GaussLegendre& rule() {
  static const GaussLegendre g;
  return g;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double whole, double tol,
                int depth) {
  const double mid = 0.5 * (a + b);
  const double left = rule().panel(f, a, mid);
  const double right = rule().panel(f, mid, b);
  const double both = left + right;
  if (depth >= 30 || std::abs(both - whole) <= tol * std::abs(both) || std::abs(both - whole) < 1e-300) {
    return both;
  }
  return adaptive(f, a, mid, left, tol, depth + 1) + adaptive(f, mid, b, right, tol, depth + 1);
}

bool has_zero(const RealVector& beta) { return (beta.array() == 0.0).any(); }

double inverse_fourth_product(const RealVector& beta) {
  double p = 1.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) p *= std::pow(std::abs(beta(i)), -4.0);
  return p;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  return adaptive(f, a, b, rule().panel(f, a, b), rel_tol, 0);
}

double wallis_sine_integral(int n) {
  if (n < 0) throw ConfigError("wallis_sine_integral: negative exponent");
  // I_n = (n-1)/n I_{n-2}, I_0 = pi/2, I_1 = 1.
  double v = (n % 2 == 0) ? std::numbers::pi / 2.0 : 1.0;
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) v *= (k - 1.0) / k;
  return v;
}

double pep_exact(const RealVector& beta, double rho) {
  if (!(rho > 0.0)) throw ConfigError("pep_exact: rho must be positive");
  const RealVector b2 = beta.cwiseAbs2();
  auto f = [&](double a) {
    const double s2 = std::sin(a) * std::sin(a);
    if (s2 == 0.0) return b2.isZero(0.0) ? 1.0 : 0.0;
    double v = 1.0;
    for (Eigen::Index i = 0; i < b2.size(); ++i) {
      const double t = 1.0 + rho * b2(i) / (8.0 * s2);
      v /= t * t;
    }
    return v;
  };
  return integrate(f, 0.0, std::numbers::pi / 2.0) / std::numbers::pi;
}

double pep_exact_qstbc(const RealVector& beta, double rho) {
  if (beta.size() != 4) throw ConfigError("pep_exact_qstbc: beta must have 4 entries");
  return pep_exact(beta, rho);
}

double pep_exact_sast(const RealVector& beta, double rho) { return pep_exact(beta, rho); }

AsymptoticPep pep_asymptotic_qstbc(const RealVector& beta, double rho) {
  if (beta.size() != 4) throw ConfigError("pep_asymptotic_qstbc: beta must have 4 entries");
  if (has_zero(beta)) return {std::numeric_limits<double>::infinity(), true};
  return {kQstbcAsymptoticConstant * std::pow(rho, -8.0) * inverse_fourth_product(beta), false};
}

AsymptoticPep pep_asymptotic_sast(const RealVector& beta, double rho) {
  if (has_zero(beta)) return {std::numeric_limits<double>::infinity(), true};
  const double m = static_cast<double>(beta.size());
  const double c = std::pow(2.0, 6.0 * m) * std::pow(rho, -2.0 * m) / std::pow(2.0, 17.0) * 12870.0;
  return {c * inverse_fourth_product(beta), false};
}

AsymptoticPep pep_asymptotic(const RealVector& beta, double rho) {
  if (has_zero(beta)) return {std::numeric_limits<double>::infinity(), true};
  const int m = static_cast<int>(beta.size());
  const double c = std::pow(2.0, 6.0 * m) * std::pow(rho, -2.0 * m) *
                   wallis_sine_integral(4 * m) / std::numbers::pi;
  return {c * inverse_fourth_product(beta), false};
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

ConditionalPep conditional_pep(const RealVector& beta, const ComplexMatrix& lambdas, double rho) {
  if (lambdas.cols() != beta.size()) throw ConfigError("conditional_pep: lambda columns must match beta");
  const double m = static_cast<double>(beta.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambdas.rows(); ++i) {
    for (Eigen::Index j = 0; j < beta.size(); ++j) s += beta(j) * beta(j) * std::norm(lambdas(i, j));
  }
  const double x2 = rho * s / (4.0 * m);
  ConditionalPep out;
  out.erfc_form = gaussian_q(std::sqrt(x2));
  // Craig: Q(x) = (1/pi) int_0^{pi/2} exp(-x^2 / (2 sin^2 a)) da.
  auto f = [&](double a) {
    const double s2 = std::sin(a) * std::sin(a);
    return s2 == 0.0 ? (x2 == 0.0 ? 1.0 : 0.0) : std::exp(-x2 / (2.0 * s2));
  };
  out.craig_form = integrate(f, 0.0, std::numbers::pi / 2.0) / std::numbers::pi;
  return out;
}

double diversity_slope(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 2) throw ConfigError("diversity_slope: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(curve.size());
  for (const auto& [rho, pep] : curve) {
    if (!(rho > 0.0) || !(pep > 0.0)) throw ConfigError("diversity_slope: values must be positive");
    const double x = std::log10(rho), y = std::log10(pep);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw ConfigError("diversity_slope: rho values must differ");
  return (n * sxy - sx * sy) / den;
}

WorstCasePep worst_case_pep(const DifferenceSet& diffs, const RealMatrix& effective, double rho) {
  if (diffs.size() == 0) throw ConfigError("worst_case_pep: empty difference set");
  const RealMatrix d = diffs.normalized();
  const RealMatrix b = effective * d;
  WorstCasePep out;
  out.pep = -1.0;
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    const double p = pep_exact(b.col(c), rho);
    if (p > out.pep) {
      out.pep = p;
      out.delta = d.col(c);
      out.beta = b.col(c);
    }
  }
  out.asymptotic = pep_asymptotic(out.beta, rho);
  return out;
}

double papr(const TransmissionScheme& scheme, const Constellation& constellation, long trials,
            RngStream& rng) {
  if (trials < 1) throw ConfigError("papr: trials must be positive");
  const int K = scheme.data_symbols();
  RealVector peak = RealVector::Zero(scheme.M());
  RealVector sum = RealVector::Zero(scheme.M());
  ComplexVector data(K);
  for (long t = 0; t < trials; ++t) {
    for (int k = 0; k < K; ++k) {
      data(k) = constellation.point(static_cast<int>(rng.engine()() % static_cast<unsigned>(constellation.size())));
    }
    const ComplexMatrix x = scheme.encode(data);
    const RealMatrix p = x.cwiseAbs2();
    peak = peak.cwiseMax(p.colwise().maxCoeff().transpose());
    sum += p.colwise().sum().transpose();
  }
  const RealVector avg = sum / static_cast<double>(trials * scheme.T());
  double out = 0.0;
  for (int i = 0; i < scheme.M(); ++i) {
    if (avg(i) > 0.0) out = std::max(out, peak(i) / avg(i));
  }
  return out;
}

}  // namespace stbc
