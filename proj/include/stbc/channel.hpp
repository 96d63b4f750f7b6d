// SPDX-License-Identifier: Apache-2.0
//
// Quasi-static Rayleigh flat fading: Y = sqrt(rho) X H + Z with H (M x N) and
// Z (T x N) i.i.d. CN(0, 1). X is normalized so that rho is the SNR per
// receive antenna.

#pragma once

#include <cstdint>
#include <random>

#include "stbc/numerics.hpp"

namespace stbc {

/// Mixes a seed with stream coordinates into an independent 64-bit seed.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Reproducible random source. Two streams built from the same (seed, a, b)
/// produce identical draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

  /// CN(0, 1): real and imaginary parts N(0, 1/2).
  cdouble complex_gaussian();
  double gaussian();
  double uniform();
  std::uint8_t bit();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

double db_to_linear(double db);

/// M x N matrix of i.i.d. CN(0, 1) entries.
ComplexMatrix sample_channel(int M, int N, RngStream& rng);

/// T x N matrix of i.i.d. CN(0, 1) entries.
ComplexMatrix sample_noise(int T, int N, RngStream& rng);

/// sqrt(rho) X H + Z with fresh noise.
ComplexMatrix transmit(const ComplexMatrix& X, const ComplexMatrix& H, double rho, RngStream& rng);

}  // namespace stbc
