// SPDX-License-Identifier: Apache-2.0

#include "stbc/channel.hpp"

#include <cmath>

namespace stbc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    : engine_(stream_seed(seed, a, b)) {}

cdouble RngStream::complex_gaussian() {
  constexpr double kHalf = 0.70710678118654752440;
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalf * re, kHalf * im};
}

double RngStream::gaussian() { return normal_(engine_); }

double RngStream::uniform() { return uniform_(engine_); }

std::uint8_t RngStream::bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ComplexMatrix sample_channel(int M, int N, RngStream& rng) {
  ComplexMatrix h(M, N);
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < M; ++i) h(i, j) = rng.complex_gaussian();
  }
  return h;
}

ComplexMatrix sample_noise(int T, int N, RngStream& rng) { return sample_channel(T, N, rng); }

ComplexMatrix transmit(const ComplexMatrix& X, const ComplexMatrix& H, double rho, RngStream& rng) {
  if (X.cols() != H.rows()) throw ConfigError("transmit: X columns must match H rows");
  return std::sqrt(rho) * (X * H) + sample_noise(static_cast<int>(X.rows()), static_cast<int>(H.cols()), rng);
}

}  // namespace stbc
