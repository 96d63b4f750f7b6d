// SPDX-License-Identifier: Apache-2.0

#include "stbc/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace stbc {

namespace {

// Gray-labeled PAM on odd integers: level for a given label.
std::vector<double> gray_pam(int bits) {
  const int n = 1 << bits;
  std::vector<double> level(static_cast<size_t>(n));
  for (int pos = 0; pos < n; ++pos) {
    const int label = pos ^ (pos >> 1);
    level[static_cast<size_t>(label)] = 2.0 * pos - (n - 1);
  }
  return level;
}

Constellation cartesian_qam(std::string name, int re_bits, int im_bits) {
  const auto re = gray_pam(re_bits);
  const auto im = gray_pam(im_bits);
  std::vector<cdouble> pts;
  for (size_t r = 0; r < re.size(); ++r) {
    for (size_t i = 0; i < im.size(); ++i) {
      pts.emplace_back(re[r], im[i]);  // label = (r << im_bits) | i
    }
  }
  std::vector<double> re_sorted = re, im_sorted = im;
  std::sort(re_sorted.begin(), re_sorted.end());
  std::sort(im_sorted.begin(), im_sorted.end());
  return Constellation(std::move(name), std::move(pts), re_bits + im_bits,
                       CartesianFactor{re_sorted, im_sorted});
}

}  // namespace

Constellation::Constellation(std::string name, std::vector<cdouble> unnormalized_points,
                             int bits_per_symbol,
                             std::optional<CartesianFactor> unnormalized_factor)
    : name_(std::move(name)), raw_(std::move(unnormalized_points)), bits_per_symbol_(bits_per_symbol) {
  if (raw_.empty() || raw_.size() != (size_t{1} << bits_per_symbol)) {
    throw ConfigError("constellation " + name_ + ": point count must be 2^bits_per_symbol");
  }
  double power = 0.0;
  for (const auto& p : raw_) power += std::norm(p);
  power /= static_cast<double>(raw_.size());
  scale_ = 1.0 / std::sqrt(power);
  points_.reserve(raw_.size());
  for (const auto& p : raw_) points_.push_back(p * scale_);
  for (size_t a = 0; a < points_.size(); ++a) {
    for (size_t b = a + 1; b < points_.size(); ++b) {
      if (std::abs(points_[a] - points_[b]) < 1e-12) {
        throw ConfigError("constellation " + name_ + ": duplicate points");
      }
    }
  }
  if (unnormalized_factor) {
    CartesianFactor f = *unnormalized_factor;
    for (auto& v : f.re_levels) v *= scale_;
    for (auto& v : f.im_levels) v *= scale_;
    factor_ = std::move(f);
  }
}

double Constellation::average_power() const {
  double p = 0.0;
  for (const auto& z : points_) p += std::norm(z);
  return p / static_cast<double>(points_.size());
}

double Constellation::min_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < points_.size(); ++a) {
    for (size_t b = a + 1; b < points_.size(); ++b) {
      d = std::min(d, std::abs(points_[a] - points_[b]));
    }
  }
  return d;
}

int Constellation::nearest(cdouble z) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = std::norm(z - points_[static_cast<size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<int> Constellation::bits_to_labels(std::span<const std::uint8_t> bits) const {
  const auto k = static_cast<size_t>(bits_per_symbol_);
  if (bits.size() % k != 0) {
    throw ConfigError("bits_to_symbols: bit count not a multiple of bits_per_symbol");
  }
  std::vector<int> labels(bits.size() / k);
  for (size_t s = 0; s < labels.size(); ++s) {
    int label = 0;
    for (size_t b = 0; b < k; ++b) label = (label << 1) | (bits[s * k + b] & 1);
    labels[s] = label;
  }
  return labels;
}

ComplexVector Constellation::bits_to_symbols(std::span<const std::uint8_t> bits) const {
  const auto labels = bits_to_labels(bits);
  ComplexVector out(static_cast<Eigen::Index>(labels.size()));
  for (size_t s = 0; s < labels.size(); ++s) out(static_cast<Eigen::Index>(s)) = point(labels[s]);
  return out;
}

std::vector<std::uint8_t> Constellation::labels_to_bits(std::span<const int> labels) const {
  const auto k = static_cast<size_t>(bits_per_symbol_);
  std::vector<std::uint8_t> bits(labels.size() * k);
  for (size_t s = 0; s < labels.size(); ++s) {
    for (size_t b = 0; b < k; ++b) {
      bits[s * k + b] = static_cast<std::uint8_t>((labels[s] >> (k - 1 - b)) & 1);
    }
  }
  return bits;
}

std::vector<std::uint8_t> Constellation::symbols_to_bits(const ComplexVector& symbols) const {
  std::vector<int> labels(static_cast<size_t>(symbols.size()));
  for (Eigen::Index s = 0; s < symbols.size(); ++s) labels[static_cast<size_t>(s)] = nearest(symbols(s));
  return labels_to_bits(labels);
}

Constellation make_qam(int order) {
  switch (order) {
    case 4:
      return cartesian_qam("4qam", 1, 1);
    case 16:
      return cartesian_qam("16qam", 2, 2);
    default:
      throw ConfigError("make_qam: unsupported order " + std::to_string(order));
  }
}

Constellation make_8qam_rect() { return cartesian_qam("8qam-r", 2, 1); }

Constellation make_8qam_s() {
  // Hexagonal lattice points (i + j/2, j sqrt(3)/2), unit minimum distance,
  // and the label each one carries. The labeling attains the minimum
  // neighbour Hamming cost (18 over the 14 nearest-neighbour pairs).
  struct Site {
    int i, j, label;
  };
  constexpr Site sites[] = {{-2, 0, 0}, {-2, 1, 1}, {-2, 2, 2}, {-1, -1, 4},
                            {-1, 0, 5}, {-1, 1, 3}, {0, -1, 6}, {0, 0, 7}};
  const double h = std::sqrt(3.0) / 2.0;
  cdouble centroid = 0.0;
  for (const auto& s : sites) centroid += cdouble(s.i + 0.5 * s.j, h * s.j);
  centroid /= 8.0;
  std::vector<cdouble> pts(8);
  for (const auto& s : sites) {
    pts[static_cast<size_t>(s.label)] = cdouble(s.i + 0.5 * s.j, h * s.j) - centroid;
  }
  return Constellation("8qam-s", std::move(pts), 3);
}

Constellation constellation_by_name(const std::string& name) {
  if (name == "4qam") return make_qam(4);
  if (name == "16qam") return make_qam(16);
  if (name == "8qam-r") return make_8qam_rect();
  if (name == "8qam-s") return make_8qam_s();
  throw ConfigError("unknown constellation '" + name + "'");
}

int neighbour_label_cost(const Constellation& c) {
  const double dmin = c.min_distance();
  int cost = 0;
  for (int a = 0; a < c.size(); ++a) {
    for (int b = a + 1; b < c.size(); ++b) {
      if (std::abs(c.point(a) - c.point(b)) < dmin * (1.0 + 1e-9)) {
        cost += std::popcount(static_cast<unsigned>(a ^ b));
      }
    }
  }
  return cost;
}

}  // namespace stbc
