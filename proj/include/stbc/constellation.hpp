// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stbc/numerics.hpp"

namespace stbc {

/// Real and imaginary level sets of a constellation that is a Cartesian
/// product of two PAM alphabets (square QAM, 8QAM-R). Levels are normalized.
struct CartesianFactor {
  std::vector<double> re_levels;
  std::vector<double> im_levels;
};

/// Finite complex signal set with unit average power. Points are stored in
/// label order: points[label] carries the bits of `label`, MSB first.
class Constellation {
 public:
  Constellation(std::string name, std::vector<cdouble> unnormalized_points, int bits_per_symbol,
                std::optional<CartesianFactor> unnormalized_factor = std::nullopt);

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(points_.size()); }
  int bits_per_symbol() const { return bits_per_symbol_; }
  const std::vector<cdouble>& points() const { return points_; }
  cdouble point(int label) const { return points_.at(static_cast<size_t>(label)); }

  /// Normalization applied to the unnormalized coordinates (e.g. 1/sqrt(10) for 16QAM).
  double scale() const { return scale_; }
  const std::vector<cdouble>& unnormalized_points() const { return raw_; }

  const std::optional<CartesianFactor>& cartesian() const { return factor_; }
  bool is_cartesian() const { return factor_.has_value(); }

  double average_power() const;
  double min_distance() const;

  /// Label of the point nearest to z.
  int nearest(cdouble z) const;

  std::vector<int> bits_to_labels(std::span<const std::uint8_t> bits) const;
  ComplexVector bits_to_symbols(std::span<const std::uint8_t> bits) const;
  std::vector<std::uint8_t> labels_to_bits(std::span<const int> labels) const;
  std::vector<std::uint8_t> symbols_to_bits(const ComplexVector& symbols) const;

 private:
  std::string name_;
  std::vector<cdouble> raw_;
  std::vector<cdouble> points_;
  int bits_per_symbol_;
  double scale_;
  std::optional<CartesianFactor> factor_;
};

/// Square QAM (order 4 or 16) with per-axis Gray labeling on odd-integer coordinates.
Constellation make_qam(int order);

/// Rectangular 8QAM with points {+-1 +-j, +-3 +-j}; Gray labeled per axis.
Constellation make_8qam_rect();

/// 8-point subset of the hexagonal lattice with minimum average energy
/// (d_min^2 / E = 64/69), centered at its centroid, quasi-Gray labeled.
Constellation make_8qam_s();

/// `4qam`, `16qam`, `8qam-r`, `8qam-s`.
Constellation constellation_by_name(const std::string& name);

/// Sum of label Hamming distances over all nearest-neighbour point pairs.
int neighbour_label_cost(const Constellation& c);

}  // namespace stbc
