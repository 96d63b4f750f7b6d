// SPDX-License-Identifier: Apache-2.0
//
// Real rotations applied to each detection group, and the signal-space
// product distance that governs their diversity and coding gain.

#pragma once

#include <cstdint>
#include <string>

#include "stbc/constellation.hpp"
#include "stbc/scheme.hpp"

namespace stbc {

/// Real orthogonal m x m matrix (checked to kOrthogonalTol on construction).
class RotationMatrix {
 public:
  explicit RotationMatrix(RealMatrix m, double tol = kOrthogonalTol);
  static RotationMatrix identity(int m);

  const RealMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  RealMatrix m_;
};

/// Nonzero differences between realizable group vectors. Columns of
/// `unnormalized` use the constellation's unnormalized coordinates (even
/// integers for square QAM); `scale` is applied once to get the normalized set.
/// The set is closed under negation.
struct DifferenceSet {
  int dim = 0;
  double scale = 1.0;
  RealMatrix unnormalized;

  RealMatrix normalized() const { return scale * unnormalized; }
  long size() const { return static_cast<long>(unnormalized.cols()); }
};

DifferenceSet difference_set(const Constellation& constellation, const GroupLayout& layout);

/// Layout an m-dimensional rotation acts on by default: m real parts of
/// distinct symbols for a Cartesian constellation, otherwise m/2 whole symbols
/// ordered (Re d_1, .., Re d_{m/2}, Im d_1, .., Im d_{m/2}).
GroupLayout default_layout(int m, const Constellation& constellation);

struct ProductDistance {
  double dp_min = 0.0;
  RealVector delta;  // a normalized difference attaining the minimum
};

/// min over delta of prod_i |(effective * delta)_i| on the normalized set.
ProductDistance product_distance(const RealMatrix& effective, const DifferenceSet& diffs);

/// Precoder seen by one 4Gp-QSTBC group: theta4() * R.
RealMatrix combined_rotation_qstbc(const RealMatrix& R);

/// Precoder applied to each SAST data vector: F^H * R.
ComplexMatrix combined_rotation_sast(const RealMatrix& R);

struct OptimizerBudget {
  long evaluations = 2000000;
  std::uint64_t seed = 1;
  /// Objective evaluations spent per random restart at most.
  long restart_length = 300;
};

struct OptimizedRotation {
  RotationMatrix rotation;
  double dp_min = 0.0;  // on the normalized difference set
  long evaluations = 0;
};

/// Maximizes the minimum product distance with random orthogonal restarts and
/// a Givens-angle pattern search. The evaluation sequence depends only on the
/// seed, so a larger budget never yields a smaller dp_min.
OptimizedRotation optimize_rotation(const DifferenceSet& diffs, const OptimizerBudget& budget);
OptimizedRotation optimize_rotation(int m, const Constellation& constellation,
                                    const OptimizerBudget& budget);

/// Shipped rotation for dimension m. Sizes 1 to 4 are precomputed; larger
/// sizes are optimized on first use with a fixed seed and budget.
RotationMatrix default_rotation(int m);

/// Text format: first line m, then m rows of m numbers. Input within 1e-9 of
/// orthogonal is accepted and projected to the nearest orthogonal matrix.
RotationMatrix load_rotation(const std::string& path);
void save_rotation(const std::string& path, const RotationMatrix& rotation);

}  // namespace stbc
