// SPDX-License-Identifier: Apache-2.0
//
// Block detectors. Each detector reduces a received block to one real
// observation per group, z_g = B_g u_g + n_g with n_g ~ N(0, I/2), and runs a
// minimum-distance search per group. Y is T x N, H is M x N and rho is the
// SNR per receive antenna.

#pragma once

#include <memory>
#include <vector>

#include "stbc/constellation.hpp"
#include "stbc/scheme.hpp"
#include "stbc/search.hpp"

namespace stbc {

/// A block whose equivalent channel is singular (or numerically so).
class DetectionFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline constexpr double kSingularFloor = 1e-12;

struct DetectionResult {
  ComplexVector symbols;
  std::vector<int> labels;
  std::vector<double> group_metrics;
};

struct GroupObservation {
  RealMatrix generator;  // B_g
  RealVector z;
};

/// Equivalent channel of the permuted 8-antenna code for one receive antenna,
/// with h in permuted antenna order: hbar = [[H1, H2], [H2*, -H1*]] acting on
/// the intermediate vector (x1..x8), where H1 and H2 are block circulants of
/// h(0..3) and h(4..7).
struct Qstbc8Equivalent {
  ComplexMatrix H1, H2, hbar;
  ComplexVector lambda1, lambda2;  // eigenvalues of H1, H2 along theta4() columns
};
Qstbc8Equivalent qstbc8_equivalent_channel(const ComplexVector& h_permuted);

/// Equivalent channel of the SAST code for one receive antenna:
/// hbar = [[H1, H2], [H2^H, -H1^H]] with right circulants of h1 and h2.
struct SastEquivalent {
  ComplexMatrix H1, H2, hbar;
  ComplexVector lambda1, lambda2;  // eigenvalues of H1, H2 along DFT rows
};
SastEquivalent sast_equivalent_channel(const ComplexVector& h1, const ComplexVector& h2);

/// Matched-filter statistics after whitening. `gram` is the per-half Gram
/// matrix Hhat = Q^H diag(spectrum) Q, with Q = theta4() or the DFT matrix.
/// `whitened` holds the two half-block vectors whose noise is CN(0, I).
struct WhitenedBlock {
  ComplexMatrix gram;
  RealVector spectrum;
  std::vector<ComplexVector> whitened;
};

class BlockDetector {
 public:
  BlockDetector(TransmissionScheme scheme, Constellation constellation, SearchStrategy strategy);
  virtual ~BlockDetector() = default;

  virtual std::vector<GroupObservation> front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                                  double rho) const = 0;

  /// Per-group search and recombination. Throws DetectionFailure on a singular channel.
  DetectionResult detect(const ComplexMatrix& Y, const ComplexMatrix& H, double rho) const;

  const TransmissionScheme& scheme() const { return scheme_; }
  const Constellation& constellation() const { return constellation_; }
  SearchStrategy strategy() const { return strategy_; }

 private:
  TransmissionScheme scheme_;
  Constellation constellation_;
  SearchStrategy strategy_;
  std::vector<ExhaustiveSearch> exhaustive_;
  std::vector<SphereSearch> sphere_;
};

/// Four-group detector for the 8-antenna code and its column-deleted variants.
/// Deleted columns are treated as zero channel rows of the 8-antenna code.
class Qstbc8Detector : public BlockDetector {
 public:
  Qstbc8Detector(TransmissionScheme scheme, Constellation constellation, SearchStrategy strategy);

  WhitenedBlock whiten(const ComplexMatrix& Y, const ComplexMatrix& H) const;
  std::vector<GroupObservation> front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                          double rho) const override;

 private:
  RealMatrix precoder4_;  // theta4() * rotation
};

/// SAST detector; four real groups or two complex groups depending on the scheme.
class SastDetector : public BlockDetector {
 public:
  SastDetector(TransmissionScheme scheme, Constellation constellation, SearchStrategy strategy);

  /// whitened[i] = Lambda^{-1/2} F Hbar^H yhat_i, i.e. the DFT-domain statistics.
  WhitenedBlock whiten(const ComplexMatrix& Y, const ComplexMatrix& H) const;
  std::vector<GroupObservation> front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                          double rho) const override;
};

/// Per-group ML for any group-decodable scheme via the real-valued model
/// vec(Y) = sum_j u_j vec(sqrt(rho) s C'_j H) + noise.
class GroupMlDetector : public BlockDetector {
 public:
  GroupMlDetector(TransmissionScheme scheme, Constellation constellation, SearchStrategy strategy);
  std::vector<GroupObservation> front_end(const ComplexMatrix& Y, const ComplexMatrix& H,
                                          double rho) const override;
};

/// Picks the detector matching the scheme family.
std::unique_ptr<BlockDetector> make_detector(const TransmissionScheme& scheme,
                                             const Constellation& constellation,
                                             SearchStrategy strategy);

/// Real-valued model columns: column j is vec(sqrt(rho) * scale * C'_j H) with
/// vec interleaving (Re, Im) row by row within each receive column.
RealMatrix real_model(const TransmissionScheme& scheme, const ComplexMatrix& H, double rho);
RealVector real_vec(const ComplexMatrix& Y);

/// ||Y - sqrt(rho) X(d) H||_F^2 for the given data symbols.
double joint_metric(const TransmissionScheme& scheme, const ComplexMatrix& Y,
                    const ComplexMatrix& H, double rho, const ComplexVector& data);

/// Exhaustive ML over every data vector of the block, ignoring group
/// structure. Limited to 2^20 candidates.
DetectionResult joint_ml_oracle(const TransmissionScheme& scheme, const Constellation& constellation,
                                const ComplexMatrix& Y, const ComplexMatrix& H, double rho);

}  // namespace stbc
