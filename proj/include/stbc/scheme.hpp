// SPDX-License-Identifier: Apache-2.0
//
// A transmission scheme is a dispersion code driven through a real linear
// precoder: the code's real symbol slots are c = W u, where u is the real view
// (Re d_1, Im d_1, Re d_2, ...) of the data symbols d_k drawn from a
// constellation. Data coordinates are grouped for detection; each group's
// coordinate vector is what a per-group rotation acts on.

#pragma once

#include <string>
#include <vector>

#include "stbc/codebook.hpp"

namespace stbc {

/// One real data coordinate: the real or imaginary part of a data symbol.
struct Coordinate {
  int symbol = 0;
  bool imag = false;

  int index() const { return 2 * symbol + (imag ? 1 : 0); }
  bool operator==(const Coordinate&) const = default;
};

/// Ordered coordinates of one detection group; u_g(i) = u(layout[i].index()).
using GroupLayout = std::vector<Coordinate>;

enum class SchemeFamily { Generic, Qstbc8, Sast4Group, Sast2Group };

class TransmissionScheme {
 public:
  TransmissionScheme(std::string name, SchemeFamily family, DispersionCode code, RealMatrix precoder,
                     std::vector<GroupLayout> groups, RealMatrix rotation);

  const std::string& name() const { return name_; }
  SchemeFamily family() const { return family_; }
  const DispersionCode& code() const { return code_; }
  const RealMatrix& precoder() const { return precoder_; }
  const std::vector<GroupLayout>& groups() const { return groups_; }
  /// Per-group real rotation the scheme was built with (identity when unrotated).
  const RealMatrix& rotation() const { return rotation_; }

  /// Dispersion code over the data coordinates, with the data groups as its partition.
  const DispersionCode& effective() const { return effective_; }

  int data_symbols() const { return code_.complex_symbols(); }
  int T() const { return code_.T; }
  int M() const { return code_.M; }
  double scale() const { return scale_; }

  /// Power-normalized code matrix for the given data symbols.
  ComplexMatrix encode(const ComplexVector& data) const;

  /// For the 8-antenna four-group family: 0-based columns removed from the 8x8 code.
  std::vector<int> deleted_columns;

 private:
  std::string name_;
  SchemeFamily family_;
  DispersionCode code_;
  RealMatrix precoder_;
  std::vector<GroupLayout> groups_;
  RealMatrix rotation_;
  DispersionCode effective_;
  double scale_;
};

/// Real-symbol slots of group g of the 8x8 code in the order the decoder sees
/// them: (a_{2g+1}, a_{2g+2}, b_{2g+1}, b_{2g+2}) -> (4g, 4g+2, 4g+1, 4g+3).
std::vector<int> qstbc8_group_slots(int g);

/// 4Gp-QSTBC from the 8x8 code with optional deleted columns; each group's
/// 4-vector (Re d_{2g}, Re d_{2g+1}, Im d_{2g}, Im d_{2g+1}) is precoded by
/// theta4() * rotation.
TransmissionScheme make_qstbc_scheme(const RealMatrix& rotation,
                                     const std::vector<int>& deleted_columns = {});

/// SAST code for M = 2 Mbar antennas with each complex data vector precoded by
/// F^H * rotation. `four_group` selects the Re/Im split into four groups of
/// Mbar real coordinates; otherwise the two complex vectors are the groups.
TransmissionScheme make_sast_scheme(int M, const RealMatrix& rotation, bool four_group = true);

/// Any group-decodable code whose groups are whole complex symbols; `rotation`
/// acts on each group's real slots in listed order.
TransmissionScheme make_generic_scheme(const DispersionCode& code, const RealMatrix& rotation);

}  // namespace stbc
