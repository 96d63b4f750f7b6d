// SPDX-License-Identifier: Apache-2.0
//
// Linear dispersion space-time block codes X = sum_l c_l C_l over real symbols.
//
// Real-symbol ordering is (a_1, b_1, a_2, b_2, ...) with s_k = a_k + j b_k, so
// dispersion[2k] is A_k and dispersion[2k+1] is B_k (0-based k). Groups are
// sets of real-symbol indices.

#pragma once

#include <string>
#include <vector>

#include "stbc/numerics.hpp"

namespace stbc {

using IndexGroups = std::vector<std::vector<int>>;

struct DispersionCode {
  std::string name;
  int T = 0;
  int M = 0;
  std::vector<ComplexMatrix> dispersion;
  IndexGroups groups;

  int real_symbols() const { return static_cast<int>(dispersion.size()); }
  int complex_symbols() const { return real_symbols() / 2; }
};

/// Throws ConfigError if dimensions are inconsistent or groups do not
/// partition the real symbols.
void validate(const DispersionCode& code);

/// Builds a code from pairs (A_k, B_k) with X = sum_k a_k A_k + b_k B_k. `symbol_groups` lists complex symbol
/// indices; each is expanded to its two real symbols.
DispersionCode dispersion_from_pairs(const std::vector<ComplexMatrix>& a,
                                     const std::vector<ComplexMatrix>& b,
                                     const IndexGroups& symbol_groups, std::string name = "pairs");

struct GroupCheck {
  bool ok = false;
  double max_violation = 0.0;
};

inline constexpr double kGroupDecodableTol = 1e-12;

/// Largest ||C_p^H C_q + C_q^H C_p||_F over real symbols p, q in different groups.
GroupCheck verify_group_decodable(const DispersionCode& code);

/// 4x4 minimum-decoding-complexity quasi-orthogonal code:
///   [[G(a), G(b)], [G(b), G(a)]],  G(v) = [[z1, z2], [-z2*, z1*]],
///   z1 = v1 + j v3, z2 = v2 + j v4.
/// Symbol s_k = a_k + j b_k forms its own group.
DispersionCode mdc_qstbc_4();

/// Doubling construction: new complex symbol l takes its real part on
/// diag(C_l, C_l) and its imaginary part on [[0, C_l], [C_l, 0]], where C_l is
/// the l-th real dispersion matrix of the input. New groups are induced from
/// the input's real-symbol groups. Throws if the input is not group decodable.
DispersionCode double_code(const DispersionCode& code);

/// 8x8 rate-one four-group decodable code, double_code(mdc_qstbc_4()).
/// Groups are (s1,s2), (s3,s4), (s5,s6), (s7,s8).
DispersionCode qstbc_8();

/// Intermediate variables of the 8x8 code: x1 = a1 + j a5, x2 = a2 + j a6,
/// x3 = b1 + j b5, x4 = b2 + j b6, x5 = a3 + j a7, x6 = a4 + j a8,
/// x7 = b3 + j b7, x8 = b4 + j b8, from a real-symbol vector of length 16.
ComplexVector qstbc8_intermediates(const RealVector& c);

/// Row/column permutation (1,3,5,7,2,4,6,8) of the 8x8 code, 0-based.
inline constexpr int kQstbc8Permutation[8] = {0, 2, 4, 6, 1, 3, 5, 7};

/// Permuted 8x8 code D = [[D1, D2], [-D2*, D1*]], D1 = block_circulant4(x1..x4),
/// D2 = block_circulant4(x5..x8).
ComplexMatrix qstbc_8_permuted(const ComplexVector& x);

/// SAST code matrix [[C(s1), C(s2)], [-C(s2)^H, C(s1)^H]] with right circulants.
ComplexMatrix sast_encode(const ComplexVector& s1, const ComplexVector& s2);

/// SAST code for M = 2*Mbar antennas as a dispersion code. Groups are the two
/// complex vectors s1 and s2 (two-group decodable).
DispersionCode sast_code(int M);

/// Deletes the given 0-based columns from every dispersion matrix. T and the
/// group partition are unchanged.
DispersionCode delete_columns(const DispersionCode& code, const std::vector<int>& cols);

/// Default columns removed from the 8-antenna code to get 6 antennas (4 and 8, 1-based).
inline const std::vector<int> kDefaultDeletedColumns = {3, 7};

/// Standard 2x2 orthogonal design [[s1, s2], [-s2*, s1*]].
DispersionCode alamouti();

/// Block-diagonal Alamouti for an even number of antennas; half of every
/// antenna's slots are zero. Used as a zero-padded reference design.
DispersionCode zero_padded_alamouti(int M);

struct CodeInfo {
  double rate = 0.0;  // complex symbols per channel use
  int delay = 0;
  int real_group_size = 0;
};

CodeInfo code_info(const DispersionCode& code);

/// Scalar applied at encode time so that E||X||_F^2 = T when every real symbol
/// has variance 1/2 (unit-power complex symbols).
double power_scale(const DispersionCode& code);

/// X = power_scale * sum_l c_l C_l.
ComplexMatrix encode(const DispersionCode& code, const RealVector& c);

/// Real view (a_1, b_1, a_2, b_2, ...) of a complex symbol vector.
RealVector real_view(const ComplexVector& s);
ComplexVector complex_view(const RealVector& c);

}  // namespace stbc
