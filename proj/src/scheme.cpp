// SPDX-License-Identifier: Apache-2.0

#include "stbc/scheme.hpp"

#include <cmath>

namespace stbc {

TransmissionScheme::TransmissionScheme(std::string name, SchemeFamily family, DispersionCode code,
                                       RealMatrix precoder, std::vector<GroupLayout> groups,
                                       RealMatrix rotation)
    : name_(std::move(name)),
      family_(family),
      code_(std::move(code)),
      precoder_(std::move(precoder)),
      groups_(std::move(groups)),
      rotation_(std::move(rotation)) {
  validate(code_);
  const int L = code_.real_symbols();
  if (precoder_.rows() != L || precoder_.cols() != L) {
    throw ConfigError(name_ + ": precoder must be L x L");
  }
  effective_.name = name_;
  effective_.T = code_.T;
  effective_.M = code_.M;
  effective_.dispersion.assign(static_cast<size_t>(L), ComplexMatrix::Zero(code_.T, code_.M));
  for (int j = 0; j < L; ++j) {
    for (int l = 0; l < L; ++l) {
      if (precoder_(l, j) != 0.0) {
        effective_.dispersion[static_cast<size_t>(j)] +=
            precoder_(l, j) * code_.dispersion[static_cast<size_t>(l)];
      }
    }
  }
  for (const auto& g : groups_) {
    std::vector<int> idx;
    for (const auto& c : g) idx.push_back(c.index());
    effective_.groups.push_back(std::move(idx));
  }
  validate(effective_);
  scale_ = power_scale(code_);
}

ComplexMatrix TransmissionScheme::encode(const ComplexVector& data) const {
  if (data.size() != data_symbols()) {
    throw ConfigError(name_ + ": expected " + std::to_string(data_symbols()) + " data symbols");
  }
  ComplexMatrix x = ComplexMatrix::Zero(code_.T, code_.M);
  for (Eigen::Index k = 0; k < data.size(); ++k) {
    x += data(k).real() * effective_.dispersion[static_cast<size_t>(2 * k)];
    x += data(k).imag() * effective_.dispersion[static_cast<size_t>(2 * k + 1)];
  }
  return scale_ * x;
}

std::vector<int> qstbc8_group_slots(int g) { return {4 * g, 4 * g + 2, 4 * g + 1, 4 * g + 3}; }

TransmissionScheme make_qstbc_scheme(const RealMatrix& rotation,
                                     const std::vector<int>& deleted_columns) {
  if (rotation.rows() != 4 || rotation.cols() != 4) {
    throw ConfigError("4Gp-QSTBC needs a 4x4 rotation");
  }
  DispersionCode code = qstbc_8();
  std::string name = "4gp-qstbc8";
  if (!deleted_columns.empty()) {
    code = delete_columns(code, deleted_columns);
    name = "4gp-qstbc" + std::to_string(code.M);
  }
  code.name = name;
  const RealMatrix p = theta4() * rotation;
  RealMatrix w = RealMatrix::Zero(16, 16);
  std::vector<GroupLayout> groups;
  for (int g = 0; g < 4; ++g) {
    const auto slots = qstbc8_group_slots(g);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) w(slots[i], slots[j]) = p(i, j);
    }
    // Slot 4g+k carries data coordinate 4g+k, so the group layout follows the slots.
    GroupLayout layout;
    for (int s : slots) layout.push_back(Coordinate{s / 2, (s % 2) == 1});
    groups.push_back(std::move(layout));
  }
  TransmissionScheme scheme(name, SchemeFamily::Qstbc8, std::move(code), std::move(w),
                            std::move(groups), rotation);
  scheme.deleted_columns = deleted_columns;
  return scheme;
}

TransmissionScheme make_sast_scheme(int M, const RealMatrix& rotation, bool four_group) {
  if (M < 2 || M % 2 != 0) throw ConfigError("SAST needs an even antenna count");
  const int mbar = M / 2;
  if (rotation.rows() != mbar || rotation.cols() != mbar) {
    throw ConfigError("SAST with M=" + std::to_string(M) + " needs a " + std::to_string(mbar) +
                      "x" + std::to_string(mbar) + " rotation");
  }
  const ComplexMatrix u = dft_matrix(mbar).adjoint() * rotation.cast<cdouble>();
  RealMatrix w = RealMatrix::Zero(2 * M, 2 * M);
  for (int blk = 0; blk < 2; ++blk) {
    for (int k = 0; k < mbar; ++k) {
      for (int j = 0; j < mbar; ++j) {
        const int ko = blk * mbar + k;
        const int jo = blk * mbar + j;
        w(2 * ko, 2 * jo) = u(k, j).real();
        w(2 * ko, 2 * jo + 1) = -u(k, j).imag();
        w(2 * ko + 1, 2 * jo) = u(k, j).imag();
        w(2 * ko + 1, 2 * jo + 1) = u(k, j).real();
      }
    }
  }
  std::vector<GroupLayout> groups;
  for (int blk = 0; blk < 2; ++blk) {
    GroupLayout re, im;
    for (int j = 0; j < mbar; ++j) {
      re.push_back(Coordinate{blk * mbar + j, false});
      im.push_back(Coordinate{blk * mbar + j, true});
    }
    if (four_group) {
      groups.push_back(std::move(re));
      groups.push_back(std::move(im));
    } else {
      re.insert(re.end(), im.begin(), im.end());
      groups.push_back(std::move(re));
    }
  }
  DispersionCode code = sast_code(M);
  const std::string name =
      four_group ? "4gp-sast" + std::to_string(M) : "sast" + std::to_string(M) + "-2gp";
  code.name = name;
  return TransmissionScheme(name, four_group ? SchemeFamily::Sast4Group : SchemeFamily::Sast2Group,
                            std::move(code), std::move(w), std::move(groups), rotation);
}

TransmissionScheme make_generic_scheme(const DispersionCode& code, const RealMatrix& rotation) {
  validate(code);
  const int L = code.real_symbols();
  RealMatrix w = RealMatrix::Zero(L, L);
  std::vector<GroupLayout> groups;
  for (const auto& g : code.groups) {
    if (static_cast<Eigen::Index>(g.size()) != rotation.rows() || rotation.rows() != rotation.cols()) {
      throw ConfigError(code.name + ": rotation size does not match group size");
    }
    GroupLayout layout;
    for (size_t i = 0; i < g.size(); ++i) {
      for (size_t j = 0; j < g.size(); ++j) {
        w(g[i], g[j]) = rotation(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      layout.push_back(Coordinate{g[i] / 2, (g[i] % 2) == 1});
    }
    groups.push_back(std::move(layout));
  }
  return TransmissionScheme(code.name, SchemeFamily::Generic, code, std::move(w), std::move(groups),
                            rotation);
}

}  // namespace stbc
