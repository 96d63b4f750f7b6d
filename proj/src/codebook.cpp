// SPDX-License-Identifier: Apache-2.0

#include "stbc/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace stbc {

namespace {

// Dispersion matrices of a real-linear map from L real symbols to T x M matrices.
std::vector<ComplexMatrix> linearize(int L, const std::function<ComplexMatrix(const RealVector&)>& f) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<size_t>(L));
  for (int l = 0; l < L; ++l) {
    RealVector e = RealVector::Zero(L);
    e(l) = 1.0;
    out.push_back(f(e));
  }
  return out;
}

IndexGroups per_symbol_groups(int K) {
  IndexGroups g;
  for (int k = 0; k < K; ++k) g.push_back({2 * k, 2 * k + 1});
  return g;
}

// [[z1, z2], [-z2*, z1*]]
ComplexMatrix alamouti_block(cdouble z1, cdouble z2) {
  ComplexMatrix g(2, 2);
  g << z1, z2, -std::conj(z2), std::conj(z1);
  return g;
}

}  // namespace

void validate(const DispersionCode& code) {
  if (code.T < 1 || code.M < 1) throw ConfigError(code.name + ": T and M must be positive");
  if (code.dispersion.empty()) throw ConfigError(code.name + ": no dispersion matrices");
  for (const auto& c : code.dispersion) {
    if (c.rows() != code.T || c.cols() != code.M) {
      throw ConfigError(code.name + ": dispersion matrix is not T x M");
    }
    if (!c.allFinite()) throw ConfigError(code.name + ": non-finite dispersion entry");
  }
  std::vector<int> seen(static_cast<size_t>(code.real_symbols()), 0);
  for (const auto& g : code.groups) {
    for (int idx : g) {
      if (idx < 0 || idx >= code.real_symbols()) {
        throw ConfigError(code.name + ": group index out of range");
      }
      ++seen[static_cast<size_t>(idx)];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw ConfigError(code.name + ": groups do not partition the real symbols");
  }
}

DispersionCode dispersion_from_pairs(const std::vector<ComplexMatrix>& a,
                                     const std::vector<ComplexMatrix>& b,
                                     const IndexGroups& symbol_groups, std::string name) {
  if (a.empty() || a.size() != b.size()) {
    throw ConfigError("dispersion_from_pairs: need equal-sized nonempty A and B lists");
  }
  DispersionCode code;
  code.name = std::move(name);
  code.T = static_cast<int>(a.front().rows());
  code.M = static_cast<int>(a.front().cols());
  for (size_t k = 0; k < a.size(); ++k) {
    code.dispersion.push_back(a[k]);
    code.dispersion.push_back(b[k]);
  }
  for (const auto& g : symbol_groups) {
    std::vector<int> reals;
    for (int k : g) {
      reals.push_back(2 * k);
      reals.push_back(2 * k + 1);
    }
    code.groups.push_back(std::move(reals));
  }
  validate(code);
  return code;
}

GroupCheck verify_group_decodable(const DispersionCode& code) {
  validate(code);
  std::vector<int> group_of(static_cast<size_t>(code.real_symbols()));
  for (size_t g = 0; g < code.groups.size(); ++g) {
    for (int idx : code.groups[g]) group_of[static_cast<size_t>(idx)] = static_cast<int>(g);
  }
  GroupCheck out;
  for (int p = 0; p < code.real_symbols(); ++p) {
    for (int q = p + 1; q < code.real_symbols(); ++q) {
      if (group_of[static_cast<size_t>(p)] == group_of[static_cast<size_t>(q)]) continue;
      const auto& cp = code.dispersion[static_cast<size_t>(p)];
      const auto& cq = code.dispersion[static_cast<size_t>(q)];
      const double v = (cp.adjoint() * cq + cq.adjoint() * cp).norm();
      out.max_violation = std::max(out.max_violation, v);
    }
  }
  out.ok = out.max_violation <= kGroupDecodableTol;
  return out;
}

DispersionCode mdc_qstbc_4() {
  auto f4 = [](const RealVector& c) {
    // c = (a1, b1, a2, b2, a3, b3, a4, b4)
    const auto g = [&](int off) {
      return alamouti_block(cdouble(c(off), c(off + 4)), cdouble(c(off + 2), c(off + 6)));
    };
    const ComplexMatrix ga = g(0);
    const ComplexMatrix gb = g(1);
    ComplexMatrix x(4, 4);
    x << ga, gb, gb, ga;
    return x;
  };
  DispersionCode code;
  code.name = "mdc-qstbc4";
  code.T = 4;
  code.M = 4;
  code.dispersion = linearize(8, f4);
  code.groups = per_symbol_groups(4);
  validate(code);
  return code;
}

DispersionCode double_code(const DispersionCode& code) {
  const auto check = verify_group_decodable(code);
  if (!check.ok) {
    throw ConfigError("double_code: input '" + code.name + "' is not group decodable (violation " +
                      std::to_string(check.max_violation) + ")");
  }
  DispersionCode out;
  out.name = code.name + "-x2";
  out.T = 2 * code.T;
  out.M = 2 * code.M;
  const ComplexMatrix zero = ComplexMatrix::Zero(code.T, code.M);
  for (const auto& c : code.dispersion) {
    ComplexMatrix diag(out.T, out.M), anti(out.T, out.M);
    diag << c, zero, zero, c;
    anti << zero, c, c, zero;
    out.dispersion.push_back(std::move(diag));
    out.dispersion.push_back(std::move(anti));
  }
  for (const auto& g : code.groups) {
    std::vector<int> ng;
    for (int l : g) {
      ng.push_back(2 * l);
      ng.push_back(2 * l + 1);
    }
    out.groups.push_back(std::move(ng));
  }
  validate(out);
  return out;
}

DispersionCode qstbc_8() {
  DispersionCode code = double_code(mdc_qstbc_4());
  code.name = "4gp-qstbc8";
  return code;
}

ComplexVector qstbc8_intermediates(const RealVector& c) {
  if (c.size() != 16) throw ConfigError("qstbc8_intermediates: need 16 real symbols");
  // a_i -> c(2(i-1)), b_i -> c(2(i-1)+1)
  const auto a = [&](int i) { return c(2 * (i - 1)); };
  const auto b = [&](int i) { return c(2 * (i - 1) + 1); };
  ComplexVector x(8);
  x << cdouble(a(1), a(5)), cdouble(a(2), a(6)), cdouble(b(1), b(5)), cdouble(b(2), b(6)),
      cdouble(a(3), a(7)), cdouble(a(4), a(8)), cdouble(b(3), b(7)), cdouble(b(4), b(8));
  return x;
}

ComplexMatrix qstbc_8_permuted(const ComplexVector& x) {
  if (x.size() != 8) throw ConfigError("qstbc_8_permuted: need 8 intermediate variables");
  const ComplexMatrix d1 = block_circulant4(x.head(4));
  const ComplexMatrix d2 = block_circulant4(x.tail(4));
  ComplexMatrix d(8, 8);
  d << d1, d2, -d2.conjugate(), d1.conjugate();
  return d;
}

ComplexMatrix sast_encode(const ComplexVector& s1, const ComplexVector& s2) {
  if (s1.size() != s2.size()) throw ConfigError("sast_encode: s1 and s2 lengths differ");
  const ComplexMatrix c1 = circulant(s1);
  const ComplexMatrix c2 = circulant(s2);
  const Eigen::Index m = s1.size();
  ComplexMatrix s(2 * m, 2 * m);
  s << c1, c2, -c2.adjoint(), c1.adjoint();
  return s;
}

DispersionCode sast_code(int M) {
  if (M < 2 || M % 2 != 0) throw ConfigError("sast_code: M must be even and >= 2");
  const int mbar = M / 2;
  auto f = [mbar](const RealVector& c) {
    const ComplexVector s = complex_view(c);
    return sast_encode(s.head(mbar), s.tail(mbar));
  };
  DispersionCode code;
  code.name = "sast" + std::to_string(M);
  code.T = M;
  code.M = M;
  code.dispersion = linearize(2 * M, f);
  std::vector<int> g1, g2;
  for (int l = 0; l < 2 * mbar; ++l) g1.push_back(l);
  for (int l = 2 * mbar; l < 2 * M; ++l) g2.push_back(l);
  code.groups = {g1, g2};
  validate(code);
  return code;
}

DispersionCode delete_columns(const DispersionCode& code, const std::vector<int>& cols) {
  std::set<int> drop(cols.begin(), cols.end());
  for (int c : drop) {
    if (c < 0 || c >= code.M) {
      throw ConfigError("delete_columns: column " + std::to_string(c) + " out of range");
    }
  }
  if (static_cast<int>(drop.size()) >= code.M) {
    throw ConfigError("delete_columns: cannot delete every column");
  }
  if (drop.empty()) return code;
  std::vector<int> keep;
  for (int c = 0; c < code.M; ++c) {
    if (!drop.count(c)) keep.push_back(c);
  }
  DispersionCode out = code;
  out.M = static_cast<int>(keep.size());
  out.name = code.name + "-del";
  for (auto& d : out.dispersion) {
    ComplexMatrix kept(d.rows(), out.M);
    for (int j = 0; j < out.M; ++j) kept.col(j) = d.col(keep[static_cast<size_t>(j)]);
    d = std::move(kept);
  }
  validate(out);
  return out;
}

DispersionCode alamouti() {
  auto f = [](const RealVector& c) {
    return alamouti_block(cdouble(c(0), c(1)), cdouble(c(2), c(3)));
  };
  DispersionCode code;
  code.name = "alamouti";
  code.T = 2;
  code.M = 2;
  code.dispersion = linearize(4, f);
  code.groups = per_symbol_groups(2);
  validate(code);
  return code;
}

DispersionCode zero_padded_alamouti(int M) {
  if (M < 2 || M % 2 != 0) throw ConfigError("zero_padded_alamouti: M must be even");
  auto f = [M](const RealVector& c) {
    ComplexMatrix x = ComplexMatrix::Zero(M, M);
    for (int blk = 0; blk < M / 2; ++blk) {
      x.block(2 * blk, 2 * blk, 2, 2) = alamouti_block(cdouble(c(4 * blk), c(4 * blk + 1)),
                                                      cdouble(c(4 * blk + 2), c(4 * blk + 3)));
    }
    return x;
  };
  DispersionCode code;
  code.name = "alamouti-zp" + std::to_string(M);
  code.T = M;
  code.M = M;
  code.dispersion = linearize(2 * M, f);
  code.groups = per_symbol_groups(M);
  validate(code);
  return code;
}

CodeInfo code_info(const DispersionCode& code) {
  validate(code);
  CodeInfo info;
  info.rate = static_cast<double>(code.real_symbols()) / 2.0 / code.T;
  info.delay = code.T;
  for (const auto& g : code.groups) {
    info.real_group_size = std::max(info.real_group_size, static_cast<int>(g.size()));
  }
  return info;
}

double power_scale(const DispersionCode& code) {
  double energy = 0.0;
  for (const auto& c : code.dispersion) energy += c.squaredNorm();
  return std::sqrt(code.T / (0.5 * energy));
}

ComplexMatrix encode(const DispersionCode& code, const RealVector& c) {
  if (c.size() != code.real_symbols()) {
    throw ConfigError("encode: expected " + std::to_string(code.real_symbols()) +
                      " real symbols, got " + std::to_string(c.size()));
  }
  ComplexMatrix x = ComplexMatrix::Zero(code.T, code.M);
  for (int l = 0; l < code.real_symbols(); ++l) {
    if (c(l) != 0.0) x += c(l) * code.dispersion[static_cast<size_t>(l)];
  }
  return power_scale(code) * x;
}

RealVector real_view(const ComplexVector& s) {
  RealVector c(2 * s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    c(2 * k) = s(k).real();
    c(2 * k + 1) = s(k).imag();
  }
  return c;
}

ComplexVector complex_view(const RealVector& c) {
  if (c.size() % 2 != 0) throw ConfigError("complex_view: odd real length");
  ComplexVector s(c.size() / 2);
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = cdouble(c(2 * k), c(2 * k + 1));
  return s;
}

}  // namespace stbc
