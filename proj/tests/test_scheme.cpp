// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "stbc/scheme.hpp"
#include "test_util.hpp"

using namespace stbc;
using stbc::test::random_complex_vector;
using stbc::test::random_orthogonal;

namespace {

ComplexMatrix combine(const DispersionCode& code, const RealVector& c) {
  ComplexMatrix x = ComplexMatrix::Zero(code.T, code.M);
  for (int l = 0; l < code.real_symbols(); ++l) x += c(l) * code.dispersion[static_cast<size_t>(l)];
  return x;
}

}  // namespace

TEST_CASE("rotated QSTBC precodes each group by theta4 times the rotation") {
  const RealMatrix r = random_orthogonal(4);
  const TransmissionScheme s = make_qstbc_scheme(r);
  CHECK(s.name() == "4gp-qstbc8");
  CHECK(s.family() == SchemeFamily::Qstbc8);
  const RealMatrix p = theta4() * r;
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector d = random_complex_vector(8);
    const RealVector u = real_view(d);
    RealVector c = RealVector::Zero(16);
    for (int g = 0; g < 4; ++g) {
      const int slots[4] = {4 * g, 4 * g + 2, 4 * g + 1, 4 * g + 3};
      RealVector ug(4);
      for (int i = 0; i < 4; ++i) ug(i) = u(slots[i]);
      const RealVector cg = p * ug;
      for (int i = 0; i < 4; ++i) c(slots[i]) = cg(i);
    }
    CHECK((s.encode(d) - s.scale() * combine(qstbc_8(), c)).norm() < 1e-12);
  }
  REQUIRE(s.groups().size() == 4);
  CHECK(s.groups()[1][0] == Coordinate{2, false});
  CHECK(s.groups()[1][1] == Coordinate{3, false});
  CHECK(s.groups()[1][2] == Coordinate{2, true});
  CHECK(s.groups()[1][3] == Coordinate{3, true});
}

TEST_CASE("QSTBC with deleted columns") {
  const TransmissionScheme s = make_qstbc_scheme(RealMatrix::Identity(4, 4), kDefaultDeletedColumns);
  CHECK(s.name() == "4gp-qstbc6");
  CHECK(s.M() == 6);
  CHECK(s.T() == 8);
  CHECK(s.deleted_columns == kDefaultDeletedColumns);
  CHECK_THROWS_AS(make_qstbc_scheme(RealMatrix::Identity(3, 3)), ConfigError);
}

TEST_CASE("SAST precodes each complex vector by F^H R") {
  for (int M : {4, 6, 8}) {
    const int mbar = M / 2;
    const RealMatrix r = random_orthogonal(mbar);
    const ComplexMatrix u = dft_matrix(mbar).adjoint() * r.cast<cdouble>();
    for (bool four : {true, false}) {
      const TransmissionScheme s = make_sast_scheme(M, r, four);
      CHECK(s.name() == (four ? "4gp-sast" : "sast") + std::to_string(M) + (four ? "" : "-2gp"));
      CHECK(s.groups().size() == (four ? 4u : 2u));
      for (int trial = 0; trial < 5; ++trial) {
        const ComplexVector d = random_complex_vector(M);
        const ComplexVector v1 = u * d.head(mbar), v2 = u * d.tail(mbar);
        CHECK((s.encode(d) - s.scale() * sast_encode(v1, v2)).norm() < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(make_sast_scheme(5, RealMatrix::Identity(2, 2)), ConfigError);
  CHECK_THROWS_AS(make_sast_scheme(6, RealMatrix::Identity(2, 2)), ConfigError);
}

TEST_CASE("effective codes remain group decodable under any rotation") {
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<TransmissionScheme> schemes = {
        make_qstbc_scheme(random_orthogonal(4)),
        make_qstbc_scheme(random_orthogonal(4), {3, 7}),
        make_qstbc_scheme(random_orthogonal(4), {0, 5}),
        make_sast_scheme(4, random_orthogonal(2)),
        make_sast_scheme(6, random_orthogonal(3)),
        make_sast_scheme(8, random_orthogonal(4)),
        make_sast_scheme(6, random_orthogonal(3), false),
        make_generic_scheme(mdc_qstbc_4(), random_orthogonal(2)),
    };
    for (const auto& s : schemes) {
      CAPTURE(s.name());
      const GroupCheck g = verify_group_decodable(s.effective());
      CHECK(g.ok);
    }
  }
}

TEST_CASE("effective code reproduces encode") {
  const TransmissionScheme s = make_sast_scheme(6, random_orthogonal(3));
  const ComplexVector d = random_complex_vector(6);
  CHECK((s.encode(d) - s.scale() * combine(s.effective(), real_view(d))).norm() < 1e-12);
  CHECK_THROWS_AS(s.encode(random_complex_vector(5)), ConfigError);
}

TEST_CASE("generic scheme checks the rotation size") {
  CHECK_THROWS_AS(make_generic_scheme(mdc_qstbc_4(), RealMatrix::Identity(4, 4)), ConfigError);
  const TransmissionScheme s = make_generic_scheme(alamouti(), RealMatrix::Identity(2, 2));
  CHECK(s.family() == SchemeFamily::Generic);
  CHECK(s.data_symbols() == 2);
}
