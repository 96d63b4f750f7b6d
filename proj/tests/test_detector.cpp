// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "stbc/channel.hpp"
#include "stbc/detector.hpp"
#include "stbc/rotation.hpp"
#include "test_util.hpp"

using namespace stbc;
using stbc::test::random_complex;
using stbc::test::random_complex_vector;
using stbc::test::random_orthogonal;

namespace {

ComplexVector draw_data(const Constellation& c, int K, RngStream& rng) {
  ComplexVector d(K);
  for (int k = 0; k < K; ++k) d(k) = c.point(static_cast<int>(rng.engine()() % static_cast<unsigned>(c.size())));
  return d;
}

struct Setup {
  TransmissionScheme scheme;
  const char* constellation;
};

std::vector<Setup> setups() {
  return {
      {make_qstbc_scheme(default_rotation(4).matrix()), "4qam"},
      {make_qstbc_scheme(default_rotation(4).matrix()), "16qam"},
      {make_qstbc_scheme(random_orthogonal(4), kDefaultDeletedColumns), "8qam-s"},
      {make_qstbc_scheme(default_rotation(4).matrix(), {0, 5}), "8qam-r"},
      {make_sast_scheme(4, default_rotation(2).matrix()), "16qam"},
      {make_sast_scheme(6, default_rotation(3).matrix()), "4qam"},
      {make_sast_scheme(8, default_rotation(4).matrix()), "8qam-r"},
      {make_sast_scheme(4, default_rotation(2).matrix(), false), "8qam-s"},
      {make_sast_scheme(6, random_orthogonal(3), false), "4qam"},
      {make_generic_scheme(mdc_qstbc_4(), default_rotation(2).matrix()), "16qam"},
      {make_generic_scheme(alamouti(), RealMatrix::Identity(2, 2)), "16qam"},
  };
}

}  // namespace

TEST_CASE("8-antenna equivalent channel linearizes the permuted code") {
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector x = random_complex_vector(8);
    const ComplexVector h = random_complex_vector(8);
    const ComplexVector y = qstbc_8_permuted(x) * h;
    ComplexVector yhat(8);
    yhat << y.head(4), y.tail(4).conjugate();
    const Qstbc8Equivalent eq = qstbc8_equivalent_channel(h);
    CHECK((eq.hbar * x - yhat).norm() < 1e-12);
    CHECK((eq.H1 - block_circulant4(h.head(4))).norm() == 0.0);
    CHECK((eq.H2 - block_circulant4(h.tail(4))).norm() == 0.0);
    const ComplexMatrix t = theta4().cast<cdouble>();
    const ComplexMatrix d1 = t * eq.H1 * t, d2 = t * eq.H2 * t;
    CHECK(off_diagonal_norm(d1) < 1e-12);
    CHECK((d1.diagonal() - eq.lambda1).norm() < 1e-12);
    CHECK((d2.diagonal() - eq.lambda2).norm() < 1e-12);
    // hbar^H hbar is block diagonal with two equal real blocks.
    const ComplexMatrix g = eq.hbar.adjoint() * eq.hbar;
    const RealVector spec = eq.lambda1.cwiseAbs2() + eq.lambda2.cwiseAbs2();
    const ComplexMatrix expect = (theta4() * spec.asDiagonal() * theta4()).cast<cdouble>();
    CHECK((g.topLeftCorner(4, 4) - expect).norm() < 1e-12);
    CHECK((g.bottomRightCorner(4, 4) - expect).norm() < 1e-12);
    CHECK(g.topRightCorner(4, 4).norm() < 1e-12);
  }
}

TEST_CASE("SAST equivalent channel linearizes the code") {
  for (int mbar = 1; mbar <= 5; ++mbar) {
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexVector s1 = random_complex_vector(mbar), s2 = random_complex_vector(mbar);
      const ComplexVector h1 = random_complex_vector(mbar), h2 = random_complex_vector(mbar);
      ComplexVector h(2 * mbar), s(2 * mbar);
      h << h1, h2;
      s << s1, s2;
      const ComplexVector y = sast_encode(s1, s2) * h;
      ComplexVector yhat(2 * mbar);
      yhat << pi_permute(y.head(mbar)), y.tail(mbar).conjugate();
      const SastEquivalent eq = sast_equivalent_channel(h1, h2);
      CHECK((eq.hbar * s - yhat).norm() < 1e-12);
      const ComplexMatrix f = dft_matrix(mbar);
      CHECK(((f * eq.H1 * f.adjoint()).diagonal() - eq.lambda1).norm() < 1e-12);
      const ComplexMatrix g = eq.hbar.adjoint() * eq.hbar;
      const RealVector spec = eq.lambda1.cwiseAbs2() + eq.lambda2.cwiseAbs2();
      const ComplexMatrix expect = f.adjoint() * spec.cast<cdouble>().asDiagonal() * f;
      CHECK((g.topLeftCorner(mbar, mbar) - expect).norm() < 1e-12);
      CHECK((g.bottomRightCorner(mbar, mbar) - expect).norm() < 1e-12);
      CHECK(g.topRightCorner(mbar, mbar).norm() < 1e-12);
    }
  }
}

TEST_CASE("noise-free blocks are detected exactly") {
  RngStream rng(11);
  for (const auto& st : setups()) {
    CAPTURE(st.scheme.name());
    CAPTURE(st.constellation);
    const Constellation c = constellation_by_name(st.constellation);
    for (auto strategy : {SearchStrategy::Exhaustive, SearchStrategy::Sphere}) {
      const auto det = make_detector(st.scheme, c, strategy);
      for (int N : {1, 2}) {
        for (int trial = 0; trial < 10; ++trial) {
          const ComplexVector d = draw_data(c, st.scheme.data_symbols(), rng);
          const ComplexMatrix H = sample_channel(st.scheme.M(), N, rng);
          const double rho = 10.0;
          const ComplexMatrix Y = std::sqrt(rho) * st.scheme.encode(d) * H;
          const DetectionResult r = det->detect(Y, H, rho);
          CHECK((r.symbols - d).norm() < 1e-9);
          for (int k = 0; k < d.size(); ++k) CHECK(c.point(r.labels[static_cast<size_t>(k)]) == r.symbols(k));
        }
      }
    }
  }
}

TEST_CASE("group observations follow the real model with noise variance one half") {
  RngStream rng(12);
  const Constellation c = make_qam(4);
  for (const auto& scheme : {make_qstbc_scheme(default_rotation(4).matrix(), kDefaultDeletedColumns),
                             make_sast_scheme(6, default_rotation(3).matrix()),
                             make_generic_scheme(mdc_qstbc_4(), default_rotation(2).matrix())}) {
    CAPTURE(scheme.name());
    const auto det = make_detector(scheme, c, SearchStrategy::Exhaustive);
    double sum = 0.0;
    long count = 0;
    for (int trial = 0; trial < 3000; ++trial) {
      const ComplexVector d = draw_data(c, scheme.data_symbols(), rng);
      const RealVector u = real_view(d);
      const ComplexMatrix H = sample_channel(scheme.M(), 1, rng);
      const double rho = 3.0;
      const ComplexMatrix Y = transmit(scheme.encode(d), H, rho, rng);
      const auto obs = det->front_end(Y, H, rho);
      REQUIRE(obs.size() == scheme.groups().size());
      for (size_t g = 0; g < obs.size(); ++g) {
        const auto& layout = scheme.groups()[g];
        RealVector ug(static_cast<Eigen::Index>(layout.size()));
        for (size_t i = 0; i < layout.size(); ++i) ug(static_cast<Eigen::Index>(i)) = u(layout[i].index());
        const RealVector n = obs[g].z - obs[g].generator * ug;
        sum += n.squaredNorm();
        count += n.size();
      }
    }
    CHECK(sum / count == doctest::Approx(0.5).epsilon(0.03));
  }
}

TEST_CASE("whitened noise has identity covariance") {
  RngStream rng(13);
  const Constellation c = make_qam(4);
  const Qstbc8Detector qd(make_qstbc_scheme(default_rotation(4).matrix()), c, SearchStrategy::Exhaustive);
  const SastDetector sd(make_sast_scheme(8, default_rotation(4).matrix()), c, SearchStrategy::Exhaustive);
  ComplexMatrix cq = ComplexMatrix::Zero(4, 4), cs = ComplexMatrix::Zero(4, 4);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix H = sample_channel(8, 2, rng);
    const ComplexMatrix Z = sample_noise(8, 2, rng);
    for (const auto& w : qd.whiten(Z, H).whitened) cq += w * w.adjoint();
    for (const auto& w : sd.whiten(Z, H).whitened) cs += w * w.adjoint();
  }
  cq /= 2.0 * trials;
  cs /= 2.0 * trials;
  CHECK((cq - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
  CHECK((cs - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("group detection agrees with joint ML") {
  RngStream rng(14);
  struct Case {
    TransmissionScheme scheme;
    const char* constellation;
    int blocks;
  };
  const std::vector<Case> cases = {
      {make_qstbc_scheme(default_rotation(4).matrix()), "4qam", 15},
      {make_qstbc_scheme(default_rotation(4).matrix(), kDefaultDeletedColumns), "4qam", 15},
      {make_sast_scheme(4, default_rotation(2).matrix()), "16qam", 15},
      {make_sast_scheme(6, default_rotation(3).matrix()), "4qam", 60},
      {make_sast_scheme(4, default_rotation(2).matrix(), false), "8qam-s", 60},
      {make_generic_scheme(mdc_qstbc_4(), default_rotation(2).matrix()), "16qam", 15},
      {make_generic_scheme(alamouti(), RealMatrix::Identity(2, 2)), "16qam", 200},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.scheme.name());
    const Constellation c = constellation_by_name(cs.constellation);
    const auto det = make_detector(cs.scheme, c, SearchStrategy::Sphere);
    int agree = 0;
    for (int b = 0; b < cs.blocks; ++b) {
      const ComplexVector d = draw_data(c, cs.scheme.data_symbols(), rng);
      const ComplexMatrix H = sample_channel(cs.scheme.M(), 1, rng);
      const double rho = db_to_linear(6.0);
      const ComplexMatrix Y = transmit(cs.scheme.encode(d), H, rho, rng);
      const DetectionResult g = det->detect(Y, H, rho);
      const DetectionResult j = joint_ml_oracle(cs.scheme, c, Y, H, rho);
      const double mg = joint_metric(cs.scheme, Y, H, rho, g.symbols);
      const double mj = joint_metric(cs.scheme, Y, H, rho, j.symbols);
      CHECK(mg <= mj + 1e-9 * (1.0 + mj));
      if ((g.symbols - j.symbols).norm() < 1e-9) ++agree;
    }
    CHECK(agree == cs.blocks);
  }
}

TEST_CASE("real model reproduces the received signal") {
  RngStream rng(15);
  const TransmissionScheme s = make_sast_scheme(6, default_rotation(3).matrix());
  const ComplexVector d = draw_data(make_qam(16), 6, rng);
  const ComplexMatrix H = sample_channel(6, 2, rng);
  const double rho = 5.0;
  const ComplexMatrix clean = std::sqrt(rho) * s.encode(d) * H;
  CHECK((real_model(s, H, rho) * real_view(d) - real_vec(clean)).norm() < 1e-12);
  const ComplexMatrix Y = clean + sample_noise(6, 2, rng);
  CHECK(joint_metric(s, Y, H, rho, d) == doctest::Approx((Y - clean).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("singular channels raise DetectionFailure") {
  const Constellation c = make_qam(4);
  for (const auto& scheme : {make_qstbc_scheme(default_rotation(4).matrix()),
                             make_sast_scheme(4, default_rotation(2).matrix()),
                             make_generic_scheme(mdc_qstbc_4(), default_rotation(2).matrix())}) {
    const auto det = make_detector(scheme, c, SearchStrategy::Exhaustive);
    const ComplexMatrix H = ComplexMatrix::Zero(scheme.M(), 1);
    const ComplexMatrix Y = random_complex(scheme.T(), 1);
    CHECK_THROWS_AS(det->detect(Y, H, 10.0), DetectionFailure);
  }
  // A deleted-column channel that only excites removed antennas is singular too.
  const auto det = make_detector(make_qstbc_scheme(default_rotation(4).matrix(), kDefaultDeletedColumns), c,
                                 SearchStrategy::Exhaustive);
  CHECK_THROWS_AS(det->detect(random_complex(8, 1), ComplexMatrix::Zero(6, 1), 1.0), DetectionFailure);
}

TEST_CASE("detectors reject mismatched shapes and families") {
  const Constellation c = make_qam(4);
  CHECK_THROWS_AS(SastDetector(make_qstbc_scheme(RealMatrix::Identity(4, 4)), c, SearchStrategy::Exhaustive),
                  ConfigError);
  CHECK_THROWS_AS(make_detector(make_sast_scheme(4, RealMatrix::Identity(2, 2)), make_8qam_s(),
                                SearchStrategy::Exhaustive),
                  ConfigError);
  const auto det = make_detector(make_qstbc_scheme(RealMatrix::Identity(4, 4)), c, SearchStrategy::Exhaustive);
  CHECK_THROWS_AS(det->detect(random_complex(4, 1), random_complex(8, 1), 1.0), ConfigError);
}
