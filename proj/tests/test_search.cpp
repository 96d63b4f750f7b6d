// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>

#include "doctest.h"
#include "stbc/constellation.hpp"
#include "stbc/scheme.hpp"
#include "stbc/search.hpp"
#include "test_util.hpp"

using namespace stbc;

namespace {

// Candidate vectors of a layout, built directly from the constellation points.
std::vector<RealVector> oracle_candidates(const GroupLayout& layout, const Constellation& c) {
  std::map<int, std::vector<int>> pos;  // symbol -> positions in layout order
  std::vector<int> order;
  for (size_t i = 0; i < layout.size(); ++i) {
    if (!pos.count(layout[i].symbol)) order.push_back(layout[i].symbol);
    pos[layout[i].symbol].push_back(static_cast<int>(i));
  }
  std::vector<RealVector> out = {RealVector::Zero(static_cast<Eigen::Index>(layout.size()))};
  for (int sym : order) {
    const auto& p = pos[sym];
    std::vector<std::vector<double>> values;
    if (p.size() == 2) {
      for (cdouble z : c.points()) {
        const double re = z.real(), im = z.imag();
        values.push_back(layout[static_cast<size_t>(p[0])].imag ? std::vector<double>{im, re}
                                                                : std::vector<double>{re, im});
      }
    } else {
      std::set<long long> seen;
      for (cdouble z : c.points()) {
        const double v = layout[static_cast<size_t>(p[0])].imag ? z.imag() : z.real();
        if (seen.insert(std::llround(v * 1e9)).second) values.push_back({v});
      }
    }
    std::vector<RealVector> next;
    for (const auto& base : out) {
      for (const auto& v : values) {
        RealVector u = base;
        for (size_t k = 0; k < p.size(); ++k) u(p[k]) = v[k];
        next.push_back(u);
      }
    }
    out = std::move(next);
  }
  return out;
}

double oracle_min(const std::vector<RealVector>& cands, const RealMatrix& B, const RealVector& z) {
  double best = 1e300;
  for (const auto& u : cands) best = std::min(best, (z - B * u).squaredNorm());
  return best;
}

struct Case {
  GroupLayout layout;
  const char* constellation;
};

std::vector<Case> cases() {
  const GroupLayout qstbc = {{0, false}, {1, false}, {0, true}, {1, true}};
  const GroupLayout pam3 = {{0, false}, {1, false}, {2, false}};
  const GroupLayout mixed = {{0, false}, {1, false}, {1, true}};
  const GroupLayout pairs = {{0, false}, {0, true}, {1, false}, {1, true}};
  return {{qstbc, "4qam"}, {qstbc, "16qam"}, {qstbc, "8qam-r"}, {qstbc, "8qam-s"},
          {pam3, "4qam"},  {pam3, "16qam"},  {pam3, "8qam-r"},  {mixed, "16qam"},
          {pairs, "8qam-s"}, {pairs, "16qam"}};
}

}  // namespace

TEST_CASE("search space size and candidates match a direct enumeration") {
  for (const auto& cs : cases()) {
    const Constellation c = constellation_by_name(cs.constellation);
    const SearchSpace space = make_search_space(cs.layout, c);
    const auto oracle = oracle_candidates(cs.layout, c);
    CHECK(space.size() == static_cast<long>(oracle.size()));
    const RealMatrix all = space.all();
    std::set<std::vector<long long>> a, b;
    for (Eigen::Index j = 0; j < all.cols(); ++j) {
      std::vector<long long> k;
      for (Eigen::Index i = 0; i < all.rows(); ++i) k.push_back(std::llround(all(i, j) * 1e9));
      a.insert(k);
      CHECK((space.vector(j) - all.col(j)).norm() == 0.0);
    }
    for (const auto& u : oracle) {
      std::vector<long long> k;
      for (Eigen::Index i = 0; i < u.size(); ++i) k.push_back(std::llround(u(i) * 1e9));
      b.insert(k);
    }
    CHECK(a == b);
  }
}

TEST_CASE("exhaustive and sphere searches find the brute-force minimum") {
  for (const auto& cs : cases()) {
    CAPTURE(cs.constellation);
    const Constellation c = constellation_by_name(cs.constellation);
    const SearchSpace space = make_search_space(cs.layout, c);
    const ExhaustiveSearch ex(space);
    const SphereSearch sp(space);
    const auto oracle = oracle_candidates(cs.layout, c);
    const auto n = static_cast<Eigen::Index>(cs.layout.size());
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index rows = n + (trial % 3);
      const RealMatrix B = test::random_real(rows, n);
      const RealVector u0 = oracle[static_cast<size_t>(trial) % oracle.size()];
      const RealVector z = B * u0 + 0.3 * test::random_real_vector(rows);
      const double best = oracle_min(oracle, B, z);
      const SearchResult re = ex.run(B, z);
      const SearchResult rs = sp.run(B, z);
      CHECK(re.metric == doctest::Approx(best).epsilon(1e-10));
      CHECK(rs.metric == doctest::Approx(best).epsilon(1e-10));
      CHECK(re.metric == doctest::Approx((z - B * re.u).squaredNorm()).epsilon(1e-10));
      CHECK(rs.metric == doctest::Approx((z - B * rs.u).squaredNorm()).epsilon(1e-10));
      CHECK((re.u - rs.u).norm() < 1e-9);
    }
  }
}

TEST_CASE("noise-free observations are recovered exactly") {
  const GroupLayout qstbc = {{0, false}, {1, false}, {0, true}, {1, true}};
  const Constellation c = make_qam(16);
  const SearchSpace space = make_search_space(qstbc, c);
  const SphereSearch sp(space);
  const ExhaustiveSearch ex(space);
  for (long idx = 0; idx < space.size(); idx += 17) {
    const RealMatrix B = test::random_real(4, 4);
    const RealVector u = space.vector(idx);
    const RealVector z = B * u;
    CHECK((sp.run(B, z).u - u).norm() < 1e-12);
    CHECK((ex.run(B, z).u - u).norm() < 1e-12);
  }
}

TEST_CASE("splitting a non-Cartesian symbol across groups is rejected") {
  const GroupLayout split = {{0, false}, {1, false}};
  CHECK_THROWS_AS(make_search_space(split, make_8qam_s()), ConfigError);
  const GroupLayout repeated = {{0, false}, {0, false}};
  CHECK_THROWS_AS(make_search_space(repeated, make_qam(4)), ConfigError);
}

TEST_CASE("strategy names") {
  CHECK(search_strategy_by_name("exhaustive") == SearchStrategy::Exhaustive);
  CHECK(search_strategy_by_name("sphere") == SearchStrategy::Sphere);
  CHECK(std::string(to_string(SearchStrategy::Sphere)) == "sphere");
  CHECK_THROWS_AS(search_strategy_by_name("zf"), ConfigError);
}
