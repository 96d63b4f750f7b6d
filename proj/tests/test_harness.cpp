// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stbc/harness.hpp"
#include "test_util.hpp"

using namespace stbc;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("stbc_harness_" + name)).string();
}

std::string csv(const std::vector<BerRecord>& r, bool timing = false) {
  std::ostringstream os;
  write_ber_csv(os, r, timing);
  return os.str();
}

ComplexMatrix right_circulant(const ComplexVector& s) {
  const auto m = s.size();
  ComplexMatrix c(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) c(i, k) = s((k - i + m) % m);
  }
  return c;
}

struct OracleBer {
  long blocks = 0;
  long errors = 0;
  double sum_sq = 0.0;  // per-block error count squares
};

// Straight-line 4-antenna SAST link with joint ML over all 4^4 symbol vectors.
OracleBer sast4_joint_ml(double snr_db, long blocks, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  auto cn = [&]() { return cdouble(normal(gen), normal(gen)); };
  const Constellation c = make_qam(4);
  const RealMatrix r = default_rotation(2).matrix();
  ComplexMatrix f(2, 2);
  f << 1, 1, 1, -1;
  f /= std::sqrt(2.0);
  const ComplexMatrix u = f.adjoint() * r.cast<cdouble>();
  const double rho = std::pow(10.0, snr_db / 10.0);
  auto code = [&](const std::array<int, 4>& lab) {
    ComplexVector d1(2), d2(2);
    d1 << c.point(lab[0]), c.point(lab[1]);
    d2 << c.point(lab[2]), c.point(lab[3]);
    const ComplexMatrix c1 = right_circulant(u * d1), c2 = right_circulant(u * d2);
    ComplexMatrix x(4, 4);
    x << c1, c2, -c2.adjoint(), c1.adjoint();
    return ComplexMatrix(x / 2.0);  // unit average energy per slot
  };
  std::vector<std::array<int, 4>> all;
  std::vector<ComplexMatrix> words;
  for (int a = 0; a < 256; ++a) {
    all.push_back({a >> 6, (a >> 4) & 3, (a >> 2) & 3, a & 3});
    words.push_back(code(all.back()));
  }
  OracleBer out;
  for (long b = 0; b < blocks; ++b) {
    const int sent = static_cast<int>(gen() % 256);
    ComplexVector h(4), z(4);
    for (int i = 0; i < 4; ++i) h(i) = cn();
    for (int i = 0; i < 4; ++i) z(i) = cn();
    const ComplexVector y = std::sqrt(rho) * words[static_cast<size_t>(sent)] * h + z;
    int best = 0;
    double best_metric = 1e300;
    for (int a = 0; a < 256; ++a) {
      const double m = (y - std::sqrt(rho) * words[static_cast<size_t>(a)] * h).squaredNorm();
      if (m < best_metric) {
        best_metric = m;
        best = a;
      }
    }
    const int e = std::popcount(static_cast<unsigned>(sent ^ best));
    out.errors += e;
    out.sum_sq += static_cast<double>(e) * e;
    ++out.blocks;
  }
  return out;
}

}  // namespace

TEST_CASE("SNR and integer list parsing") {
  CHECK(parse_snr_list("0:20:5") == std::vector<double>{0, 5, 10, 15, 20});
  CHECK(parse_snr_list("20:0:-10") == std::vector<double>{20, 10, 0});
  CHECK(parse_snr_list("1,2.5,-3") == std::vector<double>{1, 2.5, -3});
  CHECK(parse_snr_list("0:1:0.25").size() == 5);
  CHECK_THROWS_AS(parse_snr_list(""), ConfigError);
  CHECK_THROWS_AS(parse_snr_list("a:b:c"), ConfigError);
  CHECK_THROWS_AS(parse_snr_list("0:10:0"), ConfigError);
  CHECK_THROWS_AS(parse_snr_list("0:10:-1"), ConfigError);
  CHECK_THROWS_AS(parse_snr_list("0:10"), ConfigError);
  CHECK_THROWS_AS(parse_snr_list("5dB"), ConfigError);
  CHECK(parse_int_list("4,8") == std::vector<int>{4, 8});
  CHECK_THROWS_AS(parse_int_list("4;8"), ConfigError);
}

TEST_CASE("code names, rotation sizes and factories") {
  CHECK(rotation_dimension("4gp-qstbc8") == 4);
  CHECK(rotation_dimension("4gp-qstbc6") == 4);
  CHECK(rotation_dimension("4gp-sast6") == 3);
  CHECK(rotation_dimension("sast8-2gp") == 4);
  CHECK(rotation_dimension("mdc-qstbc4") == 2);
  for (const char* bad : {"qstbc8", "4gp-qstbc9", "4gp-sast5", "sast3-2gp", "4gp-sast"}) {
    CHECK_THROWS_AS(rotation_dimension(bad), ConfigError);
  }
  const TransmissionScheme q6 = make_scheme("4gp-qstbc6", resolve_rotation("default", "4gp-qstbc6"));
  CHECK(q6.M() == 6);
  CHECK(q6.deleted_columns == std::vector<int>{3, 7});
  const TransmissionScheme q6b = make_scheme("4gp-qstbc6", RotationMatrix::identity(4), {1, 5});
  CHECK(q6b.deleted_columns == std::vector<int>{0, 4});
  CHECK(make_scheme("4gp-qstbc7", RotationMatrix::identity(4), {2}).M() == 7);
  CHECK_THROWS_AS(make_scheme("4gp-qstbc7", RotationMatrix::identity(4)), ConfigError);
  CHECK_THROWS_AS(make_scheme("4gp-qstbc6", RotationMatrix::identity(4), {4, 4}), ConfigError);
  CHECK_THROWS_AS(make_scheme("4gp-qstbc6", RotationMatrix::identity(4), {0, 4}), ConfigError);
  CHECK_THROWS_AS(make_scheme("4gp-sast4", RotationMatrix::identity(2), {1}), ConfigError);
  CHECK(resolve_rotation("none", "4gp-sast8").matrix() == RealMatrix::Identity(4, 4));
  CHECK(resolve_rotation("default", "alamouti").matrix() == RealMatrix::Identity(2, 2));
  const std::string path = temp_path("rot3.txt");
  save_rotation(path, default_rotation(3));
  CHECK((resolve_rotation(path, "4gp-sast6").matrix() - default_rotation(3).matrix()).norm() < 1e-15);
  CHECK_THROWS_AS(resolve_rotation(path, "4gp-qstbc8"), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("configuration validation") {
  SimConfig c;
  c.snr_db = {10};
  CHECK_NOTHROW(validate(c));
  SimConfig e = c;
  e.snr_db.clear();
  CHECK_THROWS_AS(validate(e), ConfigError);
  e = c;
  e.N = 0;
  CHECK_THROWS_AS(validate(e), ConfigError);
  e = c;
  e.stop.min_errors = 0;
  CHECK_THROWS_AS(validate(e), ConfigError);
  e = c;
  e.workers = 0;
  CHECK_THROWS_AS(validate(e), ConfigError);
  e = c;
  e.constellation = "8qam-s";
  e.code = "4gp-sast4";
  CHECK_THROWS_AS(make_link(e), ConfigError);
  e = c;
  e.detector = "mmse";
  CHECK_THROWS_AS(make_link(e), ConfigError);
}

TEST_CASE("BER runs are deterministic and independent of the worker count") {
  SimConfig c;
  c.code = "4gp-sast6";
  c.snr_db = {4, 8};
  c.stop = {50, 3000};
  c.seed = 42;
  c.batch = 64;
  c.timing = false;
  const auto a = run_ber(c);
  const auto b = run_ber(c);
  CHECK(csv(a) == csv(b));
  SimConfig w = c;
  w.workers = 3;
  CHECK(csv(run_ber(w)) == csv(a));
  SimConfig s = c;
  s.seed = 43;
  CHECK(csv(run_ber(s)) != csv(a));
  REQUIRE(a.size() == 2);
  CHECK(a[0].bits_per_block == 12);
  CHECK(a[0].bit_errors >= 50);
  CHECK(a[0].stop == StopReason::MinErrors);
  CHECK(a[0].trials % 64 == 0);
  CHECK(a[0].ber == doctest::Approx(static_cast<double>(a[0].bit_errors) / (a[0].trials * 12.0)));
  CHECK(a[1].ber < a[0].ber);
  // Sphere and exhaustive detection give identical error counts.
  SimConfig sp = c;
  sp.detector = "sphere";
  const auto sr = run_ber(sp);
  CHECK(sr[0].bit_errors == a[0].bit_errors);
  CHECK(sr[1].bit_errors == a[1].bit_errors);
}

TEST_CASE("CSV layout") {
  SimConfig c;
  c.code = "4gp-qstbc6";
  c.snr_db = {60};
  c.stop = {1, 10000};
  c.batch = 1000;
  c.timing = false;
  const auto r = run_ber(c);
  REQUIRE(r.size() == 1);
  CHECK(r[0].bit_errors == 0);
  CHECK(r[0].trials == 10000);
  CHECK(r[0].stop == StopReason::MaxBlocks);
  CHECK(r[0].failed_blocks == 0);
  const std::string text = csv(r);
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "code,M,N,constellation,rotation,detector,snr_db,trials,bit_errors,ber,seed,wall_seconds");
  CHECK(row == "4gp-qstbc6,6,1,4qam,default,exhaustive,60,10000,0,0.000000e+00,1,0");
}

TEST_CASE("BER matches a straight-line joint ML simulation") {
  const long blocks = 6000;
  SimConfig c;
  c.code = "4gp-sast4";
  c.snr_db = {10};
  c.stop = {1L << 40, blocks};
  c.seed = 5;
  const BerRecord r = run_ber(c)[0];
  const OracleBer o = sast4_joint_ml(10.0, blocks, 99);
  const double bits = 8.0 * blocks;
  const double p1 = r.ber, p2 = o.errors / bits;
  // Per-block error counts are the independent samples.
  const double m2 = static_cast<double>(o.errors) / blocks;
  const double var_block = o.sum_sq / blocks - m2 * m2;
  const double se = std::sqrt(2.0 * var_block / blocks) / 8.0;
  MESSAGE("harness " << p1 << " oracle " << p2 << " se " << se);
  CHECK(o.errors > 100);
  CHECK(std::abs(p1 - p2) < 3.0 * se);
}

TEST_CASE("PEP tables") {
  SimConfig c;
  c.code = "4gp-qstbc8";
  c.snr_db = {10, 20, 30};
  const auto rows = run_pep(c);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.beta.size() == 4);
    CHECK(r.pep_exact > 0.0);
    CHECK(r.pep_exact < 0.5);
    CHECK_FALSE(r.pep_asymptotic.deficient);
    CHECK((r.beta - default_rotation(4).matrix() * r.delta).norm() < 1e-12);
  }
  CHECK(rows[2].pep_exact < rows[1].pep_exact);
  std::ostringstream os;
  write_pep_csv(os, rows);
  CHECK(os.str().rfind("rho_db,beta1,beta2,beta3,beta4,pep_exact,pep_asymptotic\n", 0) == 0);

  c.rotation = "none";
  const auto unrot = run_pep(c);
  CHECK(unrot[0].pep_asymptotic.deficient);
  std::ostringstream os2;
  write_pep_csv(os2, unrot);
  CHECK(os2.str().find("deficient") != std::string::npos);

  c.rotation = "default";
  c.code = "4gp-sast6";
  CHECK(run_pep(c)[0].beta.size() == 3);
  c.code = "4gp-qstbc6";
  CHECK_THROWS_AS(run_pep(c), ConfigError);
  c.code = "mdc-qstbc4";
  CHECK_THROWS_AS(run_pep(c), ConfigError);
}

TEST_CASE("verify reports and code files") {
  const DispersionCode f8 = qstbc_8();
  const VerifyReport r = run_verify(f8);
  CHECK(r.check.ok);
  CHECK(r.info.delay == 8);
  std::ostringstream os;
  write_verify_report(os, r);
  CHECK(os.str().find("group decodable: ok") != std::string::npos);
  CHECK(os.str().find("real group size: 4") != std::string::npos);

  const std::string path = temp_path("code.json");
  save_code_file(path, f8);
  const DispersionCode back = load_code_file(path);
  CHECK(back.groups == f8.groups);
  REQUIRE(back.real_symbols() == 16);
  for (int l = 0; l < 16; ++l) CHECK((back.dispersion[static_cast<size_t>(l)] - f8.dispersion[static_cast<size_t>(l)]).norm() == 0.0);

  DispersionCode broken = f8;
  broken.dispersion[0] += broken.dispersion[4];
  save_code_file(path, broken);
  const VerifyReport rb = run_verify(load_code_file(path));
  CHECK_FALSE(rb.check.ok);
  std::ostringstream os2;
  write_verify_report(os2, rb);
  CHECK(os2.str().find("FAILED") != std::string::npos);

  {
    std::ofstream out(path);
    out << "{\"T\": 2, \"M\": 2, \"groups\": [[0]], \"dispersion\": [";
  }
  CHECK_THROWS_AS(load_code_file(path), ConfigError);
  {
    std::ofstream out(path);
    out << R"({"T": 2, "M": 2, "groups": [[0]], "dispersion": [{"re": [[1, 0]], "im": [[0, 0]]}]})";
  }
  CHECK_THROWS_AS(load_code_file(path), ConfigError);
  CHECK_THROWS_AS(load_code_file(temp_path("absent.json")), ConfigError);
  std::filesystem::remove(path);
}
