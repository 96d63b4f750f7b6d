// SPDX-License-Identifier: Apache-2.0

#include "stbc/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace stbc {

namespace {

struct CodeName {
  enum Kind { Alamouti, Mdc4, Qstbc, Sast4, Sast2 } kind;
  int M = 0;
};

CodeName parse_code(const std::string& code) {
  std::smatch m;
  if (code == "alamouti") return {CodeName::Alamouti, 2};
  if (code == "mdc-qstbc4") return {CodeName::Mdc4, 4};
  if (std::regex_match(code, m, std::regex(R"(4gp-qstbc([5-8]))"))) return {CodeName::Qstbc, std::stoi(m[1])};
  if (std::regex_match(code, m, std::regex(R"(4gp-sast(\d+))"))) {
    const int M = std::stoi(m[1]);
    if (M >= 2 && M % 2 == 0 && M <= 32) return {CodeName::Sast4, M};
  }
  if (std::regex_match(code, m, std::regex(R"(sast(\d+)-2gp)"))) {
    const int M = std::stoi(m[1]);
    if (M >= 2 && M % 2 == 0 && M <= 32) return {CodeName::Sast2, M};
  }
  throw ConfigError("unknown code '" + code +
                    "' (alamouti, mdc-qstbc4, 4gp-qstbc8, 4gp-qstbc6, 4gp-sastM, sastM-2gp with even M)");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double v, int precision, bool scientific) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  if (scientific) os << std::scientific;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string format_snr(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

void validate(const SimConfig& c) {
  if (c.snr_db.empty()) throw ConfigError("SNR list is empty");
  if (c.stop.min_errors < 1 || c.stop.max_blocks < 1) throw ConfigError("stop rule limits must be positive");
  if (c.N < 1) throw ConfigError("receive antenna count must be positive");
  if (c.workers < 1) throw ConfigError("worker count must be positive");
  if (c.batch < 1) throw ConfigError("batch size must be positive");
}

const char* to_string(StopReason r) { return r == StopReason::MinErrors ? "min_errors" : "max_blocks"; }

int rotation_dimension(const std::string& code) {
  const CodeName c = parse_code(code);
  switch (c.kind) {
    case CodeName::Alamouti:
    case CodeName::Mdc4:
      return 2;
    case CodeName::Qstbc:
      return 4;
    case CodeName::Sast4:
    case CodeName::Sast2:
      return c.M / 2;
  }
  return 0;
}

RotationMatrix resolve_rotation(const std::string& source, const std::string& code) {
  const int m = rotation_dimension(code);
  if (source == "none" || source == "identity") return RotationMatrix::identity(m);
  if (source == "default") {
    // Single-symbol groups of the orthogonal design need no rotation.
    if (parse_code(code).kind == CodeName::Alamouti) return RotationMatrix::identity(m);
    return default_rotation(m);
  }
  RotationMatrix r = load_rotation(source);
  if (r.dim() != m) {
    throw ConfigError("rotation file '" + source + "' is " + std::to_string(r.dim()) + "x" +
                      std::to_string(r.dim()) + "; code " + code + " needs " + std::to_string(m));
  }
  return r;
}

TransmissionScheme make_scheme(const std::string& code, const RotationMatrix& rotation,
                               const std::vector<int>& deleted_columns) {
  const CodeName c = parse_code(code);
  if (!deleted_columns.empty() && c.kind != CodeName::Qstbc) {
    throw ConfigError("column deletion applies to 4gp-qstbcK codes only");
  }
  switch (c.kind) {
    case CodeName::Alamouti:
      return make_generic_scheme(alamouti(), rotation.matrix());
    case CodeName::Mdc4:
      return make_generic_scheme(mdc_qstbc_4(), rotation.matrix());
    case CodeName::Qstbc: {
      std::vector<int> cols;
      for (int k : deleted_columns) {
        if (k < 1 || k > 8) throw ConfigError("deleted column " + std::to_string(k) + " outside 1..8");
        cols.push_back(k - 1);
      }
      std::sort(cols.begin(), cols.end());
      if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) {
        throw ConfigError("deleted columns must be distinct");
      }
      if (cols.empty() && c.M == 6) cols = kDefaultDeletedColumns;
      if (static_cast<int>(cols.size()) != 8 - c.M) {
        throw ConfigError(code + " needs " + std::to_string(8 - c.M) + " deleted columns");
      }
      return make_qstbc_scheme(rotation.matrix(), cols);
    }
    case CodeName::Sast4:
      return make_sast_scheme(c.M, rotation.matrix(), true);
    case CodeName::Sast2:
      return make_sast_scheme(c.M, rotation.matrix(), false);
  }
  throw ConfigError("unknown code '" + code + "'");
}

Link make_link(const SimConfig& config) {
  validate(config);
  TransmissionScheme scheme =
      make_scheme(config.code, resolve_rotation(config.rotation, config.code), config.deleted_columns);
  Constellation constellation = constellation_by_name(config.constellation);
  auto detector = make_detector(scheme, constellation, search_strategy_by_name(config.detector));
  return Link{std::move(scheme), std::move(constellation), std::move(detector)};
}

BlockOutcome simulate_block(const Link& link, int N, double rho, std::uint64_t seed,
                            std::uint64_t snr_index, std::uint64_t block) {
  RngStream rng(seed, snr_index, block);
  const int K = link.scheme.data_symbols();
  const int Q = link.constellation.size();
  std::vector<int> labels(static_cast<size_t>(K));
  ComplexVector data(K);
  for (int k = 0; k < K; ++k) {
    labels[static_cast<size_t>(k)] = static_cast<int>(rng.engine()() % static_cast<unsigned>(Q));
    data(k) = link.constellation.point(labels[static_cast<size_t>(k)]);
  }
  const ComplexMatrix H = sample_channel(link.scheme.M(), N, rng);
  const ComplexMatrix Y = transmit(link.scheme.encode(data), H, rho, rng);
  BlockOutcome out;
  try {
    const DetectionResult r = link.detector->detect(Y, H, rho);
    for (int k = 0; k < K; ++k) {
      out.bit_errors += std::popcount(static_cast<unsigned>(labels[static_cast<size_t>(k)] ^
                                                            r.labels[static_cast<size_t>(k)]));
    }
  } catch (const DetectionFailure&) {
    out.failed = true;
    out.bit_errors = K * link.constellation.bits_per_symbol() / 2;
  }
  return out;
}

std::vector<BerRecord> run_ber(const SimConfig& config,
                               const std::function<void(const BerRecord&)>& progress) {
  const Link link = make_link(config);
  const long bits_per_block = static_cast<long>(link.scheme.data_symbols()) * link.constellation.bits_per_symbol();
  std::vector<BerRecord> out;
  for (size_t si = 0; si < config.snr_db.size(); ++si) {
    const double rho = db_to_linear(config.snr_db[si]);
    const auto t0 = std::chrono::steady_clock::now();
    long blocks = 0, errors = 0, failed = 0;
    StopReason reason = StopReason::MaxBlocks;
    while (true) {
      if (errors >= config.stop.min_errors) {
        reason = StopReason::MinErrors;
        break;
      }
      if (blocks >= config.stop.max_blocks) {
        reason = StopReason::MaxBlocks;
        break;
      }
      const long n = std::min(config.batch, config.stop.max_blocks - blocks);
      const int workers = static_cast<int>(std::min<long>(config.workers, n));
      std::vector<long> err(static_cast<size_t>(workers), 0), fail(static_cast<size_t>(workers), 0);
      auto work = [&](int w) {
        for (long b = w; b < n; b += workers) {
          const BlockOutcome o = simulate_block(link, config.N, rho, config.seed, si,
                                                static_cast<std::uint64_t>(blocks + b));
          err[static_cast<size_t>(w)] += o.bit_errors;
          fail[static_cast<size_t>(w)] += o.failed ? 1 : 0;
        }
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (int w = 0; w < workers; ++w) {
        errors += err[static_cast<size_t>(w)];
        failed += fail[static_cast<size_t>(w)];
      }
      blocks += n;
    }
    BerRecord r;
    r.code = config.code;
    r.M = link.scheme.M();
    r.N = config.N;
    r.constellation = config.constellation;
    r.rotation = config.rotation;
    r.detector = config.detector;
    r.snr_db = config.snr_db[si];
    r.trials = blocks;
    r.bit_errors = errors;
    r.ber = static_cast<double>(errors) / (static_cast<double>(blocks) * static_cast<double>(bits_per_block));
    r.seed = config.seed;
    r.wall_seconds = config.timing
                         ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                         : 0.0;
    r.stop = reason;
    r.failed_blocks = failed;
    r.bits_per_block = bits_per_block;
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

void write_ber_csv(std::ostream& out, const std::vector<BerRecord>& records, bool timing) {
  out << kBerCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.code) << ',' << r.M << ',' << r.N << ',' << csv_field(r.constellation) << ','
        << csv_field(r.rotation) << ',' << csv_field(r.detector) << ',' << format_snr(r.snr_db) << ','
        << r.trials << ',' << r.bit_errors << ',' << format_double(r.ber, 6, true) << ',' << r.seed << ','
        << (timing ? format_double(r.wall_seconds, 3, false) : std::string("0")) << '\n';
  }
}

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != s.size() || !std::isfinite(v)) throw ConfigError("bad SNR value '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("SNR range must be a:b:step");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (step == 0.0 || (b - a) / step < 0.0) throw ConfigError("SNR range step does not reach the end point");
    const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 10000) throw ConfigError("SNR range has too many points");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(number(p));
  }
  if (out.empty()) throw ConfigError("SNR list is empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) {
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(p, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != p.size()) throw ConfigError("bad integer '" + p + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<PepRow> run_pep(const SimConfig& config) {
  validate(config);
  const CodeName c = parse_code(config.code);
  if (c.kind != CodeName::Qstbc && c.kind != CodeName::Sast4) {
    throw ConfigError("closed-form PEP is available for 4gp-qstbc8 and 4gp-sastM");
  }
  if (c.kind == CodeName::Qstbc && c.M != 8) {
    throw ConfigError("closed-form PEP assumes all 8 antennas of 4gp-qstbc8");
  }
  const RotationMatrix rotation = resolve_rotation(config.rotation, config.code);
  const TransmissionScheme scheme = make_scheme(config.code, rotation);
  const Constellation constellation = constellation_by_name(config.constellation);
  // Distinct group alphabets (real and imaginary groups differ for rectangular QAM).
  std::vector<DifferenceSet> sets;
  for (const auto& layout : scheme.groups()) {
    DifferenceSet d = difference_set(constellation, layout);
    const bool seen = std::any_of(sets.begin(), sets.end(), [&](const DifferenceSet& e) {
      return e.unnormalized.cols() == d.unnormalized.cols() && e.unnormalized == d.unnormalized;
    });
    if (!seen) sets.push_back(std::move(d));
  }
  // beta = Theta * (Theta R) delta = R delta for both families.
  const RealMatrix& effective = rotation.matrix();
  std::vector<PepRow> rows;
  for (double db : config.snr_db) {
    const double rho = db_to_linear(db);
    WorstCasePep worst;
    worst.pep = -1.0;
    for (const auto& d : sets) {
      WorstCasePep w = worst_case_pep(d, effective, rho);
      if (w.pep > worst.pep) worst = std::move(w);
    }
    PepRow row;
    row.rho_db = db;
    row.beta = worst.beta;
    row.delta = worst.delta;
    row.pep_exact = worst.pep;
    row.pep_asymptotic =
        c.kind == CodeName::Qstbc ? pep_asymptotic_qstbc(worst.beta, rho) : pep_asymptotic(worst.beta, rho);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_pep_csv(std::ostream& out, const std::vector<PepRow>& rows) {
  const Eigen::Index m = rows.empty() ? 0 : rows.front().beta.size();
  out << "rho_db";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",beta" << i;
  out << ",pep_exact,pep_asymptotic\n";
  for (const auto& r : rows) {
    out << format_snr(r.rho_db);
    for (Eigen::Index i = 0; i < r.beta.size(); ++i) out << ',' << format_double(r.beta(i), 12, true);
    out << ',' << format_double(r.pep_exact, 10, true) << ','
        << (r.pep_asymptotic.deficient ? std::string("deficient")
                                       : format_double(r.pep_asymptotic.value, 10, true))
        << '\n';
  }
}

VerifyReport run_verify(const DispersionCode& code) {
  validate(code);
  VerifyReport r;
  r.name = code.name;
  r.T = code.T;
  r.M = code.M;
  r.groups = code.groups;
  r.check = verify_group_decodable(code);
  r.info = code_info(code);
  return r;
}

void write_verify_report(std::ostream& out, const VerifyReport& r) {
  out << "code: " << r.name << '\n';
  out << "T x M: " << r.T << " x " << r.M << '\n';
  out << "groups (real symbol indices):";
  for (const auto& g : r.groups) {
    out << " {";
    for (size_t i = 0; i < g.size(); ++i) out << (i ? "," : "") << g[i];
    out << '}';
  }
  out << '\n';
  out << "max cross-group violation: " << format_double(r.check.max_violation, 3, true) << '\n';
  out << "group decodable: " << (r.check.ok ? "ok" : "FAILED") << '\n';
  out << "rate: " << format_snr(r.info.rate) << '\n';
  out << "delay: " << r.info.delay << '\n';
  out << "real group size: " << r.info.real_group_size << '\n';
}

DispersionCode load_code_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open code file '" + path + "'");
  DispersionCode code;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    code.name = j.value("name", std::string("file"));
    code.T = j.at("T").get<int>();
    code.M = j.at("M").get<int>();
    code.groups = j.at("groups").get<IndexGroups>();
    for (const auto& d : j.at("dispersion")) {
      const auto re = d.at("re").get<std::vector<std::vector<double>>>();
      const auto im = d.at("im").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(re.size()) != code.T || static_cast<int>(im.size()) != code.T) {
        throw ConfigError("code file '" + path + "': dispersion matrix has the wrong row count");
      }
      ComplexMatrix c(code.T, code.M);
      for (int t = 0; t < code.T; ++t) {
        if (static_cast<int>(re[static_cast<size_t>(t)].size()) != code.M ||
            static_cast<int>(im[static_cast<size_t>(t)].size()) != code.M) {
          throw ConfigError("code file '" + path + "': dispersion matrix has the wrong column count");
        }
        for (int k = 0; k < code.M; ++k) {
          c(t, k) = cdouble(re[static_cast<size_t>(t)][static_cast<size_t>(k)],
                            im[static_cast<size_t>(t)][static_cast<size_t>(k)]);
        }
      }
      code.dispersion.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("code file '" + path + "': " + e.what());
  }
  validate(code);
  return code;
}

void save_code_file(const std::string& path, const DispersionCode& code) {
  nlohmann::json j;
  j["name"] = code.name;
  j["T"] = code.T;
  j["M"] = code.M;
  j["groups"] = code.groups;
  nlohmann::json disp = nlohmann::json::array();
  for (const auto& c : code.dispersion) {
    std::vector<std::vector<double>> re(static_cast<size_t>(c.rows())), im(static_cast<size_t>(c.rows()));
    for (Eigen::Index t = 0; t < c.rows(); ++t) {
      for (Eigen::Index k = 0; k < c.cols(); ++k) {
        re[static_cast<size_t>(t)].push_back(c(t, k).real());
        im[static_cast<size_t>(t)].push_back(c(t, k).imag());
      }
    }
    disp.push_back({{"re", re}, {"im", im}});
  }
  j["dispersion"] = disp;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write code file '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace stbc
