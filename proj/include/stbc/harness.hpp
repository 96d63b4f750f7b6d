// SPDX-License-Identifier: Apache-2.0
//
// Simulation plumbing behind the stbc-lab CLI: code/rotation factories,
// seeded Monte Carlo BER sweeps, PEP tables, decodability reports and the
// CSV/JSON formats they persist.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "stbc/analysis.hpp"
#include "stbc/detector.hpp"
#include "stbc/rotation.hpp"
#include "stbc/scheme.hpp"

namespace stbc {

struct StopRule {
  long min_errors = 400;
  long max_blocks = 10'000'000;
};

struct SimConfig {
  std::string code = "4gp-qstbc6";
  int N = 1;
  std::string constellation = "4qam";
  std::string rotation = "default";  // default | none | path to a rotation file
  std::string detector = "exhaustive";
  std::vector<double> snr_db;
  StopRule stop;
  std::uint64_t seed = 1;
  std::vector<int> deleted_columns;  // 1-based override for 4gp-qstbcK
  int workers = 1;
  long batch = 256;
  bool timing = true;
};

/// Throws ConfigError for an empty SNR list, nonpositive stop rule, batch or
/// worker count, or N < 1.
void validate(const SimConfig& config);

enum class StopReason { MinErrors, MaxBlocks };
const char* to_string(StopReason r);

struct BerRecord {
  std::string code;
  int M = 0;
  int N = 0;
  std::string constellation;
  std::string rotation;
  std::string detector;
  double snr_db = 0.0;
  long trials = 0;  // blocks
  long bit_errors = 0;
  double ber = 0.0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  StopReason stop = StopReason::MinErrors;
  long failed_blocks = 0;  // blocks whose channel was singular (counted as half the bits wrong)
  long bits_per_block = 0;
};

inline const char* kBerCsvHeader =
    "code,M,N,constellation,rotation,detector,snr_db,trials,bit_errors,ber,seed,wall_seconds";

/// Size of the per-group rotation a code name expects.
int rotation_dimension(const std::string& code);

/// `default`, `none`/`identity`, or a rotation file path.
RotationMatrix resolve_rotation(const std::string& source, const std::string& code);

/// Code names: alamouti, mdc-qstbc4, 4gp-qstbc8, 4gp-qstbc6 (or 4gp-qstbcK with
/// explicit deletions), 4gp-sastM and sastM-2gp for even M.
/// `deleted_columns` are 1-based.
TransmissionScheme make_scheme(const std::string& code, const RotationMatrix& rotation,
                               const std::vector<int>& deleted_columns = {});

struct Link {
  TransmissionScheme scheme;
  Constellation constellation;
  std::unique_ptr<BlockDetector> detector;
};

Link make_link(const SimConfig& config);

struct BlockOutcome {
  long bit_errors = 0;
  bool failed = false;
};

/// One block at linear SNR rho, drawn from the substream (seed, snr_index, block).
BlockOutcome simulate_block(const Link& link, int N, double rho, std::uint64_t seed,
                            std::uint64_t snr_index, std::uint64_t block);

/// Per SNR point, runs batches of blocks until the bit-error target or the
/// block limit is reached (checked at batch boundaries). Results depend only
/// on the configuration, not on the worker count.
std::vector<BerRecord> run_ber(const SimConfig& config,
                               const std::function<void(const BerRecord&)>& progress = {});

void write_ber_csv(std::ostream& out, const std::vector<BerRecord>& records, bool timing = true);

/// "a:b:step" (inclusive, step may be negative) or a comma list.
std::vector<double> parse_snr_list(const std::string& text);

/// 1-based comma list, e.g. "4,8".
std::vector<int> parse_int_list(const std::string& text);

struct PepRow {
  double rho_db = 0.0;
  RealVector beta;
  RealVector delta;
  double pep_exact = 0.0;
  AsymptoticPep pep_asymptotic;
};

/// Worst-case exact and asymptotic PEP per SNR for 4gp-qstbc8 or 4gp-sastM.
std::vector<PepRow> run_pep(const SimConfig& config);
void write_pep_csv(std::ostream& out, const std::vector<PepRow>& rows);

struct VerifyReport {
  std::string name;
  int T = 0;
  int M = 0;
  IndexGroups groups;
  GroupCheck check;
  CodeInfo info;
};

VerifyReport run_verify(const DispersionCode& code);
void write_verify_report(std::ostream& out, const VerifyReport& report);

/// JSON code file: {"name", "T", "M", "groups": [[real indices]],
/// "dispersion": [{"re": [[..]], "im": [[..]]}, ..]}.
DispersionCode load_code_file(const std::string& path);
void save_code_file(const std::string& path, const DispersionCode& code);

}  // namespace stbc
