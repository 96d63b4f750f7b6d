// SPDX-License-Identifier: Apache-2.0
//
// stbc-lab: BER sweeps, PEP tables, decodability checks and rotation design.
//
//   stbc-lab ber    --code 4gp-qstbc6 --constellation 4qam --snr-db 0:20:2 --out ber.csv
//   stbc-lab pep    --code 4gp-qstbc8 --snr-db 10:40:10
//   stbc-lab verify --code 4gp-sast6
//   stbc-lab rotate --dim 4 --constellation 4qam --out r4.txt
//
// Every subcommand accepts --config FILE with key=value lines naming the same
// options; flags given on the command line take precedence.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stbc/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Expands `--config FILE` into option tokens placed ahead of the explicit
// arguments, so explicit flags are parsed last and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::string path;
  std::vector<std::string> rest;
  for (size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw stbc::ConfigError("cannot open config file '" + path + "'");
  std::vector<std::string> out{args[0]};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw stbc::ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "no-timing") {
      if (value == "true" || value == "1") out.push_back("--no-timing");
      continue;
    }
    out.push_back("--" + key);
    out.push_back(value);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw stbc::ConfigError("cannot write '" + path + "'");
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const stbc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector

  CLI::App app{"Four-group decodable space-time block codes: simulation and analysis"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  stbc::SimConfig cfg;
  std::string snr = "0:20:2";
  std::string out_path;
  std::string delete_cols;
  bool no_timing = false;
  std::string config_unused;

  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", config_unused, "key=value file with the same options");
  };

  auto* ber = app.add_subcommand("ber", "Monte Carlo bit error rate sweep");
  add_common(ber);
  ber->add_option("--code", cfg.code, "code name")->capture_default_str();
  ber->add_option("--constellation", cfg.constellation, "4qam, 16qam, 8qam-r, 8qam-s")->capture_default_str();
  ber->add_option("--snr-db", snr, "a:b:step or comma list")->capture_default_str();
  ber->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  ber->add_option("--rotation", cfg.rotation, "default, none or a rotation file")->capture_default_str();
  ber->add_option("--detector", cfg.detector, "exhaustive or sphere")->capture_default_str();
  ber->add_option("--rx", cfg.N, "receive antennas")->capture_default_str();
  ber->add_option("--min-errors", cfg.stop.min_errors, "bit errors per point")->capture_default_str();
  ber->add_option("--max-blocks", cfg.stop.max_blocks, "block limit per point")->capture_default_str();
  ber->add_option("--delete-cols", delete_cols, "1-based columns removed from the 8-antenna code");
  ber->add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
  ber->add_option("--batch", cfg.batch, "blocks between stop checks")->capture_default_str();
  ber->add_flag("--no-timing", no_timing, "write wall_seconds as 0 for byte-identical output");
  ber->add_option("--out", out_path, "CSV output (stdout if omitted)");

  auto* pep = app.add_subcommand("pep", "worst-case pairwise error probability table");
  add_common(pep);
  std::string pep_code = "4gp-qstbc8";
  pep->add_option("--code", pep_code, "4gp-qstbc8 or 4gp-sastM")->capture_default_str();
  pep->add_option("--constellation", cfg.constellation)->capture_default_str();
  pep->add_option("--snr-db", snr, "a:b:step or comma list")->capture_default_str();
  pep->add_option("--rotation", cfg.rotation, "default, none or a rotation file")->capture_default_str();
  pep->add_option("--out", out_path, "CSV output (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "check group decodability of a code");
  add_common(verify);
  std::string verify_code;
  std::string code_file;
  std::string export_path;
  verify->add_option("--code", verify_code, "code name");
  verify->add_option("--code-file", code_file, "JSON code file");
  verify->add_option("--rotation", cfg.rotation, "default, none or a rotation file")->capture_default_str();
  verify->add_option("--delete-cols", delete_cols, "1-based columns removed from the 8-antenna code");
  verify->add_option("--export", export_path, "write the verified code as JSON");

  auto* rotate = app.add_subcommand("rotate", "optimize a rotation for minimum product distance");
  add_common(rotate);
  int dim = 4;
  stbc::OptimizerBudget budget;
  rotate->add_option("--dim", dim, "rotation size")->capture_default_str();
  rotate->add_option("--constellation", cfg.constellation)->capture_default_str();
  rotate->add_option("--budget", budget.evaluations, "objective evaluations")->capture_default_str();
  rotate->add_option("--seed", budget.seed, "random seed")->capture_default_str();
  rotate->add_option("--restart-length", budget.restart_length, "evaluations per restart")->capture_default_str();
  rotate->add_option("--out", out_path, "rotation file (stdout if omitted)");

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    std::ofstream file;
    if (ber->parsed()) {
      cfg.snr_db = stbc::parse_snr_list(snr);
      if (!delete_cols.empty()) cfg.deleted_columns = stbc::parse_int_list(delete_cols);
      cfg.timing = !no_timing;
      std::ostream& out = open_output(out_path, file);
      const auto records = stbc::run_ber(cfg, [](const stbc::BerRecord& r) {
        std::cerr << r.code << " snr=" << r.snr_db << " dB blocks=" << r.trials << " errors=" << r.bit_errors
                  << " ber=" << r.ber << " stop=" << stbc::to_string(r.stop);
        if (r.failed_blocks) std::cerr << " singular_blocks=" << r.failed_blocks;
        std::cerr << '\n';
      });
      stbc::write_ber_csv(out, records, cfg.timing);
    } else if (pep->parsed()) {
      cfg.code = pep_code;
      cfg.snr_db = stbc::parse_snr_list(snr);
      const auto rows = stbc::run_pep(cfg);
      stbc::write_pep_csv(open_output(out_path, file), rows);
    } else if (verify->parsed()) {
      if (verify_code.empty() == code_file.empty()) {
        throw stbc::ConfigError("verify needs exactly one of --code and --code-file");
      }
      stbc::DispersionCode code;
      if (!code_file.empty()) {
        code = stbc::load_code_file(code_file);
      } else {
        const auto cols = delete_cols.empty() ? std::vector<int>{} : stbc::parse_int_list(delete_cols);
        code = stbc::make_scheme(verify_code, stbc::resolve_rotation(cfg.rotation, verify_code), cols).effective();
      }
      stbc::write_verify_report(std::cout, stbc::run_verify(code));
      if (!export_path.empty()) stbc::save_code_file(export_path, code);
    } else if (rotate->parsed()) {
      const auto constellation = stbc::constellation_by_name(cfg.constellation);
      const auto result = stbc::optimize_rotation(dim, constellation, budget);
      std::cerr << "dp_min=" << result.dp_min << " evaluations=" << result.evaluations << '\n';
      if (out_path.empty() || out_path == "-") {
        const auto& r = result.rotation.matrix();
        std::cout << r.rows() << '\n' << std::setprecision(17);
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          for (Eigen::Index j = 0; j < r.cols(); ++j) std::cout << (j ? " " : "") << r(i, j);
          std::cout << '\n';
        }
      } else {
        stbc::save_rotation(out_path, result.rotation);
      }
    }
  } catch (const stbc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
