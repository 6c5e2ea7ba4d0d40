// illumina command-line front end. Reads a TOML config, runs one subcommand
// through the C API and writes the resulting CSV.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
// 1 anything else (e.g. the output file cannot be written).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "illumina/illumina.h"

namespace {

int exit_code_for(il_status s) {
  switch (s) {
  case IL_OK: return 0;
  case IL_ERR_CONFIG:
  case IL_ERR_INVALID_ARGUMENT: return 2;
  case IL_ERR_NUMERICAL:
  case IL_ERR_TRUNCATION:
  case IL_ERR_DIMENSION: return 3;
  default: return 1;
  }
}

struct Args {
  std::string config;
  std::string out;
  int threads = 1;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum illumination figures of merit: QFI, SNR, error bounds"};
  app.set_version_flag("--version", std::string(il_version()));
  app.require_subcommand(1);

  const std::pair<const char*, const char*> commands[] = {
      {"fig2", "QFI ratio of the optimised 4PE state to two coherent references"},
      {"fig3", "QFI of optimised NPE, coherent and TMSV probes at equal signal energy"},
      {"fig4", "QFI gap between coherent and optimised NPE probes over N and n_th"},
      {"fig5", "signal-energy fraction of the QFI-optimal NPE state"},
      {"fig6", "SNR of the SNR-optimised NPE state and the matched coherent state"},
      {"bounds", "QFI, fidelity, Helstrom and Chernoff error bounds"},
      {"mc", "Monte Carlo threshold detection against the Gaussian error scaling"},
      {"qfi", "QFI of a single probe"},
      {"snr", "number-difference SNR of a single probe"},
  };
  Args args;
  std::optional<std::uint64_t> seed;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "TOML configuration file")->required();
    sub->add_option("--out", args.out, "output CSV path (default: stdout)");
    sub->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { seed = s; }, "override every configured seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  std::ifstream in(args.config, std::ios::binary);
  if (!in) {
    std::cerr << "illumina: cannot read config file '" << args.config << "'\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  il_run_options opts{args.threads, seed.has_value() ? 1 : 0, seed.value_or(0)};
  il_table* table = nullptr;
  const il_status st = il_run_experiment(cmd.c_str(), text.str().c_str(), &opts, &table);
  if (st != IL_OK) {
    std::cerr << "illumina " << cmd << ": " << il_status_string(st) << ": " << il_last_error() << "\n";
    return exit_code_for(st);
  }

  const char* csv = nullptr;
  size_t len = 0;
  il_table_csv(table, &csv, &len);
  int rc = 0;
  if (args.out.empty()) {
    std::cout.write(csv, static_cast<std::streamsize>(len));
    std::cout.flush();
    if (!std::cout) rc = 1;
  } else {
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    out.write(csv, static_cast<std::streamsize>(len));
    if (!out) {
      std::cerr << "illumina: cannot write '" << args.out << "'\n";
      rc = 1;
    }
  }
  il_table_free(table);
  return rc;
}
