#pragma once

// Figure and single-point runners. Each produces a Table whose CSV form is a
// pure function of the effective configuration: rows come out in grid order
// whatever the thread count, and nothing time- or host-dependent is recorded.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace illumina {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> comments; // written as "# ..." lines
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
};

/// 12 significant digits, shortest of fixed/scientific, locale independent.
std::string format_number(double v);

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed; // overrides optimizer.seed and mc.seed
};

inline const std::vector<std::string> kSubcommands{"fig2", "fig3", "fig4", "fig5", "fig6",
                                                   "bounds", "mc", "qfi", "snr"};

/// Dispatches on the subcommand name; throws ConfigError for unknown names.
Table run_experiment(const std::string& subcommand, ExperimentConfig cfg, const RunOptions& opts);

Table run_fig2(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_fig3(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_fig4(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_fig5(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_fig6(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_bounds(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_mc(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_qfi(const ExperimentConfig& cfg, const RunOptions& opts);
Table run_snr(const ExperimentConfig& cfg, const RunOptions& opts);

/// eta at which the balanced N-photon probe reaches `target` SNR (bisection).
double eta_for_snr(int n_total, double n_th, double target);

} // namespace illumina
