#pragma once

#include "confbound_cli/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace confbound::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

/// Subcommand names in display order.
const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its files under config.out and a short
/// summary to `log`. Returns the process exit code; ConfigError propagates.
int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log);

int cmd_geom_check(const ExperimentConfig& config, std::ostream& log);
int cmd_spectrum(const ExperimentConfig& config, std::ostream& log);
int cmd_bound_scan(const ExperimentConfig& config, std::ostream& log);
int cmd_com(const ExperimentConfig& config, std::ostream& log);
int cmd_vfield(const ExperimentConfig& config, std::ostream& log);
int cmd_optimize(const ExperimentConfig& config, std::ostream& log);
int cmd_report(const ExperimentConfig& config, std::ostream& log);

/// printf("%.17g").
std::string format_number(double x);

/// Column names of the bound-scan CSV for dimension m.
std::vector<std::string> bound_scan_columns(int m);

}  // namespace confbound::cli
