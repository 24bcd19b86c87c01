#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdot/config.hpp"

namespace qdot::cli {

enum Exit { Ok = 0, ConfigError = 1, SolverError = 2 };

struct Options {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::string ab_grid;       ///< lo:hi:n, a list, or one value
  std::string E0;            ///< list or lo:hi:n (log spaced)
  std::string omega_rel;     ///< list or lo:hi:n
  std::optional<int> periods;
  std::optional<int> states;
  std::optional<int> store_every;
  bool no_selfpol = false;
  bool no_polarization = false;
  bool printed_eqs = false;
};

/// Values from "lo:hi:n" (evenly spaced, geometric when `log`), a comma list
/// or a single number. Throws Error(InvalidValue).
std::vector<double> parse_grid(const std::string& text, bool log = false);

/// Parses argv and runs one subcommand; returns the process exit code.
int run(int argc, const char* const* argv);

/// Runs a parsed command against a loaded configuration.
int run(const Options& opt, const Config& cfg);

}  // namespace qdot::cli
